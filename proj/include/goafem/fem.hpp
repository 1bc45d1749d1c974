#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "goafem/geometry.hpp"
#include "goafem/lagrange.hpp"
#include "goafem/mesh.hpp"

namespace goafem {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Vec2(const Point&)>;
using MatrixField = std::function<Mat2(const Point&)>;

enum class Problem { Primal, Dual };

/// Coefficients of -div(A grad u) + b.grad u + c u = f - div(f_vec) and the
/// goal G(v) = int g v + g_vec.grad v. Divergences are supplied, never
/// differentiated numerically. Homogeneous Dirichlet data on the mesh's
/// Dirichlet edges, homogeneous natural conditions on Neumann edges.
struct ProblemData {
  MatrixField diffusion = [](const Point&) { return Mat2::Identity().eval(); };
  /// (div A)_j = sum_i d_i A_ij; zero for constant A.
  VectorField diffusion_divergence = [](const Point&) { return Vec2::Zero().eval(); };
  VectorField convection = [](const Point&) { return Vec2::Zero().eval(); };
  ScalarField convection_divergence = [](const Point&) { return 0.0; };
  ScalarField reaction = [](const Point&) { return 0.0; };
  ScalarField f = [](const Point&) { return 0.0; };
  VectorField f_vec = [](const Point&) { return Vec2::Zero().eval(); };
  ScalarField f_vec_divergence = [](const Point&) { return 0.0; };
  ScalarField g = [](const Point&) { return 0.0; };
  VectorField g_vec = [](const Point&) { return Vec2::Zero().eval(); };
  ScalarField g_vec_divergence = [](const Point&) { return 0.0; };
};

/// Lagrange P_p space on a triangulation. Global nodes: vertices, then p-1
/// nodes per edge (ordered from the lower to the higher vertex id), then
/// element-interior nodes. Degrees of freedom are the nodes off the
/// Dirichlet boundary, numbered in node order.
class FeSpace {
public:
  FeSpace(std::shared_ptr<const Triangulation> mesh, int degree);

  int degree() const { return degree_; }
  const Triangulation& mesh() const { return *mesh_; }
  const std::shared_ptr<const Triangulation>& mesh_ptr() const { return mesh_; }
  const ReferenceElement& reference() const { return *reference_; }

  std::size_t dim() const { return dof_nodes_.size(); }
  std::size_t num_nodes() const { return node_points_.size(); }
  int nodes_per_element() const { return reference_->num_basis(); }

  std::span<const int> element_nodes(int t) const
  {
    return {element_nodes_.data() + static_cast<std::size_t>(t) * nodes_per_element(),
            static_cast<std::size_t>(nodes_per_element())};
  }
  /// Free dof of a node, or -1 on the Dirichlet boundary.
  int node_dof(int node) const { return node_dof_[node]; }
  int dof_node(int dof) const { return dof_nodes_[dof]; }
  const Point& node_point(int node) const { return node_points_[node]; }

private:
  std::shared_ptr<const Triangulation> mesh_;
  int degree_;
  const ReferenceElement* reference_;
  std::vector<int> element_nodes_;
  std::vector<int> node_dof_;
  std::vector<int> dof_nodes_;
  std::vector<Point> node_points_;
};

std::shared_ptr<const FeSpace> build_space(std::shared_ptr<const Triangulation> mesh, int degree);

/// Coefficient vector over the free dofs of a space.
struct DiscreteFunction {
  std::shared_ptr<const FeSpace> space;
  Vector coefficients;
};

/// Affine map of a triangle: x = v0 + J xi.
struct ElementMap {
  Point origin;
  Mat2 jacobian;
  Mat2 inverse;
  double det;

  ElementMap(const Triangulation& mesh, int t);
  Point to_physical(const Point& ref) const { return origin + jacobian * ref; }
  Point to_reference(const Point& x) const { return inverse * (x - origin); }
};

/// Quadrature degree used for all element integrals.
inline int quadrature_degree(int p) { return 2 * p + 2; }

/// B_ij = b(phi_j, phi_i), A_ij = a(phi_j, phi_i) over free dofs, with loads
/// F_i = F(phi_i) and G_i = G(phi_i). The dual system is B^T.
struct AssembledSystem {
  std::shared_ptr<const FeSpace> space;
  SparseMatrix B;
  SparseMatrix A_sym;
  Vector F;
  Vector G;

  std::size_t dim() const { return static_cast<std::size_t>(F.size()); }
};

AssembledSystem assemble(std::shared_ptr<const FeSpace> space, const ProblemData& problem);

/// sqrt(v^T A_sym v). Throws std::invalid_argument on dimension mismatch.
double energy_norm(const AssembledSystem& system, const Vector& v);
double energy_norm(const AssembledSystem& system, const DiscreteFunction& v);

/// G(u) + F(z) - b(u, z).
double goal_value(const AssembledSystem& system, const Vector& u, const Vector& z);

/// Sparse LU solve of B u = F (primal) or B^T z = G (dual). Test oracle and
/// diagnostics only.
Vector solve_direct(const AssembledSystem& system, Problem which);

/// Exact embedding of the coarse space into the fine one (dims fine x coarse).
/// The fine mesh must be the coarse mesh itself or a refinement whose parent
/// links point into the coarse mesh.
SparseMatrix prolongation(const FeSpace& coarse, const FeSpace& fine);

/// Value of a discrete function at a point of element t.
double evaluate(const FeSpace& space, const Vector& v, int t, const Point& x);

} // namespace goafem
