#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "goafem/fem.hpp"
#include "goafem/mesh.hpp"

namespace goafem {

struct SolverOptions {
  enum class Kind { VCycle, SteepestDescent };
  Kind kind = Kind::VCycle;
  /// Damping of the additive local smoothers.
  double omega = 0.5;
};

SolverOptions::Kind parse_solver_kind(std::string_view name); // "vcycle" | "psd"

/// Local multilevel solver for a(.,.) on a mesh hierarchy T_0 ... T_L.
///
/// Levels 0..L carry lowest-order spaces on T_0 ... T_L; for p > 1 a final
/// level carries the P_p space on T_L. Level 0 is solved exactly. Lowest-order
/// levels l >= 1 smooth with point Jacobi on the vertices created on level l
/// and their neighbours; the P_p level smooths with block Jacobi over all
/// vertex patches (dofs whose support lies in the patch). Coarse operators are
/// Galerkin products of the finest matrix.
class MultilevelPreconditioner {
public:
  struct Patch {
    std::vector<int> dofs;
    Eigen::LLT<Eigen::MatrixXd> factor;
  };

  struct Level {
    std::shared_ptr<const FeSpace> space;
    SparseMatrix A;
    SparseMatrix P; // prolongation from the previous level; empty on level 0
    std::vector<int> smoothing_dofs; // point Jacobi set
    std::vector<double> inverse_diagonal;
    std::vector<Patch> patches; // block Jacobi set (P_p level only)
  };

  std::size_t num_levels() const { return levels_.size(); }
  const Level& level(std::size_t l) const { return *levels_[l]; }
  const SolverOptions& options() const { return options_; }
  std::size_t dim() const { return static_cast<std::size_t>(levels_.back()->A.rows()); }

  /// Symmetric V-cycle applied to a residual (zero initial correction).
  Vector vcycle(const Vector& residual) const;
  /// Additive multilevel preconditioner applied to a residual.
  Vector additive(const Vector& residual) const;

private:
  friend MultilevelPreconditioner build_preconditioner(const MeshHierarchy&,
                                                       std::shared_ptr<const FeSpace>,
                                                       const SparseMatrix&, SolverOptions,
                                                       const MultilevelPreconditioner*);

  Vector cycle(std::size_t l, const Vector& residual) const;
  Vector additive(std::size_t l, const Vector& residual) const;
  Vector smooth(std::size_t l, const Vector& residual) const;

  SolverOptions options_;
  std::vector<std::shared_ptr<const Level>> levels_;
  std::shared_ptr<const Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> coarse_;
};

/// Builds the solver for `space` (on the finest mesh of `hierarchy`) and its
/// matrix A_sym. Lowest-order levels of `previous` whose meshes coincide with
/// the hierarchy are reused. Throws std::invalid_argument if the space does
/// not live on the finest mesh.
MultilevelPreconditioner build_preconditioner(const MeshHierarchy& hierarchy,
                                              std::shared_ptr<const FeSpace> space,
                                              const SparseMatrix& A_sym,
                                              SolverOptions options = {},
                                              const MultilevelPreconditioner* previous = nullptr);

/// One step of the algebraic solver for A x = rhs starting from w.
Vector psi_step(const MultilevelPreconditioner& solver, const SparseMatrix& A, const Vector& rhs,
                const Vector& w);

} // namespace goafem
