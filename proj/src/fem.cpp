#include "goafem/fem.hpp"

#include <stdexcept>

#include <Eigen/SparseLU>

#include "goafem/quadrature.hpp"

namespace goafem {

FeSpace::FeSpace(std::shared_ptr<const Triangulation> mesh, int degree)
  : mesh_(std::move(mesh)), degree_(degree)
{
  if (degree < 1 || degree > 3)
    throw std::invalid_argument("FeSpace: polynomial degree must be in [1, 3]");
  reference_ = &reference_element(degree);

  const auto& m = *mesh_;
  const int nv = static_cast<int>(m.num_vertices());
  const int ne = static_cast<int>(m.num_edges());
  const int nt = static_cast<int>(m.num_elements());
  const int per_edge = reference_->nodes_per_edge();
  const int per_cell = reference_->interior_nodes();
  const int total = nv + ne * per_edge + nt * per_cell;

  node_points_.resize(total);
  for (int v = 0; v < nv; ++v)
    node_points_[v] = m.vertices()[v];
  for (int e = 0; e < ne; ++e) {
    const Point& a = m.vertices()[m.edge(e)[0]];
    const Point& b = m.vertices()[m.edge(e)[1]];
    for (int k = 0; k < per_edge; ++k)
      node_points_[nv + e * per_edge + k] = a + (static_cast<double>(k + 1) / degree) * (b - a);
  }
  for (int t = 0; t < nt; ++t)
    for (int k = 0; k < per_cell; ++k)
      node_points_[nv + ne * per_edge + t * per_cell + k] = m.centroid(t);

  const int nb = reference_->num_basis();
  element_nodes_.resize(static_cast<std::size_t>(nt) * nb);
  for (int t = 0; t < nt; ++t) {
    int* nodes = element_nodes_.data() + static_cast<std::size_t>(t) * nb;
    const auto& tri = m.triangles()[t];
    for (int i = 0; i < 3; ++i)
      nodes[i] = tri[i];
    for (int i = 0; i < 3; ++i) {
      const int e = m.element_edge(t, i);
      const bool forward = tri[(i + 1) % 3] < tri[(i + 2) % 3];
      for (int k = 0; k < per_edge; ++k) {
        const int global_k = forward ? k : per_edge - 1 - k;
        nodes[3 + i * per_edge + k] = nv + e * per_edge + global_k;
      }
    }
    for (int k = 0; k < per_cell; ++k)
      nodes[3 + 3 * per_edge + k] = nv + ne * per_edge + t * per_cell + k;
  }

  std::vector<char> dirichlet(total, 0);
  for (int e = 0; e < ne; ++e) {
    if (m.edge_label(e) != BoundaryLabel::Dirichlet)
      continue;
    dirichlet[m.edge(e)[0]] = dirichlet[m.edge(e)[1]] = 1;
    for (int k = 0; k < per_edge; ++k)
      dirichlet[nv + e * per_edge + k] = 1;
  }
  node_dof_.assign(total, -1);
  for (int n = 0; n < total; ++n)
    if (!dirichlet[n]) {
      node_dof_[n] = static_cast<int>(dof_nodes_.size());
      dof_nodes_.push_back(n);
    }
}

std::shared_ptr<const FeSpace> build_space(std::shared_ptr<const Triangulation> mesh, int degree)
{
  return std::make_shared<const FeSpace>(std::move(mesh), degree);
}

ElementMap::ElementMap(const Triangulation& mesh, int t)
{
  const auto& tri = mesh.triangles()[t];
  const auto& v = mesh.vertices();
  origin = v[tri[0]];
  jacobian.col(0) = v[tri[1]] - v[tri[0]];
  jacobian.col(1) = v[tri[2]] - v[tri[0]];
  det = jacobian.determinant();
  inverse = jacobian.inverse();
}

AssembledSystem assemble(std::shared_ptr<const FeSpace> space, const ProblemData& problem)
{
  const auto& fes = *space;
  const auto& mesh = fes.mesh();
  const auto& ref = fes.reference();
  const auto& rule = triangle_rule(quadrature_degree(fes.degree()));
  const int nb = ref.num_basis();
  const std::size_t n = fes.dim();

  std::vector<Eigen::VectorXd> ref_values;
  std::vector<Eigen::MatrixX2d> ref_grads;
  for (const auto& q : rule) {
    ref_values.push_back(ref.values(q.ref));
    ref_grads.push_back(ref.gradients(q.ref));
  }

  std::vector<Eigen::Triplet<double>> a_trip, b_trip;
  a_trip.reserve(mesh.num_elements() * nb * nb);
  b_trip.reserve(mesh.num_elements() * nb * nb);
  Vector F = Vector::Zero(static_cast<Eigen::Index>(n));
  Vector G = Vector::Zero(static_cast<Eigen::Index>(n));

  Eigen::MatrixXd a_loc(nb, nb), b_loc(nb, nb);
  Eigen::VectorXd f_loc(nb), g_loc(nb);
  for (int t = 0; t < static_cast<int>(mesh.num_elements()); ++t) {
    const ElementMap map(mesh, t);
    if (!(map.det > 0.0))
      throw std::runtime_error("assemble: degenerate triangle " + std::to_string(t));
    a_loc.setZero();
    b_loc.setZero();
    f_loc.setZero();
    g_loc.setZero();
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const Point x = map.to_physical(rule[k].ref);
      const double w = rule[k].weight * map.det;
      const Eigen::MatrixX2d grads = ref_grads[k] * map.inverse;
      const Eigen::VectorXd& phi = ref_values[k];
      const Mat2 A = problem.diffusion(x);
      const Vec2 b = problem.convection(x);
      const double c = problem.reaction(x);
      const Eigen::MatrixX2d flux = grads * A; // rows: (A grad phi_j)^T, A symmetric
      a_loc.noalias() += w * flux * grads.transpose();
      const Eigen::VectorXd transport = grads * b;
      b_loc.noalias() += w * phi * (transport + c * phi).transpose();
      f_loc.noalias() += w * (problem.f(x) * phi + grads * problem.f_vec(x));
      g_loc.noalias() += w * (problem.g(x) * phi + grads * problem.g_vec(x));
    }
    // exact symmetry of the principal part
    a_loc = 0.5 * (a_loc + a_loc.transpose()).eval();
    b_loc += a_loc;

    const auto nodes = fes.element_nodes(t);
    for (int i = 0; i < nb; ++i) {
      const int di = fes.node_dof(nodes[i]);
      if (di < 0)
        continue;
      F(di) += f_loc(i);
      G(di) += g_loc(i);
      for (int j = 0; j < nb; ++j) {
        const int dj = fes.node_dof(nodes[j]);
        if (dj < 0)
          continue;
        a_trip.emplace_back(di, dj, a_loc(i, j));
        b_trip.emplace_back(di, dj, b_loc(i, j));
      }
    }
  }

  AssembledSystem out{space, SparseMatrix(n, n), SparseMatrix(n, n), std::move(F), std::move(G)};
  out.A_sym.setFromTriplets(a_trip.begin(), a_trip.end());
  out.B.setFromTriplets(b_trip.begin(), b_trip.end());
  return out;
}

double energy_norm(const AssembledSystem& system, const Vector& v)
{
  if (static_cast<std::size_t>(v.size()) != system.dim())
    throw std::invalid_argument("energy_norm: dimension mismatch");
  return std::sqrt(std::max(0.0, v.dot(system.A_sym * v)));
}

double energy_norm(const AssembledSystem& system, const DiscreteFunction& v)
{
  if (v.space && v.space != system.space)
    throw std::invalid_argument("energy_norm: function belongs to a different space");
  return energy_norm(system, v.coefficients);
}

double goal_value(const AssembledSystem& system, const Vector& u, const Vector& z)
{
  if (static_cast<std::size_t>(u.size()) != system.dim() ||
      static_cast<std::size_t>(z.size()) != system.dim())
    throw std::invalid_argument("goal_value: dimension mismatch");
  return system.G.dot(u) + system.F.dot(z) - z.dot(system.B * u);
}

Vector solve_direct(const AssembledSystem& system, Problem which)
{
  const auto n = static_cast<Eigen::Index>(system.dim());
  if (n == 0)
    return Vector(0);
  Eigen::SparseMatrix<double> M = which == Problem::Primal
                                    ? Eigen::SparseMatrix<double>(system.B)
                                    : Eigen::SparseMatrix<double>(system.B.transpose());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(M);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("solve_direct: factorization failed (singular system)");
  Vector x = lu.solve(which == Problem::Primal ? system.F : system.G);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("solve_direct: solve failed");
  return x;
}

SparseMatrix prolongation(const FeSpace& coarse, const FeSpace& fine)
{
  const auto& cmesh = coarse.mesh();
  const auto& fmesh = fine.mesh();
  const bool same_mesh = &cmesh == &fmesh;
  if (!same_mesh) {
    for (int p : fmesh.parent())
      if (p < 0 || p >= static_cast<int>(cmesh.num_elements()))
        throw std::invalid_argument("prolongation: fine mesh is not a refinement of the coarse mesh");
  }
  if (fine.degree() < coarse.degree())
    throw std::invalid_argument("prolongation: fine degree below coarse degree");

  const auto& cref = coarse.reference();
  std::vector<char> done(fine.num_nodes(), 0);
  std::vector<Eigen::Triplet<double>> trip;
  for (int t = 0; t < static_cast<int>(fmesh.num_elements()); ++t) {
    const int ct = same_mesh ? t : fmesh.parent()[t];
    const ElementMap cmap(cmesh, ct);
    const auto cnodes = coarse.element_nodes(ct);
    for (int node : fine.element_nodes(t)) {
      if (done[node])
        continue;
      done[node] = 1;
      const int row = fine.node_dof(node);
      if (row < 0)
        continue;
      const Eigen::VectorXd phi = cref.values(cmap.to_reference(fine.node_point(node)));
      for (int i = 0; i < cref.num_basis(); ++i) {
        const int col = coarse.node_dof(cnodes[i]);
        if (col >= 0 && std::abs(phi(i)) > 1e-13)
          trip.emplace_back(row, col, phi(i));
      }
    }
  }
  SparseMatrix P(fine.dim(), coarse.dim());
  P.setFromTriplets(trip.begin(), trip.end());
  return P;
}

double evaluate(const FeSpace& space, const Vector& v, int t, const Point& x)
{
  const ElementMap map(space.mesh(), t);
  const Eigen::VectorXd phi = space.reference().values(map.to_reference(x));
  const auto nodes = space.element_nodes(t);
  double out = 0.0;
  for (int i = 0; i < space.nodes_per_element(); ++i)
    if (const int d = space.node_dof(nodes[i]); d >= 0)
      out += phi(i) * v(d);
  return out;
}

} // namespace goafem
