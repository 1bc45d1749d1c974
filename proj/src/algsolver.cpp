#include "goafem/algsolver.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace goafem {

SolverOptions::Kind parse_solver_kind(std::string_view name)
{
  if (name == "vcycle")
    return SolverOptions::Kind::VCycle;
  if (name == "psd")
    return SolverOptions::Kind::SteepestDescent;
  throw std::invalid_argument("unknown solver kind '" + std::string(name) + "'");
}

namespace {

using Level = MultilevelPreconditioner::Level;

void set_point_smoother(Level& level, const std::vector<int>& new_vertices)
{
  const auto& mesh = level.space->mesh();
  const auto neighbors = mesh.vertex_neighbors();
  std::vector<char> in_set(mesh.num_vertices(), 0);
  for (int v : new_vertices) {
    in_set[v] = 1;
    for (int w : neighbors[v])
      in_set[w] = 1;
  }
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    if (!in_set[v])
      continue;
    const int d = level.space->node_dof(static_cast<int>(v));
    if (d < 0)
      continue;
    level.smoothing_dofs.push_back(d);
    level.inverse_diagonal.push_back(1.0 / level.A.coeff(d, d));
  }
}

void set_patch_smoother(Level& level)
{
  const auto& fes = *level.space;
  const auto& mesh = fes.mesh();
  const int per_edge = fes.reference().nodes_per_edge();
  std::vector<std::vector<int>> vertex_elements(mesh.num_vertices());
  for (std::size_t t = 0; t < mesh.num_elements(); ++t)
    for (int v : mesh.triangles()[t])
      vertex_elements[v].push_back(static_cast<int>(t));

  std::vector<int> local_index(fes.dim(), -1);
  for (std::size_t z = 0; z < mesh.num_vertices(); ++z) {
    std::vector<int> dofs;
    auto add = [&](int node) {
      if (const int d = fes.node_dof(node); d >= 0)
        dofs.push_back(d);
    };
    add(static_cast<int>(z));
    for (int t : vertex_elements[z]) {
      const auto& tri = mesh.triangles()[t];
      const int i = static_cast<int>(std::find(tri.begin(), tri.end(), static_cast<int>(z)) - tri.begin());
      const auto nodes = fes.element_nodes(t);
      // the two local edges through z are those opposite the other vertices
      for (int edge : {(i + 1) % 3, (i + 2) % 3})
        for (int k = 0; k < per_edge; ++k)
          add(nodes[3 + edge * per_edge + k]);
      for (std::size_t k = 3 + 3 * per_edge; k < nodes.size(); ++k)
        add(nodes[k]);
    }
    std::sort(dofs.begin(), dofs.end());
    dofs.erase(std::unique(dofs.begin(), dofs.end()), dofs.end());
    if (dofs.empty())
      continue;

    const auto n = static_cast<Eigen::Index>(dofs.size());
    for (Eigen::Index k = 0; k < n; ++k)
      local_index[dofs[k]] = static_cast<int>(k);
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k)
      for (SparseMatrix::InnerIterator it(level.A, dofs[k]); it; ++it)
        if (const int j = local_index[it.col()]; j >= 0)
          block(k, j) = it.value();
    for (int d : dofs)
      local_index[d] = -1;

    MultilevelPreconditioner::Patch patch{std::move(dofs), Eigen::LLT<Eigen::MatrixXd>(block)};
    if (patch.factor.info() != Eigen::Success)
      throw std::runtime_error("build_preconditioner: patch matrix not positive definite");
    level.patches.push_back(std::move(patch));
  }
}

} // namespace

MultilevelPreconditioner build_preconditioner(const MeshHierarchy& hierarchy,
                                              std::shared_ptr<const FeSpace> space,
                                              const SparseMatrix& A_sym, SolverOptions options,
                                              const MultilevelPreconditioner* previous)
{
  if (space->mesh_ptr() != hierarchy.finest_ptr())
    throw std::invalid_argument("build_preconditioner: space does not live on the finest mesh");
  if (static_cast<std::size_t>(A_sym.rows()) != space->dim())
    throw std::invalid_argument("build_preconditioner: matrix/space dimension mismatch");

  const std::size_t L = hierarchy.num_levels() - 1;
  MultilevelPreconditioner out;
  out.options_ = options;

  // reusable lowest-order levels of a previous build (same meshes)
  std::size_t reused = 0;
  if (previous != nullptr) {
    while (reused < previous->levels_.size() && reused < L) {
      const auto& lvl = *previous->levels_[reused];
      if (lvl.space->degree() != 1 || lvl.space->mesh_ptr() != hierarchy.level_ptr(reused))
        break;
      ++reused;
    }
    // the previous finest lowest-order level was a Galerkin product of its P_p
    // matrix; it is only reusable below the new finest mesh
    out.levels_.assign(previous->levels_.begin(), previous->levels_.begin() + reused);
    if (reused > 0)
      out.coarse_ = previous->coarse_;
  }

  // lowest-order spaces and prolongations for the new levels reused..L
  std::vector<Level> fresh;
  for (std::size_t l = reused; l <= L; ++l) {
    Level lvl;
    lvl.space = (l == L && space->degree() == 1) ? space : build_space(hierarchy.level_ptr(l), 1);
    if (l > 0) {
      const auto& below = l == reused ? *out.levels_.back()->space : *fresh.back().space;
      lvl.P = prolongation(below, *lvl.space);
    }
    fresh.push_back(std::move(lvl));
  }

  std::shared_ptr<Level> top;
  if (space->degree() > 1) {
    top = std::make_shared<Level>();
    top->space = space;
    top->A = A_sym;
    top->P = prolongation(*fresh.back().space, *space);
    set_patch_smoother(*top);
  }

  // Galerkin coarse operators, top down
  if (top)
    fresh.back().A = SparseMatrix(top->P.transpose() * top->A * top->P);
  else
    fresh.back().A = A_sym;
  for (std::size_t k = fresh.size() - 1; k > 0; --k)
    fresh[k - 1].A = SparseMatrix(fresh[k].P.transpose() * fresh[k].A * fresh[k].P);

  for (std::size_t k = 0; k < fresh.size(); ++k) {
    const std::size_t l = reused + k;
    if (l > 0)
      set_point_smoother(fresh[k], hierarchy.new_vertices(l));
    out.levels_.push_back(std::make_shared<const Level>(std::move(fresh[k])));
  }
  if (top)
    out.levels_.push_back(std::move(top));

  if (!out.coarse_) {
    auto llt = std::make_shared<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>();
    const auto& A0 = out.levels_.front()->A;
    if (A0.rows() > 0) {
      llt->compute(Eigen::SparseMatrix<double>(A0));
      if (llt->info() != Eigen::Success)
        throw std::runtime_error("build_preconditioner: coarse matrix not positive definite");
    }
    out.coarse_ = std::move(llt);
  }
  return out;
}

Vector MultilevelPreconditioner::smooth(std::size_t l, const Vector& residual) const
{
  const Level& lvl = *levels_[l];
  Vector e = Vector::Zero(residual.size());
  const double omega = options_.omega;
  for (std::size_t k = 0; k < lvl.smoothing_dofs.size(); ++k) {
    const int d = lvl.smoothing_dofs[k];
    e(d) = omega * lvl.inverse_diagonal[k] * residual(d);
  }
  for (const auto& patch : lvl.patches) {
    Eigen::VectorXd r(patch.dofs.size());
    for (std::size_t k = 0; k < patch.dofs.size(); ++k)
      r(k) = residual(patch.dofs[k]);
    const Eigen::VectorXd c = patch.factor.solve(r);
    for (std::size_t k = 0; k < patch.dofs.size(); ++k)
      e(patch.dofs[k]) += omega * c(k);
  }
  return e;
}

Vector MultilevelPreconditioner::cycle(std::size_t l, const Vector& residual) const
{
  if (l == 0)
    return residual.size() == 0 ? Vector(0) : Vector(coarse_->solve(residual));
  const Level& lvl = *levels_[l];
  Vector e = smooth(l, residual);
  const Vector coarse_residual = lvl.P.transpose() * (residual - lvl.A * e);
  e += lvl.P * cycle(l - 1, coarse_residual);
  e += smooth(l, residual - lvl.A * e);
  return e;
}

Vector MultilevelPreconditioner::additive(std::size_t l, const Vector& residual) const
{
  if (l == 0)
    return residual.size() == 0 ? Vector(0) : Vector(coarse_->solve(residual));
  const Level& lvl = *levels_[l];
  Vector e = smooth(l, residual);
  e += lvl.P * additive(l - 1, Vector(lvl.P.transpose() * residual));
  return e;
}

Vector MultilevelPreconditioner::vcycle(const Vector& residual) const
{
  if (static_cast<std::size_t>(residual.size()) != dim())
    throw std::invalid_argument("vcycle: dimension mismatch");
  return cycle(levels_.size() - 1, residual);
}

Vector MultilevelPreconditioner::additive(const Vector& residual) const
{
  if (static_cast<std::size_t>(residual.size()) != dim())
    throw std::invalid_argument("additive: dimension mismatch");
  return additive(levels_.size() - 1, residual);
}

Vector psi_step(const MultilevelPreconditioner& solver, const SparseMatrix& A, const Vector& rhs,
                const Vector& w)
{
  if (static_cast<std::size_t>(A.rows()) != solver.dim() || rhs.size() != A.rows() ||
      w.size() != A.rows())
    throw std::invalid_argument("psi_step: dimension mismatch");
  const Vector r = rhs - A * w;
  if (solver.options().kind == SolverOptions::Kind::VCycle)
    return w + solver.vcycle(r);

  const Vector d = solver.additive(r);
  const double curvature = d.dot(A * d);
  if (!(curvature > 0.0))
    return w;
  return w + (r.dot(d) / curvature) * d;
}

} // namespace goafem
