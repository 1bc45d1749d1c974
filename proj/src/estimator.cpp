#include "goafem/estimator.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "goafem/quadrature.hpp"

namespace goafem {

double IndicatorField::total_squared() const
{
  return std::accumulate(squared.begin(), squared.end(), 0.0);
}

double IndicatorField::total() const { return std::sqrt(total_squared()); }

double subset_total(const IndicatorField& field, std::span<const int> elements)
{
  double sum = 0.0;
  for (int t : elements) {
    if (t < 0 || static_cast<std::size_t>(t) >= field.squared.size())
      throw std::invalid_argument("subset_total: invalid element id");
    sum += field.squared[t];
  }
  return std::sqrt(sum);
}

ResidualEstimator::ResidualEstimator(std::shared_ptr<const FeSpace> space, const ProblemData& problem)
  : space_(std::move(space)), problem_(problem)
{
  const auto& ref = space_->reference();
  for (const auto& q : triangle_rule(quadrature_degree(space_->degree()))) {
    ref_values_.push_back(ref.values(q.ref));
    ref_grads_.push_back(ref.gradients(q.ref));
    ref_hessians_.push_back(ref.hessians(q.ref));
  }
}

namespace {

// pushes an edge point slightly into the element so that element-wise data is
// taken from the correct side of a discontinuity along the edge
Point inside(const Point& x, const Point& centroid) { return x + 1e-9 * (centroid - x); }

} // namespace

IndicatorField ResidualEstimator::operator()(const Vector& v, Problem which) const
{
  const auto& fes = *space_;
  const auto& mesh = fes.mesh();
  const auto& ref = fes.reference();
  const auto& rule = triangle_rule(quadrature_degree(fes.degree()));
  const int nb = ref.num_basis();
  const int nt = static_cast<int>(mesh.num_elements());
  if (static_cast<std::size_t>(v.size()) != fes.dim())
    throw std::invalid_argument("ResidualEstimator: dimension mismatch");
  const bool primal = which == Problem::Primal;

  std::vector<Eigen::VectorXd> local(nt);
  for (int t = 0; t < nt; ++t) {
    local[t].resize(nb);
    const auto nodes = fes.element_nodes(t);
    for (int i = 0; i < nb; ++i) {
      const int d = fes.node_dof(nodes[i]);
      local[t](i) = d >= 0 ? v(d) : 0.0;
    }
  }

  IndicatorField out;
  out.squared.assign(nt, 0.0);

  for (int t = 0; t < nt; ++t) {
    const ElementMap map(mesh, t);
    const Eigen::VectorXd& c = local[t];
    double residual = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const Point x = map.to_physical(rule[k].ref);
      const double value = ref_values_[k].dot(c);
      const Vec2 grad = map.inverse.transpose() * (ref_grads_[k].transpose() * c);
      const Eigen::Vector3d h = ref_hessians_[k].transpose() * c;
      Mat2 href;
      href << h(0), h(1), h(1), h(2);
      const Mat2 hess = map.inverse.transpose() * href * map.inverse;
      const Mat2 A = problem_.diffusion(x);
      const double div_flux = (A.cwiseProduct(hess)).sum() + problem_.diffusion_divergence(x).dot(grad);
      const Vec2 b = problem_.convection(x);
      double r;
      if (primal) {
        r = -div_flux + problem_.f_vec_divergence(x) + b.dot(grad) + problem_.reaction(x) * value -
            problem_.f(x);
      } else {
        r = -div_flux + problem_.g_vec_divergence(x) - b.dot(grad) +
            (problem_.reaction(x) - problem_.convection_divergence(x)) * value - problem_.g(x);
      }
      residual += rule[k].weight * map.det * r * r;
    }
    out.squared[t] = mesh.area(t) * residual;
  }

  const auto& edge_rule = interval_rule(2 * fes.degree() + 2);
  for (int e = 0; e < static_cast<int>(mesh.num_edges()); ++e) {
    const auto label = mesh.edge_label(e);
    const bool interior = !mesh.is_boundary_edge(e);
    if (!interior && label != BoundaryLabel::Neumann)
      continue;
    const Point& a = mesh.vertices()[mesh.edge(e)[0]];
    const Point& b = mesh.vertices()[mesh.edge(e)[1]];
    const double length = (b - a).norm();
    const Vec2 n0 = Vec2((b - a).y(), -(b - a).x()) / length;

    const auto& adj = mesh.edge_elements(e);
    const int sides = interior ? 2 : 1;
    double jump_sq = 0.0;
    for (const auto& q : edge_rule) {
      const Point x = a + q.ref.x() * (b - a);
      double jump = 0.0;
      for (int s = 0; s < sides; ++s) {
        const int t = adj[s];
        const Point ct = mesh.centroid(t);
        const Vec2 n = n0.dot(ct - x) < 0.0 ? n0 : Vec2(-n0);
        const ElementMap map(mesh, t);
        const Point xs = inside(x, ct);
        const Vec2 grad = map.inverse.transpose() *
                          (ref.gradients(map.to_reference(x)).transpose() * local[t]);
        const Vec2 data = primal ? problem_.f_vec(xs) : problem_.g_vec(xs);
        jump += (problem_.diffusion(xs) * grad - data).dot(n);
      }
      jump_sq += q.weight * length * jump * jump;
    }
    const double weight = interior ? 0.5 : 1.0;
    for (int s = 0; s < sides; ++s)
      out.squared[adj[s]] += weight * std::sqrt(mesh.area(adj[s])) * jump_sq;
  }
  return out;
}

IndicatorField indicators(std::shared_ptr<const FeSpace> space, const ProblemData& problem,
                          const Vector& v, Problem which)
{
  return ResidualEstimator(std::move(space), problem)(v, which);
}

} // namespace goafem
