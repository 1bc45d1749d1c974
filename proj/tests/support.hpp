#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "goafem/bench.hpp"
#include "goafem/quadrature.hpp"

namespace goafem::testing {

inline ProblemData laplace(double f = 1.0)
{
  ProblemData d;
  d.f = [f](const Point&) { return f; };
  return d;
}

inline std::shared_ptr<const Triangulation> share(Triangulation m)
{
  return std::make_shared<const Triangulation>(std::move(m));
}

/// Adaptive-looking hierarchy: each level refines a random ~30% of the
/// elements plus everything near the corner (1,1).
inline MeshHierarchy random_hierarchy(const Triangulation& coarse, int levels, unsigned seed)
{
  MeshHierarchy h(share(coarse));
  std::mt19937 rng(seed);
  for (int l = 0; l < levels; ++l) {
    const auto& m = h.finest();
    std::vector<int> marked;
    std::bernoulli_distribution coin(0.3);
    for (int t = 0; t < static_cast<int>(m.num_elements()); ++t)
      if (coin(rng) || (m.centroid(t) - Point(1.0, 1.0)).norm() < 0.3)
        marked.push_back(t);
    h.push(share(refine(m, marked)));
  }
  return h;
}

inline Vector random_vector(std::size_t n, std::mt19937& rng)
{
  std::normal_distribution<double> dist;
  Vector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v(i) = dist(rng);
  return v;
}

/// ||grad(u - u_h)||_{L^2} with a high-order rule of its own.
inline double h1_error(const FeSpace& space, const Vector& u, const VectorField& exact_gradient)
{
  const auto& rule = triangle_rule(10);
  double sum = 0.0;
  for (int t = 0; t < static_cast<int>(space.mesh().num_elements()); ++t) {
    const ElementMap map(space.mesh(), t);
    const auto nodes = space.element_nodes(t);
    for (const auto& q : rule) {
      const Eigen::MatrixX2d g = space.reference().gradients(q.ref) * map.inverse;
      Vec2 grad = Vec2::Zero();
      for (int i = 0; i < space.nodes_per_element(); ++i)
        if (const int d = space.node_dof(nodes[i]); d >= 0)
          grad += u(d) * g.row(i).transpose();
      sum += q.weight * map.det * (exact_gradient(map.to_physical(q.ref)) - grad).squaredNorm();
    }
  }
  return std::sqrt(sum);
}

} // namespace goafem::testing
