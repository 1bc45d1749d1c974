#include "goafem/quadrature.hpp"

#include <array>
#include <map>
#include <mutex>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

namespace goafem {

namespace {

template <unsigned N>
std::vector<std::pair<double, double>> gauss_on_unit_interval()
{
  using rule = boost::math::quadrature::gauss<double, N>;
  const auto& x = rule::abscissa();
  const auto& w = rule::weights();
  std::vector<std::pair<double, double>> out;
  // boost stores the non-negative half of the symmetric rule
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      out.emplace_back(0.5, 0.5 * w[i]);
    } else {
      out.emplace_back(0.5 * (1.0 - x[i]), 0.5 * w[i]);
      out.emplace_back(0.5 * (1.0 + x[i]), 0.5 * w[i]);
    }
  }
  return out;
}

std::vector<std::pair<double, double>> gauss_points(int n)
{
  switch (n) {
  case 1: return gauss_on_unit_interval<1>();
  case 2: return gauss_on_unit_interval<2>();
  case 3: return gauss_on_unit_interval<3>();
  case 4: return gauss_on_unit_interval<4>();
  case 5: return gauss_on_unit_interval<5>();
  case 6: return gauss_on_unit_interval<6>();
  case 7: return gauss_on_unit_interval<7>();
  case 8: return gauss_on_unit_interval<8>();
  default: throw std::invalid_argument("gauss_points: unsupported number of points");
  }
}

std::mutex cache_mutex;

} // namespace

const std::vector<QuadraturePoint>& triangle_rule(int degree)
{
  static std::map<int, std::vector<QuadraturePoint>> cache;
  std::lock_guard lock(cache_mutex);
  if (auto it = cache.find(degree); it != cache.end())
    return it->second;

  // the collapsed direction carries the extra (1 - t) Jacobian factor
  const int n = (degree + 3) / 2;
  const auto g = gauss_points(n);
  std::vector<QuadraturePoint> rule;
  for (const auto& [t, wt] : g)
    for (const auto& [s, ws] : g)
      rule.push_back({Point(s * (1.0 - t), t), ws * wt * (1.0 - t)});
  return cache.emplace(degree, std::move(rule)).first->second;
}

const std::vector<QuadraturePoint>& interval_rule(int degree)
{
  static std::map<int, std::vector<QuadraturePoint>> cache;
  std::lock_guard lock(cache_mutex);
  if (auto it = cache.find(degree); it != cache.end())
    return it->second;

  const int n = degree / 2 + 1;
  std::vector<QuadraturePoint> rule;
  for (const auto& [s, w] : gauss_points(n))
    rule.push_back({Point(s, 0.0), w});
  return cache.emplace(degree, std::move(rule)).first->second;
}

} // namespace goafem
