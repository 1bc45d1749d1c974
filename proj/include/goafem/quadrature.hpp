#pragma once

#include <vector>

#include "goafem/geometry.hpp"

namespace goafem {

struct QuadraturePoint {
  Point ref;     // reference coordinates
  double weight; // sums to the reference measure
};

/// Rule on the reference triangle conv{(0,0),(1,0),(0,1)}, exact for total
/// degree <= `degree`. Collapsed (Duffy) tensor Gauss-Legendre rule; weights
/// sum to 1/2.
const std::vector<QuadraturePoint>& triangle_rule(int degree);

/// Gauss-Legendre rule on [0,1] (points stored in ref.x()), exact for
/// degree <= `degree`; weights sum to 1.
const std::vector<QuadraturePoint>& interval_rule(int degree);

} // namespace goafem
