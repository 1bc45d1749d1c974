#pragma once

#include <Eigen/Dense>

namespace goafem {

using Point = Eigen::Vector2d;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Signed area of the triangle (a, b, c); positive for counter-clockwise order.
inline double signed_area(const Point& a, const Point& b, const Point& c)
{
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

} // namespace goafem
