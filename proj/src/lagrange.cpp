#include "goafem/lagrange.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace goafem {

namespace {

double ipow(double x, int k)
{
  double r = 1.0;
  for (int i = 0; i < k; ++i)
    r *= x;
  return r;
}

} // namespace

ReferenceElement::ReferenceElement(int degree) : degree_(degree)
{
  if (degree < 1 || degree > 3)
    throw std::invalid_argument("ReferenceElement: degree must be in [1, 3]");

  const std::array<Point, 3> vertex{Point(0, 0), Point(1, 0), Point(0, 1)};
  nodes_.assign(vertex.begin(), vertex.end());
  for (int i = 0; i < 3; ++i) {
    const Point& a = vertex[(i + 1) % 3];
    const Point& b = vertex[(i + 2) % 3];
    for (int k = 1; k < degree; ++k)
      nodes_.push_back(a + (static_cast<double>(k) / degree) * (b - a));
  }
  if (degree == 3)
    nodes_.emplace_back(1.0 / 3.0, 1.0 / 3.0);

  for (int total = 0; total <= degree; ++total)
    for (int a = total; a >= 0; --a)
      powers_.push_back({a, total - a});

  const int n = num_basis();
  Eigen::MatrixXd vandermonde(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      vandermonde(i, j) = ipow(nodes_[i].x(), powers_[j][0]) * ipow(nodes_[i].y(), powers_[j][1]);
  coefficients_ = vandermonde.inverse();
}

Eigen::VectorXd ReferenceElement::values(const Point& ref) const
{
  const int n = num_basis();
  Eigen::VectorXd m(n);
  for (int j = 0; j < n; ++j)
    m(j) = ipow(ref.x(), powers_[j][0]) * ipow(ref.y(), powers_[j][1]);
  return coefficients_.transpose() * m;
}

Eigen::MatrixX2d ReferenceElement::gradients(const Point& ref) const
{
  const int n = num_basis();
  Eigen::MatrixX2d m(n, 2);
  for (int j = 0; j < n; ++j) {
    const auto [a, b] = powers_[j];
    m(j, 0) = a > 0 ? a * ipow(ref.x(), a - 1) * ipow(ref.y(), b) : 0.0;
    m(j, 1) = b > 0 ? b * ipow(ref.x(), a) * ipow(ref.y(), b - 1) : 0.0;
  }
  return coefficients_.transpose() * m;
}

Eigen::MatrixX3d ReferenceElement::hessians(const Point& ref) const
{
  const int n = num_basis();
  Eigen::MatrixX3d m(n, 3);
  for (int j = 0; j < n; ++j) {
    const auto [a, b] = powers_[j];
    const double x = ref.x(), y = ref.y();
    m(j, 0) = a > 1 ? a * (a - 1) * ipow(x, a - 2) * ipow(y, b) : 0.0;
    m(j, 1) = (a > 0 && b > 0) ? a * b * ipow(x, a - 1) * ipow(y, b - 1) : 0.0;
    m(j, 2) = b > 1 ? b * (b - 1) * ipow(x, a) * ipow(y, b - 2) : 0.0;
  }
  return coefficients_.transpose() * m;
}

const ReferenceElement& reference_element(int degree)
{
  static const std::array<ReferenceElement, 3> elements{ReferenceElement(1), ReferenceElement(2),
                                                        ReferenceElement(3)};
  if (degree < 1 || degree > 3)
    throw std::invalid_argument("reference_element: degree must be in [1, 3]");
  return elements[degree - 1];
}

} // namespace goafem
