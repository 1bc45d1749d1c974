#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "goafem/geometry.hpp"

namespace goafem {

/// Lagrange P_p basis on the reference triangle conv{(0,0),(1,0),(0,1)}.
///
/// Node order: the three vertices, then p-1 nodes on each local edge i
/// (opposite vertex i, traversed from vertex (i+1)%3 to (i+2)%3), then the
/// interior nodes. The basis is obtained by inverting the monomial
/// Vandermonde matrix at the nodes.
class ReferenceElement {
public:
  explicit ReferenceElement(int degree);

  int degree() const { return degree_; }
  int num_basis() const { return static_cast<int>(nodes_.size()); }
  int nodes_per_edge() const { return degree_ - 1; }
  int interior_nodes() const { return (degree_ - 1) * (degree_ - 2) / 2; }
  const std::vector<Point>& nodes() const { return nodes_; }

  Eigen::VectorXd values(const Point& ref) const;
  /// Rows: basis functions; columns: d/dxi, d/deta.
  Eigen::MatrixX2d gradients(const Point& ref) const;
  /// Rows: basis functions; columns: xixi, xieta, etaeta.
  Eigen::MatrixX3d hessians(const Point& ref) const;

private:
  int degree_;
  std::vector<Point> nodes_;
  std::vector<std::array<int, 2>> powers_;
  Eigen::MatrixXd coefficients_; // monomial coefficient j of basis i at (j, i)
};

const ReferenceElement& reference_element(int degree);

} // namespace goafem
