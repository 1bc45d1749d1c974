#pragma once

#include <memory>
#include <span>
#include <vector>

#include "goafem/fem.hpp"

namespace goafem {

/// Squared refinement indicators, one entry per element.
struct IndicatorField {
  std::vector<double> squared;

  double total_squared() const;
  double total() const;
};

/// sqrt of the sum of squared indicators over `elements`.
/// Throws std::invalid_argument on an invalid element id.
double subset_total(const IndicatorField& field, std::span<const int> elements);

/// Residual indicators for the primal and dual problem (d = 2):
///
///   eta_T^2 = |T| ||R_T(v)||^2_T + |T|^{1/2} sum_{E in dT} w_E ||J_E(v)||^2_E
///
/// with R_T the strong element residual and J_E the normal flux jump
/// (interior edges, w_E = 1/2) or the normal flux (Neumann edges, w_E = 1).
/// Data is evaluated element-wise, so discontinuities of f_vec or g_vec along
/// element edges enter the jumps.
class ResidualEstimator {
public:
  ResidualEstimator(std::shared_ptr<const FeSpace> space, const ProblemData& problem);

  IndicatorField operator()(const Vector& v, Problem which) const;

  const FeSpace& space() const { return *space_; }

private:
  std::shared_ptr<const FeSpace> space_;
  ProblemData problem_;
  std::vector<Eigen::VectorXd> ref_values_;
  std::vector<Eigen::MatrixX2d> ref_grads_;
  std::vector<Eigen::MatrixX3d> ref_hessians_;
};

IndicatorField indicators(std::shared_ptr<const FeSpace> space, const ProblemData& problem,
                          const Vector& v, Problem which);

} // namespace goafem
