#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "goafem/algsolver.hpp"
#include "goafem/estimator.hpp"
#include "goafem/fem.hpp"
#include "goafem/mesh.hpp"

namespace goafem {

struct Termination {
  std::optional<double> estimator_product_below;
  std::optional<double> max_cumulative_cost;
  std::optional<int> max_levels;

  bool empty() const { return !estimator_product_below && !max_cumulative_cost && !max_levels; }
};

struct AdaptiveParams {
  double theta = 0.5;
  double delta = 0.5;
  double lambda_sym = 0.7;
  double lambda_alg = 0.7;
  /// Marking is exactly minimal, which satisfies any C_mark >= 1.
  double c_mark = 1.0;
  int degree = 1;
  Termination termination;
  SolverOptions solver;
  /// Quasi-errors via direct solves, excluded from the cost ledger.
  bool diagnostics = false;
  int max_outer_steps = 500;
  int max_inner_steps = 500;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

/// Dörfler set of minimal cardinality: the shortest prefix of the elements
/// sorted by descending indicator (ties by ascending id) whose squared sum
/// reaches theta times the total.
std::vector<int> doerfler_mark(const IndicatorField& field, double theta);

/// Union of the s largest-indicator elements of each set, s = min(#Mu, #Mz).
/// Returned sorted by id.
std::vector<int> combine_marks(std::span<const int> primal_marked, std::span<const int> dual_marked,
                               const IndicatorField& primal, const IndicatorField& dual);

/// One evaluation of a stopping criterion: lhs <= rhs.
struct CriterionRecord {
  int outer;
  int inner; // 0 for the outer criterion
  double lhs;
  double rhs;
  bool satisfied;
};

struct SolveStats {
  int outer_steps = 0;           // final symmetrization index
  std::vector<int> inner_steps;  // final algebraic index per symmetrization step
  std::vector<CriterionRecord> inner_criteria;
  std::vector<CriterionRecord> outer_criteria;
};

/// Everything a level's solve needs: the assembled system, its estimator and
/// the algebraic solver.
struct LevelContext {
  std::shared_ptr<const AssembledSystem> system;
  std::shared_ptr<const ResidualEstimator> estimator;
  std::shared_ptr<const MultilevelPreconditioner> solver;
};

struct SolveResult {
  Vector iterate;
  IndicatorField indicators;
  SolveStats stats;
};

/// Inexact Zarantonello loop with nested algebraic solver loop for one
/// problem on one level, started from the nested-iteration seed.
/// Throws std::runtime_error if a safety cap is exceeded.
SolveResult solve_estimate(Problem which, const LevelContext& level, const Vector& seed,
                           const AdaptiveParams& params);

/// One executed index (level, k, j) of the combined primal/dual iteration.
struct StepRecord {
  int level;
  int k;
  int j;
  std::size_t elements;
  double cumulative_cost;
  double seconds;
  /// Quasi-errors at this index (diagnostics only, extended by the last
  /// available value once a loop has stopped).
  std::optional<double> primal_quasi_error;
  std::optional<double> dual_quasi_error;
};

struct HistoryRecord {
  int level;
  std::size_t ndofs;
  std::size_t elements;
  double primal_estimator;
  double dual_estimator;
  double estimator_product;
  double goal_value;
  std::optional<double> goal_error;
  double cumulative_cost;
  double cumulative_time;
  /// Combined solver steps |l, m, n| - |l, 0, 0| at the final primal (dual) iterate.
  int steps_primal;
  int steps_dual;
  SolveStats primal;
  SolveStats dual;
  std::size_t marked = 0;
  std::optional<double> primal_quasi_error;
  std::optional<double> dual_quasi_error;
};

struct RunResult {
  std::vector<HistoryRecord> history;
  std::vector<StepRecord> steps;
  std::shared_ptr<MeshHierarchy> meshes;
  /// The estimator product vanished; the last level is exact.
  bool exact = false;
};

/// Goal-oriented adaptive loop with iterative symmetrization: SOLVE & ESTIMATE
/// (primal and dual paced together), MARK, REFINE, nested iteration, until
/// one of the termination rules fires.
RunResult run(const Triangulation& initial, const ProblemData& problem, const AdaptiveParams& params,
              std::optional<double> exact_goal = std::nullopt);

} // namespace goafem
