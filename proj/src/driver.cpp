#include "goafem/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "goafem/symmetrize.hpp"

namespace goafem {

void AdaptiveParams::validate() const
{
  if (!(theta > 0.0 && theta <= 1.0))
    throw std::invalid_argument("theta must lie in (0, 1]");
  if (!(delta > 0.0))
    throw std::invalid_argument("delta must be positive");
  if (!(lambda_sym > 0.0) || !(lambda_alg > 0.0))
    throw std::invalid_argument("lambda_sym and lambda_alg must be positive");
  if (!(c_mark >= 1.0))
    throw std::invalid_argument("C_mark must be >= 1");
  if (degree < 1 || degree > 3)
    throw std::invalid_argument("polynomial degree must be in [1, 3]");
  if (!(solver.omega > 0.0))
    throw std::invalid_argument("smoother damping must be positive");
  if (max_outer_steps < 1 || max_inner_steps < 1)
    throw std::invalid_argument("iteration caps must be positive");
  if (termination.max_levels && *termination.max_levels < 0)
    throw std::invalid_argument("max_levels must be non-negative");
}

namespace {

std::vector<int> sorted_by_indicator(std::vector<int> ids, const IndicatorField& field)
{
  std::sort(ids.begin(), ids.end(), [&](int a, int b) {
    const double va = field.squared[a], vb = field.squared[b];
    return va != vb ? va > vb : a < b;
  });
  return ids;
}

void check_ids(std::span<const int> ids, const IndicatorField& field)
{
  for (int t : ids)
    if (t < 0 || static_cast<std::size_t>(t) >= field.squared.size())
      throw std::invalid_argument("combine_marks: invalid element id " + std::to_string(t));
}

} // namespace

std::vector<int> doerfler_mark(const IndicatorField& field, double theta)
{
  if (!(theta > 0.0 && theta <= 1.0))
    throw std::invalid_argument("doerfler_mark: theta must lie in (0, 1]");
  std::vector<int> order(field.squared.size());
  std::iota(order.begin(), order.end(), 0);
  order = sorted_by_indicator(std::move(order), field);

  // summing in sorted order makes the full prefix equal the total bit for bit
  double total = 0.0;
  for (int t : order)
    total += field.squared[t];
  const double goal = theta * total;

  std::vector<int> marked;
  double sum = 0.0;
  for (int t : order) {
    if (sum >= goal)
      break;
    sum += field.squared[t];
    marked.push_back(t);
  }
  return marked;
}

std::vector<int> combine_marks(std::span<const int> primal_marked, std::span<const int> dual_marked,
                               const IndicatorField& primal, const IndicatorField& dual)
{
  check_ids(primal_marked, primal);
  check_ids(dual_marked, dual);
  const std::size_t s = std::min(primal_marked.size(), dual_marked.size());
  auto mu = sorted_by_indicator({primal_marked.begin(), primal_marked.end()}, primal);
  auto mz = sorted_by_indicator({dual_marked.begin(), dual_marked.end()}, dual);
  std::vector<int> out(mu.begin(), mu.begin() + s);
  out.insert(out.end(), mz.begin(), mz.begin() + s);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Oracles for the quasi-errors of one problem on one level.
struct Diagnostics {
  const AssembledSystem* system = nullptr;
  Vector exact; // u_l^* resp. z_l^*
};

/// Zarantonello loop with nested algebraic loop, advanced one step at a time
/// so that primal and dual can be paced together.
class SymmetrizationLoop {
public:
  SymmetrizationLoop(Problem which, const LevelContext& level, Vector seed, const AdaptiveParams& params,
                     const Diagnostics* diagnostics)
    : which_(which), level_(level), params_(params), diag_(diagnostics), iterate_(std::move(seed))
  {
    if (static_cast<std::size_t>(iterate_.size()) != level_.system->dim())
      throw std::invalid_argument("solve_estimate: seed has the wrong dimension");
    if (diag_) {
      const auto t0 = Clock::now();
      // u^{0,*} := u^{0,0}
      eta_ = (*level_.estimator)(iterate_, which_).total();
      quasi_error_ = energy_norm(*diag_->system, Vector(diag_->exact - iterate_)) + eta_;
      diag_seconds_ += seconds_since(t0);
    }
  }

  bool finished() const { return finished_; }
  bool inner_active() const { return inner_active_; }

  void begin_outer()
  {
    if (finished_ || inner_active_)
      throw std::logic_error("SymmetrizationLoop: outer step out of order");
    ++m_;
    if (m_ > params_.max_outer_steps)
      throw std::runtime_error(cap_message("symmetrization", params_.max_outer_steps));
    start_ = iterate_;
    rhs_ = zarantonello_rhs(*level_.system, which_, start_, params_.delta);
    n_ = 0;
    inner_active_ = true;
    if (diag_) {
      const auto t0 = Clock::now();
      phi_exact_ = exact_phi(*level_.system, which_, start_, params_.delta);
      update_quasi_error();
      diag_seconds_ += seconds_since(t0);
    }
  }

  void inner_step()
  {
    if (!inner_active_)
      throw std::logic_error("SymmetrizationLoop: inner step out of order");
    ++n_;
    if (n_ > params_.max_inner_steps)
      throw std::runtime_error(cap_message("algebraic", params_.max_inner_steps));
    const auto& A = level_.system->A_sym;
    Vector next = psi_step(*level_.solver, A, rhs_, iterate_);
    const double increment = energy_norm(*level_.system, Vector(next - iterate_));
    iterate_ = std::move(next);
    indicators_ = (*level_.estimator)(iterate_, which_);
    eta_ = indicators_.total();
    const double distance = energy_norm(*level_.system, Vector(iterate_ - start_));
    if (diag_) {
      const auto t0 = Clock::now();
      update_quasi_error();
      diag_seconds_ += seconds_since(t0);
    }

    const double inner_rhs = params_.lambda_alg * (params_.lambda_sym * eta_ + distance);
    const bool inner_done = increment <= inner_rhs;
    stats_.inner_criteria.push_back({m_, n_, increment, inner_rhs, inner_done});
    if (!inner_done)
      return;

    inner_active_ = false;
    stats_.inner_steps.push_back(n_);
    stats_.outer_steps = m_;
    const double outer_rhs = params_.lambda_sym * eta_;
    const bool outer_done = distance <= outer_rhs;
    stats_.outer_criteria.push_back({m_, 0, distance, outer_rhs, outer_done});
    finished_ = outer_done;
  }

  const Vector& iterate() const { return iterate_; }
  const IndicatorField& indicators() const { return indicators_; }
  const SolveStats& stats() const { return stats_; }
  double estimator() const { return eta_; }
  double diagnostics_seconds() const { return diag_seconds_; }
  std::optional<double> quasi_error() const
  {
    return diag_ ? std::optional<double>(quasi_error_) : std::nullopt;
  }

  SolveResult release() { return {std::move(iterate_), std::move(indicators_), std::move(stats_)}; }

private:
  void update_quasi_error()
  {
    const auto& sys = *diag_->system;
    quasi_error_ = energy_norm(sys, Vector(diag_->exact - iterate_)) +
                   energy_norm(sys, Vector(phi_exact_ - iterate_)) + eta_;
  }

  std::string cap_message(const char* loop, int cap) const
  {
    return std::string(which_ == Problem::Primal ? "primal " : "dual ") + loop + " loop exceeded " +
           std::to_string(cap) + " steps (m = " + std::to_string(m_) + ", n = " + std::to_string(n_) +
           ", dim = " + std::to_string(level_.system->dim()) + ", estimator = " + std::to_string(eta_) +
           ")";
  }

  Problem which_;
  const LevelContext& level_;
  const AdaptiveParams& params_;
  const Diagnostics* diag_;

  Vector iterate_;
  Vector start_;
  Vector rhs_;
  Vector phi_exact_;
  IndicatorField indicators_;
  SolveStats stats_;
  double eta_ = 0.0;
  double quasi_error_ = 0.0;
  double diag_seconds_ = 0.0;
  int m_ = 0;
  int n_ = 0;
  bool inner_active_ = false;
  bool finished_ = false;
};

} // namespace

SolveResult solve_estimate(Problem which, const LevelContext& level, const Vector& seed,
                           const AdaptiveParams& params)
{
  params.validate();
  SymmetrizationLoop loop(which, level, seed, params, nullptr);
  while (!loop.finished()) {
    loop.begin_outer();
    while (loop.inner_active())
      loop.inner_step();
  }
  return loop.release();
}

RunResult run(const Triangulation& initial, const ProblemData& problem, const AdaptiveParams& params,
              std::optional<double> exact_goal)
{
  params.validate();
  if (params.termination.empty())
    throw std::invalid_argument("run: no termination rule given");

  RunResult result;
  result.meshes = std::make_shared<MeshHierarchy>(std::make_shared<const Triangulation>(initial));
  auto& hierarchy = *result.meshes;

  double cost = 0.0;
  double time = 0.0; // excludes diagnostics
  std::shared_ptr<const MultilevelPreconditioner> previous_solver;
  std::shared_ptr<const FeSpace> space = build_space(hierarchy.finest_ptr(), params.degree);
  Vector u_seed = Vector::Zero(static_cast<Eigen::Index>(space->dim()));
  Vector z_seed = u_seed;

  for (int level = 0;; ++level) {
    auto clock = Clock::now();
    double excluded = 0.0;
    const std::size_t elements = hierarchy.finest().num_elements();

    LevelContext ctx;
    ctx.system = std::make_shared<const AssembledSystem>(assemble(space, problem));
    ctx.estimator = std::make_shared<const ResidualEstimator>(space, problem);
    ctx.solver = std::make_shared<const MultilevelPreconditioner>(build_preconditioner(
      hierarchy, space, ctx.system->A_sym, params.solver, previous_solver.get()));

    std::optional<Diagnostics> primal_diag, dual_diag;
    if (params.diagnostics) {
      const auto t0 = Clock::now();
      primal_diag = Diagnostics{ctx.system.get(), solve_direct(*ctx.system, Problem::Primal)};
      dual_diag = Diagnostics{ctx.system.get(), solve_direct(*ctx.system, Problem::Dual)};
      excluded += seconds_since(t0);
    }

    SymmetrizationLoop primal(Problem::Primal, ctx, std::move(u_seed), params,
                              primal_diag ? &*primal_diag : nullptr);
    SymmetrizationLoop dual(Problem::Dual, ctx, std::move(z_seed), params,
                            dual_diag ? &*dual_diag : nullptr);

    auto record = [&](int k, int j) {
      cost += static_cast<double>(elements);
      const double now =
        time + seconds_since(clock) - excluded - primal.diagnostics_seconds() - dual.diagnostics_seconds();
      result.steps.push_back(
        {level, k, j, elements, cost, now, primal.quasi_error(), dual.quasi_error()});
      return result.steps.size() - 1;
    };

    const std::size_t level_start = record(0, 0);
    std::size_t primal_final = level_start, dual_final = level_start;
    int k = 0;
    while (!primal.finished() || !dual.finished()) {
      ++k;
      const bool primal_running = !primal.finished();
      const bool dual_running = !dual.finished();
      if (primal_running)
        primal.begin_outer();
      if (dual_running)
        dual.begin_outer();
      record(k, 0);
      int j = 0;
      while (primal.inner_active() || dual.inner_active()) {
        ++j;
        const bool step_primal = primal.inner_active();
        const bool step_dual = dual.inner_active();
        if (step_primal)
          primal.inner_step();
        if (step_dual)
          dual.inner_step();
        const std::size_t index = record(k, j);
        if (step_primal && !primal.inner_active())
          primal_final = index;
        if (step_dual && !dual.inner_active())
          dual_final = index;
      }
    }

    HistoryRecord rec;
    rec.level = level;
    rec.ndofs = space->dim();
    rec.elements = elements;
    rec.primal_estimator = primal.estimator();
    rec.dual_estimator = dual.estimator();
    rec.estimator_product = rec.primal_estimator * rec.dual_estimator;
    rec.goal_value = goal_value(*ctx.system, primal.iterate(), dual.iterate());
    if (exact_goal)
      rec.goal_error = std::abs(rec.goal_value - *exact_goal);
    rec.cumulative_cost = cost;
    rec.steps_primal = static_cast<int>(primal_final - level_start);
    rec.steps_dual = static_cast<int>(dual_final - level_start);
    rec.primal = primal.stats();
    rec.dual = dual.stats();
    rec.primal_quasi_error = primal.quasi_error();
    rec.dual_quasi_error = dual.quasi_error();

    const auto& term = params.termination;
    bool stop = false;
    if (rec.estimator_product == 0.0) {
      result.exact = true;
      stop = true;
    }
    if (term.estimator_product_below && rec.estimator_product < *term.estimator_product_below)
      stop = true;
    if (term.max_cumulative_cost && cost >= *term.max_cumulative_cost)
      stop = true;
    if (term.max_levels && level >= *term.max_levels)
      stop = true;

    excluded += primal.diagnostics_seconds() + dual.diagnostics_seconds();
    if (stop) {
      time += seconds_since(clock) - excluded;
      rec.cumulative_time = time;
      result.history.push_back(std::move(rec));
      break;
    }

    const auto marked_u = doerfler_mark(primal.indicators(), params.theta);
    const auto marked_z = doerfler_mark(dual.indicators(), params.theta);
    const auto marked = combine_marks(marked_u, marked_z, primal.indicators(), dual.indicators());
    rec.marked = marked.size();

    hierarchy.push(std::make_shared<const Triangulation>(refine(hierarchy.finest(), marked)));
    auto fine_space = build_space(hierarchy.finest_ptr(), params.degree);
    const SparseMatrix P = prolongation(*space, *fine_space);
    u_seed = P * primal.iterate();
    z_seed = P * dual.iterate();
    space = std::move(fine_space);
    previous_solver = ctx.solver;

    time += seconds_since(clock) - excluded;
    rec.cumulative_time = time;
    result.history.push_back(std::move(rec));
  }
  return result;
}

} // namespace goafem
