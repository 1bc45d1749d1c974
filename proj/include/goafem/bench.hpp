#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "goafem/driver.hpp"

namespace goafem {

enum class BenchmarkId { GoalSingularity, ZShapeConvection };

/// Accepts "goal-singularity" / "1" and "zshape-convection" / "2".
BenchmarkId parse_benchmark(std::string_view name);
std::string_view to_string(BenchmarkId id);

struct BenchmarkSpec {
  BenchmarkId id;
  Domain domain;
  /// Uniform refinements of initial_mesh(domain) giving T_0.
  int initial_refinements = 0;
  ProblemData data;
  std::optional<double> exact_goal;
  /// Exact solution and gradient where known (problem 1).
  ScalarField exact_solution;
  VectorField exact_gradient;
};

BenchmarkSpec make_benchmark(BenchmarkId id);
Triangulation benchmark_mesh(const BenchmarkSpec& spec);

/// u*(x) = x1 x2 (1 - x1)(1 - x2) and f = -lap u* + x . grad u* + u*.
double problem1_solution(const Point& x);
Vec2 problem1_gradient(const Point& x);
ScalarField manufacture_rhs_problem1();
/// int_K d_1 u* dx; negative since d_1 u* <= 0 on K.
inline constexpr double problem1_goal = -11.0 / 960.0;

/// K = conv{(1/2,1), (1,1/2), (1,1)}, closed.
bool in_goal_triangle(const Point& x);
/// S = [-1/2, 1/2]^2, closed.
bool in_goal_square(const Point& x);

struct GoalData {
  ScalarField g;
  VectorField g_vec;
};

/// chi_K (1,0) for problem 1, chi_S (1,1) for problem 2; g = 0.
GoalData characteristic_goal_data(BenchmarkId id);

inline constexpr std::string_view csv_header =
  "ndofs,nElems,primalEstimator,dualEstimator,estimatorProduct,goalValue,goalError,cumWork,cumTime,"
  "stepsPrimal,stepsDual";

void write_history_csv(std::ostream& os, const std::vector<HistoryRecord>& history);

/// Runs the adaptive loop and writes the CSV history to `out`.
/// Throws std::runtime_error if the file cannot be written.
RunResult run_benchmark(const BenchmarkSpec& spec, const AdaptiveParams& params,
                        const std::filesystem::path& out);

/// Least-squares slope of log y against log x over the trailing `window`
/// fraction of the points. Throws std::invalid_argument with fewer than 5
/// points in the window or non-positive data.
double rate_regression(const std::vector<double>& x, const std::vector<double>& y, double window = 0.5);

/// Same on named columns of a CSV history.
double rate_regression(std::istream& csv, std::string_view y_column, std::string_view x_column,
                       double window = 0.5);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column as numbers; empty cells become NaN.
  std::vector<double> column(std::string_view name) const;
};

CsvTable read_csv(std::istream& is);

struct SweepGrid {
  std::vector<double> theta{0.5};
  std::vector<double> lambda_sym{0.7};
  std::vector<double> lambda_alg{0.7};
  double threshold = 1e-6;
  /// Safety net for unreachable thresholds.
  int max_levels = 60;
};

struct SweepCell {
  double theta;
  double lambda_sym;
  double lambda_alg;
  /// eta * zeta * (cumulative seconds)^p at the first level below the
  /// threshold; NaN if the run failed or never got there.
  double weighted_cost;
  bool row_minimum = false;    // over lambda_sym, fixed theta and lambda_alg
  bool column_minimum = false; // over lambda_alg, fixed theta and lambda_sym
};

struct SweepTable {
  std::vector<SweepCell> cells; // theta-major, then lambda_alg, then lambda_sym
  bool has_nan() const;
};

/// Runs every cell of the grid with `base` for the remaining parameters.
SweepTable parameter_sweep(const BenchmarkSpec& spec, const AdaptiveParams& base, const SweepGrid& grid);

void write_sweep_csv(std::ostream& os, const SweepTable& table);

struct BenchConfig {
  BenchmarkId problem = BenchmarkId::GoalSingularity;
  AdaptiveParams params;
  std::string out = "history.csv";
  std::optional<SweepGrid> sweep;
  std::string mesh_out;
};

/// `key = value` lines, `[section]` headers prefix keys with `section.`,
/// `#` starts a comment. Throws std::invalid_argument on unknown keys or bad
/// values, naming the line.
void apply_config(std::istream& is, BenchConfig& config);
void apply_config_value(BenchConfig& config, std::string_view key, std::string_view value);

} // namespace goafem
