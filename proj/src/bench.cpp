#include "goafem/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace goafem {

BenchmarkId parse_benchmark(std::string_view name)
{
  if (name == "goal-singularity" || name == "1")
    return BenchmarkId::GoalSingularity;
  if (name == "zshape-convection" || name == "2")
    return BenchmarkId::ZShapeConvection;
  throw std::invalid_argument("unknown problem '" + std::string(name) + "'");
}

std::string_view to_string(BenchmarkId id)
{
  return id == BenchmarkId::GoalSingularity ? "goal-singularity" : "zshape-convection";
}

double problem1_solution(const Point& x)
{
  return x.x() * x.y() * (1.0 - x.x()) * (1.0 - x.y());
}

Vec2 problem1_gradient(const Point& x)
{
  const double a = x.x(), b = x.y();
  return {b * (1.0 - b) * (1.0 - 2.0 * a), a * (1.0 - a) * (1.0 - 2.0 * b)};
}

ScalarField manufacture_rhs_problem1()
{
  return [](const Point& x) {
    const double a = x.x(), b = x.y();
    const double laplacian = -2.0 * b * (1.0 - b) - 2.0 * a * (1.0 - a);
    return -laplacian + x.dot(problem1_gradient(x)) + problem1_solution(x);
  };
}

bool in_goal_triangle(const Point& x)
{
  return x.x() <= 1.0 && x.y() <= 1.0 && x.x() + x.y() >= 1.5;
}

bool in_goal_square(const Point& x)
{
  return std::abs(x.x()) <= 0.5 && std::abs(x.y()) <= 0.5;
}

GoalData characteristic_goal_data(BenchmarkId id)
{
  GoalData out;
  out.g = [](const Point&) { return 0.0; };
  if (id == BenchmarkId::GoalSingularity)
    out.g_vec = [](const Point& x) { return in_goal_triangle(x) ? Vec2(1.0, 0.0) : Vec2(0.0, 0.0); };
  else
    out.g_vec = [](const Point& x) { return in_goal_square(x) ? Vec2(1.0, 1.0) : Vec2(0.0, 0.0); };
  return out;
}

BenchmarkSpec make_benchmark(BenchmarkId id)
{
  BenchmarkSpec spec{id, Domain::UnitSquare, 0, {}, std::nullopt, {}, {}};
  auto goal = characteristic_goal_data(id);
  spec.data.g = goal.g;
  spec.data.g_vec = goal.g_vec;
  if (id == BenchmarkId::GoalSingularity) {
    // the 2-triangle square has no free node
    spec.initial_refinements = 1;
    spec.data.convection = [](const Point& x) { return Vec2(x); };
    spec.data.convection_divergence = [](const Point&) { return 2.0; };
    spec.data.reaction = [](const Point&) { return 1.0; };
    spec.data.f = manufacture_rhs_problem1();
    spec.exact_goal = problem1_goal;
    spec.exact_solution = problem1_solution;
    spec.exact_gradient = problem1_gradient;
  } else {
    spec.domain = Domain::ZShape;
    spec.data.convection = [](const Point&) { return Vec2(5.0, 5.0); };
    spec.data.f = [](const Point&) { return 1.0; };
  }
  return spec;
}

Triangulation benchmark_mesh(const BenchmarkSpec& spec)
{
  return refine_uniform(initial_mesh(spec.domain), spec.initial_refinements);
}

namespace {

std::string format_number(double v)
{
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

} // namespace

void write_history_csv(std::ostream& os, const std::vector<HistoryRecord>& history)
{
  os << csv_header << '\n';
  for (const auto& r : history) {
    os << r.ndofs << ',' << r.elements << ',' << format_number(r.primal_estimator) << ','
       << format_number(r.dual_estimator) << ',' << format_number(r.estimator_product) << ','
       << format_number(r.goal_value) << ',' << (r.goal_error ? format_number(*r.goal_error) : "") << ','
       << format_number(r.cumulative_cost) << ',' << format_number(r.cumulative_time) << ','
       << r.steps_primal << ',' << r.steps_dual << '\n';
  }
}

RunResult run_benchmark(const BenchmarkSpec& spec, const AdaptiveParams& params,
                        const std::filesystem::path& out)
{
  std::ofstream file(out);
  if (!file)
    throw std::runtime_error("cannot open '" + out.string() + "' for writing");
  auto result = run(benchmark_mesh(spec), spec.data, params, spec.exact_goal);
  write_history_csv(file, result.history);
  if (!file)
    throw std::runtime_error("error writing '" + out.string() + "'");
  return result;
}

double rate_regression(const std::vector<double>& x, const std::vector<double>& y, double window)
{
  if (x.size() != y.size())
    throw std::invalid_argument("rate_regression: column lengths differ");
  if (!(window > 0.0 && window <= 1.0))
    throw std::invalid_argument("rate_regression: window must lie in (0, 1]");
  const std::size_t count = static_cast<std::size_t>(std::ceil(window * static_cast<double>(x.size())));
  if (count < 5)
    throw std::invalid_argument("rate_regression: fewer than 5 points in the window");
  const std::size_t first = x.size() - count;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = first; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("rate_regression: data must be positive");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(count);
  const double denom = n * sxx - sx * sx;
  if (!(denom > 0.0))
    throw std::invalid_argument("rate_regression: x values do not vary");
  return (n * sxy - sx * sy) / denom;
}

double rate_regression(std::istream& csv, std::string_view y_column, std::string_view x_column,
                       double window)
{
  const auto table = read_csv(csv);
  return rate_regression(table.column(x_column), table.column(y_column), window);
}

namespace {

std::vector<std::string> split(std::string_view line, char sep)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos)
      return out;
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view s)
{
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  return v;
}

int parse_int(std::string_view s)
{
  s = trim(s);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  return v;
}

bool parse_bool(std::string_view s)
{
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes" || s == "on")
    return true;
  if (s == "false" || s == "0" || s == "no" || s == "off")
    return false;
  throw std::invalid_argument("not a boolean: '" + std::string(s) + "'");
}

std::vector<double> parse_list(std::string_view s)
{
  std::vector<double> out;
  for (const auto& item : split(s, ','))
    out.push_back(parse_double(item));
  if (out.empty())
    throw std::invalid_argument("empty list");
  return out;
}

} // namespace

CsvTable read_csv(std::istream& is)
{
  CsvTable table;
  std::string line;
  if (!std::getline(is, line))
    throw std::invalid_argument("read_csv: missing header");
  table.header = split(trim(line), ',');
  while (std::getline(is, line)) {
    if (trim(line).empty())
      continue;
    auto row = split(trim(line), ',');
    if (row.size() != table.header.size())
      throw std::invalid_argument("read_csv: row has " + std::to_string(row.size()) + " fields, expected " +
                                  std::to_string(table.header.size()));
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<double> CsvTable::column(std::string_view name) const
{
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end())
    throw std::invalid_argument("no column '" + std::string(name) + "'");
  const auto c = static_cast<std::size_t>(it - header.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows)
    out.push_back(trim(row[c]).empty() ? std::numeric_limits<double>::quiet_NaN() : parse_double(row[c]));
  return out;
}

bool SweepTable::has_nan() const
{
  return std::any_of(cells.begin(), cells.end(), [](const SweepCell& c) { return std::isnan(c.weighted_cost); });
}

SweepTable parameter_sweep(const BenchmarkSpec& spec, const AdaptiveParams& base, const SweepGrid& grid)
{
  if (grid.theta.empty() || grid.lambda_sym.empty() || grid.lambda_alg.empty())
    throw std::invalid_argument("parameter_sweep: empty grid");
  const auto mesh = benchmark_mesh(spec);
  SweepTable table;
  for (double theta : grid.theta)
    for (double lambda_alg : grid.lambda_alg)
      for (double lambda_sym : grid.lambda_sym) {
        AdaptiveParams params = base;
        params.theta = theta;
        params.lambda_sym = lambda_sym;
        params.lambda_alg = lambda_alg;
        params.diagnostics = false;
        params.termination = {grid.threshold, std::nullopt, grid.max_levels};
        double cost = std::numeric_limits<double>::quiet_NaN();
        try {
          const auto result = run(mesh, spec.data, params, spec.exact_goal);
          const auto& last = result.history.back();
          if (last.estimator_product < grid.threshold)
            cost = last.estimator_product * std::pow(last.cumulative_time, params.degree);
        } catch (const std::exception&) {
          // recorded as NaN
        }
        table.cells.push_back({theta, lambda_sym, lambda_alg, cost});
      }

  // minima within each theta block
  const std::size_t ns = grid.lambda_sym.size(), na = grid.lambda_alg.size();
  auto cell = [&](std::size_t t, std::size_t a, std::size_t s) -> SweepCell& {
    return table.cells[(t * na + a) * ns + s];
  };
  auto mark_min = [](std::vector<SweepCell*> group, bool SweepCell::*flag) {
    SweepCell* best = nullptr;
    for (auto* c : group)
      if (!std::isnan(c->weighted_cost) && (!best || c->weighted_cost < best->weighted_cost))
        best = c;
    if (best)
      best->*flag = true;
  };
  for (std::size_t t = 0; t < grid.theta.size(); ++t) {
    if (ns * na == 1)
      continue;
    for (std::size_t a = 0; a < na; ++a) {
      std::vector<SweepCell*> row;
      for (std::size_t s = 0; s < ns; ++s)
        row.push_back(&cell(t, a, s));
      mark_min(row, &SweepCell::row_minimum);
    }
    for (std::size_t s = 0; s < ns; ++s) {
      std::vector<SweepCell*> col;
      for (std::size_t a = 0; a < na; ++a)
        col.push_back(&cell(t, a, s));
      mark_min(col, &SweepCell::column_minimum);
    }
  }
  return table;
}

void write_sweep_csv(std::ostream& os, const SweepTable& table)
{
  os << "theta,lambdaSym,lambdaAlg,weightedCost,rowMin,colMin\n";
  for (const auto& c : table.cells)
    os << c.theta << ',' << c.lambda_sym << ',' << c.lambda_alg << ','
       << (std::isnan(c.weighted_cost) ? std::string("nan") : format_number(c.weighted_cost)) << ','
       << c.row_minimum << ',' << c.column_minimum << '\n';
}

void apply_config_value(BenchConfig& config, std::string_view key, std::string_view value)
{
  auto& p = config.params;
  auto sweep = [&]() -> SweepGrid& {
    if (!config.sweep)
      config.sweep.emplace();
    return *config.sweep;
  };
  value = trim(value);
  if (key == "problem")
    config.problem = parse_benchmark(value);
  else if (key == "fem.degree" || key == "p")
    p.degree = parse_int(value);
  else if (key == "adaptive.theta" || key == "theta")
    p.theta = parse_double(value);
  else if (key == "adaptive.lambda_sym" || key == "lambda_sym")
    p.lambda_sym = parse_double(value);
  else if (key == "adaptive.lambda_alg" || key == "lambda_alg")
    p.lambda_alg = parse_double(value);
  else if (key == "zarantonello.delta" || key == "delta")
    p.delta = parse_double(value);
  else if (key == "solver.kind")
    p.solver.kind = parse_solver_kind(value);
  else if (key == "solver.omega")
    p.solver.omega = parse_double(value);
  else if (key == "termination.tol")
    p.termination.estimator_product_below = parse_double(value);
  else if (key == "termination.max_cost")
    p.termination.max_cumulative_cost = parse_double(value);
  else if (key == "termination.max_levels")
    p.termination.max_levels = parse_int(value);
  else if (key == "diagnostics")
    p.diagnostics = parse_bool(value);
  else if (key == "output.csv" || key == "out")
    config.out = std::string(value);
  else if (key == "output.mesh")
    config.mesh_out = std::string(value);
  else if (key == "sweep.theta")
    sweep().theta = parse_list(value);
  else if (key == "sweep.lambda_sym")
    sweep().lambda_sym = parse_list(value);
  else if (key == "sweep.lambda_alg")
    sweep().lambda_alg = parse_list(value);
  else if (key == "sweep.threshold")
    sweep().threshold = parse_double(value);
  else if (key == "sweep.max_levels")
    sweep().max_levels = parse_int(value);
  else
    throw std::invalid_argument("unknown key '" + std::string(key) + "'");
}

void apply_config(std::istream& is, BenchConfig& config)
{
  std::string line, section;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos)
      text = text.substr(0, hash);
    text = trim(text);
    if (text.empty())
      continue;
    try {
      if (text.front() == '[') {
        if (text.back() != ']')
          throw std::invalid_argument("unterminated section header");
        section = std::string(trim(text.substr(1, text.size() - 2)));
        continue;
      }
      const auto eq = text.find('=');
      if (eq == std::string_view::npos)
        throw std::invalid_argument("expected 'key = value'");
      const auto key = trim(text.substr(0, eq));
      const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
      apply_config_value(config, full, text.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(number) + ": " + e.what());
    }
  }
}

} // namespace goafem
