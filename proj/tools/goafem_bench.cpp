// Benchmark runner: one adaptive run written as a CSV history, or a
// parameter sweep written as a weighted-cost table.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "goafem/bench.hpp"

namespace {

int run_single(const goafem::BenchConfig& config)
{
  const auto spec = goafem::make_benchmark(config.problem);
  const auto result = goafem::run_benchmark(spec, config.params, config.out);
  const auto& last = result.history.back();
  std::printf("%s p=%d: %zu levels, %zu dofs, estimator product %.3e, cumulative cost %.0f, %.2f s\n",
              std::string(goafem::to_string(config.problem)).c_str(), config.params.degree,
              result.history.size(), last.ndofs, last.estimator_product, last.cumulative_cost,
              last.cumulative_time);
  if (last.goal_error)
    std::printf("goal value %.10f, error %.3e\n", last.goal_value, *last.goal_error);
  else
    std::printf("goal value %.10f\n", last.goal_value);
  if (result.exact)
    std::printf("estimator product vanished; discrete solution is exact\n");

  if (!config.mesh_out.empty()) {
    std::ofstream mesh(config.mesh_out);
    if (!mesh)
      throw std::runtime_error("cannot open '" + config.mesh_out + "' for writing");
    goafem::write_mesh(mesh, result.meshes->finest());
  }
  return 0;
}

int run_sweep(const goafem::BenchConfig& config)
{
  const auto spec = goafem::make_benchmark(config.problem);
  const auto table = goafem::parameter_sweep(spec, config.params, *config.sweep);
  std::ofstream out(config.out);
  if (!out)
    throw std::runtime_error("cannot open '" + config.out + "' for writing");
  goafem::write_sweep_csv(out, table);
  goafem::write_sweep_csv(std::cout, table);
  return table.has_nan() ? 2 : 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Goal-oriented adaptive FEM benchmarks"};
  std::string config_file, problem, solver;
  int degree = 1, max_levels = 0;
  double theta = 0, delta = 0, lambda_sym = 0, lambda_alg = 0, tol = 0, max_cost = 0;
  std::string out, mesh_out;
  bool diagnostics = false, sweep = false;

  app.add_option("-c,--config", config_file, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--problem", problem, "goal-singularity (1) or zshape-convection (2)");
  app.add_option("--p", degree, "polynomial degree")->check(CLI::Range(1, 3));
  app.add_option("--theta", theta, "Doerfler parameter");
  app.add_option("--delta", delta, "Zarantonello damping");
  app.add_option("--lambda-sym", lambda_sym, "symmetrization stopping parameter");
  app.add_option("--lambda-alg", lambda_alg, "algebraic stopping parameter");
  app.add_option("--tol", tol, "stop once the estimator product is below this");
  app.add_option("--max-cost", max_cost, "stop once the cumulative cost reaches this");
  app.add_option("--max-levels", max_levels, "stop after this many refinements");
  app.add_option("--solver", solver, "vcycle or psd");
  app.add_option("--out", out, "CSV output path");
  app.add_option("--mesh-out", mesh_out, "write the final mesh here");
  app.add_flag("--diagnostics", diagnostics, "compute quasi-errors with direct solves");
  app.add_flag("--sweep", sweep, "run the parameter sweep from the config file");
  CLI11_PARSE(app, argc, argv);

  try {
    goafem::BenchConfig config;
    if (!config_file.empty()) {
      std::ifstream is(config_file);
      goafem::apply_config(is, config);
    }
    auto& p = config.params;
    if (app.count("--problem"))
      config.problem = goafem::parse_benchmark(problem);
    if (app.count("--p"))
      p.degree = degree;
    if (app.count("--theta"))
      p.theta = theta;
    if (app.count("--delta"))
      p.delta = delta;
    if (app.count("--lambda-sym"))
      p.lambda_sym = lambda_sym;
    if (app.count("--lambda-alg"))
      p.lambda_alg = lambda_alg;
    if (app.count("--tol"))
      p.termination.estimator_product_below = tol;
    if (app.count("--max-cost"))
      p.termination.max_cumulative_cost = max_cost;
    if (app.count("--max-levels"))
      p.termination.max_levels = max_levels;
    if (app.count("--solver"))
      p.solver.kind = goafem::parse_solver_kind(solver);
    if (app.count("--out"))
      config.out = out;
    if (app.count("--mesh-out"))
      config.mesh_out = mesh_out;
    if (diagnostics)
      p.diagnostics = true;
    if (p.termination.empty())
      p.termination.max_cumulative_cost = 1e5;

    if (sweep) {
      if (!config.sweep)
        config.sweep.emplace();
      if (app.count("--tol"))
        config.sweep->threshold = tol;
      return run_sweep(config);
    }
    return run_single(config);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
