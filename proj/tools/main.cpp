// Command line front end: one subcommand per experiment, each writing one CSV.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "oscad/adsorption.hpp"
#include "oscad/errors.hpp"
#include "oscad/experiments.hpp"

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out;
  std::optional<int> N, order, threads;
  std::optional<double> dt, epsilon;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("-c,--config", c.config_path, "JSON file with experiment fields")->check(CLI::ExistingFile);
  sub->add_option("-s,--set", c.sets, "override a field, key=value (repeatable)");
  sub->add_option("-o,--out", c.out, "output CSV (default: the csv field)");
  sub->add_option("--N", c.N, "grid cells per side");
  sub->add_option("--order", c.order, "integrator order");
  sub->add_option("--dt", c.dt, "time step");
  sub->add_option("--epsilon", c.epsilon, "oscillation period");
  sub->add_option("--threads", c.threads, "worker threads, 0 = all cores");
}

oscad::ExperimentConfig load(const Common& c) {
  oscad::ExperimentConfig cfg;
  if (!c.config_path.empty()) {
    std::ifstream in(c.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    cfg = oscad::config_from_json(ss.str());
  }
  cfg = oscad::apply_overrides(cfg, c.sets);
  if (c.N) cfg.N = *c.N;
  if (c.order) cfg.order = *c.order;
  if (c.dt) cfg.dt = *c.dt;
  if (c.epsilon) cfg.epsilon = *c.epsilon;
  if (c.threads) cfg.threads = *c.threads;
  if (!c.out.empty()) cfg.csv = c.out;
  oscad::validate(cfg);
  return cfg;
}

void emit(const oscad::CsvTable& t, const std::string& path) {
  if (path == "-") {
    std::cout << t.str();
  } else {
    t.write(path);
    std::cerr << "wrote " << path << " (" << t.rows().size() << " rows)\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Advection-diffusion experiments around embedded obstacles"};
  app.require_subcommand(1);

  Common space, time, sweep, det, pareto;
  auto* s_space = app.add_subcommand("convergence-space", "spatial convergence table");
  add_common(s_space, space);
  auto* s_time = app.add_subcommand("convergence-time", "temporal self-convergence per epsilon");
  add_common(s_time, time);
  auto* s_sweep = app.add_subcommand("eps-sweep", "error matrix over epsilon");
  add_common(s_sweep, sweep);
  auto* s_det = app.add_subcommand("detector", "concentration time series at a probe point");
  add_common(s_det, det);
  bool gaps = false;
  s_det->add_flag("--gaps", gaps, "write max-gap per (order, dt_list entry) against the dt_ref series instead");
  auto* s_pareto = app.add_subcommand("cpu-pareto", "wall time versus error for orders 2 and 3");
  add_common(s_pareto, pareto);

  double delta = 1e-2, phi = 1.0, L = 2.0;
  auto* s_m = app.add_subcommand("compute-m", "adsorption length from the layer integral");
  s_m->add_option("--delta", delta)->check(CLI::PositiveNumber);
  s_m->add_option("--phi", phi);
  s_m->add_option("--L", L)->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*s_space) {
      auto cfg = load(space);
      emit(oscad::table_convergence_space(cfg), cfg.csv);
    } else if (*s_time) {
      auto cfg = load(time);
      emit(oscad::table_convergence_time(cfg), cfg.csv);
    } else if (*s_sweep) {
      auto cfg = load(sweep);
      emit(oscad::table_eps_sweep(cfg), cfg.csv);
    } else if (*s_det) {
      auto cfg = load(det);
      emit(gaps ? oscad::table_detector_gaps(cfg) : oscad::table_detector(cfg), cfg.csv);
    } else if (*s_pareto) {
      auto cfg = load(pareto);
      emit(oscad::table_cpu_pareto(cfg), cfg.csv);
    } else if (*s_m) {
      std::printf("%.17g\n", oscad::compute_M(delta, phi, L));
    }
  } catch (const oscad::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
