#include "oscad/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "oscad/detector.hpp"
#include "oscad/errors.hpp"
#include "oscad/operators.hpp"

namespace oscad {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

long steps_for(double t_fin, double dt) {
  const long n = std::lround(t_fin / dt);
  if (n < 1) throw ConfigError("time step larger than t_fin");
  return n;
}

void common_meta(CsvTable& t, const ExperimentConfig& cfg, const std::string& command) {
  t.meta("command", command);
  t.meta("config_hash", config_hash(cfg));
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  t.meta("timestamp", buf);
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? " " : "") + format_double(v[k]);
  return s;
}

double local_order(double x0, double e0, double x1, double e1) {
  return std::log(e0 / e1) / std::log(x0 / x1);
}

}  // namespace

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex m;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(m);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& e) {
  if (x.size() != e.size() || x.size() < 2) throw std::invalid_argument("fit_slope needs two or more points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double lx = std::log(x[k]), ly = std::log(e[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ErrorNorms mms_run(const ExperimentConfig& cfg, int N) {
  validate(cfg);
  if (shape_from_string(cfg.shape) != ShapeKind::None) throw ConfigError("manufactured solutions need the plain square");
  if (time_factor_from_string(cfg.time_factor) != TimeFactorKind::Constant)
    throw ConfigError("manufactured solutions need a constant time factor");
  const Grid grid = build_grid(N, cfg.a, cfg.b);
  const Classification cls = classify(grid, LevelSet::none());
  ManufacturedCase mc;
  mc.center1 = {cfg.mms_x1, cfg.mms_y1};
  mc.center2 = {cfg.mms_x2, cfg.mms_y2};
  mc.sigma = cfg.mms_sigma;
  mc.D = cfg.D;
  mc.velocity = make_velocity(cfg);
  mc.form = mc.velocity.kind == VelocityKind::Constant ? AdvectionForm::Constant : AdvectionForm::Conservative;

  SparseMatrix op;
  if (cfg.space_order == 4) {
    op = laplacian_4th(cls, cfg.D) + (mc.velocity.kind == VelocityKind::Constant
                                          ? advection_4th_const(cls, mc.velocity.u)
                                          : advection_4th_variable(cls, sample_velocity(mc.velocity, cls)));
  } else {
    if (mc.velocity.kind != VelocityKind::Constant) throw ConfigError("second order operators need constant velocity");
    op = laplacian_2nd(cls, cfg.D) + advection_2nd(cls, mc.velocity.u);
  }
  WallCondition wall{WallKind::Dirichlet, {}};
  if (cfg.mms_wall == "exact") wall.f = [mc](Point p, double t) { return exact_solution(mc, p.x, p.y, t); };
  const ConstraintSet walls = wall_constraints(cls, wall);

  // F(t) = cos(t) F(0) + sin(t) F(pi/2) for this family of exact solutions
  const Field F0 = sample(cls, [&](Point p) { return forcing(mc, p.x, p.y, 0.0); });
  const Field F1 = sample(cls, [&](Point p) { return forcing(mc, p.x, p.y, std::numbers::pi / 2); });
  const long n = steps_for(cfg.t_fin, cfg.dt_ref);
  const double dt = cfg.t_fin / n;
  const CrankNicolson cn(op, walls, dt);
  Field c = sample(cls, [&](Point p) { return exact_solution(mc, p.x, p.y, 0.0); });
  Field Fn = F0;
  for (long k = 0; k < n; ++k) {
    const double t1 = (k + 1) * dt;
    Field Fn1 = std::cos(t1) * F0 + std::sin(t1) * F1;
    c = cn.step(c, Fn, Fn1, t1);
    Fn = std::move(Fn1);
  }
  const Field exact = sample(cls, [&](Point p) { return exact_solution(mc, p.x, p.y, n * dt); });
  return error_norms(c, exact);
}

Field run_integrator(const Problem& p, const ExperimentConfig& cfg, double epsilon, int order, long n_steps,
                     const std::function<void(long, double, const Field&)>& observer) {
  Integrator integ(p.sys, make_time_factor(cfg, epsilon), order);
  return integ.evolve(p.initial(), 0.0, cfg.t_fin, n_steps, observer);
}

std::pair<Field, Field> coincident(const Problem& coarse, const Field& cc, const Problem& fine, const Field& cf) {
  const int Nc = coarse.grid.cells(), Nf = fine.grid.cells();
  if (Nf % Nc != 0) throw ConfigError("reference grid must be an integer refinement of every grid in the sweep");
  const int r = Nf / Nc;
  std::vector<double> a, b;
  for (int k = 0; k < coarse.cls.n_active(); ++k) {
    const int node = coarse.cls.node_of(k);
    if (!coarse.cls.is_fluid(node)) continue;
    const NodeIndex ij = coarse.grid.unflat(node);
    const int fnode = fine.grid.flat(ij.i * r, ij.j * r);
    if (!fine.cls.is_fluid(fnode)) continue;
    a.push_back(cc[k]);
    b.push_back(cf[fine.cls.active_index(fnode)]);
  }
  return {Eigen::Map<Field>(a.data(), a.size()), Eigen::Map<Field>(b.data(), b.size())};
}

ConvergenceReport convergence_space(const ExperimentConfig& cfg) {
  validate(cfg);
  ConvergenceReport rep;
  rep.axis = "N";
  if (cfg.mode == "mms") {
    for (int N : cfg.N_list) {
      const auto t0 = Clock::now();
      rep.errors.push_back(mms_run(cfg, N));
      rep.runtimes.push_back(seconds_since(t0));
      rep.axis_values.push_back(N);
    }
  } else {
    const long n = steps_for(cfg.t_fin, cfg.dt_ref);
    const Problem fine = build_problem(cfg, cfg.N_ref);
    const Field cf = run_integrator(fine, cfg, cfg.epsilon, cfg.order, n);
    for (int N : cfg.N_list) {
      const auto t0 = Clock::now();
      const Problem p = build_problem(cfg, N);
      const Field c = run_integrator(p, cfg, cfg.epsilon, cfg.order, n);
      const auto [num, ref] = coincident(p, c, fine, cf);
      rep.errors.push_back(error_norms(num, ref));
      rep.runtimes.push_back(seconds_since(t0));
      rep.axis_values.push_back(N);
    }
  }
  const std::size_t m = std::min<std::size_t>(cfg.fit_points, rep.errors.size());
  std::vector<double> h, e;
  for (std::size_t k = rep.errors.size() - m; k < rep.errors.size(); ++k) {
    h.push_back((cfg.b - cfg.a) / rep.axis_values[k]);
    e.push_back(rep.errors[k].e2);
  }
  rep.slope_e2 = m >= 2 ? fit_slope(h, e) : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

ConvergenceReport convergence_time(const ExperimentConfig& cfg, double epsilon) {
  validate(cfg);
  ConvergenceReport rep;
  rep.axis = "n_steps";
  const Problem p = build_problem(cfg, cfg.N);
  const Field ref = run_integrator(p, cfg, epsilon, cfg.order, steps_for(cfg.t_fin, cfg.dt_ref));
  for (long nts : cfg.nts_list) {
    const auto t0 = Clock::now();
    const Field c = run_integrator(p, cfg, epsilon, cfg.order, nts);
    rep.runtimes.push_back(seconds_since(t0));
    rep.errors.push_back(error_norms(c, ref));
    rep.axis_values.push_back(static_cast<double>(nts));
  }
  const std::size_t m = std::min<std::size_t>(cfg.fit_points, rep.errors.size());
  std::vector<double> dt, e;
  for (std::size_t k = 0; k < rep.errors.size(); ++k) {
    if (k + m < rep.errors.size()) continue;
    dt.push_back(cfg.t_fin / rep.axis_values[k]);
    e.push_back(rep.errors[k].e2);
  }
  rep.slope_e2 = m >= 2 ? fit_slope(dt, e) : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

std::vector<Sample> detector_series(const Problem& p, const ExperimentConfig& cfg, double dt, int order) {
  std::vector<Sample> out;
  const Point P{cfg.px, cfg.py};
  probe(p.cls, p.initial(), P);  // rejects points in the obstacle before any work
  run_integrator(p, cfg, cfg.epsilon, order, steps_for(cfg.t_fin, dt),
                 [&](long, double t, const Field& c) { out.push_back({t, probe(p.cls, c, P)}); });
  return out;
}

double max_gap(const std::vector<Sample>& s, const std::vector<Sample>& ref) {
  if (ref.size() < 2) throw std::invalid_argument("reference series too short");
  double gap = 0.0;
  std::size_t j = 0;
  for (const Sample& x : s) {
    while (j + 2 < ref.size() && ref[j + 1].t < x.t) ++j;
    const double w = std::clamp((x.t - ref[j].t) / (ref[j + 1].t - ref[j].t), 0.0, 1.0);
    const double r = (1 - w) * ref[j].value + w * ref[j + 1].value;
    gap = std::max(gap, std::abs(x.value - r));
  }
  return gap;
}

CsvTable table_convergence_space(const ExperimentConfig& cfg) {
  const ConvergenceReport rep = convergence_space(cfg);
  CsvTable t({"N", "h", "e1", "e2", "einf", "order"});
  common_meta(t, cfg, "convergence-space");
  t.meta("mode", cfg.mode == "mms" ? "exact manufactured solution" : "self reference at N_ref");
  t.meta("slope_e2", format_double(rep.slope_e2));
  t.meta("runtimes_s", join(rep.runtimes));
  for (std::size_t k = 0; k < rep.errors.size(); ++k) {
    const double h = (cfg.b - cfg.a) / rep.axis_values[k];
    const double ord = k == 0 ? std::numeric_limits<double>::quiet_NaN()
                              : local_order((cfg.b - cfg.a) / rep.axis_values[k - 1], rep.errors[k - 1].e2, h,
                                            rep.errors[k].e2);
    t.row({rep.axis_values[k], h, rep.errors[k].e1, rep.errors[k].e2, rep.errors[k].einf, ord});
  }
  return t;
}

CsvTable table_convergence_time(const ExperimentConfig& cfg) {
  validate(cfg);
  std::vector<ConvergenceReport> reps(cfg.eps_list.size());
  parallel_for(static_cast<int>(reps.size()), cfg.threads,
               [&](int i) { reps[i] = convergence_time(cfg, cfg.eps_list[i]); });
  CsvTable t({"epsilon", "n_steps", "dt", "e1", "e2", "einf", "order"});
  common_meta(t, cfg, "convergence-time");
  for (std::size_t i = 0; i < reps.size(); ++i) {
    t.meta("slope_e2 eps=" + format_double(cfg.eps_list[i]), format_double(reps[i].slope_e2));
    t.meta("runtimes_s eps=" + format_double(cfg.eps_list[i]), join(reps[i].runtimes));
    const auto& r = reps[i];
    for (std::size_t k = 0; k < r.errors.size(); ++k) {
      const double dt = cfg.t_fin / r.axis_values[k];
      const double ord = k == 0 ? std::numeric_limits<double>::quiet_NaN()
                                : local_order(cfg.t_fin / r.axis_values[k - 1], r.errors[k - 1].e2, dt, r.errors[k].e2);
      t.row({cfg.eps_list[i], r.axis_values[k], dt, r.errors[k].e1, r.errors[k].e2, r.errors[k].einf, ord});
    }
  }
  return t;
}

CsvTable table_eps_sweep(const ExperimentConfig& cfg) {
  validate(cfg);
  const bool time = cfg.axis == "time";
  std::vector<ConvergenceReport> reps(cfg.eps_list.size());
  parallel_for(static_cast<int>(reps.size()), cfg.threads, [&](int i) {
    if (time) {
      reps[i] = convergence_time(cfg, cfg.eps_list[i]);
    } else {
      ExperimentConfig c = cfg;
      c.mode = "reference";
      c.epsilon = cfg.eps_list[i];
      reps[i] = convergence_space(c);
    }
  });
  std::vector<std::string> cols = time ? std::vector<std::string>{"n_steps", "dt"} : std::vector<std::string>{"N", "h"};
  for (double e : cfg.eps_list) cols.push_back("e2_eps=" + format_double(e));
  CsvTable t(cols);
  common_meta(t, cfg, "eps-sweep");
  t.meta("axis", cfg.axis);
  for (std::size_t i = 0; i < reps.size(); ++i)
    t.meta("slope_e2 eps=" + format_double(cfg.eps_list[i]), format_double(reps[i].slope_e2));
  const std::size_t rows = reps.empty() ? 0 : reps[0].errors.size();
  for (std::size_t k = 0; k < rows; ++k) {
    const double x = reps[0].axis_values[k];
    std::vector<double> r{x, time ? cfg.t_fin / x : (cfg.b - cfg.a) / x};
    for (const auto& rep : reps) r.push_back(rep.errors[k].e2);
    t.row(r);
  }
  return t;
}

CsvTable table_detector(const ExperimentConfig& cfg) {
  validate(cfg);
  const Problem p = build_problem(cfg, cfg.N);
  const auto series = detector_series(p, cfg, cfg.dt, cfg.order);
  CsvTable t({"t", "c_P"});
  common_meta(t, cfg, "detector");
  t.meta("probe", "bicubic interpolation from the surrounding 4x4 fluid block");
  t.meta("P", format_double(cfg.px) + " " + format_double(cfg.py));
  if (p.M > 0) t.meta("M", format_double(p.M) + (cfg.M ? " (given)" : " (from delta)"));
  for (std::size_t k = 0; k < series.size(); ++k)
    if (k % cfg.stride == 0 || k + 1 == series.size()) t.row({series[k].t, series[k].value});
  return t;
}

CsvTable table_detector_gaps(const ExperimentConfig& cfg) {
  validate(cfg);
  if (cfg.dt_list.empty()) throw ConfigError("detector gaps need dt_list");
  const Problem p = build_problem(cfg, cfg.N);
  const auto ref = detector_series(p, cfg, cfg.dt_ref, 3);
  std::vector<std::pair<int, double>> runs;
  for (int order : cfg.orders)
    for (double dt : cfg.dt_list) runs.emplace_back(order, dt);
  std::vector<double> gaps(runs.size());
  parallel_for(static_cast<int>(runs.size()), cfg.threads, [&](int i) {
    gaps[i] = max_gap(detector_series(p, cfg, runs[i].second, runs[i].first), ref);
  });
  CsvTable t({"order", "dt", "max_gap"});
  common_meta(t, cfg, "detector");
  t.meta("probe", "bicubic interpolation from the surrounding 4x4 fluid block");
  t.meta("reference", "order 3 at dt_ref");
  if (p.M > 0) t.meta("M", format_double(p.M) + (cfg.M ? " (given)" : " (from delta)"));
  for (std::size_t i = 0; i < runs.size(); ++i) t.row({double(runs[i].first), runs[i].second, gaps[i]});
  return t;
}

CsvTable table_cpu_pareto(const ExperimentConfig& cfg) {
  validate(cfg);
  if (cfg.dt_list.empty()) throw ConfigError("cpu-pareto needs dt_list");
  const Problem p = build_problem(cfg, cfg.N);
  const Field ref = run_integrator(p, cfg, cfg.epsilon, 3, steps_for(cfg.t_fin, cfg.dt_ref));
  CsvTable t({"order", "dt", "n_steps", "seconds", "e1", "e2", "einf"});
  common_meta(t, cfg, "cpu-pareto");
  t.meta("reference", "order 3 at dt_ref");
  for (int order : cfg.orders) {
    for (double dt : cfg.dt_list) {
      const long n = steps_for(cfg.t_fin, dt);
      double best = std::numeric_limits<double>::infinity();
      Field c;
      for (int r = 0; r < cfg.repeats; ++r) {
        const auto t0 = Clock::now();
        c = run_integrator(p, cfg, cfg.epsilon, order, n);
        best = std::min(best, seconds_since(t0));
      }
      const ErrorNorms e = error_norms(c, ref);
      t.row({static_cast<double>(order), cfg.t_fin / n, static_cast<double>(n), best, e.e1, e.e2, e.einf});
    }
  }
  return t;
}

}  // namespace oscad
