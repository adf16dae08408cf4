#pragma once

#include <functional>

#include "oscad/config.hpp"
#include "oscad/csv.hpp"
#include "oscad/mms.hpp"
#include "oscad/system.hpp"

namespace oscad {

struct ConvergenceReport {
  std::string axis;  // "N" or "n_steps"
  std::vector<double> axis_values;
  std::vector<ErrorNorms> errors;
  std::vector<double> runtimes;  // seconds per run
  double slope_e2 = 0.0;         // fitted over the last fit_points entries
};

/// log-log least squares slope of e against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& e);

/// Forced Crank-Nicolson run on the square, returning the error against the exact solution.
ErrorNorms mms_run(const ExperimentConfig& cfg, int N);

/// mode "mms": exact-solution errors; mode "reference": errors against the N_ref solution.
ConvergenceReport convergence_space(const ExperimentConfig& cfg);
/// Integrator self-convergence in time for one epsilon.
ConvergenceReport convergence_time(const ExperimentConfig& cfg, double epsilon);

Field run_integrator(const Problem& p, const ExperimentConfig& cfg, double epsilon, int order, long n_steps,
                     const std::function<void(long, double, const Field&)>& observer = {});

/// Restriction of a fine solution to the nodes of a coarse grid, on the coarse fluid nodes.
std::pair<Field, Field> coincident(const Problem& coarse, const Field& c_coarse, const Problem& fine,
                                   const Field& c_fine);

struct Sample {
  double t;
  double value;
};

/// Detector series at P = (px, py) for one (dt, order) run.
std::vector<Sample> detector_series(const Problem& p, const ExperimentConfig& cfg, double dt, int order);
/// Largest difference to a reference series, taken at the sample times of `series`
/// (reference interpolated linearly in time).
double max_gap(const std::vector<Sample>& series, const std::vector<Sample>& reference);

/// CLI level drivers returning the table that is written to disk.
CsvTable table_convergence_space(const ExperimentConfig& cfg);
CsvTable table_convergence_time(const ExperimentConfig& cfg);
CsvTable table_eps_sweep(const ExperimentConfig& cfg);
CsvTable table_detector(const ExperimentConfig& cfg);
/// Max-gap of every (order, dt in dt_list) detector series to the dt_ref series.
CsvTable table_detector_gaps(const ExperimentConfig& cfg);
CsvTable table_cpu_pareto(const ExperimentConfig& cfg);

/// Runs fn(i) for i in [0,count) on up to `threads` workers (0 = hardware concurrency).
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace oscad
