#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "facloc/geometry.hpp"
#include "facloc/radii.hpp"
#include "facloc/solvers.hpp"

namespace facloc {

enum class Statistic { CostGreedy, CostGrid, SumR, SumRSq, MeanR };

Statistic statistic_from_string(const std::string& name);
std::string to_string(Statistic s);

struct TrialRecord {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double sum_r = 0.0;
  double sum_r_sq = 0.0;
  double cost_greedy = 0.0;
  double cost_grid = 0.0;
  double mean_r = 0.0;
};

double statistic_value(const TrialRecord& rec, Statistic s);

struct ScalingFit {
  double exponent = 0.0;        // slope in log-log
  double log_intercept = 0.0;
  double r_squared = 0.0;
  double stderr_exponent = 0.0;
  bool low_confidence = false;  // dispersion fits from too few trials
};

struct ExperimentConfig {
  std::vector<std::size_t> n_list;
  std::size_t trials = 30;
  std::uint64_t master_seed = 0;
  Statistic statistic = Statistic::CostGreedy;
  double gamma = 2.0;
};

struct DispersionRow {
  std::size_t n = 0;
  double std_dev = 0.0;
  double iqw90 = 0.0;  // central 90% interquantile width
  double median = 0.0;
  double mean = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<TrialRecord> records;              // (n asc, trial asc)
  std::vector<DispersionRow> dispersion;         // for config.statistic
  std::map<std::string, ScalingFit> fits;
  std::map<std::string, std::vector<double>> series;  // per-n fitted values
};

// One record per (n, trial); trial seed = derive_seed(master_seed, n, t),
// so records are a pure function of the config and identical for any
// worker count.
std::vector<TrialRecord> run_trials(const ExperimentConfig& config);

// Ordinary least squares of log(ys) on log(xs).
ScalingFit fit_loglog(const std::vector<double>& xs,
                      const std::vector<double>& ys);

// Mean-vs-n fits for every statistic (dispersion table included).
ExperimentResult run_scaling(const ExperimentConfig& config);
// Adds std-dev and interquantile-width fits for config.statistic, keyed
// "<statistic>_std" and "<statistic>_iqw90".
ExperimentResult run_concentration(const ExperimentConfig& config);

struct IncrementRow {
  std::size_t m = 0;           // prefix size before the insertion
  double mean_radius = 0.0;    // inserted point's radius over the m+1 set
  double partial_sum_sq = 0.0; // sum over i<=m of squared fitted means
};

struct IncrementResult {
  std::size_t n_max = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<IncrementRow> rows;
  ScalingFit radius_fit;       // mean inserted radius vs m
  ScalingFit partial_sum_fit;  // partial sums of squared fitted means vs m
};

IncrementResult run_increment_profile(std::size_t n_max, std::size_t trials,
                                      std::uint64_t seed);

// Type-7 quantile (linear interpolation between order statistics) of a
// sorted sample.
double quantile_type7(const std::vector<double>& sorted, double p);
double sample_std(const std::vector<double>& values);

std::string to_json_string(const ExperimentResult& result);
std::string to_json_string(const IncrementResult& result);
std::string records_to_csv(const std::vector<TrialRecord>& records);

// ---- invariant verification ----

struct CheckResult {
  std::string name;
  bool pass = true;
  std::size_t checked = 0;
  std::string detail;
  std::string counterexample_csv;  // first failing instance, if any
};

struct VerifyOptions {
  std::size_t radii_instances = 1000;
  std::size_t solver_instances = 200;
  std::size_t insert_instances = 100;
  std::uint64_t seed = 0;
  double gamma = 2.0;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_pass() const;
};

// Runs every radii and solver invariant over randomized instances plus
// coincident / collinear / grid fixtures.
VerifyReport verify_properties(const VerifyOptions& options);

// Granular checks, shared with the unit tests (which also feed them
// corrupted inputs to prove violations are detected).
std::optional<std::size_t> lemma2_violation(const PointSet& X,
                                            const std::vector<double>& radii,
                                            double tol = 1e-9);
std::optional<std::pair<std::size_t, std::size_t>> prop3_violation(
    const PointSet& X, const std::vector<double>& radii, double tol = 1e-9);
std::optional<std::string> solution_issue(const PointSet& X,
                                          const FacilitySolution& sol,
                                          bool require_each_serves);

}  // namespace facloc
