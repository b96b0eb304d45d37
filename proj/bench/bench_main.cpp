// Timing comparison of the OpenMP kernels against their serial reference
// implementations. Results must match bit for bit; a mismatch is a hard
// failure.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "facloc/experiments.hpp"
#include "facloc/radii.hpp"
#include "facloc/solvers.hpp"

using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

int failures = 0;

void report(const char* kernel, std::size_t n, double serial_s,
            double parallel_s, bool equal) {
  std::printf("%-24s n=%-8zu serial %8.1f ms   omp(%d) %8.1f ms   speedup %.2fx   %s\n",
              kernel, n, serial_s * 1e3, omp_get_max_threads(),
              parallel_s * 1e3, serial_s / parallel_s,
              equal ? "match" : "MISMATCH");
  if (!equal) ++failures;
}

void bench_all_radii(std::size_t n) {
  const facloc::PointSet X = facloc::uniform_sample(n, 19);
  auto t0 = clock_type::now();
  const facloc::RadiusProfile serial = facloc::all_radii_serial(X);
  const double ts = seconds_since(t0);
  t0 = clock_type::now();
  const facloc::RadiusProfile parallel = facloc::all_radii(X);
  const double tp = seconds_since(t0);
  const bool equal = serial.radii == parallel.radii &&
                     serial.sum_r == parallel.sum_r &&
                     serial.sum_r_sq == parallel.sum_r_sq;
  report("all_radii", n, ts, tp, equal);
}

void bench_restricted(std::size_t n) {
  const facloc::PointSet X = facloc::uniform_sample(n, 23);
  auto t0 = clock_type::now();
  const facloc::FacilitySolution serial = facloc::restricted_exact_serial(X);
  const double ts = seconds_since(t0);
  t0 = clock_type::now();
  const facloc::FacilitySolution parallel = facloc::restricted_exact(X);
  const double tp = seconds_since(t0);
  const bool equal = serial.total_cost == parallel.total_cost &&
                     serial.facilities.size() == parallel.facilities.size();
  report("restricted_exact", n, ts, tp, equal);
}

void bench_trials(std::size_t n) {
  facloc::ExperimentConfig cfg;
  cfg.n_list = {n / 4, n / 2, n};
  cfg.trials = 8;
  cfg.master_seed = 29;
  const int max_threads = omp_get_max_threads();
  omp_set_num_threads(1);
  auto t0 = clock_type::now();
  const auto serial = facloc::run_trials(cfg);
  const double ts = seconds_since(t0);
  omp_set_num_threads(max_threads);
  t0 = clock_type::now();
  const auto parallel = facloc::run_trials(cfg);
  const double tp = seconds_since(t0);
  bool equal = serial.size() == parallel.size();
  for (std::size_t i = 0; equal && i < serial.size(); ++i) {
    equal = serial[i].sum_r == parallel[i].sum_r &&
            serial[i].cost_greedy == parallel[i].cost_greedy &&
            serial[i].cost_grid == parallel[i].cost_grid;
  }
  report("run_trials", n, ts, tp, equal);
}

}  // namespace

int main(int argc, char** argv) {
  // Default sizes keep the run short; pass a scale factor to stress it.
  const std::size_t scale = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  bench_all_radii(20000 * scale);
  bench_all_radii(60000 * scale);
  bench_restricted(16);
  bench_trials(8192 * scale);
  return failures;
}
