// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Bands on fitted exponents accept any overlap of
// [exponent - 2*stderr, exponent + 2*stderr] with the target interval.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "facloc/experiments.hpp"
#include "facloc/io.hpp"
#include "facloc/rng.hpp"

using namespace facloc;
using clock_type = std::chrono::steady_clock;

namespace {

int failures = 0;

void conclude(int idx, const std::string& name, bool pass,
              const std::string& detail, clock_type::time_point t0) {
  const double secs =
      std::chrono::duration<double>(clock_type::now() - t0).count();
  std::printf("[%s] criterion %d: %s (%s) [%.1fs]\n", pass ? "PASS" : "FAIL",
              idx, name.c_str(), detail.c_str(), secs);
  std::fflush(stdout);
  if (!pass) ++failures;
}

bool band_overlap(const ScalingFit& fit, double lo, double hi) {
  return fit.exponent - 2.0 * fit.stderr_exponent <= hi &&
         fit.exponent + 2.0 * fit.stderr_exponent >= lo;
}

std::string fit_str(const ScalingFit& fit) {
  std::ostringstream os;
  os << format_double(fit.exponent) << "+-" << format_double(fit.stderr_exponent);
  return os.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + FACLOC_CLI_PATH + "\" " + args;
  const int rc = std::system(cmd.c_str());
  if (rc == -1 || !WIFEXITED(rc)) return -1;
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

// 1. radius_of vs the bisection oracle on 10^4 random (set, index) pairs.
void criterion1() {
  const auto t0 = clock_type::now();
  double worst = 0.0;
  std::size_t pairs = 0;
  bool pass = true;
  for (std::size_t s = 0; s < 100 && pass; ++s) {
    const std::uint64_t sj = derive_seed(101, 0, s);
    const std::size_t n = 1 + stream_at(sj, 0) % 500;
    const PointSet X = uniform_sample(n, stream_at(sj, 1));
    for (std::size_t l = 0; l < 100; ++l) {
      const std::size_t i = stream_at(sj, 2 + l) % n;
      const double delta =
          std::abs(radius_of(X, i) - radius_bisect_oracle(X, i, 1e-10));
      worst = std::max(worst, delta);
      ++pairs;
      if (delta > 1e-8) {
        pass = false;
        break;
      }
    }
  }
  conclude(1, "radius exactness vs bisection",
           pass && pairs == 10000,
           std::to_string(pairs) + " pairs, max |delta| = " +
               format_double(worst),
           t0);
}

// 2. Radii invariants over 10^3 random instances plus fixtures, via the
// CLI verify subcommand (exit status 0 required).
void criterion2() {
  const auto t0 = clock_type::now();
  const int rc = run_cli(
      "verify --instances 1000 --seed 2 > acceptance_verify.txt 2>&1");
  const std::string text = slurp("acceptance_verify.txt");
  const bool pass = rc == 0 && text.find("FAIL") == std::string::npos;
  std::size_t checks = 0;
  for (std::size_t pos = text.find("PASS"); pos != std::string::npos;
       pos = text.find("PASS", pos + 4)) {
    ++checks;
  }
  conclude(2, "invariant suite (verify exit 0)", pass,
           "exit " + std::to_string(rc) + ", " + std::to_string(checks) +
               " checks passed",
           t0);
}

// 3. exact <= restricted <= 2*exact and service within 3r in exact
// solutions, 200 random instances with |X| <= 10.
void criterion3() {
  const auto t0 = clock_type::now();
  bool chain_ok = true, prop4_ok = true;
  for (std::size_t j = 0; j < 200; ++j) {
    const std::uint64_t sj = derive_seed(103, 0, j);
    const std::size_t n = 1 + stream_at(sj, 0) % 10;
    const PointSet X = uniform_sample(n, stream_at(sj, 1));
    const RadiusProfile prof = all_radii(X);
    const FacilitySolution ex = exact_cost(X);
    const FacilitySolution rs = restricted_exact(X);
    if (ex.total_cost > rs.total_cost + 1e-6 ||
        rs.total_cost > 2.0 * ex.total_cost + 1e-6) {
      chain_ok = false;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (dist(X[i], ex.facilities[ex.assignment[i]]) >
          3.0 * prof.radii[i] + 1e-6) {
        prop4_ok = false;
      }
    }
  }
  conclude(3, "oracle chain and 3r service bound", chain_ok && prop4_ok,
           std::string("chain ") + (chain_ok ? "ok" : "violated") +
               ", service " + (prop4_ok ? "ok" : "violated"),
           t0);
}

// 4. Incremental cost bound on 100 random (S, p) pairs with |S| <= 9.
void criterion4() {
  const auto t0 = clock_type::now();
  bool pass = true;
  double worst_ratio = 0.0;
  for (std::size_t j = 0; j < 100; ++j) {
    const std::uint64_t sj = derive_seed(104, 0, j);
    const std::size_t ns = 1 + stream_at(sj, 0) % 9;
    const PointSet full = uniform_sample(ns + 1, stream_at(sj, 1));
    std::vector<Point> head(full.points().begin(), full.points().end() - 1);
    const PointSet S(head);
    const PointSet Y = S.with_appended(full.points().back());
    const double r_p = radius_of(Y, ns);
    const double delta = exact_cost(Y).total_cost - exact_cost(S).total_cost;
    worst_ratio = std::max(worst_ratio, delta / r_p);
    if (delta > 19.0 * r_p + 1e-6) pass = false;
  }
  conclude(4, "incremental cost bound (19 r_p)", pass,
           "max delta/r_p = " + format_double(worst_ratio), t0);
}

// 5. Mean scaling: cost_greedy and sum_r ~ n^(2/3), mean_r ~ n^(-1/3).
void criterion5() {
  const auto t0 = clock_type::now();
  ExperimentConfig cfg;
  cfg.n_list = {1024, 2048, 4096, 8192, 16384, 32768, 65536, 131072};
  cfg.trials = 30;
  cfg.master_seed = 5;
  const ExperimentResult res = run_scaling(cfg);
  const ScalingFit& greedy = res.fits.at("cost_greedy");
  const ScalingFit& sumr = res.fits.at("sum_r");
  const ScalingFit& meanr = res.fits.at("mean_r");
  const bool pass = band_overlap(greedy, 0.60, 0.73) &&
                    band_overlap(sumr, 0.60, 0.73) &&
                    band_overlap(meanr, -0.40, -0.27);
  conclude(5, "mean scaling exponents", pass,
           "cost_greedy " + fit_str(greedy) + ", sum_r " + fit_str(sumr) +
               ", mean_r " + fit_str(meanr),
           t0);
}

// 6. Concentration: dispersion grows far slower than the mean.
void criterion6() {
  const auto t0 = clock_type::now();
  ExperimentConfig cfg;
  cfg.n_list = {1024, 2048, 4096, 8192, 16384, 32768, 65536};
  cfg.trials = 200;
  cfg.master_seed = 6;
  const ExperimentResult res = run_concentration(cfg);

  std::vector<double> ns(cfg.n_list.size());
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    ns[i] = static_cast<double>(cfg.n_list[i]);
  }
  auto std_fit_for = [&](Statistic stat) {
    std::vector<double> stds(cfg.n_list.size());
    for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
      std::vector<double> vals(cfg.trials);
      for (std::size_t t = 0; t < cfg.trials; ++t) {
        vals[t] = statistic_value(res.records[i * cfg.trials + t], stat);
      }
      stds[i] = sample_std(vals);
    }
    return fit_loglog(ns, stds);
  };
  const ScalingFit greedy_std = res.fits.at("cost_greedy_std");
  const ScalingFit sumr_std = std_fit_for(Statistic::SumR);
  const double greedy_mean = res.fits.at("cost_greedy").exponent;
  const double sumr_mean = res.fits.at("sum_r").exponent;

  const bool pass =
      greedy_std.exponent - 2.0 * greedy_std.stderr_exponent <= 0.35 &&
      sumr_std.exponent - 2.0 * sumr_std.stderr_exponent <= 0.35 &&
      greedy_std.exponent < greedy_mean - 0.2 &&
      sumr_std.exponent < sumr_mean - 0.2;
  conclude(6, "concentration of cost_greedy and sum_r", pass,
           "std exponents " + fit_str(greedy_std) + " and " +
               fit_str(sumr_std) + "; distance to 1/6: " +
               format_double(std::abs(greedy_std.exponent - 1.0 / 6.0)) +
               " and " +
               format_double(std::abs(sumr_std.exponent - 1.0 / 6.0)),
           t0);
}

// 7. Inserted-point radius profile and the discrete variance partial sums.
void criterion7() {
  const auto t0 = clock_type::now();
  const IncrementResult res = run_increment_profile(65536, 100, 7);
  const bool pass = band_overlap(res.radius_fit, -0.40, -0.27) &&
                    band_overlap(res.partial_sum_fit, 0.26, 0.40);
  conclude(7, "insertion radius profile", pass,
           "radius " + fit_str(res.radius_fit) + ", partial sums " +
               fit_str(res.partial_sum_fit),
           t0);
}

// 8. Byte-identical results JSON at 1 and 8 workers.
void criterion8() {
  const auto t0 = clock_type::now();
  const std::string args =
      "experiment scaling --statistic cost_greedy --n 1024,2048,4096 "
      "--trials 10 --seed 8 --out acceptance_det.json > /dev/null 2>&1";
  std::string a, b;
  int rc1 = run_cli("--workers 1 " + args);
  if (rc1 == 0) a = slurp("acceptance_det.json");
  int rc2 = run_cli("--workers 8 " + args);
  if (rc2 == 0) b = slurp("acceptance_det.json");
  const bool pass = rc1 == 0 && rc2 == 0 && !a.empty() && a == b;
  conclude(8, "worker-count determinism", pass,
           "exit " + std::to_string(rc1) + "/" + std::to_string(rc2) +
               ", bytes " + std::to_string(a.size()) + "/" +
               std::to_string(b.size()) + (a == b ? " equal" : " differ"),
           t0);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  std::printf("acceptance: %d of 8 criteria failed\n", failures);
  return failures;
}
