#include "facloc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>

#include "facloc/io.hpp"
#include "facloc/rng.hpp"
#include "json.hpp"

namespace facloc {

Statistic statistic_from_string(const std::string& name) {
  if (name == "cost_greedy") return Statistic::CostGreedy;
  if (name == "cost_grid") return Statistic::CostGrid;
  if (name == "sum_r") return Statistic::SumR;
  if (name == "sum_r_sq") return Statistic::SumRSq;
  if (name == "mean_r") return Statistic::MeanR;
  throw std::invalid_argument("unknown statistic '" + name + "'");
}

std::string to_string(Statistic s) {
  switch (s) {
    case Statistic::CostGreedy: return "cost_greedy";
    case Statistic::CostGrid: return "cost_grid";
    case Statistic::SumR: return "sum_r";
    case Statistic::SumRSq: return "sum_r_sq";
    case Statistic::MeanR: return "mean_r";
  }
  return "?";
}

double statistic_value(const TrialRecord& rec, Statistic s) {
  switch (s) {
    case Statistic::CostGreedy: return rec.cost_greedy;
    case Statistic::CostGrid: return rec.cost_grid;
    case Statistic::SumR: return rec.sum_r;
    case Statistic::SumRSq: return rec.sum_r_sq;
    case Statistic::MeanR: return rec.mean_r;
  }
  return 0.0;
}

namespace {

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.n_list.empty()) {
    throw std::invalid_argument("experiment: empty n list");
  }
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    if (cfg.n_list[i] == 0) {
      throw std::invalid_argument("experiment: n must be >= 1");
    }
    if (i > 0 && cfg.n_list[i] <= cfg.n_list[i - 1]) {
      throw std::invalid_argument("experiment: n list must be strictly ascending");
    }
  }
  if (cfg.trials == 0) throw std::invalid_argument("experiment: trials must be >= 1");
  if (!(cfg.gamma > 0.0)) throw std::invalid_argument("experiment: gamma must be positive");
}

TrialRecord run_one(std::size_t n, std::uint64_t seed, double gamma) {
  const PointSet X = uniform_sample(n, seed);
  const RadiusProfile prof = all_radii(X);
  const FacilitySolution greedy = mp_greedy(X, prof, gamma);
  const FacilitySolution grid = grid_cost(X, default_grid_k(n));
  TrialRecord rec;
  rec.n = n;
  rec.seed = seed;
  rec.sum_r = prof.sum_r;
  rec.sum_r_sq = prof.sum_r_sq;
  rec.cost_greedy = greedy.total_cost;
  rec.cost_grid = grid.total_cost;
  rec.mean_r = prof.sum_r / static_cast<double>(n);
  return rec;
}

}  // namespace

std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const std::size_t total = cfg.n_list.size() * cfg.trials;
  std::vector<TrialRecord> records(total);
  const std::int64_t total_i = static_cast<std::int64_t>(total);
  std::exception_ptr trial_error;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t j = 0; j < total_i; ++j) {
    try {
      const std::size_t n =
          cfg.n_list[static_cast<std::size_t>(j) / cfg.trials];
      const std::size_t t = static_cast<std::size_t>(j) % cfg.trials;
      const std::uint64_t seed = derive_seed(cfg.master_seed, n, t);
      records[j] = run_one(n, seed, cfg.gamma);
    } catch (...) {
#pragma omp critical(facloc_trials_error)
      {
        if (!trial_error) trial_error = std::current_exception();
      }
    }
  }
  if (trial_error) std::rethrow_exception(trial_error);
  return records;
}

double quantile_type7(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) {
    throw std::invalid_argument("quantile_type7: empty sample");
  }
  if (p <= 0.0) return sorted.front();
  if (p >= 1.0) return sorted.back();
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double sample_std(const std::vector<double>& values) {
  const std::size_t m = values.size();
  if (m < 2) return 0.0;
  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= static_cast<double>(m);
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(m - 1));
}

ScalingFit fit_loglog(const std::vector<double>& xs,
                      const std::vector<double>& ys) {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("fit_loglog: length mismatch");
  }
  if (xs.size() < 2) {
    throw std::invalid_argument("fit_loglog: need at least 2 points");
  }
  const std::size_t m = xs.size();
  std::vector<double> lx(m), ly(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      throw std::invalid_argument("fit_loglog: values must be positive");
    }
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx <= 0.0) {
    throw std::invalid_argument("fit_loglog: xs must not be constant");
  }
  ScalingFit fit;
  fit.exponent = sxy / sxx;
  fit.log_intercept = my - fit.exponent * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = ly[i] - (fit.log_intercept + fit.exponent * lx[i]);
    sse += r * r;
  }
  if (syy > 0.0) {
    fit.r_squared = std::clamp(1.0 - sse / syy, 0.0, 1.0);
  } else {
    fit.r_squared = 1.0;  // constant ys: the zero-slope line is exact
  }
  fit.stderr_exponent =
      m > 2 ? std::sqrt(std::max(sse, 0.0) / static_cast<double>(m - 2) / sxx)
            : 0.0;
  return fit;
}

namespace {

constexpr Statistic kAllStatistics[] = {
    Statistic::CostGreedy, Statistic::CostGrid, Statistic::SumR,
    Statistic::SumRSq, Statistic::MeanR};

ExperimentResult aggregate(const ExperimentConfig& cfg,
                           std::vector<TrialRecord> records,
                           bool dispersion_fits) {
  ExperimentResult res;
  res.config = cfg;
  res.records = std::move(records);
  const std::size_t nn = cfg.n_list.size();
  const std::size_t T = cfg.trials;
  std::vector<double> ns(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    ns[i] = static_cast<double>(cfg.n_list[i]);
  }

  for (const Statistic s : kAllStatistics) {
    std::vector<double> means(nn, 0.0);
    for (std::size_t i = 0; i < nn; ++i) {
      double acc = 0.0;
      for (std::size_t t = 0; t < T; ++t) {
        acc += statistic_value(res.records[i * T + t], s);
      }
      means[i] = acc / static_cast<double>(T);
    }
    res.series[to_string(s)] = means;
    if (nn >= 2) res.fits[to_string(s)] = fit_loglog(ns, means);
  }

  const std::string stat = to_string(cfg.statistic);
  std::vector<double> stds(nn), iqws(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    std::vector<double> vals(T);
    for (std::size_t t = 0; t < T; ++t) {
      vals[t] = statistic_value(res.records[i * T + t], cfg.statistic);
    }
    std::vector<double> sorted = vals;
    std::sort(sorted.begin(), sorted.end());
    DispersionRow row;
    row.n = cfg.n_list[i];
    row.std_dev = sample_std(vals);
    row.iqw90 = quantile_type7(sorted, 0.95) - quantile_type7(sorted, 0.05);
    row.median = quantile_type7(sorted, 0.5);
    row.mean = res.series[stat][i];
    res.dispersion.push_back(row);
    stds[i] = row.std_dev;
    iqws[i] = row.iqw90;
  }

  if (dispersion_fits && nn >= 2) {
    const bool enough_trials = T >= 3;
    auto add_fit = [&](const std::string& key, const std::vector<double>& ys) {
      if (std::any_of(ys.begin(), ys.end(), [](double v) { return !(v > 0.0); })) {
        return;  // degenerate dispersion, nothing to fit on a log scale
      }
      ScalingFit fit = fit_loglog(ns, ys);
      fit.low_confidence =
          !enough_trials || fit.stderr_exponent >= std::abs(fit.exponent);
      res.fits[stat + "_" + key] = fit;
      res.series[stat + "_" + key] = ys;
    };
    add_fit("std", stds);
    add_fit("iqw90", iqws);
  }
  return res;
}

}  // namespace

ExperimentResult run_scaling(const ExperimentConfig& cfg) {
  return aggregate(cfg, run_trials(cfg), false);
}

ExperimentResult run_concentration(const ExperimentConfig& cfg) {
  return aggregate(cfg, run_trials(cfg), true);
}

IncrementResult run_increment_profile(std::size_t n_max, std::size_t trials,
                                      std::uint64_t seed) {
  if (n_max < 10) {
    throw std::invalid_argument("run_increment_profile: n_max must be >= 10");
  }
  if (trials == 0) {
    throw std::invalid_argument("run_increment_profile: trials must be >= 1");
  }
  IncrementResult res;
  res.n_max = n_max;
  res.trials = trials;
  res.seed = seed;

  std::vector<std::size_t> grid;
  for (std::size_t m = 256; m <= n_max; m *= 2) grid.push_back(m);
  if (grid.size() < 2) {
    grid = {std::max<std::size_t>(1, n_max / 4),
            std::max<std::size_t>(2, n_max / 2), n_max};
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  }

  const std::size_t total = grid.size() * trials;
  std::vector<double> inserted_r(total, 0.0);
  const std::int64_t total_i = static_cast<std::int64_t>(total);
  std::exception_ptr row_error;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t j = 0; j < total_i; ++j) {
    try {
      const std::size_t m = grid[static_cast<std::size_t>(j) / trials];
      const std::size_t t = static_cast<std::size_t>(j) % trials;
      const PointSet X = uniform_sample(m + 1, derive_seed(seed, m, t));
      inserted_r[j] = radius_of(X, m);  // last point, against all m+1
    } catch (...) {
#pragma omp critical(facloc_increment_error)
      {
        if (!row_error) row_error = std::current_exception();
      }
    }
  }
  if (row_error) std::rethrow_exception(row_error);

  std::vector<double> ms(grid.size()), means(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double acc = 0.0;
    for (std::size_t t = 0; t < trials; ++t) acc += inserted_r[i * trials + t];
    ms[i] = static_cast<double>(grid[i]);
    means[i] = acc / static_cast<double>(trials);
  }
  res.radius_fit = fit_loglog(ms, means);

  // Discrete analogue of the variance sum: accumulate the squared fitted
  // mean over every prefix size up to each grid value.
  const double A = std::exp(res.radius_fit.log_intercept);
  const double b = res.radius_fit.exponent;
  std::vector<double> partial(grid.size(), 0.0);
  double acc = 0.0;
  std::size_t next = 0;
  for (std::size_t i = 1; i <= grid.back() && next < grid.size(); ++i) {
    const double fitted = A * std::pow(static_cast<double>(i), b);
    acc += fitted * fitted;
    if (i == grid[next]) partial[next++] = acc;
  }
  res.partial_sum_fit = fit_loglog(ms, partial);

  for (std::size_t i = 0; i < grid.size(); ++i) {
    res.rows.push_back({grid[i], means[i], partial[i]});
  }
  return res;
}

namespace {

nlohmann::json fit_to_json(const ScalingFit& fit) {
  return {{"exponent", fit.exponent},
          {"log_intercept", fit.log_intercept},
          {"r_squared", fit.r_squared},
          {"stderr_exponent", fit.stderr_exponent},
          {"low_confidence", fit.low_confidence}};
}

}  // namespace

std::string to_json_string(const ExperimentResult& res) {
  nlohmann::json j;
  j["config"] = {{"n_list", res.config.n_list},
                 {"trials", res.config.trials},
                 {"master_seed", res.config.master_seed},
                 {"statistic", to_string(res.config.statistic)},
                 {"gamma", res.config.gamma}};
  nlohmann::json recs = nlohmann::json::array();
  for (const TrialRecord& r : res.records) {
    recs.push_back({{"n", r.n},
                    {"seed", r.seed},
                    {"sum_r", r.sum_r},
                    {"sum_r_sq", r.sum_r_sq},
                    {"cost_greedy", r.cost_greedy},
                    {"cost_grid", r.cost_grid}});
  }
  j["records"] = std::move(recs);
  nlohmann::json fits = nlohmann::json::object();
  for (const auto& [key, fit] : res.fits) fits[key] = fit_to_json(fit);
  j["fits"] = std::move(fits);
  nlohmann::json disp = nlohmann::json::array();
  for (const DispersionRow& d : res.dispersion) {
    disp.push_back({{"n", d.n},
                    {"std", d.std_dev},
                    {"iqw90", d.iqw90},
                    {"median", d.median},
                    {"mean", d.mean}});
  }
  j["dispersion"] = std::move(disp);
  return j.dump(2) + "\n";
}

std::string to_json_string(const IncrementResult& res) {
  nlohmann::json j;
  j["config"] = {{"n_max", res.n_max}, {"trials", res.trials}, {"seed", res.seed}};
  nlohmann::json table = nlohmann::json::array();
  for (const IncrementRow& r : res.rows) {
    table.push_back({{"m", r.m},
                     {"mean_radius", r.mean_radius},
                     {"partial_sum_sq", r.partial_sum_sq}});
  }
  j["table"] = std::move(table);
  j["fits"] = {{"insert_radius", fit_to_json(res.radius_fit)},
               {"eq3_partial_sum", fit_to_json(res.partial_sum_fit)}};
  return j.dump(2) + "\n";
}

std::string records_to_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream os;
  os << "n,seed,sum_r,sum_r_sq,cost_greedy,cost_grid\n";
  for (const TrialRecord& r : records) {
    os << r.n << ',' << r.seed << ',' << format_double(r.sum_r) << ','
       << format_double(r.sum_r_sq) << ',' << format_double(r.cost_greedy)
       << ',' << format_double(r.cost_grid) << '\n';
  }
  return os.str();
}

}  // namespace facloc
