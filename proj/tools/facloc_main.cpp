#include <omp.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "facloc/experiments.hpp"
#include "facloc/io.hpp"
#include "facloc/radii.hpp"
#include "facloc/solvers.hpp"
#include "json.hpp"

namespace {

using facloc::Point;
using facloc::PointSet;
using nlohmann::json;

// Optional JSON config file: values act as defaults, flags override them.
json load_config(int argc, char** argv) {
  std::string path;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) {
      path = argv[i + 1];
    } else if (arg.rfind("--config=", 0) == 0) {
      path = arg.substr(9);
    }
  }
  if (path.empty()) return json::object();
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config '" + path + "'");
  json j;
  f >> j;
  if (!j.is_object()) throw std::runtime_error("config must be a JSON object");
  return j;
}

// A config key may be meant for a different subcommand (e.g. "n" is a count
// for gen but a list for experiment), so a type mismatch counts as absent.
template <typename T>
std::optional<T> cfg_opt(const json& cfg, const char* key) {
  if (!cfg.contains(key)) return std::nullopt;
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

template <typename T>
T cfg_get(const json& cfg, const char* key, T fallback) {
  return cfg_opt<T>(cfg, key).value_or(fallback);
}

std::vector<std::size_t> parse_n_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stoull(tok));
  }
  if (out.empty()) throw std::invalid_argument("empty n list");
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

std::string radii_report(const PointSet& X, const facloc::RadiusProfile& prof) {
  std::ostringstream os;
  os << "index,x,y,r\n";
  for (std::size_t i = 0; i < X.size(); ++i) {
    os << i << ',' << facloc::format_double(X[i].x) << ','
       << facloc::format_double(X[i].y) << ','
       << facloc::format_double(prof.radii[i]) << '\n';
  }
  const json summary = {{"n", X.size()},
                        {"sum_r", prof.sum_r},
                        {"sum_r_sq", prof.sum_r_sq},
                        {"max_r", prof.max_r()},
                        {"min_r", prof.min_r()}};
  os << summary.dump() << '\n';
  return os.str();
}

std::string solution_json(const std::string& solver, std::size_t n,
                          const facloc::FacilitySolution& sol) {
  json j;
  j["solver"] = solver;
  j["n"] = n;
  j["open_cost"] = sol.open_cost;
  j["connection_cost"] = sol.connection_cost;
  j["total_cost"] = sol.total_cost;
  json fac = json::array();
  for (const Point& f : sol.facilities) fac.push_back({f.x, f.y});
  j["facilities"] = std::move(fac);
  return j.dump(2) + "\n";
}

void emit_plot_files(const std::string& dir,
                     const facloc::ExperimentResult& res) {
  std::filesystem::create_directories(dir);
  for (const auto& [key, values] : res.series) {
    std::ostringstream os;
    os << "log_n,log_value\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
      os << facloc::format_double(std::log(
                static_cast<double>(res.config.n_list[i])))
         << ',' << facloc::format_double(std::log(values[i])) << '\n';
    }
    write_text(dir + "/" + key + ".csv", os.str());
  }
}

int run_verify_report(const facloc::VerifyOptions& opt) {
  const facloc::VerifyReport report = facloc::verify_properties(opt);
  std::size_t passed = 0;
  for (const facloc::CheckResult& c : report.checks) {
    if (c.pass) {
      std::cout << "PASS " << c.name << " (checked " << c.checked << ")";
      if (!c.detail.empty()) std::cout << " : " << c.detail;
      std::cout << '\n';
      ++passed;
    } else {
      std::cout << "FAIL " << c.name << ": " << c.detail << '\n';
      std::cout << "--- first counterexample (points CSV) ---\n"
                << c.counterexample_csv << "---\n";
    }
  }
  std::cout << "verify: " << passed << "/" << report.checks.size()
            << " checks passed\n";
  return report.all_pass() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  json cfg;
  try {
    cfg = load_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  CLI::App app{"stochastic facility location: radii, solvers, experiments"};
  app.require_subcommand(1);
  // let --workers / --config appear after the subcommand name too
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (defaults, flags override)");
  std::size_t workers = cfg_get<std::size_t>(cfg, "workers", 0);
  app.add_option("--workers", workers, "worker threads (0 = hardware default)");

  // gen
  auto* gen = app.add_subcommand("gen", "sample uniform points, write CSV");
  std::size_t gen_n = cfg_get<std::size_t>(cfg, "n", 0);
  std::uint64_t gen_seed = cfg_get<std::uint64_t>(cfg, "seed", 0);
  std::string gen_out = cfg_get<std::string>(cfg, "out", "");
  {
    auto* o = gen->add_option("--n", gen_n, "number of points");
    if (!cfg_opt<std::size_t>(cfg, "n")) o->required();
    gen->add_option("--seed", gen_seed, "sample seed (default 0)");
    gen->add_option("--out", gen_out, "output CSV path (default stdout)");
  }

  // radii
  auto* radii = app.add_subcommand("radii", "per-point radii for a point CSV");
  std::string radii_in = cfg_get<std::string>(cfg, "in", "");
  std::string radii_out = cfg_get<std::string>(cfg, "out", "");
  double radii_cell = cfg_get<double>(cfg, "cell_size", 0.0);
  {
    auto* o = radii->add_option("--in", radii_in, "input points CSV");
    if (!cfg_opt<std::string>(cfg, "in")) o->required();
    radii->add_option("--out", radii_out, "output path (default stdout)");
    radii->add_option("--cell-size", radii_cell,
                      "spatial index cell size (default 1/ceil(n^(1/3)))");
  }

  // solve
  auto* solve = app.add_subcommand("solve", "facility location solvers");
  std::string solve_solver = cfg_get<std::string>(cfg, "solver", "");
  std::string solve_in = cfg_get<std::string>(cfg, "in", "");
  std::string solve_out = cfg_get<std::string>(cfg, "out", "");
  double solve_gamma = cfg_get<double>(cfg, "gamma", 2.0);
  std::size_t solve_k = cfg_get<std::size_t>(cfg, "k", 0);
  {
    auto* o = solve->add_option("--solver", solve_solver,
                                "exact|restricted|greedy|grid");
    o->check(CLI::IsMember({"exact", "restricted", "greedy", "grid"}));
    if (!cfg_opt<std::string>(cfg, "solver")) o->required();
    auto* i = solve->add_option("--in", solve_in, "input points CSV");
    if (!cfg_opt<std::string>(cfg, "in")) i->required();
    solve->add_option("--gamma", solve_gamma, "greedy opening multiplier");
    solve->add_option("--k", solve_k, "grid facility count (default round(n^(2/3)))");
    solve->add_option("--out", solve_out, "output path (default stdout)");
  }

  // experiment
  auto* exp = app.add_subcommand("experiment", "Monte-Carlo sweeps");
  exp->require_subcommand(1);
  std::string exp_stat = cfg_get<std::string>(cfg, "statistic", "cost_greedy");
  std::string exp_nlist = cfg_get<std::string>(cfg, "n", "");
  std::size_t exp_trials = cfg_get<std::size_t>(cfg, "trials", 30);
  std::uint64_t exp_seed = cfg_get<std::uint64_t>(cfg, "seed", 0);
  double exp_gamma = cfg_get<double>(cfg, "gamma", 2.0);
  std::string exp_out = cfg_get<std::string>(cfg, "out", "");
  std::string exp_records_csv = cfg_get<std::string>(cfg, "records_csv", "");
  std::string exp_plot_dir = cfg_get<std::string>(cfg, "plot_dir", "");
  std::size_t inc_n_max = cfg_get<std::size_t>(cfg, "n_max", 65536);
  std::size_t inc_trials = cfg_get<std::size_t>(cfg, "trials", 100);

  auto add_sweep_options = [&](CLI::App* sub) {
    auto* o = sub->add_option("--n", exp_nlist, "comma-separated point counts");
    if (!cfg_opt<std::string>(cfg, "n") && !(cfg.contains("n") && cfg.at("n").is_array())) {
      o->required();
    }
    sub->add_option("--statistic", exp_stat,
                    "cost_greedy|cost_grid|sum_r|sum_r_sq|mean_r");
    sub->add_option("--trials", exp_trials, "trials per n");
    sub->add_option("--seed", exp_seed, "master seed (default 0)");
    sub->add_option("--gamma", exp_gamma, "greedy opening multiplier");
    sub->add_option("--out", exp_out, "results JSON path (default stdout)");
    sub->add_option("--records-csv", exp_records_csv, "also write records CSV");
    sub->add_option("--plot-dir", exp_plot_dir,
                    "emit log_n,log_value files per fitted series");
  };
  auto* exp_scaling = exp->add_subcommand("scaling", "mean-vs-n power law fits");
  add_sweep_options(exp_scaling);
  auto* exp_conc =
      exp->add_subcommand("concentration", "dispersion-vs-n fits");
  add_sweep_options(exp_conc);
  auto* exp_inc =
      exp->add_subcommand("increment", "inserted-point radius profile");
  exp_inc->add_option("--n-max", inc_n_max, "largest prefix size");
  exp_inc->add_option("--trials", inc_trials, "trials per prefix size");
  exp_inc->add_option("--seed", exp_seed, "master seed (default 0)");
  exp_inc->add_option("--out", exp_out, "results JSON path (default stdout)");

  // verify
  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  facloc::VerifyOptions vopt;
  vopt.seed = cfg_get<std::uint64_t>(cfg, "seed", 0);
  vopt.radii_instances = cfg_get<std::size_t>(cfg, "instances", 1000);
  vopt.solver_instances = cfg_get<std::size_t>(cfg, "solver_instances", 200);
  vopt.insert_instances = cfg_get<std::size_t>(cfg, "insert_instances", 100);
  vopt.gamma = cfg_get<double>(cfg, "gamma", 2.0);
  verify->add_option("--instances", vopt.radii_instances,
                     "random instances for the radii invariants");
  verify->add_option("--solver-instances", vopt.solver_instances,
                     "random instances for the solver invariants");
  verify->add_option("--insert-instances", vopt.insert_instances,
                     "random instances for the incremental cost bound");
  verify->add_option("--seed", vopt.seed, "instance seed (default 0)");
  verify->add_option("--gamma", vopt.gamma, "greedy opening multiplier");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (workers > 0) omp_set_num_threads(static_cast<int>(workers));

    if (gen->parsed()) {
      std::cerr << "seed: " << gen_seed << '\n';
      const PointSet X = facloc::uniform_sample(gen_n, gen_seed);
      write_text(gen_out, facloc::points_csv_string(X.points()));
      return 0;
    }

    if (radii->parsed()) {
      std::vector<Point> pts = facloc::read_points_csv_file(radii_in);
      const double cell =
          radii_cell > 0.0 ? radii_cell : facloc::default_cell_size(pts.size());
      const PointSet X(std::move(pts), cell);
      const facloc::RadiusProfile prof = facloc::all_radii(X);
      write_text(radii_out, radii_report(X, prof));
      return 0;
    }

    if (solve->parsed()) {
      std::vector<Point> pts = facloc::read_points_csv_file(solve_in);
      const PointSet X(std::move(pts));
      facloc::FacilitySolution sol;
      if (solve_solver == "exact") {
        sol = facloc::exact_cost(X);
      } else if (solve_solver == "restricted") {
        sol = facloc::restricted_exact(X);
      } else if (solve_solver == "greedy") {
        sol = facloc::mp_greedy(X, facloc::all_radii(X), solve_gamma);
      } else {
        const std::size_t k =
            solve_k > 0 ? solve_k : facloc::default_grid_k(X.size());
        sol = facloc::grid_cost(X, k);
      }
      write_text(solve_out, solution_json(solve_solver, X.size(), sol));
      return 0;
    }

    if (exp_scaling->parsed() || exp_conc->parsed()) {
      std::cerr << "seed: " << exp_seed << '\n';
      facloc::ExperimentConfig ecfg;
      if (cfg.contains("n") && cfg.at("n").is_array()) {
        ecfg.n_list = cfg.at("n").get<std::vector<std::size_t>>();
      }
      if (!exp_nlist.empty()) ecfg.n_list = parse_n_list(exp_nlist);
      ecfg.trials = exp_trials;
      ecfg.master_seed = exp_seed;
      ecfg.statistic = facloc::statistic_from_string(exp_stat);
      ecfg.gamma = exp_gamma;
      const facloc::ExperimentResult res = exp_scaling->parsed()
                                               ? facloc::run_scaling(ecfg)
                                               : facloc::run_concentration(ecfg);
      write_text(exp_out, facloc::to_json_string(res));
      if (!exp_records_csv.empty()) {
        write_text(exp_records_csv, facloc::records_to_csv(res.records));
      }
      if (!exp_plot_dir.empty()) emit_plot_files(exp_plot_dir, res);
      if (!exp_out.empty()) {
        for (const auto& [key, fit] : res.fits) {
          std::cout << "fit " << key << ": exponent "
                    << facloc::format_double(fit.exponent) << " (stderr "
                    << facloc::format_double(fit.stderr_exponent) << ", R^2 "
                    << facloc::format_double(fit.r_squared) << ")"
                    << (fit.low_confidence ? " [low confidence]" : "") << '\n';
        }
      }
      return 0;
    }

    if (exp_inc->parsed()) {
      std::cerr << "seed: " << exp_seed << '\n';
      const facloc::IncrementResult res =
          facloc::run_increment_profile(inc_n_max, inc_trials, exp_seed);
      write_text(exp_out, facloc::to_json_string(res));
      return 0;
    }

    if (verify->parsed()) {
      std::cerr << "seed: " << vopt.seed << '\n';
      return run_verify_report(vopt);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
