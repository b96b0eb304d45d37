// End-to-end checks of the command-line tool, driven through the shell.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "facloc/geometry.hpp"
#include "facloc/io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kScratch = "cli_scratch";

int run_cli(const std::string& args, const std::string& out_path = "",
            const std::string& err_path = "") {
  std::string cmd = std::string("\"") + FACLOC_CLI_PATH + "\" " + args;
  if (!out_path.empty()) cmd += " > " + out_path;
  if (!err_path.empty()) cmd += " 2> " + err_path;
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::size_t line_count(const std::string& text) {
  std::size_t lines = 0;
  for (const char c : text) lines += c == '\n';
  return lines;
}

struct ScratchDir {
  ScratchDir() { fs::create_directories(kScratch); }
};

std::string path_in_scratch(const std::string& name) {
  static ScratchDir once;
  return kScratch + "/" + name;
}

}  // namespace

TEST_CASE("gen then radii round trip") {
  const std::string pts = path_in_scratch("pts.csv");
  const std::string err = path_in_scratch("gen_err.txt");
  REQUIRE(run_cli("gen --n 100 --seed 42 --out " + pts, "", err) == 0);
  CHECK(slurp(err).find("seed: 42") != std::string::npos);

  const std::string gen_text = slurp(pts);
  CHECK(line_count(gen_text) == 101);  // header + 100 rows

  // lossless round trip against the library sampler
  const auto parsed = facloc::read_points_csv_file(pts);
  CHECK(parsed == facloc::uniform_sample(100, 42).points());

  const std::string radii_out = path_in_scratch("radii.csv");
  REQUIRE(run_cli("radii --in " + pts + " --out " + radii_out) == 0);
  const std::string radii_text = slurp(radii_out);
  CHECK(line_count(radii_text) == 102);  // header + 100 rows + JSON summary

  std::istringstream is(radii_text);
  std::string line;
  std::getline(is, line);
  CHECK(line == "index,x,y,r");
  std::string last;
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] == '{') {
      last = line;
      break;
    }
    const auto second_comma = line.find(',', line.find(',') + 1);
    const double r = std::stod(line.substr(line.rfind(',') + 1));
    CHECK(r > 0.0);
    CHECK(r <= 1.0);
    CHECK(second_comma != std::string::npos);
    ++rows;
  }
  CHECK(rows == 100);
  const auto summary = nlohmann::json::parse(last);
  CHECK(summary["n"] == 100);
  CHECK(summary["sum_r"].get<double>() > 0.0);
  CHECK(summary["min_r"].get<double>() > 0.0);
  CHECK(summary["max_r"].get<double>() <= 1.0);
}

TEST_CASE("solve exact on the pinned pair") {
  const std::string pts = path_in_scratch("two.csv");
  {
    std::ofstream f(pts);
    f << "x,y\n0,0\n0.5,0\n";
  }
  const std::string out = path_in_scratch("solve.json");
  REQUIRE(run_cli("solve --solver exact --in " + pts, out) == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["solver"] == "exact");
  CHECK(j["n"] == 2);
  CHECK(j["total_cost"].get<double>() == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(j["facilities"].size() == 1);

  REQUIRE(run_cli("solve --solver greedy --in " + pts, out) == 0);
  CHECK(nlohmann::json::parse(slurp(out))["total_cost"].get<double>() ==
        doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("usage and error exit codes") {
  CHECK(run_cli("--definitely-not-a-flag", "/dev/null", "/dev/null") == 2);
  CHECK(run_cli("gen --n 5 --bogus 1", "/dev/null", "/dev/null") == 2);
  CHECK(run_cli("frobnicate", "/dev/null", "/dev/null") == 2);
  CHECK(run_cli("solve --solver exact --in no_such_file.csv", "/dev/null",
                "/dev/null") == 1);
  CHECK(run_cli("solve --solver nope --in x.csv", "/dev/null", "/dev/null") ==
        2);

  // exact solver refuses oversized input with a computation error
  const std::string big = path_in_scratch("big.csv");
  REQUIRE(run_cli("gen --n 11 --seed 1 --out " + big) == 0);
  CHECK(run_cli("solve --solver exact --in " + big, "/dev/null", "/dev/null") ==
        1);

  const std::string bad = path_in_scratch("bad.csv");
  {
    std::ofstream f(bad);
    f << "x,y\n0.2,0.3\n1.7,0.3\n";
  }
  const std::string err = path_in_scratch("bad_err.txt");
  CHECK(run_cli("radii --in " + bad, "/dev/null", err) == 1);
  CHECK(slurp(err).find("line 3") != std::string::npos);
}

TEST_CASE("verify subcommand reports and exits zero") {
  const std::string out = path_in_scratch("verify.txt");
  REQUIRE(run_cli("verify --instances 8 --solver-instances 6 "
                  "--insert-instances 3 --seed 4",
                  out, "/dev/null") == 0);
  const std::string text = slurp(out);
  CHECK(text.find("PASS lemma2_count_bound") != std::string::npos);
  CHECK(text.find("FAIL") == std::string::npos);
  CHECK(text.find("checks passed") != std::string::npos);
}

TEST_CASE("experiment scaling: files, config precedence, worker independence") {
  const std::string base = " experiment scaling --n 64,128,256 --seed 12 ";
  const std::string out1 = path_in_scratch("s1.json");
  const std::string out2 = path_in_scratch("s2.json");
  const std::string csv = path_in_scratch("records.csv");
  const std::string plots = path_in_scratch("plots");

  REQUIRE(run_cli(base + "--trials 4 --workers 1 --out " + out1 +
                      " --records-csv " + csv + " --plot-dir " + plots,
                  "/dev/null", "/dev/null") == 0);
  REQUIRE(run_cli(base + "--trials 4 --workers 3 --out " + out2, "/dev/null",
                  "/dev/null") == 0);
  CHECK(slurp(out1) == slurp(out2));  // byte-identical across worker counts

  const auto j = nlohmann::json::parse(slurp(out1));
  CHECK(j["config"]["trials"] == 4);
  CHECK(j["records"].size() == 12);
  CHECK(j["fits"].contains("cost_greedy"));
  CHECK(j["dispersion"].size() == 3);

  const std::string rec_csv = slurp(csv);
  CHECK(rec_csv.rfind("n,seed,sum_r,sum_r_sq,cost_greedy,cost_grid\n", 0) == 0);
  CHECK(line_count(rec_csv) == 13);
  CHECK(fs::exists(plots + "/cost_greedy.csv"));
  const std::string plot = slurp(plots + "/cost_greedy.csv");
  CHECK(plot.rfind("log_n,log_value\n", 0) == 0);
  CHECK(line_count(plot) == 4);

  // config file supplies defaults, flags override
  const std::string cfg = path_in_scratch("cfg.json");
  {
    std::ofstream f(cfg);
    f << "{\"trials\": 2, \"n\": \"64,128\", \"seed\": 12}\n";
  }
  const std::string out3 = path_in_scratch("s3.json");
  REQUIRE(run_cli("--config " + cfg + " experiment scaling --out " + out3,
                  "/dev/null", "/dev/null") == 0);
  const auto j3 = nlohmann::json::parse(slurp(out3));
  CHECK(j3["config"]["trials"] == 2);
  CHECK(j3["config"]["n_list"].size() == 2);

  const std::string out4 = path_in_scratch("s4.json");
  REQUIRE(run_cli("--config " + cfg + " experiment scaling --trials 3 --out " +
                      out4,
                  "/dev/null", "/dev/null") == 0);
  CHECK(nlohmann::json::parse(slurp(out4))["config"]["trials"] == 3);
}

TEST_CASE("experiment increment emits its fits") {
  const std::string out = path_in_scratch("inc.json");
  REQUIRE(run_cli("experiment increment --n-max 600 --trials 3 --seed 2 --out " +
                      out,
                  "/dev/null", "/dev/null") == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["fits"].contains("insert_radius"));
  CHECK(j["fits"].contains("eq3_partial_sum"));
  CHECK(j["table"].size() >= 2);
}
