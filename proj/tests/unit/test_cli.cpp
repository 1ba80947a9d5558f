#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ckl/cli.hpp"
#include "ckl/report.hpp"
#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ckl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = ckl::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ckl_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

const char* kSmallSine =
    "[dataset]\nsource = sine\nn_train = 40\nn_val = 20\nn_test = 30\n"
    "[learner]\nT = 4\n[optimizer]\nrestart_step = 0.5\nrefine_best = 2\n"
    "[svm]\nc_grid = 0.1, 1, 10\n";

ckl::Json without_timing(ckl::Json j) {
  j.erase("stage1_seconds");
  j.erase("stage2_seconds");
  j.erase("total_seconds");
  return j;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("usage errors") {
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"--help"}).code == 0);
  const auto bad = run_cli({"learn", "--method", "svm"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("svm") != std::string::npos);
  const fs::path dir = scratch("usage");
  write(dir / "bad.ini", "[method]\nname = kmeans\n");
  CHECK(run_cli({"learn", "--config", (dir / "bad.ini").string(), "--out", dir.string()}).code == 2);
  write(dir / "unknown.ini", "[learner]\nspeed = 3\n");
  const auto unknown = run_cli({"learn", "--config", (dir / "unknown.ini").string(), "--out", dir.string()});
  CHECK(unknown.code == 1);
  CHECK(unknown.err.find("speed") != std::string::npos);
  CHECK(run_cli({"landscape", "--state", (dir / "missing.json").string()}).code == 2);
}

TEST_CASE("learn writes a reproducible report") {
  const fs::path dir = scratch("learn");
  write(dir / "run.ini", kSmallSine);
  const auto a = run_cli({"learn", "--config", (dir / "run.ini").string(), "--seed", "3", "--out", (dir / "a").string()});
  REQUIRE(a.code == 0);
  const auto b = run_cli({"learn", "--config", (dir / "run.ini").string(), "--seed", "3", "--out", (dir / "b").string()});
  REQUIRE(b.code == 0);
  for (const char* f : {"report.json", "trace.csv", "state.json"}) CHECK(fs::exists(dir / "a" / f));

  const auto ja = ckl::Json::parse(slurp(dir / "a" / "report.json"));
  const auto jb = ckl::Json::parse(slurp(dir / "b" / "report.json"));
  CHECK(ja.at("method") == "ca-1d");
  CHECK(ja.at("dataset") == "sine-mixture");
  CHECK(ja.at("seed") == 3);
  CHECK(ja.at("trace") == "trace.csv");
  CHECK(ja.at("test_error_pct").get<double>() >= 0.0);
  CHECK(without_timing(ja).dump() == without_timing(jb).dump());
  CHECK(slurp(dir / "a" / "state.json") == slurp(dir / "b" / "state.json"));

  // traces agree except for the timing column
  const auto ta = lines_of(slurp(dir / "a" / "trace.csv"));
  const auto tb = lines_of(slurp(dir / "b" / "trace.csv"));
  REQUIRE(ta.size() == tb.size());
  for (std::size_t i = 0; i < ta.size(); ++i) CHECK(ta[i].substr(0, ta[i].rfind(',')) == tb[i].substr(0, tb[i].rfind(',')));

  const auto merged = run_cli({"report-merge", (dir / "a" / "report.json").string(), (dir / "b" / "report.json").string()});
  REQUIRE(merged.code == 0);
  const auto rows = lines_of(merged.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rfind("file,method,dataset,seed,", 0) == 0);
  CHECK(rows[1].find(",ca-1d,sine-mixture,3,") != std::string::npos);
}

TEST_CASE("uniform weights on a one-kernel grid") {
  const fs::path dir = scratch("du");
  write(dir / "run.ini", std::string(kSmallSine) + "[method]\nname = du\ngrid = 2.5\n");
  const auto r = run_cli({"learn", "--config", (dir / "run.ini").string(), "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto j = ckl::Json::parse(slurp(dir / "report.json"));
  const auto& terms = j.at("combination").at("terms");
  REQUIRE(terms.size() == 1);
  CHECK(terms[0].at("mu").get<double>() == 1.0);
  CHECK(terms[0].at("sigma")[0].get<double>() == 2.5);
  CHECK(j.at("trace").is_null());
  CHECK_FALSE(fs::exists(dir / "trace.csv"));
}

TEST_CASE("landscape") {
  const fs::path dir = scratch("landscape");
  write(dir / "run.ini", kSmallSine);
  REQUIRE(run_cli({"learn", "--config", (dir / "run.ini").string(), "--out", dir.string()}).code == 0);
  const std::string state = (dir / "state.json").string();

  const auto two = run_cli({"landscape", "--state", state, "--steps", "2", "--lo", "1", "--hi", "3"});
  REQUIRE(two.code == 0);
  const auto rows = lines_of(two.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "sigma,h");
  CHECK(rows[1].rfind("1,", 0) == 0);
  CHECK(rows[2].rfind("3,", 0) == 0);

  CHECK(run_cli({"landscape", "--state", state, "--steps", "1"}).code == 2);
  const auto full = run_cli({"landscape", "--state", state, "--steps", "11", "--iteration", "0", "--out",
                             (dir / "land.csv").string()});
  REQUIRE(full.code == 0);
  CHECK(lines_of(slurp(dir / "land.csv")).size() == 12);

  // labels that the centering removes entirely: P = 0 and the landscape is flat
  ckl::LearnerState flat;
  flat.family = ckl::KernelFamily::Dirichlet1;
  flat.epsilon = 1e-10;
  flat.X = ckl::DataMatrix(2, 1);
  flat.X << 0.0, 1.0;
  flat.y = ckl::Labels(2);
  flat.y << 1.0, 1.0;
  write(dir / "flat.json", ckl::to_json(flat).dump());
  const auto f = run_cli({"landscape", "--state", (dir / "flat.json").string(), "--steps", "5"});
  if (f.code == 0) {
    const auto flat_rows = lines_of(f.out);
    for (std::size_t i = 1; i < flat_rows.size(); ++i) {
      CHECK(std::stod(flat_rows[i].substr(flat_rows[i].find(',') + 1)) == 0.0);
    }
  } else {
    CHECK(f.code == 1);
  }
}

TEST_CASE("small benchmarks") {
  const fs::path dir = scratch("bench");
  write(dir / "svm.ini", "[svm]\nc_grid = 1\n");
  const auto r = run_cli({"bench-sine", "--config", (dir / "svm.ini").string(), "--repeats", "1", "--method",
                          "single-sqrt2", "--method", "triple-uniform", "--out", dir.string()});
  REQUIRE(r.code == 0);
  for (const char* f : {"runs.csv", "aggregate.csv", "surrogate_gap.csv", "reports.jsonl"}) CHECK(fs::exists(dir / f));
  CHECK(lines_of(slurp(dir / "reports.jsonl")).size() == 2);
  const auto merged = run_cli({"report-merge", (dir / "reports.jsonl").string()});
  REQUIRE(merged.code == 0);
  CHECK(lines_of(merged.out).size() == 3);
}
