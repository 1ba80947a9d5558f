#include "ckl/cli.hpp"

#include <omp.h>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ckl/config.hpp"
#include "ckl/experiment.hpp"
#include "ckl/report.hpp"

namespace ckl::cli {

namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kMethods{"ca-1d", "ca-nd", "du", "da", "best-single"};

void set_threads(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory '" + dir + "': " + ec.message());
}

struct LearnArgs {
  std::string config;
  std::string dataset;
  std::string method;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> gamma;
  int threads = 0;
};

int cmd_learn(const LearnArgs& a, std::ostream& out) {
  set_threads(a.threads);
  RunConfig config = a.config.empty() ? RunConfig{} : load_config(a.config);
  if (!a.dataset.empty()) {
    if (a.dataset == "sine" || a.dataset == "gauss50") {
      config.set("dataset.source", a.dataset);
    } else {
      config.set("dataset.source", "csv");
      config.set("dataset.path", a.dataset);
    }
  }
  if (a.seed) config.set("dataset.seed", std::to_string(*a.seed));
  if (a.gamma) {
    std::ostringstream g;
    g << std::setprecision(17) << *a.gamma;
    config.set("dataset.gamma", g.str());
  }
  if (!a.method.empty()) config.set("method.name", a.method);

  const Splits splits = make_dataset(config);
  const MethodSpec spec = make_method(config, static_cast<std::size_t>(splits.train.dim()));
  const StageTwoConfig stage_two = make_stage_two(config);
  const RunResult result = run_method(spec, splits, stage_two);

  ensure_dir(a.out);
  const fs::path dir(a.out);
  std::string trace_name;
  if (result.trace) {
    trace_name = "trace.csv";
    auto f = open_out(dir / trace_name);
    result.trace->write_csv(f);
  }
  {
    auto f = open_out(dir / "report.json");
    f << run_report(result, config, trace_name).dump(2) << '\n';
  }
  {
    LearnerState state;
    state.family = result.combination.family;
    state.epsilon = spec.learner.epsilon;
    state.terms = result.combination.terms;
    state.X = splits.train.X;
    state.y = splits.train.y;
    auto f = open_out(dir / "state.json");
    f << to_json(state).dump() << '\n';
  }
  out << result.method_id << " on " << dataset_id(config) << ": test error " << result.test_error_pct
      << "%, test alignment " << result.test_alignment << ", " << result.combination.terms.size() << " terms\n";
  return 0;
}

struct BenchArgs {
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 1;
  std::size_t repeats = 10;
  std::vector<std::string> methods;
  std::vector<double> gammas{0, 1, 2, 5, 10, 20, 40};
  int threads = 0;
};

void write_bench(const BenchResult& result, const std::string& dir_name, const RunConfig& config) {
  ensure_dir(dir_name);
  const fs::path dir(dir_name);
  const auto rows = aggregate(result);
  {
    auto f = open_out(dir / "runs.csv");
    write_runs_csv(f, result);
  }
  {
    auto f = open_out(dir / "aggregate.csv");
    write_aggregate_csv(f, rows);
  }
  {
    auto f = open_out(dir / "surrogate_gap.csv");
    write_surrogate_csv(f, surrogate_gaps(rows));
  }
  auto f = open_out(dir / "reports.jsonl");
  for (const auto& rep : result.repeats) {
    for (const auto& r : rep.runs) {
      RunConfig echo = config;
      echo.set("dataset.seed", std::to_string(rep.seed));
      if (result.experiment == "gauss50") {
        std::ostringstream g;
        g << rep.gamma;
        echo.set("dataset.source", "gauss50");
        echo.set("dataset.gamma", g.str());
      } else {
        echo.set("dataset.source", "sine");
      }
      Json j = run_report(r, echo, "");
      j["repeat"] = rep.repeat;
      f << j.dump() << '\n';
    }
  }
}

int cmd_bench(const BenchArgs& a, bool sine, std::ostream& out, std::ostream& err) {
  set_threads(a.threads);
  const RunConfig config = a.config.empty() ? RunConfig{} : load_config(a.config);
  BenchOptions options;
  options.stage_two = make_stage_two(config);
  options.only = a.methods;
  options.log = &err;
  const BenchResult result =
      sine ? bench_sine(a.repeats, a.seed, options) : bench_gauss(a.gammas, a.repeats, a.seed, options);
  write_bench(result, a.out, config);
  write_aggregate_csv(out, aggregate(result));
  return 0;
}

struct LandscapeArgs {
  std::string state;
  std::string out;
  std::optional<std::size_t> iteration;
  std::optional<double> lo;
  std::optional<double> hi;
  std::size_t steps = 1001;
  bool log = false;
  int threads = 0;
};

int cmd_landscape(const LandscapeArgs& a, std::ostream& out) {
  set_threads(a.threads);
  std::ifstream in(a.state);
  if (!in) throw std::runtime_error("cannot open state '" + a.state + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("state '" + a.state + "': " + e.what());
  }
  const LearnerState state = state_from_json(j);
  const KernelCombination comb = state.prefix(a.iteration.value_or(state.terms.size()));
  const Matrix P = landscape_direction(state.X, state.y, comb, state.epsilon);
  const SearchSpace box = SearchSpace::defaults(state.family, static_cast<std::size_t>(state.X.cols()));
  const bool log_spacing = a.log || (!a.lo && !a.hi && box.log_scale);
  const auto points =
      landscape(P, state.X, state.family, a.lo.value_or(box.lo.front()), a.hi.value_or(box.hi.front()), a.steps,
                log_spacing);

  std::ofstream file;
  std::ostream* sink = &out;
  if (!a.out.empty()) {
    file = open_out(a.out);
    sink = &file;
  }
  *sink << "sigma,h\n" << std::setprecision(17);
  for (const auto& p : points) *sink << p.sigma << ',' << p.h << '\n';
  return 0;
}

int cmd_report_merge(const std::vector<std::string>& files, const std::string& out_path, std::ostream& out) {
  std::ofstream file;
  std::ostream* sink = &out;
  if (!out_path.empty()) {
    file = open_out(out_path);
    sink = &file;
  }
  *sink << "file,method,dataset,seed,test_error_pct,test_alignment,validation_error_pct,c,stage1_seconds,"
           "stage2_seconds,terms\n"
        << std::setprecision(10);
  const auto emit = [&](const std::string& name, const Json& j) {
    try {
      *sink << name << ',' << j.at("method").get<std::string>() << ',' << j.at("dataset").get<std::string>() << ','
            << j.at("seed").get<std::uint64_t>() << ',' << j.at("test_error_pct").get<double>() << ','
            << j.at("test_alignment").get<double>() << ',' << j.at("validation_error_pct").get<double>() << ','
            << j.at("c").get<double>() << ',' << j.at("stage1_seconds").get<double>() << ','
            << j.at("stage2_seconds").get<double>() << ',' << j.at("combination").at("terms").size() << '\n';
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("report '" + name + "': " + e.what());
    }
  };
  for (const auto& name : files) {
    std::ifstream in(name);
    if (!in) throw std::runtime_error("cannot open report '" + name + "'");
    std::string line;
    std::string all;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
      all += line;
      all += '\n';
      if (!line.empty()) lines.push_back(line);
    }
    try {
      if (name.ends_with(".jsonl")) {
        for (const auto& l : lines) emit(name, Json::parse(l));
      } else {
        const Json j = Json::parse(all);
        if (j.is_array()) {
          for (const auto& item : j) emit(name, item);
        } else {
          emit(name, j);
        }
      }
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error("report '" + name + "': " + e.what());
    }
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-stage kernel learning by centered alignment maximization", "ckl"};
  app.require_subcommand(1);

  LearnArgs learn;
  auto* learn_cmd = app.add_subcommand("learn", "Learn a kernel, train the SVM, write report.json, trace.csv and state.json");
  learn_cmd->add_option("--config", learn.config, "INI configuration file")->check(CLI::ExistingFile);
  learn_cmd->add_option("--dataset", learn.dataset, "sine, gauss50 or a CSV path (overrides [dataset] source)");
  learn_cmd->add_option("--method", learn.method, "Learner")->check(CLI::IsMember(kMethods));
  learn_cmd->add_option("--seed", learn.seed, "Dataset seed");
  learn_cmd->add_option("--gamma", learn.gamma, "Relevance exponent for gauss50");
  learn_cmd->add_option("--out", learn.out, "Output directory");
  learn_cmd->add_option("--threads", learn.threads, "OpenMP threads (0 keeps the default)");

  BenchArgs bench;
  const auto add_bench_options = [&](CLI::App* cmd) {
    cmd->add_option("--config", bench.config, "INI configuration file ([svm] is used)")->check(CLI::ExistingFile);
    cmd->add_option("--repeats", bench.repeats, "Number of repeats")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", bench.seed, "Seed of the first repeat; repeat i uses seed + i");
    cmd->add_option("--out", bench.out, "Output directory");
    cmd->add_option("--method", bench.methods, "Only these method ids (repeatable)");
    cmd->add_option("--threads", bench.threads, "OpenMP threads (0 keeps the default)");
  };
  auto* sine_cmd = app.add_subcommand("bench-sine", "Sine-mixture benchmark with Dirichlet kernels");
  add_bench_options(sine_cmd);
  auto* gauss_cmd = app.add_subcommand("bench-gauss", "50-dimensional Gaussian relevance benchmark");
  add_bench_options(gauss_cmd);
  gauss_cmd->add_option("--gammas", bench.gammas, "Relevance exponents")->delimiter(',');

  LandscapeArgs land;
  auto* land_cmd = app.add_subcommand("landscape", "Dump h(sigma) = -<P, K(sigma)> for a saved learner state");
  land_cmd->add_option("--state", land.state, "state.json written by learn")->required()->check(CLI::ExistingFile);
  land_cmd->add_option("--iteration", land.iteration, "Use the state after this many terms (default: all)");
  land_cmd->add_option("--lo", land.lo, "Lower end of the sigma range");
  land_cmd->add_option("--hi", land.hi, "Upper end of the sigma range");
  land_cmd->add_option("--steps", land.steps, "Number of points")->check(CLI::Range(2, 10000000));
  land_cmd->add_flag("--log", land.log, "Geometric spacing");
  land_cmd->add_option("--out", land.out, "Output CSV (default: stdout)");
  land_cmd->add_option("--threads", land.threads, "OpenMP threads (0 keeps the default)");

  std::vector<std::string> merge_files;
  std::string merge_out;
  auto* merge_cmd = app.add_subcommand("report-merge", "Merge JSON reports into one CSV table");
  merge_cmd->add_option("reports", merge_files, "report.json or reports.jsonl files")->required()->check(CLI::ExistingFile);
  merge_cmd->add_option("--out", merge_out, "Output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (*learn_cmd) return cmd_learn(learn, out);
    if (*sine_cmd) return cmd_bench(bench, true, out, err);
    if (*gauss_cmd) return cmd_bench(bench, false, out, err);
    if (*land_cmd) return cmd_landscape(land, out);
    if (*merge_cmd) return cmd_report_merge(merge_files, merge_out, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return std::string_view(e.what()).starts_with("unknown method") ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace ckl::cli
