#include "ckl/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ckl/errors.hpp"

namespace ckl {

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"dataset",
       {"source", "seed", "gamma", "rho", "dim", "path", "label_column", "positive_label", "n_train", "n_val",
        "n_test"}},
      {"method",
       {"name", "id", "family", "grid", "grid_lo", "grid_hi", "grid_count", "grid_spacing", "lambda_grid",
        "da_max_iterations", "da_min_relative_gain"}},
      {"learner", {"T", "epsilon", "theta", "eta_max", "lambda"}},
      {"optimizer",
       {"lo", "hi", "log_scale", "restarts", "restart_step", "refine_best", "start", "evals_per_dim", "rel_tol",
        "initial_edge", "polish"}},
      {"svm", {"c_grid", "tolerance", "max_epochs", "folds", "check_psd"}},
  };
  return keys;
}

bool known(const std::string& key) {
  const auto dot = key.find('.');
  if (dot == std::string::npos) return false;
  const auto it = known_keys().find(key.substr(0, dot));
  return it != known_keys().end() && it->second.contains(key.substr(dot + 1));
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument("config: " + key + " = '" + text + "' is not a number");
  }
  return v;
}

KernelFamily default_family(const RunConfig& config) {
  if (config.get_string("dataset.source", "sine") == "sine") return KernelFamily::Dirichlet1;
  return config.get_string("method.name", "ca-1d") == "ca-nd" ? KernelFamily::GaussianPerDim
                                                               : KernelFamily::GaussianShared;
}

void apply_learner(const RunConfig& config, LearnerConfig& learner) {
  learner.max_iterations = config.get_size("learner.T", learner.max_iterations);
  learner.epsilon = config.get_double("learner.epsilon", learner.epsilon);
  learner.theta = config.get_double("learner.theta", learner.theta);
  learner.eta_max = config.get_double("learner.eta_max", learner.eta_max);
}

void apply_optimizer(const RunConfig& config, LearnerConfig& learner, std::size_t dim, bool allow_schedule) {
  const auto arity = family_arity(learner.family, dim);
  auto& space = learner.space;
  const bool box_changed = config.has("optimizer.lo") || config.has("optimizer.hi") || config.has("optimizer.log_scale");
  if (box_changed) {
    space = SearchSpace::uniform(arity, config.get_double("optimizer.lo", space.lo.front()),
                                 config.get_double("optimizer.hi", space.hi.front()),
                                 config.get_bool("optimizer.log_scale", space.log_scale));
    learner.schedule = RestartSchedule::defaults(learner.family, space);
  }
  if (allow_schedule && config.has("optimizer.restarts")) {
    const std::string kind = config.get_string("optimizer.restarts", "");
    if (kind == "geometric") {
      learner.schedule = RestartSchedule::geometric(space);
    } else if (kind == "linear") {
      learner.schedule = RestartSchedule::linear(space, config.get_double("optimizer.restart_step", 0.05),
                                                 config.get_size("optimizer.refine_best", 8));
    } else if (kind == "single") {
      if (!config.has("optimizer.start")) throw std::invalid_argument("config: restarts = single needs optimizer.start");
      learner.schedule = RestartSchedule::single(arity, config.get_double("optimizer.start", 0.0));
    } else {
      throw std::invalid_argument("config: optimizer.restarts must be geometric, linear or single");
    }
  }
  if (config.has("optimizer.refine_best")) learner.schedule.refine_best = config.get_size("optimizer.refine_best", 0);
  auto& nm = learner.simplex;
  nm.evals_per_dim = config.get_size("optimizer.evals_per_dim", nm.evals_per_dim);
  nm.rel_tol = config.get_double("optimizer.rel_tol", nm.rel_tol);
  nm.initial_edge = config.get_double("optimizer.initial_edge", nm.initial_edge);
  nm.polish = config.get_bool("optimizer.polish", nm.polish);
}

KernelGrid make_grid(const RunConfig& config, KernelFamily family) {
  if (family == KernelFamily::GaussianPerDim) {
    throw std::invalid_argument("config: kernel grids need a one-parameter family (gaussian or dirichlet)");
  }
  if (auto values = config.get_list("method.grid")) return KernelGrid::from_values(family, *values);
  const bool dirichlet = family == KernelFamily::Dirichlet1;
  const double lo = config.get_double("method.grid_lo", dirichlet ? 0.0 : 1e-3);
  const double hi = config.get_double("method.grid_hi", dirichlet ? 9.0 : 1e3);
  const std::size_t count = config.get_size("method.grid_count", dirichlet ? 10 : 50);
  const std::string spacing = config.get_string("method.grid_spacing", dirichlet ? "linear" : "geometric");
  if (spacing == "linear") return KernelGrid::linear(family, lo, hi, count);
  if (spacing == "geometric") return KernelGrid::geometric(family, lo, hi, count);
  throw std::invalid_argument("config: method.grid_spacing must be linear or geometric");
}

}  // namespace

std::optional<std::string> RunConfig::get(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) return std::nullopt;
  return it->second;
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  return v ? to_double(key, *v) : fallback;
}

std::size_t RunConfig::get_size(const std::string& key, std::size_t fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  const std::string t = trim(*v);
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument("config: " + key + " = '" + *v + "' is not a non-negative integer");
  }
  return out;
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  const std::string t = trim(*v);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw std::invalid_argument("config: " + key + " = '" + *v + "' is not a boolean");
}

std::optional<std::vector<double>> RunConfig::get_list(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  std::vector<double> out;
  std::istringstream in(*v);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(to_double(key, item));
  if (out.empty()) throw std::invalid_argument("config: " + key + " is an empty list");
  return out;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!known(key)) throw std::invalid_argument("config: unknown key '" + key + "'");
  values[key] = value;
}

RunConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError("config: " + e.message(), e.line());
  }
  RunConfig config;
  for (const auto& [section, body] : tree) {
    if (!known_keys().contains(section)) {
      if (body.empty()) throw std::invalid_argument("config: key '" + section + "' outside a section");
      throw std::invalid_argument("config: unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (!known(full)) throw std::invalid_argument("config: unknown key '" + key + "' in [" + section + "]");
      config.values[full] = trim(value.data());
    }
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  return parse_config(in);
}

Splits make_dataset(const RunConfig& config) {
  const std::string source = config.get_string("dataset.source", "sine");
  const auto seed = static_cast<std::uint64_t>(config.get_size("dataset.seed", 1));
  const auto size = [&](const char* key, Eigen::Index fallback) {
    return static_cast<Eigen::Index>(config.get_size(std::string("dataset.") + key, static_cast<std::size_t>(fallback)));
  };
  if (source == "sine") return gen_sine_mixture(seed, size("n_train", 500), size("n_val", 500), size("n_test", 1000));
  if (source == "gauss50") {
    return gen_gauss50(config.get_double("dataset.gamma", 0.0), seed, config.get_double("dataset.rho", 1.75),
                       size("dim", 50), size("n_train", 50), size("n_val", 1000), size("n_test", 1000));
  }
  if (source == "csv") {
    const auto path = config.get("dataset.path");
    if (!path) throw std::invalid_argument("config: dataset.source = csv needs dataset.path");
    const Dataset ds = load_csv(*path, config.get_string("dataset.label_column", "label"),
                                config.get_string("dataset.positive_label", "1"));
    const Eigen::Index n = ds.size();
    SplitSpec spec;
    spec.seed = seed;
    spec.n_train = size("n_train", n / 2);
    spec.n_val = size("n_val", n / 4);
    spec.n_test = size("n_test", n - spec.n_train - spec.n_val);
    return split(ds, spec);
  }
  throw std::invalid_argument("config: dataset.source must be sine, gauss50 or csv");
}

std::string dataset_id(const RunConfig& config) {
  const std::string source = config.get_string("dataset.source", "sine");
  if (source == "sine") return "sine-mixture";
  if (source == "gauss50") {
    std::ostringstream out;
    out << "gauss50-gamma" << config.get_double("dataset.gamma", 0.0);
    return out.str();
  }
  return config.get_string("dataset.path", source);
}

MethodSpec make_method(const RunConfig& config, std::size_t dim) {
  MethodSpec spec;
  const std::string name = config.get_string("method.name", "ca-1d");
  spec.method = method_from_string(name);
  spec.id = config.get_string("method.id", name);
  const KernelFamily family =
      config.has("method.family") ? family_from_string(*config.get("method.family")) : default_family(config);

  switch (spec.method) {
    case Method::CA1D:
      spec.learner = LearnerConfig::defaults(family, dim);
      apply_learner(config, spec.learner);
      spec.learner.lambda = config.get_double("learner.lambda", 0.0);
      apply_optimizer(config, spec.learner, dim, true);
      break;
    case Method::CAND:
      if (family != KernelFamily::GaussianPerDim) {
        throw std::invalid_argument("config: ca-nd needs method.family = gaussian-per-dim");
      }
      spec.learner = LearnerConfig::defaults(family, dim);
      apply_learner(config, spec.learner);
      apply_optimizer(config, spec.learner, dim, false);
      spec.reference_learner = LearnerConfig::defaults(KernelFamily::GaussianShared, dim);
      apply_learner(config, spec.reference_learner);
      apply_optimizer(config, spec.reference_learner, dim, true);
      if (auto grid = config.get_list("method.lambda_grid")) {
        spec.lambda_grid = *grid;
      } else if (config.has("learner.lambda")) {
        spec.lambda_grid = {config.get_double("learner.lambda", 0.0)};
      } else {
        spec.lambda_grid = MethodSpec::default_lambda_grid();
      }
      for (double l : spec.lambda_grid) {
        if (!(l >= 0.0)) throw std::invalid_argument("config: lambda values must be non-negative");
      }
      break;
    case Method::DU:
    case Method::DA:
    case Method::BestSingle:
      spec.grid = make_grid(config, family);
      spec.grid.validate(dim);
      spec.discrete.max_iterations = config.get_size("method.da_max_iterations", spec.discrete.max_iterations);
      spec.discrete.min_relative_gain = config.get_double("method.da_min_relative_gain", spec.discrete.min_relative_gain);
      break;
  }
  if (spec.method == Method::CA1D || spec.method == Method::CAND) spec.learner.validate(dim);
  return spec;
}

StageTwoConfig make_stage_two(const RunConfig& config) {
  StageTwoConfig s;
  if (auto grid = config.get_list("svm.c_grid")) s.c_grid = *grid;
  s.svm.tolerance = config.get_double("svm.tolerance", s.svm.tolerance);
  s.svm.max_epochs = config.get_size("svm.max_epochs", s.svm.max_epochs);
  s.svm.check_psd = config.get_bool("svm.check_psd", s.svm.check_psd);
  s.folds = static_cast<int>(config.get_size("svm.folds", static_cast<std::size_t>(s.folds)));
  if (!(s.svm.tolerance > 0.0)) throw std::invalid_argument("config: svm.tolerance must be positive");
  if (s.folds < 2) throw std::invalid_argument("config: svm.folds must be at least 2");
  return s;
}

}  // namespace ckl
