#include "ckl/report.hpp"

#include <stdexcept>

namespace ckl {

namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(std::string("json: missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

Json to_json(const KernelCombination& combination) {
  Json terms = Json::array();
  for (const auto& t : combination.terms) terms.push_back({{"sigma", t.sigma}, {"mu", t.mu}});
  return {{"family", to_string(combination.family)}, {"terms", terms}};
}

KernelCombination combination_from_json(const Json& j) {
  try {
    KernelCombination c;
    c.family = family_from_string(require(j, "family").get<std::string>());
    for (const auto& t : require(j, "terms")) {
      c.terms.push_back({require(t, "sigma").get<std::vector<double>>(), require(t, "mu").get<double>()});
      if (!(c.terms.back().mu >= 0.0)) throw std::invalid_argument("json: negative weight");
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("json: ") + e.what());
  }
}

Json to_json(const RunConfig& config) {
  Json out = Json::object();
  for (const auto& [key, value] : config.values) {
    const auto dot = key.find('.');
    out[key.substr(0, dot)][key.substr(dot + 1)] = value;
  }
  return out;
}

Json run_report(const RunResult& result, const RunConfig& config, const std::string& trace_file) {
  Json j;
  j["method"] = result.method_id;
  j["dataset"] = dataset_id(config);
  j["seed"] = config.get_size("dataset.seed", 1);
  j["config"] = to_json(config);
  j["test_error_pct"] = result.test_error_pct;
  j["test_alignment"] = result.test_alignment;
  j["train_alignment"] = result.train_alignment;
  j["validation_error_pct"] = result.validation_error_pct;
  j["c"] = result.c;
  if (result.lambda) j["lambda"] = *result.lambda;
  j["combination"] = to_json(result.combination);
  j["trace"] = trace_file.empty() ? Json(nullptr) : Json(trace_file);
  j["stage1_seconds"] = result.stage1_seconds;
  j["stage2_seconds"] = result.stage2_seconds;
  j["total_seconds"] = result.stage1_seconds + result.stage2_seconds;
  return j;
}

KernelCombination LearnerState::prefix(std::size_t iterations) const {
  KernelCombination c{family, {}};
  for (std::size_t i = 0; i < terms.size() && i < iterations; ++i) c.terms.push_back(terms[i]);
  return c;
}

Json to_json(const LearnerState& state) {
  Json X = Json::array();
  for (Eigen::Index i = 0; i < state.X.rows(); ++i) {
    std::vector<double> row(state.X.row(i).begin(), state.X.row(i).end());
    X.push_back(row);
  }
  std::vector<double> y(state.y.begin(), state.y.end());
  Json j = to_json(KernelCombination{state.family, state.terms});
  j["epsilon"] = state.epsilon;
  j["X"] = X;
  j["y"] = y;
  return j;
}

LearnerState state_from_json(const Json& j) {
  LearnerState s;
  const KernelCombination c = combination_from_json(j);
  s.family = c.family;
  s.terms = c.terms;
  try {
    s.epsilon = require(j, "epsilon").get<double>();
    const auto rows = require(j, "X").get<std::vector<std::vector<double>>>();
    const auto y = require(j, "y").get<std::vector<double>>();
    if (rows.empty() || rows.size() != y.size()) throw std::invalid_argument("json: X and y sizes differ");
    const auto d = rows.front().size();
    s.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    s.y.resize(static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != d) throw std::invalid_argument("json: ragged X");
      for (std::size_t k = 0; k < d; ++k) s.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
      s.y(static_cast<Eigen::Index>(i)) = y[i];
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("json: ") + e.what());
  }
  if (!(s.epsilon > 0.0)) throw std::invalid_argument("json: epsilon must be positive");
  return s;
}

}  // namespace ckl
