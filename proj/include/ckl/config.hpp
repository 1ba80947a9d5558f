#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ckl/data.hpp"
#include "ckl/experiment.hpp"

namespace ckl {

/// INI-style run configuration with sections [dataset], [method], [learner],
/// [optimizer] and [svm]. Values are kept as text under "section.key" and
/// parsed on use; unknown sections or keys are rejected when parsing.
///
///   [dataset]   source = sine | gauss50 | csv, seed, gamma, rho, path,
///               label_column, positive_label, n_train, n_val, n_test
///   [method]    name = ca-1d | ca-nd | du | da | best-single, id, family,
///               grid (list), grid_lo, grid_hi, grid_count,
///               grid_spacing = linear | geometric, lambda_grid (list),
///               da_max_iterations, da_min_relative_gain
///   [learner]   T, epsilon, theta, eta_max, lambda
///   [optimizer] lo, hi, log_scale, restarts = geometric | linear | single,
///               restart_step, refine_best, start, evals_per_dim, rel_tol,
///               initial_edge, polish
///   [svm]       c_grid (list), tolerance, max_epochs, folds, check_psd
///
/// Lists are comma separated.
struct RunConfig {
  std::map<std::string, std::string> values;

  [[nodiscard]] bool has(const std::string& key) const { return values.contains(key); }
  [[nodiscard]] std::optional<std::string> get(const std::string& key) const;
  [[nodiscard]] std::string get_string(const std::string& key, const std::string& fallback) const;
  [[nodiscard]] double get_double(const std::string& key, double fallback) const;
  [[nodiscard]] std::size_t get_size(const std::string& key, std::size_t fallback) const;
  [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const;
  [[nodiscard]] std::optional<std::vector<double>> get_list(const std::string& key) const;
  /// Throws std::invalid_argument for an unknown key.
  void set(const std::string& key, const std::string& value);
};

/// Throws ParseError on malformed input and std::invalid_argument for
/// unknown keys or sections.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Generates or loads the dataset named in [dataset]. CSV data without
/// explicit sizes is split 50/25/25.
Splits make_dataset(const RunConfig& config);
/// Short dataset label for reports, e.g. "sine-mixture" or "gauss50-gamma20".
std::string dataset_id(const RunConfig& config);

/// The method from [method], [learner] and [optimizer] for inputs of
/// dimension `dim`.
MethodSpec make_method(const RunConfig& config, std::size_t dim);
StageTwoConfig make_stage_two(const RunConfig& config);

}  // namespace ckl
