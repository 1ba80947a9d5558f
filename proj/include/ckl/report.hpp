#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

#include "ckl/config.hpp"
#include "ckl/experiment.hpp"
#include "ckl/fsam.hpp"

namespace ckl {

using Json = nlohmann::ordered_json;

Json to_json(const KernelCombination& combination);
/// Throws std::invalid_argument on a malformed object.
KernelCombination combination_from_json(const Json& j);

Json to_json(const RunConfig& config);

/// One run: method, dataset, seed, config echo, errors, alignments, timings,
/// the learned combination and the name of the trace file (if any).
Json run_report(const RunResult& result, const RunConfig& config, const std::string& trace_file);

/// Everything `landscape` needs to rebuild an iteration state without
/// rerunning the learner.
struct LearnerState {
  KernelFamily family = KernelFamily::GaussianShared;
  double epsilon = 1e-10;
  std::vector<KernelCombination::Term> terms;  // in the order they were added
  DataMatrix X;
  Labels y;

  /// The combination after the first `iterations` terms (all if larger).
  [[nodiscard]] KernelCombination prefix(std::size_t iterations) const;
};

Json to_json(const LearnerState& state);
LearnerState state_from_json(const Json& j);

}  // namespace ckl
