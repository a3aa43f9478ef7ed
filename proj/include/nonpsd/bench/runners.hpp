#pragma once

// Experiment runners behind `bench optimize|lpreg|vmv|scores`.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nonpsd/bench/config.hpp"
#include "nonpsd/bench/dataset.hpp"
#include "nonpsd/optimizers.hpp"

namespace nonpsd::bench {

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the config's `seed`
  std::string out_dir = ".";
  bool svg = false;
};

/// Paths written, in write order.
using RunOutput = std::vector<std::string>;

RunOutput run_optimize(const KeyValueConfig& cfg, const RunOptions& opts);
RunOutput run_lpreg(const KeyValueConfig& cfg, const RunOptions& opts);
RunOutput run_vmv(const KeyValueConfig& cfg, const RunOptions& opts);
RunOutput run_scores(const KeyValueConfig& cfg, const RunOptions& opts);

/// Calls body(i) for i in [0, count) on `threads` workers. Bodies must not
/// share mutable state; results are collected by the caller afterwards.
void parallel_for(Index count, unsigned threads, const std::function<void(Index)>& body);

enum class OptimizerKind { NewtonCg, NewtonMr, TrustRegion };
OptimizerKind parse_optimizer(const std::string& name);
std::string optimizer_name(OptimizerKind kind);
OptTrace run_optimizer(OptimizerKind kind, const FiniteSumProblem& problem, const OptConfig& config);

/// Oracle calls at the first record with grad_norm <= tol, if any.
std::optional<double> calls_to_tolerance(const OptTrace& trace, double tol);

/// Dataset named by the `dataset` key: "synth" (synth_planted from synth_* keys),
/// "identity" (identity_n x identity_n), or a file path.
Dataset dataset_from_config(const KeyValueConfig& cfg);

}  // namespace nonpsd::bench
