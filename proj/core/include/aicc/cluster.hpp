#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aicc/lcc.hpp"
#include "aicc/linalg.hpp"
#include "aicc/random.hpp"

namespace aicc {

class SchemeModel;

/// Simulated master/worker cluster. Time is logical: worker n delivers at
/// base delay + Exp(jitter_mean) unless erased.
struct ClusterConfig {
  std::size_t workers = 5;
  double base_delay = 1.0;
  std::vector<double> worker_delays;  ///< per-worker base delay override (size N or empty)
  double jitter_mean = 0.0;
  double erasure_prob = 0.0;
  std::vector<double> worker_erasure_probs;  ///< per-worker override (size N or empty)
  std::vector<std::size_t> erased;           ///< workers that never deliver (0-based)
  std::vector<double> alphas;                ///< per-worker nodes; empty means n/(N+1)
  std::uint64_t seed = 0;

  void validate() const;
  std::vector<double> node_alphas() const;
};

struct WorkerRecord {
  std::size_t worker = 0;
  double alpha = 0.0;
  double latency = 0.0;
  bool delivered = false;
  bool used = false;
};

struct DeliverySchedule {
  std::vector<WorkerRecord> workers;  ///< indexed by worker
  std::vector<std::size_t> order;     ///< delivered workers by (latency, index)
};

/// Draws erasure and jitter for each worker in index order (two draws per
/// worker regardless of config) and sorts the survivors by arrival.
DeliverySchedule arrival_order(const ClusterConfig& cluster, Rng& rng);

/// Full record of one simulated run. Contains no wall-clock data, so a
/// rerun with the same seed serializes to identical bytes.
struct RunTranscript {
  std::string scheme;
  std::size_t threshold = 0;
  std::uint64_t seed = 0;
  std::vector<WorkerRecord> workers;
  std::vector<std::size_t> arrival;
  std::vector<std::size_t> used;
  bool decoded = false;
  std::string failure;
  /// Simulated time of the last result fed to the decoder (-1 on failure).
  double completion_time = -1.0;
  std::vector<Vector> outputs;

  /// JSON with a fixed key order: scheme, threshold, seed, decoded, failure,
  /// completion_time, workers[{worker, alpha, latency, delivered, used}],
  /// arrival, used, outputs.
  std::string to_json() const;
  void save(const std::filesystem::path& path) const;
};

struct AiccRun {
  std::optional<std::vector<Vector>> outputs;  ///< empty on decode failure
  RunTranscript transcript;
};

struct LccRun {
  std::optional<std::vector<Matrix>> outputs;
  RunTranscript transcript;
};

/// Encode at every worker node, deliver, decode from the first R arrivals.
/// Fewer than R survivors yields an empty `outputs` and a failure reason.
AiccRun run_aicc(const SchemeModel& model, std::span<const Matrix> inputs,
                 const ClusterConfig& cluster);

/// LCC counterpart with threshold (K-1)d+1. Empty betas means k/K.
LccRun run_lcc(LccFunction f, std::span<const Matrix> inputs, const ClusterConfig& cluster,
               std::vector<double> betas = {});

}  // namespace aicc
