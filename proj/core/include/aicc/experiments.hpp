#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aicc/cluster.hpp"
#include "aicc/datagen.hpp"
#include "aicc/lcc.hpp"
#include "aicc/neuralnet.hpp"
#include "aicc/scheme.hpp"

namespace aicc {

/// Everything a command needs. Serialized as flat `key = value` lines; see
/// RunConfig::keys() for the accepted keys.
struct RunConfig {
  Problem problem = Problem::determinant;
  std::size_t m = 10;
  std::size_t k = 3;
  std::size_t g = 2;
  std::size_t p = 2;
  std::vector<std::size_t> hidden_layers{100, 100};
  Activation activation = Activation::relu;

  std::size_t epochs = 50;
  std::size_t batches_per_epoch = 20;
  std::size_t batch_size = 16;
  AdamOptions adam;
  /// Accumulate gradients over a whole epoch and step once, instead of per batch.
  bool update_per_epoch = false;

  std::size_t workers = 0;  ///< 0 means exactly the recovery threshold
  std::size_t erasures = 0;
  double jitter_mean = 0.0;

  std::size_t eval_instances = 256;

  std::string sweep_axis = "K";
  std::vector<std::size_t> sweep_values;

  std::size_t bench_batches = 128;
  std::size_t bench_repetitions = 10;

  LccFunction lcc_function = LccFunction::square;
  std::size_t lcc_patterns = 10;

  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string checkpoint;  ///< empty means <out_dir>/checkpoint.aicc

  std::size_t recovery_threshold() const noexcept { return g * p + 1; }
  std::size_t worker_count() const noexcept;
  std::size_t output_dim() const;
  SchemeConfig scheme_config() const;
  std::filesystem::path checkpoint_path() const;

  /// Throws FormatError on unknown keys or unparsable values.
  void set(std::string_view key, std::string_view value);
  static const std::vector<std::string>& keys();
  std::string get(std::string_view key) const;

  /// One `key = value` line per key, in keys() order.
  std::string serialize() const;
  /// Applies `key = value` lines on top of `base`. '#' starts a comment.
  static RunConfig parse(std::string_view text, RunConfig base);
  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::filesystem::path& path, RunConfig base);
  static RunConfig load(const std::filesystem::path& path);

  /// FNV-1a 64 of serialize().
  std::uint64_t hash() const;
  void validate() const;

  friend bool operator==(const RunConfig& a, const RunConfig& b) {
    return a.serialize() == b.serialize();
  }
};

/// "# aicc command=<cmd> config_hash=<hex> seed=<n>"
std::string csv_header_comment(std::string_view command, const RunConfig& config);

/// ||f_hat - f|| / ||f||
double nrmse(std::span<const double> f_hat, std::span<const double> f);

struct TrainReport {
  std::vector<double> epoch_losses;
  std::vector<double> learning_rates;  ///< at the end of each epoch
  std::size_t best_epoch = 0;          ///< 1-based; 0 when no epoch ran
  double best_loss = 0.0;
  SchemeModel best_model;
  bool aborted = false;
  std::string abort_reason;
};

using EpochCallback = std::function<void(std::size_t epoch, double loss)>;

/// Seeded training; every batch is freshly sampled from its own substream.
/// Keeps the parameters of the epoch with minimum loss. A non-finite loss or
/// gradient stops training with aborted=true and the last good best model.
TrainReport train(const RunConfig& config, const EpochCallback& on_epoch = {});

struct InstanceMetric {
  std::size_t instance = 0;
  std::size_t slot = 0;  ///< k index
  double nrmse = 0.0;
};

struct MetricRecord {
  std::vector<InstanceMetric> rows;
  std::size_t failures = 0;  ///< instances the simulator could not decode
  double mean = 0.0;
  double stddev = 0.0;

  void recompute();
};

/// Maps one K-tuple to decoded outputs (nullopt for a decode failure).
using Predictor =
    std::function<std::optional<std::vector<Vector>>(std::span<const Matrix>, std::size_t)>;

/// Fresh test data (disjoint substreams from training) scored by NRMSE.
MetricRecord evaluate(const Predictor& predictor, const RunConfig& config);
/// Full encode -> simulated cluster -> interpolation decode path.
MetricRecord evaluate(const SchemeModel& model, const RunConfig& config);

/// Cluster for evaluation instance `instance`: worker_count() workers with
/// `erasures` of them chosen at random to fail.
ClusterConfig eval_cluster(const RunConfig& config, std::size_t instance);

/// Published NRMSE at M=50, K=3, R=5, kept as reference metadata.
double reference_nrmse(Problem problem);

struct SweepRow {
  std::string axis;
  std::size_t value = 0;
  RunConfig config;
  double best_loss = 0.0;
  MetricRecord metrics;
};

/// Applies one sweep value to a config. Axis R keeps P and sets G=(R-1)/P.
RunConfig apply_sweep_value(const RunConfig& base, std::string_view axis, std::size_t value);
std::vector<SweepRow> sweep(const RunConfig& config, const EpochCallback& on_epoch = {});

struct BenchRow {
  std::string scheme;  ///< "aicc" or "direct"
  double mean_seconds = 0.0;
  double min_seconds = 0.0;
};
std::vector<BenchRow> bench(const RunConfig& config, const SchemeModel& model);

struct LccRow {
  std::size_t pattern = 0;
  std::vector<std::size_t> erased;
  std::size_t threshold = 0;
  bool decoded = false;
  double max_rel_error = 0.0;
};
std::vector<LccRow> lcc_experiment(const RunConfig& config);

// Commands: each writes its CSV/JSON/checkpoint outputs under out_dir and
// logs progress to `log`. Return value is a process exit code.
int cmd_train(const RunConfig& config, std::ostream& log);
int cmd_eval(const RunConfig& config, std::ostream& log);
int cmd_sweep(const RunConfig& config, std::ostream& log);
int cmd_bench(const RunConfig& config, std::ostream& log);
int cmd_lcc(const RunConfig& config, std::ostream& log);

}  // namespace aicc
