#include "aicc/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "aicc/checkpoint.hpp"
#include "aicc/errors.hpp"

namespace aicc {

namespace {

// Substream epochs reserved for evaluation and LCC data, far from any
// training epoch index.
constexpr std::uint64_t kEvalEpoch = 0xE7A1000000000000ull;
constexpr std::uint64_t kLccEpoch = 0x1CC0000000000000ull;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw FormatError("config key '" + std::string(key) + "': bad number '" + std::string(text) +
                      "'");
  }
  return v;
}

std::uint64_t parse_u64(std::string_view key, std::string_view text) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw FormatError("config key '" + std::string(key) + "': bad integer '" +
                      std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw FormatError("config key '" + std::string(key) + "': expected true|false");
}

std::vector<std::size_t> parse_list(std::string_view key, std::string_view text) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto comma = text.find(',', pos);
    const auto tok = trim(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos));
    if (!tok.empty()) out.push_back(static_cast<std::size_t>(parse_u64(key, tok)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string format_list(const std::vector<std::size_t>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + std::to_string(xs[i]);
  return out;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::ofstream open_output(const RunConfig& config, const std::string& name) {
  std::filesystem::create_directories(config.out_dir);
  const auto path = std::filesystem::path(config.out_dir) / name;
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.precision(17);
  return out;
}

/// Distinct workers to erase, drawn by partial Fisher-Yates.
std::vector<std::size_t> pick_erased(Rng& rng, std::size_t workers, std::size_t count) {
  std::vector<std::size_t> idx(workers);
  for (std::size_t i = 0; i < workers; ++i) idx[i] = i;
  count = std::min(count, workers);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(workers - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

std::size_t RunConfig::worker_count() const noexcept {
  return workers == 0 ? recovery_threshold() : workers;
}

std::size_t RunConfig::output_dim() const { return ProblemSpec(problem, m).output_dim(); }

SchemeConfig RunConfig::scheme_config() const {
  SchemeConfig s;
  s.m = m;
  s.k = k;
  s.g = g;
  s.p = p;
  s.v = output_dim();
  s.betas = default_betas(k);
  s.hidden_layers = hidden_layers;
  s.activation = activation;
  s.seed = seed;
  return s;
}

std::filesystem::path RunConfig::checkpoint_path() const {
  if (!checkpoint.empty()) return checkpoint;
  return std::filesystem::path(out_dir) / "checkpoint.aicc";
}

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = {
      "problem",      "m",
      "k",            "g",
      "p",            "hidden_layers",
      "activation",   "epochs",
      "batches_per_epoch", "batch_size",
      "learning_rate", "beta1",
      "beta2",        "epsilon",
      "decay_rate",   "decay_steps",
      "update_per_epoch", "workers",
      "erasures",     "jitter_mean",
      "eval_instances", "sweep_axis",
      "sweep_values", "bench_batches",
      "bench_repetitions", "lcc_function",
      "lcc_patterns", "seed",
      "out_dir",      "checkpoint"};
  return k;
}

void RunConfig::set(std::string_view key, std::string_view raw) {
  const std::string value = trim(raw);
  auto size = [&] { return static_cast<std::size_t>(parse_u64(key, value)); };
  if (key == "problem") problem = parse_problem(value);
  else if (key == "m") m = size();
  else if (key == "k") k = size();
  else if (key == "g") g = size();
  else if (key == "p") p = size();
  else if (key == "hidden_layers") hidden_layers = parse_list(key, value);
  else if (key == "activation") activation = parse_activation(value);
  else if (key == "epochs") epochs = size();
  else if (key == "batches_per_epoch") batches_per_epoch = size();
  else if (key == "batch_size") batch_size = size();
  else if (key == "learning_rate") adam.base_lr = parse_double(key, value);
  else if (key == "beta1") adam.beta1 = parse_double(key, value);
  else if (key == "beta2") adam.beta2 = parse_double(key, value);
  else if (key == "epsilon") adam.epsilon = parse_double(key, value);
  else if (key == "decay_rate") adam.decay_rate = parse_double(key, value);
  else if (key == "decay_steps") adam.decay_steps = parse_double(key, value);
  else if (key == "update_per_epoch") update_per_epoch = parse_bool(key, value);
  else if (key == "workers") workers = size();
  else if (key == "erasures") erasures = size();
  else if (key == "jitter_mean") jitter_mean = parse_double(key, value);
  else if (key == "eval_instances") eval_instances = size();
  else if (key == "sweep_axis") {
    if (value != "M" && value != "K" && value != "R") {
      throw FormatError("sweep_axis must be one of M, K, R");
    }
    sweep_axis = value;
  } else if (key == "sweep_values") sweep_values = parse_list(key, value);
  else if (key == "bench_batches") bench_batches = size();
  else if (key == "bench_repetitions") bench_repetitions = size();
  else if (key == "lcc_function") lcc_function = parse_lcc_function(value);
  else if (key == "lcc_patterns") lcc_patterns = size();
  else if (key == "seed") seed = parse_u64(key, value);
  else if (key == "out_dir") out_dir = value;
  else if (key == "checkpoint") checkpoint = value;
  else throw FormatError("unknown config key '" + std::string(key) + "'");
}

std::string RunConfig::get(std::string_view key) const {
  if (key == "problem") return std::string(to_string(problem));
  if (key == "m") return std::to_string(m);
  if (key == "k") return std::to_string(k);
  if (key == "g") return std::to_string(g);
  if (key == "p") return std::to_string(p);
  if (key == "hidden_layers") return format_list(hidden_layers);
  if (key == "activation") return std::string(to_string(activation));
  if (key == "epochs") return std::to_string(epochs);
  if (key == "batches_per_epoch") return std::to_string(batches_per_epoch);
  if (key == "batch_size") return std::to_string(batch_size);
  if (key == "learning_rate") return format_double(adam.base_lr);
  if (key == "beta1") return format_double(adam.beta1);
  if (key == "beta2") return format_double(adam.beta2);
  if (key == "epsilon") return format_double(adam.epsilon);
  if (key == "decay_rate") return format_double(adam.decay_rate);
  if (key == "decay_steps") return format_double(adam.decay_steps);
  if (key == "update_per_epoch") return update_per_epoch ? "true" : "false";
  if (key == "workers") return std::to_string(workers);
  if (key == "erasures") return std::to_string(erasures);
  if (key == "jitter_mean") return format_double(jitter_mean);
  if (key == "eval_instances") return std::to_string(eval_instances);
  if (key == "sweep_axis") return sweep_axis;
  if (key == "sweep_values") return format_list(sweep_values);
  if (key == "bench_batches") return std::to_string(bench_batches);
  if (key == "bench_repetitions") return std::to_string(bench_repetitions);
  if (key == "lcc_function") return std::string(to_string(lcc_function));
  if (key == "lcc_patterns") return std::to_string(lcc_patterns);
  if (key == "seed") return std::to_string(seed);
  if (key == "out_dir") return out_dir;
  if (key == "checkpoint") return checkpoint;
  throw FormatError("unknown config key '" + std::string(key) + "'");
}

std::string RunConfig::serialize() const {
  std::string out;
  for (const auto& key : keys()) out += key + " = " + get(key) + "\n";
  return out;
}

RunConfig RunConfig::parse(std::string_view text, RunConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw FormatError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    base.set(trim(std::string_view(t).substr(0, eq)), std::string_view(t).substr(eq + 1));
  }
  return base;
}

RunConfig RunConfig::parse(std::string_view text) { return parse(text, RunConfig{}); }

RunConfig RunConfig::load(const std::filesystem::path& path) { return load(path, RunConfig{}); }

RunConfig RunConfig::load(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), std::move(base));
}

std::uint64_t RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : serialize()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

void RunConfig::validate() const {
  if (m == 0 || k == 0) throw FormatError("m and k must be positive");
  if (batches_per_epoch == 0 || batch_size == 0) {
    throw FormatError("batches_per_epoch and batch_size must be positive");
  }
  if (hidden_layers.empty()) throw FormatError("hidden_layers must not be empty");
  if (workers != 0 && workers < 1) throw FormatError("workers must be positive");
  if (eval_instances == 0) throw FormatError("eval_instances must be positive");
  scheme_config().validate();
}

std::string csv_header_comment(std::string_view command, const RunConfig& config) {
  return "# aicc command=" + std::string(command) + " config_hash=" + hex64(config.hash()) +
         " seed=" + std::to_string(config.seed);
}

double nrmse(std::span<const double> f_hat, std::span<const double> f) {
  const double denom = norm2(f);
  if (denom == 0.0) throw DegenerateInput("nrmse: target has zero norm");
  return cost(f_hat, f) / denom;
}

TrainReport train(const RunConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  const ProblemSpec problem(config.problem, config.m);
  SchemeModel model(config.scheme_config());
  Adam adam(config.adam, model.block_sizes());

  TrainReport report{{}, {}, 0, std::numeric_limits<double>::infinity(), model, false, {}};
  SchemeGradients epoch_grad = SchemeGradients::zeros_like(model);
  const double inv_batch = 1.0 / static_cast<double>(config.batch_size);

  for (std::size_t epoch = 0; epoch < config.epochs && !report.aborted; ++epoch) {
    double epoch_loss = 0.0;
    try {
      for (std::size_t b = 0; b < config.batches_per_epoch; ++b) {
        const auto batch =
            make_batch(problem, config.k, config.batch_size, config.seed, epoch, b);
        SchemeGradients grads = SchemeGradients::zeros_like(model);
        double batch_loss = 0.0;
        for (const Instance& inst : batch) {
          ForwardResult fr = forward_train(model, inst.inputs, inst.targets, problem.cost_kind());
          batch_loss += fr.loss;
          backward_train(model, fr.tape, inv_batch, grads);
        }
        batch_loss *= inv_batch;
        if (!std::isfinite(batch_loss)) {
          throw NumericalError("non-finite loss at epoch " + std::to_string(epoch + 1) +
                               ", batch " + std::to_string(b + 1));
        }
        if (config.update_per_epoch) {
          epoch_grad += grads;
        } else {
          adam.step(model.mutable_blocks(), grads.blocks());
        }
        epoch_loss += batch_loss;
      }
      if (config.update_per_epoch) {
        epoch_grad.scale(1.0 / static_cast<double>(config.batches_per_epoch));
        adam.step(model.mutable_blocks(), epoch_grad.blocks());
        epoch_grad.scale(0.0);
      }
    } catch (const NumericalError& e) {
      report.aborted = true;
      report.abort_reason = e.what();
      break;
    }
    epoch_loss /= static_cast<double>(config.batches_per_epoch);
    report.epoch_losses.push_back(epoch_loss);
    report.learning_rates.push_back(adam.learning_rate());
    if (epoch_loss < report.best_loss) {
      report.best_loss = epoch_loss;
      report.best_epoch = epoch + 1;
      report.best_model = model;
    }
    if (on_epoch) on_epoch(epoch + 1, epoch_loss);
  }
  if (report.best_epoch == 0) report.best_loss = 0.0;
  return report;
}

void MetricRecord::recompute() {
  mean = 0.0;
  stddev = 0.0;
  if (rows.empty()) return;
  for (const auto& r : rows) mean += r.nrmse;
  mean /= static_cast<double>(rows.size());
  for (const auto& r : rows) stddev += (r.nrmse - mean) * (r.nrmse - mean);
  stddev = std::sqrt(stddev / static_cast<double>(rows.size()));
}

MetricRecord evaluate(const Predictor& predictor, const RunConfig& config) {
  const ProblemSpec problem(config.problem, config.m);
  MetricRecord record;
  for (std::size_t i = 0; i < config.eval_instances; ++i) {
    const Instance inst = make_instance(problem, config.k, SeedCoords{config.seed, kEvalEpoch, 0, i});
    const auto outputs = predictor(inst.inputs, i);
    if (!outputs) {
      ++record.failures;
      continue;
    }
    for (std::size_t k = 0; k < config.k; ++k) {
      record.rows.push_back({i, k, nrmse((*outputs)[k], inst.targets[k])});
    }
  }
  record.recompute();
  return record;
}

ClusterConfig eval_cluster(const RunConfig& config, std::size_t instance) {
  ClusterConfig cluster;
  cluster.workers = config.worker_count();
  cluster.jitter_mean = config.jitter_mean;
  cluster.seed = Rng::substream(config.seed, kEvalEpoch, 2, instance).next_u64();
  if (config.erasures > 0) {
    Rng rng = Rng::substream(config.seed, kEvalEpoch, 1, instance);
    cluster.erased = pick_erased(rng, cluster.workers, config.erasures);
  }
  return cluster;
}

MetricRecord evaluate(const SchemeModel& model, const RunConfig& config) {
  return evaluate(
      [&](std::span<const Matrix> inputs, std::size_t instance) {
        return run_aicc(model, inputs, eval_cluster(config, instance)).outputs;
      },
      config);
}

double reference_nrmse(Problem problem) {
  switch (problem) {
    case Problem::eigenvalues:
      return 0.0464;
    case Problem::eigenvector:
      return 0.0581;
    case Problem::exponential:
      return 0.0785;
    case Problem::determinant:
      return 0.0150;
  }
  return 0.0;
}

RunConfig apply_sweep_value(const RunConfig& base, std::string_view axis, std::size_t value) {
  RunConfig cfg = base;
  if (axis == "M") {
    cfg.m = value;
  } else if (axis == "K") {
    cfg.k = value;
  } else if (axis == "R") {
    if (value == 0 || cfg.p == 0 || (value - 1) % cfg.p != 0) {
      throw FormatError("R sweep value " + std::to_string(value) +
                        " is not of the form G*P+1 with P=" + std::to_string(cfg.p));
    }
    cfg.g = (value - 1) / cfg.p;
  } else {
    throw FormatError("unknown sweep axis '" + std::string(axis) + "'");
  }
  return cfg;
}

std::vector<SweepRow> sweep(const RunConfig& config, const EpochCallback& on_epoch) {
  if (config.sweep_values.empty()) throw FormatError("sweep_values is empty");
  std::vector<SweepRow> rows;
  for (std::size_t value : config.sweep_values) {
    RunConfig cfg = apply_sweep_value(config, config.sweep_axis, value);
    TrainReport report = train(cfg, on_epoch);
    if (report.aborted) throw NumericalError("sweep training aborted: " + report.abort_reason);
    rows.push_back({config.sweep_axis, value, cfg, report.best_loss,
                    evaluate(report.best_model, cfg)});
  }
  return rows;
}

std::vector<BenchRow> bench(const RunConfig& config, const SchemeModel& model) {
  using clock = std::chrono::steady_clock;
  const ProblemSpec problem(config.problem, config.m);
  const SchemeConfig& sc = model.config();
  std::vector<Instance> data;
  for (std::size_t b = 0; b < config.bench_batches; ++b) {
    Rng rng = Rng::substream(config.seed, kEvalEpoch, 3, b);
    Instance inst;
    for (std::size_t k = 0; k < sc.k; ++k) inst.inputs.push_back(problem.sample(rng));
    data.push_back(std::move(inst));
  }
  const auto alphas = default_alphas(config.worker_count());

  std::vector<double> aicc_times;
  std::vector<double> direct_times;
  double sink = 0.0;
  for (std::size_t rep = 0; rep < std::max<std::size_t>(1, config.bench_repetitions); ++rep) {
    auto t0 = clock::now();
    for (const Instance& inst : data) {
      const EncoderCoefficients enc = model.encoder_coeffs(inst.inputs);
      const ComputationCoefficients comp = model.computation_coeffs(inst.inputs);
      std::vector<WorkerResult> results;
      for (double a : alphas) results.push_back({a, worker_compute(comp, encode(enc, a))});
      sink += decode(results, sc).front().front();
    }
    auto t1 = clock::now();
    for (const Instance& inst : data)
      for (const Matrix& x : inst.inputs) sink += problem.target(x).front();
    auto t2 = clock::now();
    aicc_times.push_back(std::chrono::duration<double>(t1 - t0).count());
    direct_times.push_back(std::chrono::duration<double>(t2 - t1).count());
  }
  volatile double keep = sink;
  (void)keep;

  auto row = [](std::string name, const std::vector<double>& ts) {
    double mean = 0.0;
    for (double t : ts) mean += t;
    mean /= static_cast<double>(ts.size());
    const double lo = *std::min_element(ts.begin(), ts.end());
    // A clock tick of zero would make the row meaningless; report the resolution floor.
    const double floor = std::chrono::duration<double>(clock::duration(1)).count();
    return BenchRow{std::move(name), std::max(mean, floor), std::max(lo, floor)};
  };
  return {row("aicc", aicc_times), row("direct", direct_times)};
}

std::vector<LccRow> lcc_experiment(const RunConfig& config) {
  const std::size_t d = degree(config.lcc_function);
  const std::size_t threshold = lcc_recovery_threshold(config.k, d);
  const std::size_t workers = config.workers == 0 ? threshold + config.erasures : config.workers;

  Rng data_rng = Rng::substream(config.seed, kLccEpoch, 0, 0);
  std::vector<Matrix> inputs;
  for (std::size_t k = 0; k < config.k; ++k) {
    Matrix x(config.m, config.m);
    for (double& v : x.data()) v = data_rng.uniform(-1.0, 1.0);
    inputs.push_back(std::move(x));
  }
  std::vector<Matrix> expected;
  for (const Matrix& x : inputs) expected.push_back(apply(config.lcc_function, x));

  std::vector<LccRow> rows;
  for (std::size_t pattern = 0; pattern < std::max<std::size_t>(1, config.lcc_patterns); ++pattern) {
    ClusterConfig cluster;
    cluster.workers = workers;
    cluster.jitter_mean = config.jitter_mean;
    cluster.seed = Rng::substream(config.seed, kLccEpoch, 2, pattern).next_u64();
    if (pattern > 0 && config.erasures > 0) {
      Rng rng = Rng::substream(config.seed, kLccEpoch, 1, pattern);
      cluster.erased = pick_erased(rng, workers, config.erasures);
    }
    const LccRun run = run_lcc(config.lcc_function, inputs, cluster);
    LccRow row{pattern, cluster.erased, threshold, run.outputs.has_value(), 0.0};
    if (run.outputs) {
      for (std::size_t k = 0; k < config.k; ++k) {
        const double err = frobenius_norm((*run.outputs)[k] - expected[k]) /
                           frobenius_norm(expected[k]);
        row.max_rel_error = std::max(row.max_rel_error, err);
      }
    } else {
      row.max_rel_error = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int cmd_train(const RunConfig& config, std::ostream& log) {
  log << "training " << to_string(config.problem) << " M=" << config.m << " K=" << config.k
      << " G=" << config.g << " P=" << config.p << " R=" << config.recovery_threshold()
      << " epochs=" << config.epochs << "\n";
  TrainReport report = train(config, [&](std::size_t epoch, double loss) {
    log << "epoch " << epoch << " loss " << loss << "\n";
  });

  ParamArchive archive;
  report.best_model.save(archive);
  archive.set_meta("run.problem", std::string(to_string(config.problem)));
  archive.set_meta("run.best_epoch", std::to_string(report.best_epoch));
  archive.set_meta("run.config_hash", hex64(config.hash()));
  std::filesystem::create_directories(config.out_dir);
  const auto ckpt = config.checkpoint_path();
  if (ckpt.has_parent_path()) std::filesystem::create_directories(ckpt.parent_path());
  archive.save(ckpt);

  std::ofstream curve = open_output(config, "loss_curve.csv");
  curve << csv_header_comment("train", config) << "\n";
  curve << "epoch,loss,learning_rate,is_best\n";
  for (std::size_t e = 0; e < report.epoch_losses.size(); ++e) {
    curve << e + 1 << ',' << report.epoch_losses[e] << ',' << report.learning_rates[e] << ','
          << (e + 1 == report.best_epoch ? 1 : 0) << "\n";
  }

  if (report.aborted) {
    log << "training aborted: " << report.abort_reason << "\n"
        << "last good checkpoint (epoch " << report.best_epoch << ") written to " << ckpt.string()
        << "\n";
    return 2;
  }
  log << "best epoch " << report.best_epoch << " loss " << report.best_loss << "; checkpoint "
      << ckpt.string() << "\n";
  return 0;
}

int cmd_eval(const RunConfig& config, std::ostream& log) {
  const ParamArchive archive = ParamArchive::load(config.checkpoint_path());
  SchemeModel model = SchemeModel::load(archive);
  const SchemeConfig expect = config.scheme_config();
  const SchemeConfig& got = model.config();
  if (got.m != expect.m || got.k != expect.k || got.g != expect.g || got.p != expect.p ||
      got.v != expect.v) {
    throw FormatError("checkpoint shape (M=" + std::to_string(got.m) + " K=" +
                      std::to_string(got.k) + " G=" + std::to_string(got.g) + " P=" +
                      std::to_string(got.p) + " V=" + std::to_string(got.v) +
                      ") does not match the run config");
  }
  if (archive.has_meta("run.problem") &&
      archive.meta("run.problem") != to_string(config.problem)) {
    throw FormatError("checkpoint was trained for problem '" + archive.meta("run.problem") + "'");
  }

  const MetricRecord record = evaluate(model, config);

  std::ofstream rows = open_output(config, "metrics.csv");
  rows << csv_header_comment("eval", config) << "\n";
  rows << "instance,slot,nrmse\n";
  for (const auto& r : record.rows) rows << r.instance << ',' << r.slot << ',' << r.nrmse << "\n";

  std::ofstream summary = open_output(config, "eval_summary.csv");
  summary << csv_header_comment("eval", config) << "\n";
  summary << "# reference_nrmse=" << std::setprecision(6) << reference_nrmse(config.problem)
          << std::setprecision(17) << " (published value at m=50 k=3 r=5)\n";
  summary << "problem,m,k,g,p,r,workers,erasures,instances,failures,mean_nrmse,std_nrmse\n";
  summary << to_string(config.problem) << ',' << config.m << ',' << config.k << ',' << config.g
          << ',' << config.p << ',' << config.recovery_threshold() << ','
          << config.worker_count() << ',' << config.erasures << ',' << config.eval_instances << ','
          << record.failures << ',' << record.mean << ',' << record.stddev << "\n";

  {
    const ProblemSpec problem(config.problem, config.m);
    const Instance inst = make_instance(problem, config.k, SeedCoords{config.seed, kEvalEpoch, 0, 0});
    run_aicc(model, inst.inputs, eval_cluster(config, 0))
        .transcript.save(std::filesystem::path(config.out_dir) / "transcript.json");
  }

  log << "eval " << to_string(config.problem) << ": mean NRMSE " << record.mean << " (std "
      << record.stddev << ", " << record.failures << " decode failures, reference "
      << reference_nrmse(config.problem) << ")\n";
  return 0;
}

int cmd_sweep(const RunConfig& config, std::ostream& log) {
  const auto rows = sweep(config, {});
  std::ofstream out = open_output(config, "sweep_" + config.sweep_axis + ".csv");
  out << csv_header_comment("sweep", config) << "\n";
  out << "axis,value,m,k,g,p,r,epochs,best_loss,mean_nrmse,std_nrmse,failures\n";
  for (const auto& r : rows) {
    out << r.axis << ',' << r.value << ',' << r.config.m << ',' << r.config.k << ','
        << r.config.g << ',' << r.config.p << ',' << r.config.recovery_threshold() << ','
        << r.config.epochs << ',' << r.best_loss << ',' << r.metrics.mean << ','
        << r.metrics.stddev << ',' << r.metrics.failures << "\n";
    log << "sweep " << r.axis << "=" << r.value << ": mean NRMSE " << r.metrics.mean << "\n";
  }
  return 0;
}

int cmd_bench(const RunConfig& config, std::ostream& log) {
  const SchemeModel model = std::filesystem::exists(config.checkpoint_path())
                                ? SchemeModel::load(config.checkpoint_path())
                                : SchemeModel(config.scheme_config());
  const auto rows = bench(config, model);
  std::ofstream out = open_output(config, "bench.csv");
  out << csv_header_comment("bench", config) << "\n";
  out << "scheme,problem,m,k,workers,batches,repetitions,mean_seconds,min_seconds\n";
  for (const auto& r : rows) {
    out << r.scheme << ',' << to_string(config.problem) << ',' << config.m << ','
        << model.config().k << ',' << config.worker_count() << ',' << config.bench_batches << ','
        << std::max<std::size_t>(1, config.bench_repetitions) << ',' << r.mean_seconds << ','
        << r.min_seconds << "\n";
    log << r.scheme << ": " << r.mean_seconds << " s per pass\n";
  }
  return 0;
}

int cmd_lcc(const RunConfig& config, std::ostream& log) {
  const auto rows = lcc_experiment(config);
  std::ofstream out = open_output(config, "lcc.csv");
  out << csv_header_comment("lcc", config) << "\n";
  out << "pattern,function,k,m,workers,threshold,erased,decoded,max_rel_error\n";
  double worst = 0.0;
  std::size_t failures = 0;
  for (const auto& r : rows) {
    std::string erased;
    for (std::size_t i = 0; i < r.erased.size(); ++i) {
      erased += (i ? ";" : "") + std::to_string(r.erased[i]);
    }
    const std::size_t workers =
        config.workers == 0 ? r.threshold + config.erasures : config.workers;
    out << r.pattern << ',' << to_string(config.lcc_function) << ',' << config.k << ','
        << config.m << ',' << workers << ',' << r.threshold << ',' << erased << ','
        << (r.decoded ? 1 : 0) << ',';
    if (r.decoded) out << r.max_rel_error;
    out << "\n";
    if (r.decoded) worst = std::max(worst, r.max_rel_error);
    else ++failures;
  }
  log << "lcc " << to_string(config.lcc_function) << ": " << rows.size() << " patterns, "
      << failures << " decode failures, max relative error " << worst << "\n";
  return 0;
}

}  // namespace aicc
