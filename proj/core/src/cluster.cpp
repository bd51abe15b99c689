#include "aicc/cluster.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>

#include "aicc/errors.hpp"
#include "aicc/scheme.hpp"

namespace aicc {

namespace {

RunTranscript start_transcript(std::string scheme, std::size_t threshold,
                               const ClusterConfig& cluster, DeliverySchedule schedule) {
  RunTranscript t;
  t.scheme = std::move(scheme);
  t.threshold = threshold;
  t.seed = cluster.seed;
  t.workers = std::move(schedule.workers);
  t.arrival = std::move(schedule.order);
  if (t.arrival.size() < threshold) {
    t.failure = "only " + std::to_string(t.arrival.size()) + " of " +
                std::to_string(t.workers.size()) + " workers delivered; recovery threshold is " +
                std::to_string(threshold);
    return t;
  }
  t.used.assign(t.arrival.begin(), t.arrival.begin() + static_cast<std::ptrdiff_t>(threshold));
  for (std::size_t w : t.used) t.workers[w].used = true;
  t.completion_time = threshold == 0 ? 0.0 : t.workers[t.used.back()].latency;
  return t;
}

}  // namespace

void ClusterConfig::validate() const {
  if (workers == 0) throw DimensionError("cluster needs at least one worker");
  if (!worker_delays.empty() && worker_delays.size() != workers) {
    throw DimensionError("worker_delays must have one entry per worker");
  }
  if (!worker_erasure_probs.empty() && worker_erasure_probs.size() != workers) {
    throw DimensionError("worker_erasure_probs must have one entry per worker");
  }
  auto bad_prob = [](double p) { return !(p >= 0.0 && p <= 1.0); };
  if (bad_prob(erasure_prob) ||
      std::any_of(worker_erasure_probs.begin(), worker_erasure_probs.end(), bad_prob)) {
    throw DimensionError("erasure probabilities must lie in [0, 1]");
  }
  if (jitter_mean < 0.0) throw DimensionError("jitter mean must be non-negative");
  for (std::size_t e : erased)
    if (e >= workers) throw DimensionError("erased worker index out of range");
  if (!alphas.empty() && alphas.size() != workers) {
    throw DimensionError("alphas must have one entry per worker");
  }
}

std::vector<double> ClusterConfig::node_alphas() const {
  return alphas.empty() ? default_alphas(workers) : alphas;
}

DeliverySchedule arrival_order(const ClusterConfig& cluster, Rng& rng) {
  cluster.validate();
  const auto alphas = cluster.node_alphas();
  DeliverySchedule s;
  for (std::size_t n = 0; n < cluster.workers; ++n) {
    const double erase_draw = rng.uniform();
    const double jitter = rng.exponential(cluster.jitter_mean);
    const double p = cluster.worker_erasure_probs.empty() ? cluster.erasure_prob
                                                          : cluster.worker_erasure_probs[n];
    const bool listed =
        std::find(cluster.erased.begin(), cluster.erased.end(), n) != cluster.erased.end();
    WorkerRecord r;
    r.worker = n;
    r.alpha = alphas[n];
    r.latency = (cluster.worker_delays.empty() ? cluster.base_delay : cluster.worker_delays[n]) +
                jitter;
    r.delivered = !listed && !(erase_draw < p);
    s.workers.push_back(r);
    if (r.delivered) s.order.push_back(n);
  }
  std::stable_sort(s.order.begin(), s.order.end(), [&](std::size_t a, std::size_t b) {
    if (s.workers[a].latency != s.workers[b].latency) {
      return s.workers[a].latency < s.workers[b].latency;
    }
    return a < b;
  });
  return s;
}

std::string RunTranscript::to_json() const {
  nlohmann::ordered_json j;
  j["scheme"] = scheme;
  j["threshold"] = threshold;
  j["seed"] = seed;
  j["decoded"] = decoded;
  j["failure"] = failure;
  j["completion_time"] = completion_time;
  auto& ws = j["workers"] = nlohmann::ordered_json::array();
  for (const auto& w : workers) {
    nlohmann::ordered_json r;
    r["worker"] = w.worker;
    r["alpha"] = w.alpha;
    r["latency"] = w.latency;
    r["delivered"] = w.delivered;
    r["used"] = w.used;
    ws.push_back(std::move(r));
  }
  j["arrival"] = arrival;
  j["used"] = used;
  j["outputs"] = outputs;
  return j.dump(2);
}

void RunTranscript::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << to_json() << '\n';
}

AiccRun run_aicc(const SchemeModel& model, std::span<const Matrix> inputs,
                 const ClusterConfig& cluster) {
  const SchemeConfig& cfg = model.config();
  Rng rng(cluster.seed);
  AiccRun run;
  run.transcript = start_transcript("aicc", cfg.recovery_threshold(), cluster,
                                    arrival_order(cluster, rng));
  RunTranscript& t = run.transcript;
  if (!t.failure.empty()) return run;

  const EncoderCoefficients enc = model.encoder_coeffs(inputs);
  const ComputationCoefficients comp = model.computation_coeffs(inputs);
  std::vector<WorkerResult> results;
  for (std::size_t w : t.used) {
    const double alpha = t.workers[w].alpha;
    results.push_back({alpha, worker_compute(comp, encode(enc, alpha))});
  }
  try {
    run.outputs = decode(results, cfg);
  } catch (const Error& e) {
    t.failure = e.what();
    return run;
  }
  t.decoded = true;
  t.outputs = *run.outputs;
  return run;
}

LccRun run_lcc(LccFunction f, std::span<const Matrix> inputs, const ClusterConfig& cluster,
               std::vector<double> betas) {
  LccConfig cfg;
  cfg.k = inputs.size();
  cfg.degree = degree(f);
  cfg.betas = betas.empty() ? default_betas(cfg.k) : std::move(betas);
  cfg.alphas = cluster.node_alphas();

  Rng rng(cluster.seed);
  LccRun run;
  run.transcript =
      start_transcript("lcc", cfg.threshold(), cluster, arrival_order(cluster, rng));
  RunTranscript& t = run.transcript;
  if (!t.failure.empty()) return run;

  const std::vector<Matrix> encoded = lcc_encode(inputs, cfg);
  std::vector<LccWorkerResult> results;
  for (std::size_t w : t.used) results.push_back({t.workers[w].alpha, apply(f, encoded[w])});
  try {
    run.outputs = lcc_decode(results, cfg.degree, cfg);
  } catch (const Error& e) {
    t.failure = e.what();
    return run;
  }
  t.decoded = true;
  for (const Matrix& m : *run.outputs) t.outputs.push_back(vec(m));
  return run;
}

}  // namespace aicc
