#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "aicc/cluster.hpp"
#include "aicc/errors.hpp"
#include "aicc/scheme.hpp"
#include "oracles.hpp"
#include "scheme_support.hpp"

using aicc::ClusterConfig;
using aicc::Matrix;
using aicc::SchemeModel;

namespace {

ClusterConfig cluster(std::size_t n, std::vector<std::size_t> erased = {}, std::uint64_t seed = 0) {
  ClusterConfig c;
  c.workers = n;
  c.erased = std::move(erased);
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("cluster validation") {
  CHECK_THROWS_AS(cluster(0).validate(), aicc::DimensionError);
  ClusterConfig c = cluster(3);
  c.erasure_prob = 1.5;
  CHECK_THROWS_AS(c.validate(), aicc::DimensionError);
  c = cluster(3, {3});
  CHECK_THROWS_AS(c.validate(), aicc::DimensionError);
  c = cluster(3);
  c.alphas = {0.1, 0.2};
  CHECK_THROWS_AS(c.validate(), aicc::DimensionError);
  c = cluster(3);
  c.jitter_mean = -1.0;
  CHECK_THROWS_AS(c.validate(), aicc::DimensionError);
  CHECK(cluster(3).node_alphas() == aicc::default_alphas(3));
}

TEST_CASE("arrival order") {
  aicc::Rng rng(1);
  const auto equal = aicc::arrival_order(cluster(6, {2}), rng);
  CHECK(equal.order == std::vector<std::size_t>{0, 1, 3, 4, 5});
  CHECK_FALSE(equal.workers[2].delivered);

  ClusterConfig jitter = cluster(8);
  jitter.jitter_mean = 0.5;
  aicc::Rng r1(9), r2(9);
  const auto a = aicc::arrival_order(jitter, r1);
  const auto b = aicc::arrival_order(jitter, r2);
  CHECK(a.order == b.order);
  for (std::size_t i = 1; i < a.order.size(); ++i)
    CHECK(a.workers[a.order[i - 1]].latency <= a.workers[a.order[i]].latency);

  ClusterConfig sure = cluster(5);
  sure.worker_erasure_probs = {0, 0, 0, 1, 0};
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = aicc::arrival_order(sure, rng);
    CHECK(std::find(s.order.begin(), s.order.end(), 3) == s.order.end());
    CHECK(s.order.size() == 4);
  }

  ClusterConfig slow = cluster(4);
  slow.worker_delays = {3.0, 1.0, 2.0, 1.0};
  CHECK(aicc::arrival_order(slow, rng).order == std::vector<std::size_t>{1, 3, 2, 0});
}

TEST_CASE("run_aicc") {
  const SchemeModel model(support::small_config(4, 3, 2, 2, 4, 3));
  aicc::Rng rng(3);
  const auto inputs = support::random_inputs(rng, 3, 4);

  const auto full = aicc::run_aicc(model, inputs, cluster(5));
  REQUIRE(full.outputs);
  CHECK(full.transcript.decoded);
  CHECK(full.transcript.used == std::vector<std::size_t>{0, 1, 2, 3, 4});
  {
    const auto enc = model.encoder_coeffs(inputs);
    const auto comp = model.computation_coeffs(inputs);
    std::vector<aicc::WorkerResult> r;
    for (double a : aicc::default_alphas(5))
      r.push_back({a, aicc::worker_compute(comp, aicc::encode(enc, a))});
    CHECK(*full.outputs == aicc::decode(r, model.config()));
  }

  const auto erased = aicc::run_aicc(model, inputs, cluster(8, {0, 4, 6}));
  REQUIRE(erased.outputs);
  for (std::size_t k = 0; k < 3; ++k)
    CHECK(oracle::rel_error((*erased.outputs)[k], (*full.outputs)[k]) < 1e-6);

  const auto failed = aicc::run_aicc(model, inputs, cluster(5, {2}));
  CHECK_FALSE(failed.outputs);
  CHECK_FALSE(failed.transcript.decoded);
  CHECK_FALSE(failed.transcript.failure.empty());
  CHECK(failed.transcript.outputs.empty());
  CHECK(failed.transcript.completion_time == -1.0);
}

TEST_CASE("run_lcc") {
  aicc::Rng rng(4);
  std::vector<Matrix> xs;
  for (int k = 0; k < 3; ++k) xs.push_back(oracle::random_matrix(rng, 6, 6));

  const auto run = aicc::run_lcc(aicc::LccFunction::square, xs, cluster(7, {1, 5}));
  REQUIRE(run.outputs);
  CHECK(run.transcript.threshold == 5);
  for (std::size_t k = 0; k < 3; ++k)
    CHECK(oracle::max_abs_diff((*run.outputs)[k], xs[k] * xs[k]) /
              aicc::frobenius_norm(xs[k] * xs[k]) <
          1e-6);

  CHECK_FALSE(aicc::run_lcc(aicc::LccFunction::square, xs, cluster(4)).outputs);

  const auto clean = aicc::run_lcc(aicc::LccFunction::square, xs, cluster(5));
  aicc::LccConfig cfg = aicc::LccConfig::make(3, 2, 5);
  const auto enc = aicc::lcc_encode(xs, cfg);
  std::vector<aicc::LccWorkerResult> r;
  for (std::size_t n = 0; n < 5; ++n) r.push_back({cfg.alphas[n], enc[n] * enc[n]});
  CHECK(*clean.outputs == aicc::lcc_decode(r, 2, cfg));
}

TEST_CASE("survivor count decides decodability, monotonically") {
  const SchemeModel model(support::small_config(3, 2, 1, 2, 2, 5));
  aicc::Rng rng(5);
  const auto inputs = support::random_inputs(rng, 2, 3);
  const std::size_t r = model.config().recovery_threshold();
  for (std::size_t n = 1; n <= 8; ++n) {
    for (std::size_t e = 0; e <= n; ++e) {
      std::vector<std::size_t> erased;
      for (std::size_t i = 0; i < e; ++i) erased.push_back((i * 3) % n);
      std::sort(erased.begin(), erased.end());
      erased.erase(std::unique(erased.begin(), erased.end()), erased.end());
      const std::size_t survivors = n - erased.size();
      const auto run = aicc::run_aicc(model, inputs, cluster(n, erased));
      CHECK(run.outputs.has_value() == (survivors >= r));
      CHECK(run.transcript.decoded == (survivors >= r));
    }
  }
}

TEST_CASE("transcripts replay byte-identically") {
  const SchemeModel model(support::small_config(3, 2, 1, 2, 2, 6));
  aicc::Rng rng(6);
  const auto inputs = support::random_inputs(rng, 2, 3);
  ClusterConfig c = cluster(7, {}, 1234);
  c.jitter_mean = 0.3;
  c.erasure_prob = 0.25;
  const std::string first = aicc::run_aicc(model, inputs, c).transcript.to_json();
  const std::string second = aicc::run_aicc(model, inputs, c).transcript.to_json();
  CHECK(first == second);
  c.seed = 1235;
  CHECK(aicc::run_aicc(model, inputs, c).transcript.to_json() != first);

  const auto j = nlohmann::ordered_json::parse(first);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"scheme", "threshold", "seed", "decoded", "failure",
                                         "completion_time", "workers", "arrival", "used",
                                         "outputs"});
  CHECK(j["workers"].size() == 7);
  CHECK(j["scheme"] == "aicc");

  const auto path = std::filesystem::temp_directory_path() / "aicc_transcript_test.json";
  aicc::run_aicc(model, inputs, c).transcript.save(path);
  std::ifstream in(path);
  std::stringstream saved;
  saved << in.rdbuf();
  CHECK(saved.str() == aicc::run_aicc(model, inputs, c).transcript.to_json() + "\n");
  std::filesystem::remove(path);
}

TEST_CASE("completion time is the latency of the last used result") {
  const SchemeModel model(support::small_config(3, 2, 1, 1, 1, 7));
  aicc::Rng rng(7);
  const auto inputs = support::random_inputs(rng, 2, 3);
  ClusterConfig c = cluster(4);
  c.worker_delays = {4.0, 1.0, 3.0, 2.0};
  const auto t = aicc::run_aicc(model, inputs, c).transcript;
  CHECK(t.used == std::vector<std::size_t>{1, 3});
  CHECK(t.completion_time == 2.0);
  CHECK(t.workers[1].used);
  CHECK_FALSE(t.workers[0].used);
}
