// Command-line front end: train | eval | sweep | bench | lcc.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "aicc/errors.hpp"
#include "aicc/experiments.hpp"

namespace {

struct Overrides {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> checkpoint;
  std::optional<std::string> problem;
  std::optional<std::size_t> m, k, g, p, epochs, batch_size, batches_per_epoch, workers, erasures;
  std::optional<std::string> axis;
  std::optional<std::string> values;
  std::optional<std::size_t> repetitions;
  std::optional<std::string> function;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "Flat key = value config file");
  cmd->add_option("--seed", o.seed, "Run seed");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--checkpoint", o.checkpoint, "Checkpoint path");
  cmd->add_option("--problem", o.problem, "eig | eigvec | expm | det")
      ->check(CLI::IsMember({"eig", "eigvec", "expm", "det"}));
  cmd->add_option("--m", o.m, "Matrix dimension M");
  cmd->add_option("--k", o.k, "Inputs per dataset K");
  cmd->add_option("--g", o.g, "Encoder degree G");
  cmd->add_option("--p", o.p, "Computation degree P");
  cmd->add_option("--epochs", o.epochs, "Training epochs");
  cmd->add_option("--batch-size", o.batch_size, "Instances per batch");
  cmd->add_option("--batches-per-epoch", o.batches_per_epoch, "Batches per epoch");
  cmd->add_option("--workers", o.workers, "Worker count N (0 = recovery threshold)");
  cmd->add_option("--erasures", o.erasures, "Workers erased per run");
  cmd->add_option("--set", o.sets, "Extra config override key=value (repeatable)");
}

aicc::RunConfig resolve(const Overrides& o) {
  aicc::RunConfig cfg;
  if (o.config_path) cfg = aicc::RunConfig::load(*o.config_path);
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw aicc::FormatError("--set expects key=value, got " + kv);
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.out_dir = *o.out;
  if (o.checkpoint) cfg.checkpoint = *o.checkpoint;
  if (o.problem) cfg.problem = aicc::parse_problem(*o.problem);
  if (o.m) cfg.m = *o.m;
  if (o.k) cfg.k = *o.k;
  if (o.g) cfg.g = *o.g;
  if (o.p) cfg.p = *o.p;
  if (o.epochs) cfg.epochs = *o.epochs;
  if (o.batch_size) cfg.batch_size = *o.batch_size;
  if (o.batches_per_epoch) cfg.batches_per_epoch = *o.batches_per_epoch;
  if (o.workers) cfg.workers = *o.workers;
  if (o.erasures) cfg.erasures = *o.erasures;
  if (o.axis) cfg.set("sweep_axis", *o.axis);
  if (o.values) cfg.set("sweep_values", *o.values);
  if (o.repetitions) cfg.bench_repetitions = *o.repetitions;
  if (o.function) cfg.set("lcc_function", *o.function);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned approximate coded computation: training and experiment harness"};
  app.require_subcommand(1);
  Overrides o;

  auto* train = app.add_subcommand("train", "Train a scheme and write checkpoint + loss curve");
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint through the simulated cluster");
  auto* sweep = app.add_subcommand("sweep", "Train and evaluate across M, K or R values");
  auto* bench = app.add_subcommand("bench", "Time the coded path against direct computation");
  auto* lcc = app.add_subcommand("lcc", "Exact LCC recovery under erasure patterns");
  for (auto* cmd : {train, eval, sweep, bench, lcc}) add_common(cmd, o);
  sweep->add_option("--axis", o.axis, "M | K | R")->check(CLI::IsMember({"M", "K", "R"}));
  sweep->add_option("--values", o.values, "Comma-separated sweep values");
  bench->add_option("--repetitions", o.repetitions, "Timing repetitions");
  lcc->add_option("--function", o.function, "square | cube | square_plus_self");
  bool dump_config = false;
  app.add_flag("--print-config", dump_config, "Print the resolved config before running");

  CLI11_PARSE(app, argc, argv);

  try {
    const aicc::RunConfig cfg = resolve(o);
    cfg.validate();
    if (dump_config) std::cout << cfg.serialize();
    if (train->parsed()) return aicc::cmd_train(cfg, std::cout);
    if (eval->parsed()) return aicc::cmd_eval(cfg, std::cout);
    if (sweep->parsed()) return aicc::cmd_sweep(cfg, std::cout);
    if (bench->parsed()) return aicc::cmd_bench(cfg, std::cout);
    if (lcc->parsed()) return aicc::cmd_lcc(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
