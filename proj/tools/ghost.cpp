// ghost: fuzzy oversampling + tuned feedforward networks for imbalanced tabular data.
//
//   ghost run     --data a.csv [--data b.csv] [--config exp.ini] [--repeats 20] ...
//                 (exp.ini holds a [run] section: repeats = 20, seed = 1, ...)
//   ghost check   --data a.csv [--bottleneck 32]
//   ghost stats   --ours results.csv --baseline other.csv
//   ghost sample  --data a.csv --out resampled.csv [--two-sample]
//   ghost leakage --train train.csv --test test.csv

#include "ghost/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

std::string metric_name(ghost::TuningMetric m) { return m == ghost::TuningMetric::auc ? "auc" : "f1"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GHOST: fuzzy oversampling with DODGE-tuned feedforward networks"};
  app.require_subcommand(1);
  // Subcommand-level config files are not read by CLI11, so the file hangs off
  // the top level; fallthrough lets it follow the subcommand name. Keys live
  // in a [run] section (or as run.key=value); unknown keys are an error.
  app.set_config("--config", "", "Key-value config file; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();

  // run
  ghost::ExperimentConfig exp;
  std::vector<std::string> run_data;
  std::string run_out = exp.out_dir.string();
  std::string tuning_metric = metric_name(exp.ghost.metric);
  auto* run = app.add_subcommand("run", "Repeated split + GHOST runs; writes results.csv and report.md");
  run->add_option("--data", run_data, "Dataset CSV (repeatable)")->required();
  run->add_option("--repeats", exp.repeats, "Seeded repeats per dataset")->capture_default_str();
  run->add_option("--seed", exp.base_seed, "Base seed; repeat i uses seed+i")->capture_default_str();
  run->add_option("--test-fraction", exp.test_fraction, "Held-out fraction")->capture_default_str();
  run->add_option("--tau", exp.ghost.tau, "Validation score below which twoSample reruns")->capture_default_str();
  run->add_option("--delta-r", exp.ghost.fuzzy.delta_r, "Fuzzy sampling ring offset")->capture_default_str();
  run->add_option("--k-neighbors", exp.ghost.smote.k_neighbors, "SMOTE neighbours")->capture_default_str();
  run->add_option("--epsilon", exp.ghost.epsilon, "DODGE epsilon")->capture_default_str();
  run->add_option("--iterations", exp.ghost.iterations, "DODGE evaluations")->capture_default_str();
  run->add_option("--batch-size", exp.ghost.batch_size, "Mini-batch size")->capture_default_str();
  run->add_option("--metric", tuning_metric, "Tuning metric")->check(CLI::IsMember({"auc", "f1"}))->capture_default_str();
  run->add_option("--jobs", exp.jobs, "Parallel repeats")->capture_default_str();
  run->add_option("--out", run_out, "Output directory")->capture_default_str();

  // check
  ghost::cli::CheckOptions chk;
  std::string chk_data;
  std::optional<int> chk_bottleneck;
  auto* check = app.add_subcommand("check", "Autoencoder test: is a feedforward network worth trying?");
  check->add_option("--data", chk_data, "Dataset CSV")->required();
  check->add_option("--bottleneck", chk_bottleneck, "Bottleneck width (default 32, or 128 above 512 features)");
  check->add_option("--epochs", chk.heuristic.train.epochs, "Autoencoder epochs")->capture_default_str();
  check->add_option("--lr", chk.heuristic.train.learning_rate, "Autoencoder learning rate")->capture_default_str();
  check->add_option("--batch-size", chk.heuristic.train.batch_size, "Mini-batch size")->capture_default_str();
  check->add_option("--threshold", chk.heuristic.threshold, "MSE threshold")->capture_default_str();
  check->add_option("--seed", chk.heuristic.train.seed, "Seed of the first attempt")->capture_default_str();

  // stats
  std::string ours;
  std::string baseline;
  std::string stats_out;
  auto* stats = app.add_subcommand("stats", "Scott-Knott comparison of two results CSVs");
  stats->add_option("--ours", ours, "Our results.csv")->required();
  stats->add_option("--baseline", baseline, "Baseline results.csv")->required();
  stats->add_option("--out", stats_out, "Write markdown here instead of stdout");

  // sample
  ghost::cli::SampleOptions smp;
  std::string smp_data;
  std::string smp_out;
  bool no_smote = false;
  auto* sample = app.add_subcommand("sample", "Fuzzy sampling (+ SMOTE) of a dataset CSV");
  sample->add_option("--data", smp_data, "Dataset CSV")->required();
  sample->add_option("--out", smp_out, "Output CSV")->required();
  sample->add_option("--seed", smp.seed, "SMOTE seed")->capture_default_str();
  sample->add_option("--delta-r", smp.fuzzy.delta_r, "Ring offset")->capture_default_str();
  sample->add_option("--k-neighbors", smp.smote.k_neighbors, "SMOTE neighbours")->capture_default_str();
  sample->add_flag("--two-sample", smp.two_sample, "Apply fuzzy sampling twice");
  sample->add_flag("--no-smote", no_smote, "Stop after fuzzy sampling");
  sample->add_flag("--normalize", smp.normalize, "Min-max scale features first");

  // leakage
  std::string leak_train;
  std::string leak_test;
  auto* leakage = app.add_subcommand("leakage", "Percent of train/test pairs at distance zero");
  leakage->add_option("--train", leak_train, "Training CSV")->required();
  leakage->add_option("--test", leak_test, "Test CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return ghost::cli::kUsageError;
  }

  if (*run) {
    exp.data.assign(run_data.begin(), run_data.end());
    exp.out_dir = run_out;
    exp.ghost.metric = tuning_metric == "f1" ? ghost::TuningMetric::f1 : ghost::TuningMetric::auc;
    return ghost::cli::cmd_run(exp, std::cout, std::cerr);
  }
  if (*check) {
    chk.data = chk_data;
    chk.bottleneck = chk_bottleneck;
    return ghost::cli::cmd_check(chk, std::cout, std::cerr);
  }
  if (*stats) {
    std::optional<std::filesystem::path> out;
    if (!stats_out.empty()) out = stats_out;
    return ghost::cli::cmd_stats(ours, baseline, out, std::cout, std::cerr);
  }
  if (*sample) {
    smp.data = smp_data;
    smp.out = smp_out;
    smp.apply_smote = !no_smote;
    return ghost::cli::cmd_sample(smp, std::cout, std::cerr);
  }
  if (*leakage) return ghost::cli::cmd_leakage(leak_train, leak_test, std::cout, std::cerr);
  return ghost::cli::kUsageError;
}
