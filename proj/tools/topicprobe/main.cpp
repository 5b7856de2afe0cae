// topicprobe command-line entry point.
//
// Exit codes: 0 success, 2 validation error (bad flags, malformed or
// mismatched inputs), 3 runtime failure.

#include <cstdio>
#include <memory>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <topicprobe/error.hpp>

#include "commands.hpp"
#include "json_config.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

using namespace topicprobe::cli;

void add_probe_flags(CLI::App* app, topicprobe::ProbeConfig& probe) {
  app->add_option("--hidden", probe.hidden_width, "Hidden layer width")->capture_default_str();
  app->add_option("--l2", probe.l2_penalty, "L2 penalty on the weights")->capture_default_str();
  app->add_option("--learning-rate", probe.learning_rate, "Adam step size")->capture_default_str();
  app->add_option("--batch-size", probe.max_batch_size, "Mini-batch size cap")->capture_default_str();
  app->add_option("--max-epochs", probe.max_epochs, "Epoch limit")->capture_default_str();
  app->add_option("--tol", probe.tol, "Early-stopping tolerance on the training loss")->capture_default_str();
  app->add_option("--patience", probe.patience, "Epochs without improvement before stopping")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("topicprobe");
  spdlog::set_default_logger(logger);

  CLI::App app{"Topic-aware probing of sentence embeddings"};
  app.config_formatter(std::make_shared<JsonConfig>(&app));
  app.set_config("--config", "", "JSON file of flags for the chosen command");
  app.require_subcommand(1);
  app.fallthrough();
  bool quiet = false;
  bool verbose = false;
  app.add_flag("-q,--quiet", quiet, "Only log warnings and errors");
  app.add_flag("-v,--verbose", verbose, "Log every probe job");

  TopicsArgs topics;
  auto* c_topics = app.add_subcommand("topics", "Fit LSI topic models and write merged partitions");
  c_topics->add_option("--dataset", topics.dataset, "Dataset (JSON Lines)")->required();
  c_topics->add_option("--num-topics", topics.num_topics, "Requested topic count(s)")->required();
  c_topics->add_option("--seed", topics.seed, "Master seed")->capture_default_str();
  c_topics->add_option("--min-tail", topics.min_tail, "Records per label below which a topic is a tail")
      ->capture_default_str();
  c_topics->add_option("--folds", topics.folds, "Folds the partition must support")->capture_default_str();
  c_topics->add_option("--out", topics.out, "Output directory")->required();

  RunArgs run;
  run.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  auto* c_run = app.add_subcommand("run", "Run the topic-aware probing sweep");
  c_run->add_option("--dataset", run.dataset, "Dataset (JSON Lines)")->required();
  c_run->add_option("--embeddings", run.embeddings, "One .tapb file per source or layer")->required();
  c_run->add_option("--sizes", run.sizes, "Topic-model sizes, start:stop:step or a,b,c")->capture_default_str();
  c_run->add_option("--folds", run.folds, "Folds per topic")->capture_default_str();
  c_run->add_option("--min-tail", run.min_tail, "Records per label below which a topic is a tail")
      ->capture_default_str();
  c_run->add_option("--seed", run.seed, "Master seed")->capture_default_str();
  c_run->add_option("--jobs", run.jobs, "Worker threads for probe jobs")->capture_default_str();
  add_probe_flags(c_run, run.probe);
  c_run->add_option("--out", run.out, "Output directory")->required();

  auto* c_base = app.add_subcommand("baseline", "Build baseline sentence embeddings");
  c_base->require_subcommand(1);
  GloveArgs glove;
  auto* c_glove = c_base->add_subcommand("glove", "Average pretrained word vectors");
  c_glove->add_option("--dataset", glove.dataset, "Dataset (JSON Lines)")->required();
  c_glove->add_option("--table", glove.table, "Word-vector text file")->required();
  c_glove->add_option("--name", glove.name, "Source name recorded in the manifest")->capture_default_str();
  c_glove->add_option("--out", glove.out, "Output directory")->required();
  RandomArgs random;
  auto* c_random = c_base->add_subcommand("random", "Seeded uniform(-1, 1) vectors");
  c_random->add_option("--dataset", random.dataset, "Dataset (JSON Lines)")->required();
  c_random->add_option("--dim", random.dim, "Vector width")->capture_default_str();
  c_random->add_option("--seed", random.seed, "Seed")->capture_default_str();
  c_random->add_option("--name", random.name, "Source name recorded in the manifest")->capture_default_str();
  c_random->add_option("--out", random.out, "Output directory")->required();

  EntropyArgs entropy;
  auto* c_entropy = app.add_subcommand("entropy", "Mean normalized topic entropy per label and expression");
  c_entropy->add_option("--dataset", entropy.dataset, "Dataset (JSON Lines)")->required();
  c_entropy->add_option("--partitions", entropy.partitions, "Partition JSON files")->required();
  c_entropy->add_option("--out", entropy.out, "Output directory")->required();

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a planted-topic corpus");
  c_synth->add_option("--n-topics", synth.spec.n_topics)->capture_default_str();
  c_synth->add_option("--samples-per-topic", synth.spec.samples_per_topic)->capture_default_str();
  c_synth->add_option("--vocab-per-topic", synth.spec.vocab_per_topic)->capture_default_str();
  c_synth->add_option("--shared-vocab", synth.spec.shared_vocab)->capture_default_str();
  c_synth->add_option("--corr", synth.spec.topic_label_corr, "Topic-label correlation in [0, 1]")
      ->capture_default_str();
  c_synth->add_option("--dim", synth.spec.dim)->capture_default_str();
  c_synth->add_option("--seed", synth.spec.seed)->capture_default_str();
  c_synth->add_option("--out", synth.out, "Output directory")->required();

  SensitivityArgs sens;
  auto* c_sens = app.add_subcommand("sensitivity", "Correlate the two topic-sensitivity measures across tasks");
  c_sens->add_option("--tasks", sens.tasks, "CSV: task,glove_seen,glove_unseen,random_seen")->required();
  c_sens->add_option("--out", sens.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }
  spdlog::set_level(quiet ? spdlog::level::warn : verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (c_topics->parsed()) {
      cmd_topics(topics);
    } else if (c_run->parsed()) {
      cmd_run(run, c_run->config_to_str(true, false));
    } else if (c_glove->parsed()) {
      cmd_baseline_glove(glove);
    } else if (c_random->parsed()) {
      cmd_baseline_random(random);
    } else if (c_entropy->parsed()) {
      cmd_entropy(entropy);
    } else if (c_synth->parsed()) {
      cmd_synth(synth);
    } else if (c_sens->parsed()) {
      cmd_sensitivity(sens);
    }
  } catch (const topicprobe::ValidationError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
