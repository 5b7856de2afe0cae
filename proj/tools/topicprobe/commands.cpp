#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <spdlog/spdlog.h>

#include <topicprobe/baselines.hpp>
#include <topicprobe/dataset.hpp>
#include <topicprobe/embeddings.hpp>
#include <topicprobe/entropy.hpp>
#include <topicprobe/error.hpp>
#include <topicprobe/partition.hpp>
#include <topicprobe/report.hpp>
#include <topicprobe/runner.hpp>
#include <topicprobe/sensitivity.hpp>
#include <topicprobe/text.hpp>

namespace topicprobe::cli {

namespace {

int parse_int(std::string_view s, std::string_view what) {
  int v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw ValidationError(fmt::format("{}: '{}' is not an integer", what, s));
  }
  return v;
}

double parse_double(const std::string& s, std::string_view what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ValidationError(fmt::format("{}: '{}' is not a number", what, s));
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

void make_out_dir(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw RuntimeFailure(fmt::format("cannot create output directory '{}': {}", out.string(), ec.message()));
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw RuntimeFailure(fmt::format("cannot write '{}'", path.string()));
  return f;
}

std::vector<std::string> texts_of(const LabeledDataset& dataset) {
  std::vector<std::string> texts;
  texts.reserve(dataset.size());
  for (const auto& r : dataset.records()) texts.push_back(r.text);
  return texts;
}

}  // namespace

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> sizes;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ValidationError(fmt::format("--sizes: expected start:stop:step, got '{}'", text));
    const int start = parse_int(parts[0], "--sizes");
    const int stop = parse_int(parts[1], "--sizes");
    const int step = parse_int(parts[2], "--sizes");
    if (step < 1) throw ValidationError("--sizes: step must be positive");
    for (int s = start; s <= stop; s += step) sizes.push_back(s);
  } else {
    for (const auto& p : split(text, ',')) sizes.push_back(parse_int(p, "--sizes"));
  }
  if (sizes.empty()) throw ValidationError(fmt::format("--sizes '{}' selects no topic-model size", text));
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1) throw ValidationError(fmt::format("--sizes: topic count must be >= 1, got {}", sizes[i]));
    if (i > 0 && sizes[i] <= sizes[i - 1]) throw ValidationError("--sizes must be strictly ascending");
  }
  return sizes;
}

void cmd_topics(const TopicsArgs& args) {
  for (int n : args.num_topics) {
    if (n < 1) throw ValidationError(fmt::format("--num-topics must be >= 1, got {}", n));
  }
  const LabeledDataset dataset = load_dataset(args.dataset);
  const PreparedCorpus corpus = prepare_corpus(texts_of(dataset));
  SweepOptions options;
  options.seed = args.seed;
  options.min_tail_count = args.min_tail;
  options.folds = args.folds;

  std::vector<TopicModelRun> runs;
  for (int n : args.num_topics) runs.push_back(build_topic_model(dataset, corpus, n, options));
  make_out_dir(args.out);
  for (const auto& run : runs) {
    const fs::path path = args.out / fmt::format("partition_n{}.json", run.requested_topics);
    write_partition(run.partition, path);
    fmt::print("n={} lsi_topics={} tails={} merged_topics={} -> {}\n", run.requested_topics, run.lsi_topics,
               run.tails_before_merge, run.partition.m, path.string());
  }
}

void cmd_run(const RunArgs& args, const std::string& config_json) {
  SweepOptions options;
  options.sizes = parse_sizes(args.sizes);
  options.folds = args.folds;
  options.min_tail_count = args.min_tail;
  options.seed = args.seed;
  options.probe = args.probe;
  options.jobs = std::max(1, args.jobs);
  options.probe.validate();
  if (options.folds < 2) throw ValidationError("--folds must be >= 2");

  // Every input is read and checked before anything is written.
  const LabeledDataset dataset = load_dataset(args.dataset);
  std::vector<EmbeddingMatrix> embeddings;
  for (const auto& path : args.embeddings) embeddings.push_back(load_embeddings(path, dataset));
  const AlignmentReport alignment = validate_alignment(dataset, embeddings);
  if (!alignment.all_ok()) {
    std::string msg = "embeddings do not match the dataset:";
    for (const auto& e : alignment.entries) {
      for (const auto& p : e.problems) msg += fmt::format("\n  {}: {}", args.embeddings[e.index].string(), p);
    }
    throw ValidationError(msg);
  }
  {
    std::set<std::string> names;
    for (const auto& e : embeddings) {
      if (!names.insert(e.manifest().display_name()).second) {
        throw ValidationError(fmt::format("two embeddings share the name '{}'", e.manifest().display_name()));
      }
    }
  }

  const PreparedCorpus corpus = prepare_corpus(texts_of(dataset));
  spdlog::info("{} records, {} terms after preprocessing", dataset.size(), corpus.dictionary.size());
  const auto models = build_topic_models(dataset, corpus, options);

  std::vector<SweepResult> results;
  bool aborted = false;
  std::string abort_message;
  try {
    results = run_sweep(dataset, embeddings, models, options);
  } catch (const SweepAborted& e) {
    results = e.partial();
    aborted = true;
    abort_message = e.what();
  }
  emit_report({results, models, nullptr}, args.out);
  auto f = open_out(args.out / "run_config.json");
  f << config_json;
  if (aborted) throw RuntimeFailure(abort_message + " (partial results saved)");

  for (const auto& r : results) {
    const std::string name = r.layer ? fmt::format("{}{}", r.embedding, *r.layer) : r.embedding;
    fmt::print("{}: seen {:.4f} unseen {:.4f} diff {:.4f}\n", name, r.summary.seen.mean, r.summary.unseen.mean,
               r.summary.diff.mean);
  }
}

void cmd_baseline_glove(const GloveArgs& args) {
  const LabeledDataset dataset = load_dataset(args.dataset);
  const WordVectorTable table = WordVectorTable::load(args.table);
  std::size_t all_oov = 0;
  const EmbeddingMatrix m = word_vector_embeddings(dataset, table, &all_oov, args.name);
  make_out_dir(args.out);
  const fs::path path = args.out / (args.name + ".tapb");
  write_embeddings(m, path);
  if (all_oov > 0) fmt::print(stderr, "warning: {} sentence(s) had no in-vocabulary token\n", all_oov);
  fmt::print("{} x {} -> {}\n", m.count(), m.dim(), path.string());
}

void cmd_baseline_random(const RandomArgs& args) {
  const LabeledDataset dataset = load_dataset(args.dataset);
  if (args.dim < 1) throw ValidationError("--dim must be >= 1");
  EmbeddingMatrix m = random_embeddings(dataset.size(), args.dim, args.seed, dataset.fingerprint());
  if (args.name != "random") {
    Manifest manifest = m.manifest();
    manifest.source = args.name;
    m = EmbeddingMatrix(std::move(manifest), m.values());
  }
  make_out_dir(args.out);
  const fs::path path = args.out / (args.name + ".tapb");
  write_embeddings(m, path);
  fmt::print("{} x {} -> {}\n", m.count(), m.dim(), path.string());
}

void cmd_entropy(const EntropyArgs& args) {
  const LabeledDataset dataset = load_dataset(args.dataset);
  std::vector<TopicPartition> partitions;
  for (const auto& p : args.partitions) {
    partitions.push_back(read_partition(p));
    if (partitions.back().topic_of.size() != dataset.size()) {
      throw ValidationError(fmt::format("{}: {} assignments for {} records", p.string(),
                                        partitions.back().topic_of.size(), dataset.size()));
    }
  }

  std::vector<std::tuple<std::string, std::string, std::vector<std::size_t>>> groups;
  for (std::size_t l = 0; l < dataset.num_labels(); ++l) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < dataset.size(); ++r) {
      if (dataset.label_ids()[r] == static_cast<int>(l)) rows.push_back(r);
    }
    groups.emplace_back("label", dataset.label_set()[l], std::move(rows));
  }
  if (dataset.has_expressions()) {
    std::map<std::string, std::vector<std::size_t>> by_expr;
    for (std::size_t r = 0; r < dataset.size(); ++r) {
      if (dataset[r].expression) by_expr[*dataset[r].expression].push_back(r);
    }
    for (auto& [expr, rows] : by_expr) groups.emplace_back("expression", expr, std::move(rows));
  }

  std::string csv = "group_type,group,records,mean_normalized_entropy\n";
  for (const auto& [type, name, rows] : groups) {
    const double h = mean_normalized_entropy(rows, partitions);
    csv += fmt::format("{},{},{},{:.6f}\n", type, name, rows.size(), h);
  }
  make_out_dir(args.out);
  auto f = open_out(args.out / "entropy.csv");
  f << csv;
  fmt::print("{}", csv);
}

void cmd_synth(const SynthArgs& args) {
  const SyntheticCorpus corpus = generate_synthetic(args.spec);
  make_out_dir(args.out);
  write_dataset(corpus.dataset, args.out / "dataset.jsonl");
  write_embeddings(corpus.embeddings, args.out / "synthetic.tapb");
  TopicPartition truth;
  truth.m = args.spec.n_topics;
  truth.topic_of = corpus.topics;
  truth.seed = args.spec.seed;
  write_partition(truth, args.out / "truth.json");
  fmt::print("{} records, {} topics, dim {} -> {}\n", corpus.dataset.size(), args.spec.n_topics, args.spec.dim,
             args.out.string());
}

void cmd_sensitivity(const SensitivityArgs& args) {
  std::ifstream in(args.tasks);
  if (!in) throw ValidationError(fmt::format("cannot open task table '{}'", args.tasks.string()));
  std::string line;
  std::size_t line_no = 0;
  std::vector<TaskSensitivity> tasks;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (line_no == 1 && !f.empty() && f[0] == "task") continue;
    if (f.size() != 4) {
      throw ValidationError(fmt::format("{}:{}: expected task,glove_seen,glove_unseen,random_seen",
                                        args.tasks.string(), line_no));
    }
    const std::string where = fmt::format("{}:{}", args.tasks.string(), line_no);
    tasks.push_back({f[0], parse_double(f[1], where), parse_double(f[2], where), parse_double(f[3], where)});
  }
  const SensitivityReport report = compute_sensitivity(std::move(tasks));
  emit_report({{}, {}, &report}, args.out);
  if (report.correlation) {
    fmt::print("correlation {:.4f} over {} tasks\n", *report.correlation, report.tasks.size());
  } else {
    fmt::print("correlation undefined (constant measure) over {} tasks\n", report.tasks.size());
  }
}

}  // namespace topicprobe::cli
