#include "topicprobe/runner.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "topicprobe/random.hpp"

namespace topicprobe {

namespace {

enum SeedTag : std::uint64_t { kLsiSeed = 11, kMergeSeed = 12, kFoldSeed = 13, kProbeSeed = 14 };

// rows[topic][fold] in row order.
using FoldIndex = std::vector<std::vector<std::vector<std::size_t>>>;

FoldIndex index_folds(const TopicPartition& partition, const FoldPlan& plan) {
  FoldIndex idx(static_cast<std::size_t>(partition.m),
                std::vector<std::vector<std::size_t>>(static_cast<std::size_t>(plan.k)));
  for (std::size_t r = 0; r < partition.topic_of.size(); ++r) {
    idx[static_cast<std::size_t>(partition.topic_of[r])][static_cast<std::size_t>(plan.fold_of[r])].push_back(r);
  }
  return idx;
}

struct JobOutput {
  std::vector<ScoreRecord> records;
  std::vector<SkipEntry> skips;
};

// Train on (topic, all folds but `fold`) and score fold `fold` of every topic.
JobOutput run_probe_job(const LabeledDataset& dataset, const EmbeddingMatrix& embedding, const FoldIndex& folds,
                        const ProbeConfig& base, std::uint64_t seed, int size, int topic, int fold) {
  JobOutput out;
  const auto& labels = dataset.label_ids();
  const auto t = static_cast<std::size_t>(topic);
  const auto f = static_cast<std::size_t>(fold);

  std::vector<std::size_t> train_rows;
  for (std::size_t i = 0; i < folds[t].size(); ++i) {
    if (i != f) train_rows.insert(train_rows.end(), folds[t][i].begin(), folds[t][i].end());
  }
  std::vector<int> train_labels;
  train_labels.reserve(train_rows.size());
  for (std::size_t r : train_rows) train_labels.push_back(labels[r]);

  auto skip = [&](int eval_topic, std::string reason) {
    out.skips.push_back({size, topic, eval_topic, fold, std::move(reason)});
  };
  if (train_rows.size() < 2 ||
      std::all_of(train_labels.begin(), train_labels.end(), [&](int l) { return l == train_labels[0]; })) {
    skip(topic, "training split holds a single class");
    return out;
  }

  ProbeConfig config = base;
  config.seed = derive_seed(seed, {kProbeSeed, static_cast<std::uint64_t>(size), t, f});
  const TrainedProbe probe = train_probe(embedding.gather(train_rows), train_labels, dataset.label_set(), config);

  std::vector<std::size_t> test_rows;
  std::vector<std::size_t> offsets{0};
  for (const auto& topic_folds : folds) {
    test_rows.insert(test_rows.end(), topic_folds[f].begin(), topic_folds[f].end());
    offsets.push_back(test_rows.size());
  }
  const Eigen::MatrixXd scores = probe.predict_scores(embedding.gather(test_rows));

  auto score_topic = [&](std::size_t u) {
    const std::size_t begin = offsets[u];
    const std::size_t len = offsets[u + 1] - begin;
    const ScoreKind kind = u == t ? ScoreKind::seen : ScoreKind::unseen;
    if (len == 0) {
      skip(static_cast<int>(u), "empty test fold");
      return;
    }
    std::vector<int> test_labels(len);
    for (std::size_t i = 0; i < len; ++i) test_labels[i] = labels[test_rows[begin + i]];
    try {
      const double auc = auc_roc_multiclass(
          scores.middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(len)), test_labels);
      out.records.push_back({size, topic, static_cast<int>(u), fold, kind, auc, len});
    } catch (const UndefinedMetric&) {
      skip(static_cast<int>(u), fmt::format("{} test fold holds a single class", to_string(kind)));
    }
  };
  score_topic(t);
  for (std::size_t u = 0; u < folds.size(); ++u) {
    if (u != t) score_topic(u);
  }
  spdlog::debug("job size={} topic={} fold={}: {} train rows, {} epochs, {} scores", size, topic, fold,
                train_rows.size(), probe.loss_curve().size(), out.records.size());
  return out;
}

// Runs job(i) for i in [0, n) on up to `jobs` threads. Returns the index of
// the lowest failing job (or n) and its exception; jobs after a failure may
// be left unstarted.
template <typename Fn>
std::pair<std::size_t, std::exception_ptr> run_pool(std::size_t n, int jobs, Fn&& job) {
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mu;
  std::size_t first_failure = n;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      if (failed.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < first_failure) {
          first_failure = i;
          error = std::current_exception();
        }
        failed.store(true);
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  return {first_failure, error};
}

void check_alignment(const LabeledDataset& dataset, const EmbeddingMatrix& embedding) {
  if (embedding.count() != dataset.size()) {
    throw ValidationError(fmt::format("embedding '{}' has {} rows but the dataset has {} records",
                                      embedding.manifest().display_name(), embedding.count(), dataset.size()));
  }
}

}  // namespace

ProbeRunResult run_topic_aware_probe(const LabeledDataset& dataset, const EmbeddingMatrix& embedding,
                                     const TopicPartition& partition, const FoldPlan& plan,
                                     const ProbeConfig& probe, std::uint64_t seed, int topic_model_size, int jobs) {
  check_alignment(dataset, embedding);
  if (partition.topic_of.size() != dataset.size() || plan.fold_of.size() != dataset.size()) {
    throw ValidationError("partition or fold plan does not cover the dataset");
  }
  const FoldIndex folds = index_folds(partition, plan);
  const std::size_t n_jobs = static_cast<std::size_t>(partition.m) * static_cast<std::size_t>(plan.k);
  std::vector<JobOutput> outputs(n_jobs);
  auto [failed_at, error] = run_pool(n_jobs, jobs, [&](std::size_t j) {
    const int topic = static_cast<int>(j / static_cast<std::size_t>(plan.k));
    const int fold = static_cast<int>(j % static_cast<std::size_t>(plan.k));
    outputs[j] = run_probe_job(dataset, embedding, folds, probe, seed, topic_model_size, topic, fold);
  });
  if (error) std::rethrow_exception(error);

  ProbeRunResult result;
  for (auto& o : outputs) {
    result.records.insert(result.records.end(), o.records.begin(), o.records.end());
    result.skips.insert(result.skips.end(), o.skips.begin(), o.skips.end());
  }
  for (const auto& s : result.skips) {
    spdlog::warn("skipped size={} topic={} eval_topic={} fold={}: {}", s.topic_model_size, s.topic_id,
                 s.eval_topic, s.fold, s.reason);
  }
  return result;
}

TopicModelRun build_topic_model(const LabeledDataset& dataset, const PreparedCorpus& corpus, int n_topics,
                                const SweepOptions& options) {
  const auto size = static_cast<std::uint64_t>(n_topics);
  const LsiModel model = fit_lsi(corpus.tfidf, corpus.dictionary.size(), n_topics,
                                 derive_seed(options.seed, {kLsiSeed, size}), options.lsi);
  const std::vector<int> raw = assign_topics(model, corpus.tfidf);
  const auto& labels = dataset.label_ids();
  const int num_labels = static_cast<int>(dataset.num_labels());

  TopicModelRun run;
  run.requested_topics = n_topics;
  run.lsi_topics = model.n_topics();
  {
    // Count tails among non-empty raw topics, matching what merging sees.
    std::map<int, int> dense;
    for (int t : raw) dense.emplace(t, 0);
    int next = 0;
    for (auto& [t, d] : dense) d = next++;
    std::vector<int> compact;
    compact.reserve(raw.size());
    for (int t : raw) compact.push_back(dense[t]);
    run.tails_before_merge = static_cast<int>(tail_topics(compact, labels, num_labels, options.min_tail_count).size());
  }
  run.partition = merge_tail_topics(raw, labels, num_labels, options.min_tail_count,
                                    derive_seed(options.seed, {kMergeSeed, size}));
  run.plan = plan_folds(run.partition, labels, num_labels, options.folds, derive_seed(options.seed, {kFoldSeed, size}));
  spdlog::info("topic model n={}: lsi topics={}, tails={}, merged topics m={}", n_topics, run.lsi_topics,
               run.tails_before_merge, run.partition.m);
  return run;
}

std::vector<TopicModelRun> build_topic_models(const LabeledDataset& dataset, const PreparedCorpus& corpus,
                                              const SweepOptions& options) {
  if (options.sizes.empty()) throw ValidationError("sweep needs at least one topic-model size");
  std::vector<TopicModelRun> runs;
  for (int size : options.sizes) runs.push_back(build_topic_model(dataset, corpus, size, options));
  return runs;
}

SweepSummary summarize(std::span<const ScoreRecord> records) {
  std::map<std::tuple<int, int, int>, double> seen_by_unit;
  std::vector<double> seen;
  std::vector<double> unseen;
  for (const auto& r : records) {
    if (r.kind == ScoreKind::seen) {
      seen_by_unit[{r.topic_model_size, r.topic_id, r.fold}] = r.auc;
      seen.push_back(r.auc);
    } else {
      unseen.push_back(r.auc);
    }
  }
  // Each unseen record is paired with the seen record of its probe.
  std::vector<double> diff;
  for (const auto& r : records) {
    if (r.kind != ScoreKind::unseen) continue;
    auto it = seen_by_unit.find({r.topic_model_size, r.topic_id, r.fold});
    if (it != seen_by_unit.end()) diff.push_back(it->second - r.auc);
  }
  SweepSummary s;
  if (!seen.empty()) s.seen = mean_std(seen);
  if (!unseen.empty()) s.unseen = mean_std(unseen);
  if (!diff.empty()) s.diff = mean_std(diff);
  return s;
}

std::vector<SweepResult> run_sweep(const LabeledDataset& dataset, std::span<const EmbeddingMatrix> embeddings,
                                   std::span<const TopicModelRun> models, const SweepOptions& options) {
  for (const auto& e : embeddings) check_alignment(dataset, e);
  options.probe.validate();

  struct Job {
    std::size_t embedding;
    std::size_t model;
    int topic;
    int fold;
  };
  std::vector<Job> jobs;
  std::vector<FoldIndex> indices;
  for (const auto& run : models) indices.push_back(index_folds(run.partition, run.plan));
  for (std::size_t e = 0; e < embeddings.size(); ++e) {
    for (std::size_t m = 0; m < models.size(); ++m) {
      for (int t = 0; t < models[m].partition.m; ++t) {
        for (int f = 0; f < models[m].plan.k; ++f) jobs.push_back({e, m, t, f});
      }
    }
  }

  std::vector<std::optional<JobOutput>> outputs(jobs.size());
  auto [failed_at, error] = run_pool(jobs.size(), options.jobs, [&](std::size_t j) {
    const Job& job = jobs[j];
    outputs[j] = run_probe_job(dataset, embeddings[job.embedding], indices[job.model], options.probe, options.seed,
                               models[job.model].requested_topics, job.topic, job.fold);
  });

  std::vector<SweepResult> results(embeddings.size());
  for (std::size_t e = 0; e < embeddings.size(); ++e) {
    results[e].embedding = embeddings[e].manifest().source;
    results[e].layer = embeddings[e].manifest().layer;
  }
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (!outputs[j]) continue;
    auto& r = results[jobs[j].embedding];
    r.records.insert(r.records.end(), outputs[j]->records.begin(), outputs[j]->records.end());
    r.skips.insert(r.skips.end(), outputs[j]->skips.begin(), outputs[j]->skips.end());
  }
  for (auto& r : results) {
    for (const auto& s : r.skips) {
      spdlog::warn("[{}] skipped size={} topic={} eval_topic={} fold={}: {}", r.embedding, s.topic_model_size,
                   s.topic_id, s.eval_topic, s.fold, s.reason);
    }
    r.summary = summarize(r.records);
  }
  if (error) {
    std::string what = "probe job failed";
    try {
      std::rethrow_exception(error);
    } catch (const std::exception& ex) {
      const Job& job = jobs[failed_at];
      what = fmt::format("probe job failed (embedding {}, size {}, topic {}, fold {}): {}",
                         embeddings[job.embedding].manifest().display_name(), models[job.model].requested_topics,
                         job.topic, job.fold, ex.what());
    }
    throw SweepAborted(what, std::move(results));
  }
  return results;
}

SweepResult run_sweep(const LabeledDataset& dataset, const EmbeddingMatrix& embedding, const SweepOptions& options) {
  std::vector<std::string> texts;
  texts.reserve(dataset.size());
  for (const auto& r : dataset.records()) texts.push_back(r.text);
  const PreparedCorpus corpus = prepare_corpus(texts);
  const auto models = build_topic_models(dataset, corpus, options);
  auto results = run_sweep(dataset, std::span(&embedding, 1), models, options);
  return std::move(results.front());
}

}  // namespace topicprobe
