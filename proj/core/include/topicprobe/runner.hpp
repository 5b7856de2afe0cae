#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topicprobe/dataset.hpp"
#include "topicprobe/embeddings.hpp"
#include "topicprobe/error.hpp"
#include "topicprobe/folds.hpp"
#include "topicprobe/lsi.hpp"
#include "topicprobe/metrics.hpp"
#include "topicprobe/partition.hpp"
#include "topicprobe/probe.hpp"
#include "topicprobe/text.hpp"

namespace topicprobe {

struct SkipEntry {
  int topic_model_size = 0;
  int topic_id = 0;
  int eval_topic = 0;
  int fold = 0;
  std::string reason;
};

struct ProbeRunResult {
  std::vector<ScoreRecord> records;
  std::vector<SkipEntry> skips;
};

// Seen/unseen loop for one topic model: for every topic t and fold i, train
// on topic t without fold i, score fold i of t (seen) and fold i of every
// other topic (unseen). Test folds holding a single class are skipped and
// logged. Records come back ordered by (topic, fold, eval topic).
ProbeRunResult run_topic_aware_probe(const LabeledDataset& dataset, const EmbeddingMatrix& embedding,
                                     const TopicPartition& partition, const FoldPlan& plan,
                                     const ProbeConfig& probe, std::uint64_t seed, int topic_model_size,
                                     int jobs = 1);

struct SweepOptions {
  std::vector<int> sizes = {5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
  int folds = 5;
  std::size_t min_tail_count = 5;
  std::uint64_t seed = 0;
  ProbeConfig probe;
  LsiOptions lsi;
  int jobs = 1;
};

// One topic model of a sweep, shared by every embedding.
struct TopicModelRun {
  int requested_topics = 0;
  int lsi_topics = 0;          // after rank clamping
  int tails_before_merge = 0;
  TopicPartition partition;
  FoldPlan plan;
};

// text pipeline output -> LSI -> assignment -> tail merge -> folds, per size.
std::vector<TopicModelRun> build_topic_models(const LabeledDataset& dataset, const PreparedCorpus& corpus,
                                              const SweepOptions& options);

TopicModelRun build_topic_model(const LabeledDataset& dataset, const PreparedCorpus& corpus, int n_topics,
                                const SweepOptions& options);

struct SweepSummary {
  MeanStd seen;
  MeanStd unseen;
  MeanStd diff;
};

// seen and unseen: micro averages over records of each kind. diff: micro
// average over (seen, unseen) pairs sharing a probe, i.e. the same size,
// training topic and fold. Within one topic-model size with no skips,
// diff.mean == seen.mean - unseen.mean.
SweepSummary summarize(std::span<const ScoreRecord> records);

struct SweepResult {
  std::string embedding;
  std::optional<int> layer;
  std::vector<ScoreRecord> records;
  std::vector<SkipEntry> skips;
  SweepSummary summary;
};

// Thrown when a probe job fails mid-sweep; carries every completed record.
class SweepAborted : public RuntimeFailure {
 public:
  SweepAborted(const std::string& what, std::vector<SweepResult> partial)
      : RuntimeFailure(what), partial_(std::move(partial)) {}
  const std::vector<SweepResult>& partial() const { return partial_; }

 private:
  std::vector<SweepResult> partial_;
};

// Runs every embedding over the same topic models and fold plans.
std::vector<SweepResult> run_sweep(const LabeledDataset& dataset, std::span<const EmbeddingMatrix> embeddings,
                                   std::span<const TopicModelRun> models, const SweepOptions& options);

// Convenience: prepares the corpus and topic models, then sweeps one embedding.
SweepResult run_sweep(const LabeledDataset& dataset, const EmbeddingMatrix& embedding, const SweepOptions& options);

}  // namespace topicprobe
