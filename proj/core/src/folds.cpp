#include "topicprobe/folds.hpp"

#include <fmt/format.h>

#include "topicprobe/error.hpp"
#include "topicprobe/random.hpp"

namespace topicprobe {

FoldPlan plan_folds(const TopicPartition& partition, std::span<const int> labels, int num_labels, int k,
                    std::uint64_t seed) {
  if (k < 2) throw ValidationError(fmt::format("need at least 2 folds, got {}", k));
  if (partition.topic_of.size() != labels.size()) {
    throw ValidationError(fmt::format("partition covers {} rows but there are {} labels",
                                      partition.topic_of.size(), labels.size()));
  }
  // buckets[topic][label] -> rows, in row order.
  std::vector<std::vector<std::vector<std::size_t>>> buckets(
      static_cast<std::size_t>(partition.m), std::vector<std::vector<std::size_t>>(static_cast<std::size_t>(num_labels)));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    buckets[static_cast<std::size_t>(partition.topic_of[i])][static_cast<std::size_t>(labels[i])].push_back(i);
  }

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.fold_of.assign(labels.size(), -1);
  for (std::size_t t = 0; t < buckets.size(); ++t) {
    Rng rng(derive_seed(seed, {t}));
    std::size_t next = 0;
    for (std::size_t l = 0; l < buckets[t].size(); ++l) {
      auto& rows = buckets[t][l];
      if (!rows.empty() && rows.size() < static_cast<std::size_t>(k)) {
        throw ValidationError(fmt::format("topic {} has {} records of label {}, fewer than {} folds (tail topic)",
                                          t, rows.size(), l, k));
      }
      rng.shuffle(std::span(rows));
      for (std::size_t r : rows) {
        plan.fold_of[r] = static_cast<int>(next % static_cast<std::size_t>(k));
        ++next;
      }
    }
  }
  return plan;
}

}  // namespace topicprobe
