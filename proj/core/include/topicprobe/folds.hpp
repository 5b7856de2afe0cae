#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "topicprobe/partition.hpp"

namespace topicprobe {

// Per-topic stratified k-fold assignment. Fold i means the same thing in
// every topic, which is what pairs a seen fold with its unseen counterparts.
struct FoldPlan {
  int k = 5;
  std::vector<int> fold_of;
  std::uint64_t seed = 0;
};

// Within each topic, each label's records are shuffled and dealt round-robin
// across folds, the deal continuing across labels so fold sizes stay level.
// Throws ValidationError when a label present in a topic has fewer than k
// records there.
FoldPlan plan_folds(const TopicPartition& partition, std::span<const int> labels, int num_labels, int k,
                    std::uint64_t seed);

}  // namespace topicprobe
