#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace topicprobe {

// Assignment of every dataset row to one of m dense topic ids. merge_log
// entries are (absorbed, surviving) pairs in raw topic ids.
struct TopicPartition {
  int m = 0;
  std::vector<int> topic_of;
  std::vector<std::pair<int, int>> merge_log;
  std::uint64_t seed = 0;

  std::vector<std::size_t> topic_sizes() const;
  std::vector<std::vector<std::size_t>> members() const;

  std::string to_json() const;
  static TopicPartition from_json(std::string_view text);
};

void write_partition(const TopicPartition& partition, const std::filesystem::path& path);
TopicPartition read_partition(const std::filesystem::path& path);

// topics x labels record counts.
std::vector<std::vector<std::size_t>> label_counts_by_topic(std::span<const int> topic_of, int n_topics,
                                                            std::span<const int> labels, int num_labels);

// A topic is a tail when any of the dataset's labels has fewer than
// min_count records in it.
bool is_tail(std::span<const std::size_t> label_counts, std::size_t min_count);

// Topics (dense ids of a raw assignment) that are tails.
std::vector<int> tail_topics(std::span<const int> topic_of, std::span<const int> labels, int num_labels,
                             std::size_t min_count = 5);

// Repeatedly merges tail topics until none remain: two random tails when
// there are several, else the single tail into a random non-tail topic.
// Raw ids that own no records are dropped first; surviving topics are
// renumbered densely in order of their raw id.
TopicPartition merge_tail_topics(std::span<const int> raw_topics, std::span<const int> labels,
                                 int num_labels, std::size_t min_count, std::uint64_t seed);

}  // namespace topicprobe
