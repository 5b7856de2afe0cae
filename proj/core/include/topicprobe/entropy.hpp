#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "topicprobe/partition.hpp"

namespace topicprobe {

// -sum p_i log p_i / log n, in [0, 1]; 0 log 0 = 0 and a single outcome
// gives 0. Throws ValidationError if the probabilities are negative or do not
// sum to 1 within 1e-6.
double normalized_entropy(std::span<const double> probs);

// Share of the given rows that falls in each of the partition's m topics.
std::vector<double> topic_distribution(const TopicPartition& partition, std::span<const std::size_t> rows);

// Average over partitions of the normalized entropy of the group's topic
// distribution. rows lists the dataset rows belonging to the group.
double mean_normalized_entropy(std::span<const std::size_t> rows, std::span<const TopicPartition> partitions);

}  // namespace topicprobe
