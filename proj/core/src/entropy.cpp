#include "topicprobe/entropy.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "topicprobe/error.hpp"

namespace topicprobe {

double normalized_entropy(std::span<const double> probs) {
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw ValidationError(fmt::format("negative or NaN probability {}", p));
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw ValidationError(fmt::format("probabilities sum to {}, not 1", total));
  }
  if (probs.size() < 2) return 0.0;
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  const double value = h / std::log2(static_cast<double>(probs.size()));
  return std::clamp(value, 0.0, 1.0);
}

std::vector<double> topic_distribution(const TopicPartition& partition, std::span<const std::size_t> rows) {
  if (rows.empty()) throw ValidationError("group has no records");
  std::vector<double> dist(static_cast<std::size_t>(partition.m), 0.0);
  for (std::size_t r : rows) {
    if (r >= partition.topic_of.size()) {
      throw ValidationError(fmt::format("row {} outside partition of {} rows", r, partition.topic_of.size()));
    }
    dist[static_cast<std::size_t>(partition.topic_of[r])] += 1.0;
  }
  for (double& p : dist) p /= static_cast<double>(rows.size());
  return dist;
}

double mean_normalized_entropy(std::span<const std::size_t> rows, std::span<const TopicPartition> partitions) {
  if (partitions.empty()) throw ValidationError("need at least one partition");
  if (rows.empty()) throw ValidationError("group absent from dataset");
  double sum = 0.0;
  for (const auto& p : partitions) sum += normalized_entropy(topic_distribution(p, rows));
  return sum / static_cast<double>(partitions.size());
}

}  // namespace topicprobe
