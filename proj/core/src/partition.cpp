#include "topicprobe/partition.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "topicprobe/error.hpp"
#include "topicprobe/random.hpp"

namespace topicprobe {

using nlohmann::json;

std::vector<std::size_t> TopicPartition::topic_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(m), 0);
  for (int t : topic_of) ++sizes[static_cast<std::size_t>(t)];
  return sizes;
}

std::vector<std::vector<std::size_t>> TopicPartition::members() const {
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < topic_of.size(); ++i) out[static_cast<std::size_t>(topic_of[i])].push_back(i);
  return out;
}

std::string TopicPartition::to_json() const {
  json log = json::array();
  for (const auto& [absorbed, survivor] : merge_log) log.push_back({absorbed, survivor});
  json j = {{"m", m}, {"topic_of", topic_of}, {"merge_log", log}, {"seed", seed}};
  return j.dump();
}

TopicPartition TopicPartition::from_json(std::string_view text) {
  TopicPartition p;
  try {
    const json j = json::parse(text);
    p.m = j.at("m").get<int>();
    p.topic_of = j.at("topic_of").get<std::vector<int>>();
    for (const auto& step : j.at("merge_log")) {
      p.merge_log.emplace_back(step.at(0).get<int>(), step.at(1).get<int>());
    }
    p.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("invalid topic partition: {}", e.what()));
  }
  std::vector<bool> used(static_cast<std::size_t>(std::max(p.m, 0)), false);
  for (int t : p.topic_of) {
    if (t < 0 || t >= p.m) throw ValidationError(fmt::format("topic id {} outside 0..{}", t, p.m - 1));
    used[static_cast<std::size_t>(t)] = true;
  }
  if (std::find(used.begin(), used.end(), false) != used.end()) {
    throw ValidationError("topic ids in partition are not dense");
  }
  return p;
}

void write_partition(const TopicPartition& partition, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure(fmt::format("cannot write '{}'", path.string()));
  out << partition.to_json() << '\n';
}

TopicPartition read_partition(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot open partition '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return TopicPartition::from_json(buffer.str());
}

std::vector<std::vector<std::size_t>> label_counts_by_topic(std::span<const int> topic_of, int n_topics,
                                                            std::span<const int> labels, int num_labels) {
  if (topic_of.size() != labels.size()) {
    throw ValidationError(fmt::format("{} topic assignments for {} labels", topic_of.size(), labels.size()));
  }
  std::vector<std::vector<std::size_t>> counts(static_cast<std::size_t>(n_topics),
                                               std::vector<std::size_t>(static_cast<std::size_t>(num_labels), 0));
  for (std::size_t i = 0; i < topic_of.size(); ++i) {
    ++counts[static_cast<std::size_t>(topic_of[i])][static_cast<std::size_t>(labels[i])];
  }
  return counts;
}

bool is_tail(std::span<const std::size_t> label_counts, std::size_t min_count) {
  return std::any_of(label_counts.begin(), label_counts.end(),
                     [min_count](std::size_t c) { return c < min_count; });
}

std::vector<int> tail_topics(std::span<const int> topic_of, std::span<const int> labels, int num_labels,
                             std::size_t min_count) {
  const int n = topic_of.empty() ? 0 : *std::max_element(topic_of.begin(), topic_of.end()) + 1;
  const auto counts = label_counts_by_topic(topic_of, n, labels, num_labels);
  std::vector<int> tails;
  for (int t = 0; t < n; ++t) {
    if (is_tail(counts[static_cast<std::size_t>(t)], min_count)) tails.push_back(t);
  }
  return tails;
}

TopicPartition merge_tail_topics(std::span<const int> raw_topics, std::span<const int> labels,
                                 int num_labels, std::size_t min_count, std::uint64_t seed) {
  if (raw_topics.size() != labels.size()) {
    throw ValidationError(fmt::format("{} topic assignments for {} labels", raw_topics.size(), labels.size()));
  }
  std::vector<std::size_t> global(static_cast<std::size_t>(num_labels), 0);
  for (int l : labels) ++global[static_cast<std::size_t>(l)];
  for (int l = 0; l < num_labels; ++l) {
    if (global[static_cast<std::size_t>(l)] < min_count) {
      throw ValidationError(fmt::format("label {} has only {} records; every label needs at least {}", l,
                                        global[static_cast<std::size_t>(l)], min_count));
    }
  }

  // Groups keyed by surviving raw id; each holds its per-label counts.
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < raw_topics.size(); ++i) {
    if (raw_topics[i] < 0) throw ValidationError("negative topic id");
    auto& counts = groups.try_emplace(raw_topics[i], static_cast<std::size_t>(num_labels), 0).first->second;
    ++counts[static_cast<std::size_t>(labels[i])];
  }
  std::map<int, int> parent;
  for (const auto& [id, counts] : groups) parent[id] = id;

  TopicPartition out;
  out.seed = seed;
  Rng rng(seed);
  auto absorb = [&](int absorbed, int survivor) {
    auto& dst = groups.at(survivor);
    const auto& src = groups.at(absorbed);
    for (std::size_t l = 0; l < dst.size(); ++l) dst[l] += src[l];
    groups.erase(absorbed);
    for (auto& [id, p] : parent) {
      if (p == absorbed) p = survivor;
    }
    out.merge_log.emplace_back(absorbed, survivor);
  };

  for (;;) {
    std::vector<int> tails;
    std::vector<int> healthy;
    for (const auto& [id, counts] : groups) (is_tail(counts, min_count) ? tails : healthy).push_back(id);
    if (tails.empty()) break;
    if (tails.size() == 1) {
      // With every label globally >= min_count, a lone tail always has a
      // healthy partner: the union of all other topics cannot itself be empty.
      const int partner = healthy[rng.below(healthy.size())];
      absorb(tails[0], partner);
    } else {
      const auto i = rng.below(tails.size());
      auto j = rng.below(tails.size() - 1);
      if (j >= i) ++j;
      const int a = tails[i];
      const int b = tails[j];
      absorb(std::max(a, b), std::min(a, b));
    }
  }

  std::map<int, int> dense;
  for (const auto& [id, counts] : groups) dense.emplace(id, static_cast<int>(dense.size()));
  out.m = static_cast<int>(dense.size());
  out.topic_of.reserve(raw_topics.size());
  for (int raw : raw_topics) out.topic_of.push_back(dense.at(parent.at(raw)));
  return out;
}

}  // namespace topicprobe
