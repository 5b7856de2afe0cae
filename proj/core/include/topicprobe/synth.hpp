#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "topicprobe/dataset.hpp"
#include "topicprobe/embeddings.hpp"

namespace topicprobe {

// Planted-topic corpus parameters. topic_label_corr controls how strongly the
// label is tied to the topic: it sets the per-topic label prior
// ((1 +/- corr) / 2, alternating across topics) and the share of label cue
// words drawn from a topic-private cue set instead of a cue set shared by all
// topics. corr = 0 plants no topic-dependent label signal at all.
struct SynthSpec {
  int n_topics = 8;
  int samples_per_topic = 200;
  int vocab_per_topic = 60;
  int shared_vocab = 40;
  double topic_label_corr = 0.9;
  int dim = 64;
  std::uint64_t seed = 0;

  // Probability that a sentence's cue word points at its true label.
  double cue_fidelity = 0.95;
  int cues_per_label = 2;
  int cue_tokens = 2;  // cue words per sentence
  // Probability that a content word comes from the topic block rather than
  // the shared pool.
  double topic_word_share = 0.7;

  // Throws ValidationError for non-positive sizes, corr outside [0, 1], or
  // fewer than 5 expected records of the rarer label per topic.
  void validate() const;
};

struct SyntheticCorpus {
  LabeledDataset dataset;
  EmbeddingMatrix embeddings;
  std::vector<int> topics;  // ground-truth topic per record
};

// Sentences of 8-15 words; embeddings project the bag-of-words indicator
// through a fixed seeded Gaussian matrix (entries N(0, 1/dim)) and add
// N(0, 0.01^2) noise. Fully determined by spec.seed.
SyntheticCorpus generate_synthetic(const SynthSpec& spec);

}  // namespace topicprobe
