#include "topicprobe/synth.hpp"

#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

#include "topicprobe/error.hpp"
#include "topicprobe/random.hpp"

namespace topicprobe {

namespace {

constexpr std::string_view kConsonants = "bdfgklmnprtvz";
constexpr std::string_view kVowels = "aiou";

// Fixed-width syllable encoding. Words end in a vowel other than 'e', so the
// lemmatizer's suffix rules never fire on them.
std::string encode(std::size_t n, int width) {
  std::string out;
  for (int i = 0; i < width; ++i) {
    const std::size_t syl = n % (kConsonants.size() * kVowels.size());
    n /= kConsonants.size() * kVowels.size();
    out += kConsonants[syl % kConsonants.size()];
    out += kVowels[syl / kConsonants.size()];
  }
  return out;
}

std::string topic_word(int topic, int j) {
  return "ka" + encode(static_cast<std::size_t>(topic), 2) + encode(static_cast<std::size_t>(j), 2);
}
std::string shared_word(int j) { return "lo" + encode(static_cast<std::size_t>(j), 3); }
std::string topic_cue(int topic, int label, int j, int per_label) {
  return "mi" + encode(static_cast<std::size_t>(topic), 2) + encode(static_cast<std::size_t>(label * per_label + j), 2);
}
std::string global_cue(int label, int j, int per_label) {
  return "nu" + encode(static_cast<std::size_t>(label * per_label + j), 3);
}

}  // namespace

void SynthSpec::validate() const {
  if (n_topics < 1 || samples_per_topic < 1 || vocab_per_topic < 1 || shared_vocab < 1 || dim < 1 ||
      cues_per_label < 1 || cue_tokens < 0) {
    throw ValidationError("synthetic spec sizes must all be positive");
  }
  if (!(topic_label_corr >= 0.0 && topic_label_corr <= 1.0)) {
    throw ValidationError(fmt::format("topic_label_corr must lie in [0, 1], got {}", topic_label_corr));
  }
  if (!(cue_fidelity >= 0.0 && cue_fidelity <= 1.0) || !(topic_word_share >= 0.0 && topic_word_share <= 1.0)) {
    throw ValidationError("cue_fidelity and topic_word_share must lie in [0, 1]");
  }
  const double rare = samples_per_topic * (1.0 - topic_label_corr) / 2.0;
  if (rare < 5.0) {
    throw ValidationError(fmt::format(
        "infeasible spec: {} samples per topic at corr {} expect {:.2f} records of the rarer label (need >= 5)",
        samples_per_topic, topic_label_corr, rare));
  }
}

SyntheticCorpus generate_synthetic(const SynthSpec& spec) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, {1}));
  static constexpr std::array<const char*, 2> kLabels{"Negative", "Positive"};

  std::vector<SentenceRecord> records;
  std::vector<int> topics;
  std::vector<std::vector<std::string>> bags;
  for (int t = 0; t < spec.n_topics; ++t) {
    const double p_positive = t % 2 == 0 ? (1.0 + spec.topic_label_corr) / 2.0 : (1.0 - spec.topic_label_corr) / 2.0;
    for (int s = 0; s < spec.samples_per_topic; ++s) {
      const int label = rng.bernoulli(p_positive) ? 1 : 0;
      const int length = 8 + static_cast<int>(rng.below(8));
      std::vector<std::string> words;
      words.reserve(static_cast<std::size_t>(length));
      const int cue_label = rng.bernoulli(spec.cue_fidelity) ? label : 1 - label;
      for (int c = 0; c < spec.cue_tokens && static_cast<int>(words.size()) < length; ++c) {
        const int cue_index = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.cues_per_label)));
        words.push_back(rng.bernoulli(spec.topic_label_corr)
                            ? topic_cue(t, cue_label, cue_index, spec.cues_per_label)
                            : global_cue(cue_label, cue_index, spec.cues_per_label));
      }
      while (static_cast<int>(words.size()) < length) {
        if (rng.bernoulli(spec.topic_word_share)) {
          words.push_back(topic_word(t, static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.vocab_per_topic)))));
        } else {
          words.push_back(shared_word(static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.shared_vocab)))));
        }
      }
      rng.shuffle(std::span(words));
      std::string text;
      for (const auto& w : words) {
        if (!text.empty()) text += ' ';
        text += w;
      }
      text += '.';
      records.push_back({fmt::format("synth-{:06d}", records.size()), std::move(text), kLabels[static_cast<std::size_t>(label)],
                         std::nullopt});
      topics.push_back(t);
      bags.push_back(std::move(words));
    }
  }

  // Each distinct word gets a fixed random direction derived from its text.
  const auto dim = static_cast<std::size_t>(spec.dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  std::map<std::string, std::vector<float>> directions;
  auto direction = [&](const std::string& word) -> const std::vector<float>& {
    auto [it, inserted] = directions.try_emplace(word);
    if (inserted) {
      std::uint64_t h = 0xcbf29ce484222325ULL;
      for (char c : word) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
      Rng word_rng(derive_seed(spec.seed, {2, h}));
      it->second.resize(dim);
      for (auto& v : it->second) v = static_cast<float>(word_rng.normal() * scale);
    }
    return it->second;
  };
  Rng noise(derive_seed(spec.seed, {3}));
  std::vector<float> values;
  values.reserve(records.size() * dim);
  for (const auto& bag : bags) {
    std::vector<double> row(dim, 0.0);
    for (const auto& word : std::set<std::string>(bag.begin(), bag.end())) {
      const auto& d = direction(word);
      for (std::size_t i = 0; i < dim; ++i) row[i] += d[i];
    }
    for (std::size_t i = 0; i < dim; ++i) values.push_back(static_cast<float>(row[i] + 0.01 * noise.normal()));
  }

  SyntheticCorpus out;
  out.dataset = LabeledDataset::from_records(std::move(records));
  Manifest m;
  m.dataset_id = out.dataset.fingerprint();
  m.source = "synthetic";
  m.dim = static_cast<std::uint32_t>(dim);
  m.count = out.dataset.size();
  m.seed = spec.seed;
  out.embeddings = EmbeddingMatrix(std::move(m), std::move(values));
  out.topics = std::move(topics);
  return out;
}

}  // namespace topicprobe
