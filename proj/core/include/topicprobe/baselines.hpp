#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "topicprobe/dataset.hpp"
#include "topicprobe/embeddings.hpp"

namespace topicprobe {

// Pretrained word vectors in the plain text format: one word followed by dim
// space-separated floats per line. A leading "<count> <dim>" header line is
// skipped. The dimension comes from the first vector line.
class WordVectorTable {
 public:
  static WordVectorTable load(const std::filesystem::path& path);
  static WordVectorTable parse(std::istream& in, std::string_view name = "<stream>");

  std::uint32_t dim() const { return dim_; }
  std::size_t size() const { return index_.size(); }

  // nullptr when the word is out of vocabulary.
  const float* find(std::string_view word) const;

  void add(std::string word, std::span<const float> vec);

 private:
  std::uint32_t dim_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<float> values_;
};

struct AveragedVector {
  std::vector<float> values;
  std::size_t in_vocabulary = 0;  // 0 means every token was OOV
};

// Mean of the vectors of in-vocabulary tokens (tokenized, not lemmatized).
// OOV tokens are left out of the mean; an all-OOV sentence gives zeros.
AveragedVector average_word_vectors(std::string_view text, const WordVectorTable& table);

// One averaged vector per record. all_oov counts sentences that fell back to
// the zero vector; each is logged as a warning.
EmbeddingMatrix word_vector_embeddings(const LabeledDataset& dataset, const WordVectorTable& table,
                                       std::size_t* all_oov = nullptr, std::string source = "glove");

// i.i.d. uniform(-1, 1) entries.
EmbeddingMatrix random_embeddings(std::size_t count, std::uint32_t dim, std::uint64_t seed,
                                  std::string dataset_id = {});

}  // namespace topicprobe
