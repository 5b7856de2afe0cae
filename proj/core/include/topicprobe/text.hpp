#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace topicprobe {

using TokenList = std::vector<std::string>;
using Corpus = std::vector<TokenList>;

// Lowercases ASCII letters and splits on every non-alphabetic byte.
TokenList tokenize(std::string_view text);

// Suffix rules (-ies, -es, -s, -ed, -ing) plus an irregular-form table,
// applied until a fixed point, so the mapping is idempotent.
class Lemmatizer {
 public:
  // The built-in English table shipped in data/irregular_lemmas.tsv.
  static const Lemmatizer& english();

  // Two-column TSV: surface form, lemma. '#' starts a comment line.
  static Lemmatizer from_tsv(std::string_view contents);
  static Lemmatizer from_file(const std::filesystem::path& path);

  explicit Lemmatizer(std::unordered_map<std::string, std::string> irregular);

  std::string operator()(std::string_view token) const;

  std::size_t table_size() const { return irregular_.size(); }

 private:
  std::unordered_map<std::string, std::string> irregular_;
};

struct PhraseParams {
  double min_count = 5;
  double threshold = 10;
};

// (count(ab) - min_count) * vocab_size / (count(a) * count(b))
double bigram_score(double pair_count, double count_a, double count_b, double vocab_size,
                    const PhraseParams& params = {});

// Joins adjacent pairs scoring above the threshold into "a_b" in one greedy
// left-to-right pass per document. Statistics come from the whole corpus.
Corpus detect_bigrams(const Corpus& corpus, const PhraseParams& params = {});

class Dictionary {
 public:
  // Term ids are assigned densely in first-appearance order.
  static Dictionary build(const Corpus& corpus);

  std::size_t size() const { return terms_.size(); }
  std::size_t num_docs() const { return num_docs_; }
  const std::string& term(std::size_t id) const { return terms_[id]; }
  const std::vector<std::size_t>& doc_freq() const { return doc_freq_; }
  std::size_t doc_freq(std::string_view term) const;

  // -1 when absent.
  long id_of(std::string_view term) const;

 private:
  std::map<std::string, std::size_t, std::less<>> term_to_id_;
  std::vector<std::string> terms_;
  std::vector<std::size_t> doc_freq_;
  std::size_t num_docs_ = 0;
};

struct SparseEntry {
  std::size_t term;
  double weight;
};

// Term ids strictly increasing; unit L2 norm or empty.
using SparseDocVector = std::vector<SparseEntry>;

// tf * log2(num_docs / df), L2-normalized. Terms outside the dictionary and
// terms with zero idf are dropped.
SparseDocVector tfidf_transform(const TokenList& doc, const Dictionary& dict);

struct PreparedCorpus {
  Corpus documents;
  Dictionary dictionary;
  std::vector<SparseDocVector> tfidf;
};

// tokenize -> lemmatize -> bigram phrases -> dictionary -> tf-idf.
PreparedCorpus prepare_corpus(std::span<const std::string> texts,
                              const Lemmatizer& lemmatizer = Lemmatizer::english(),
                              const PhraseParams& phrases = {});

}  // namespace topicprobe
