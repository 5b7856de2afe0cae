#include "topicprobe/text.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>

#include "topicprobe/error.hpp"

namespace topicprobe {

namespace detail {
extern const std::string_view kIrregularLemmasTsv;
}

TokenList tokenize(std::string_view text) {
  TokenList tokens;
  std::string current;
  for (char c : text) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
      current.push_back(static_cast<char>(c | 0x20));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

namespace {

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool has_vowel(std::string_view s) {
  for (char c : s) {
    if (is_vowel(c) || c == 'y') return true;
  }
  return false;
}

// Undoes consonant doubling ("runn" -> "run") and restores a silent e after
// a short consonant-vowel-consonant stem ("mak" -> "make").
std::string repair_stem(std::string stem) {
  const std::size_t n = stem.size();
  if (n >= 3 && stem[n - 1] == stem[n - 2] && !is_vowel(stem[n - 1]) &&
      stem[n - 1] != 'l' && stem[n - 1] != 's' && stem[n - 1] != 'z') {
    stem.pop_back();
    return stem;
  }
  if (n == 3 && !is_vowel(stem[0]) && is_vowel(stem[1]) && !is_vowel(stem[2]) &&
      stem[2] != 'w' && stem[2] != 'x' && stem[2] != 'y') {
    stem.push_back('e');
  }
  return stem;
}

// One suffix-rule step; nullopt when no rule applies. Every rule shortens
// the token, which bounds the fixed-point iteration.
std::optional<std::string> suffix_step(std::string_view t) {
  if (t.size() >= 5 && ends_with(t, "ies")) {
    return std::string(t.substr(0, t.size() - 3)) + "y";
  }
  if (ends_with(t, "sses")) return std::string(t.substr(0, t.size() - 2));
  if (t.size() >= 5 && (ends_with(t, "xes") || ends_with(t, "zes") || ends_with(t, "ches") ||
                        ends_with(t, "shes"))) {
    return std::string(t.substr(0, t.size() - 2));
  }
  if (t.size() >= 4 && ends_with(t, "s") && !ends_with(t, "ss") && !ends_with(t, "us") &&
      !ends_with(t, "is")) {
    return std::string(t.substr(0, t.size() - 1));
  }
  if (ends_with(t, "ing")) {
    std::string stem(t.substr(0, t.size() - 3));
    if (stem.size() >= 3 && has_vowel(stem)) return repair_stem(std::move(stem));
  }
  if (ends_with(t, "ed")) {
    std::string stem(t.substr(0, t.size() - 2));
    if (stem.size() >= 3 && has_vowel(stem)) return repair_stem(std::move(stem));
  }
  return std::nullopt;
}

}  // namespace

Lemmatizer::Lemmatizer(std::unordered_map<std::string, std::string> irregular)
    : irregular_(std::move(irregular)) {
  for (const auto& [surface, lemma] : irregular_) {
    if (auto it = irregular_.find(lemma); it != irregular_.end() && it->second != lemma) {
      throw ValidationError(fmt::format("lemma '{}' of '{}' is itself mapped to '{}'", lemma,
                                        surface, it->second));
    }
  }
  for (const auto& [surface, lemma] : irregular_) {
    if ((*this)(lemma) != lemma) {
      throw ValidationError(fmt::format("lemma '{}' of '{}' is not a fixed point", lemma, surface));
    }
  }
}

std::string Lemmatizer::operator()(std::string_view token) const {
  std::string current(token);
  for (;;) {
    if (auto it = irregular_.find(current); it != irregular_.end()) return it->second;
    auto next = suffix_step(current);
    if (!next) return current;
    current = std::move(*next);
  }
}

Lemmatizer Lemmatizer::from_tsv(std::string_view contents) {
  std::unordered_map<std::string, std::string> table;
  std::istringstream in{std::string(contents)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw ValidationError(fmt::format("lemma table line {}: expected two tab-separated columns", line_no));
    }
    std::string surface = line.substr(0, tab);
    std::string lemma = line.substr(tab + 1);
    if (surface.empty() || lemma.empty()) {
      throw ValidationError(fmt::format("lemma table line {}: empty column", line_no));
    }
    table.emplace(std::move(surface), std::move(lemma));
  }
  return Lemmatizer(std::move(table));
}

Lemmatizer Lemmatizer::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot open lemma table '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_tsv(buffer.str());
}

const Lemmatizer& Lemmatizer::english() {
  static const Lemmatizer instance = from_tsv(detail::kIrregularLemmasTsv);
  return instance;
}

double bigram_score(double pair_count, double count_a, double count_b, double vocab_size,
                    const PhraseParams& params) {
  return (pair_count - params.min_count) * vocab_size / (count_a * count_b);
}

Corpus detect_bigrams(const Corpus& corpus, const PhraseParams& params) {
  std::unordered_map<std::string, double> unigram;
  std::map<std::pair<std::string, std::string>, double> pairs;
  for (const auto& doc : corpus) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      unigram[doc[i]] += 1;
      if (i + 1 < doc.size()) pairs[{doc[i], doc[i + 1]}] += 1;
    }
  }
  const double vocab = static_cast<double>(unigram.size());

  Corpus out;
  out.reserve(corpus.size());
  for (const auto& doc : corpus) {
    TokenList merged;
    merged.reserve(doc.size());
    std::size_t i = 0;
    while (i < doc.size()) {
      if (i + 1 < doc.size()) {
        auto it = pairs.find({doc[i], doc[i + 1]});
        const double score =
            bigram_score(it->second, unigram[doc[i]], unigram[doc[i + 1]], vocab, params);
        if (score > params.threshold) {
          merged.push_back(doc[i] + "_" + doc[i + 1]);
          i += 2;
          continue;
        }
      }
      merged.push_back(doc[i]);
      ++i;
    }
    out.push_back(std::move(merged));
  }
  return out;
}

Dictionary Dictionary::build(const Corpus& corpus) {
  Dictionary dict;
  dict.num_docs_ = corpus.size();
  std::unordered_set<std::size_t> in_doc;
  for (const auto& doc : corpus) {
    in_doc.clear();
    for (const auto& term : doc) {
      auto [it, inserted] = dict.term_to_id_.try_emplace(term, dict.terms_.size());
      if (inserted) {
        dict.terms_.push_back(term);
        dict.doc_freq_.push_back(0);
      }
      if (in_doc.insert(it->second).second) ++dict.doc_freq_[it->second];
    }
  }
  return dict;
}

std::size_t Dictionary::doc_freq(std::string_view term) const {
  const long id = id_of(term);
  return id < 0 ? 0 : doc_freq_[static_cast<std::size_t>(id)];
}

long Dictionary::id_of(std::string_view term) const {
  auto it = term_to_id_.find(term);
  return it == term_to_id_.end() ? -1 : static_cast<long>(it->second);
}

SparseDocVector tfidf_transform(const TokenList& doc, const Dictionary& dict) {
  std::map<std::size_t, double> tf;
  for (const auto& term : doc) {
    const long id = dict.id_of(term);
    if (id >= 0) tf[static_cast<std::size_t>(id)] += 1.0;
  }
  SparseDocVector vec;
  double norm2 = 0.0;
  const double n_docs = static_cast<double>(dict.num_docs());
  for (const auto& [id, count] : tf) {
    const double idf = std::log2(n_docs / static_cast<double>(dict.doc_freq()[id]));
    const double w = count * idf;
    if (w > 0.0) {
      vec.push_back({id, w});
      norm2 += w * w;
    }
  }
  if (!vec.empty()) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& e : vec) e.weight *= inv;
  }
  return vec;
}

PreparedCorpus prepare_corpus(std::span<const std::string> texts, const Lemmatizer& lemmatizer,
                              const PhraseParams& phrases) {
  Corpus lemmatized;
  lemmatized.reserve(texts.size());
  for (const auto& text : texts) {
    TokenList tokens = tokenize(text);
    for (auto& t : tokens) t = lemmatizer(t);
    lemmatized.push_back(std::move(tokens));
  }
  PreparedCorpus prepared;
  prepared.documents = detect_bigrams(lemmatized, phrases);
  prepared.dictionary = Dictionary::build(prepared.documents);
  prepared.tfidf.reserve(prepared.documents.size());
  for (const auto& doc : prepared.documents) {
    prepared.tfidf.push_back(tfidf_transform(doc, prepared.dictionary));
  }
  return prepared;
}

}  // namespace topicprobe
