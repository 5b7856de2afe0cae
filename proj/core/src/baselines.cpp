#include "topicprobe/baselines.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "topicprobe/error.hpp"
#include "topicprobe/random.hpp"
#include "topicprobe/text.hpp"

namespace topicprobe {

namespace {

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

bool is_integer(std::string_view s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string_view::npos;
}

}  // namespace

WordVectorTable WordVectorTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot open word-vector table '{}'", path.string()));
  return parse(in, path.string());
}

WordVectorTable WordVectorTable::parse(std::istream& in, std::string_view name) {
  WordVectorTable table;
  std::string line;
  std::size_t line_no = 0;
  std::vector<float> vec;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split_spaces(line);
    if (fields.empty()) continue;
    if (table.dim_ == 0 && line_no == 1 && fields.size() == 2 && is_integer(fields[0]) && is_integer(fields[1])) {
      continue;  // word2vec-style "<count> <dim>" header
    }
    if (fields.size() < 2) throw ValidationError(fmt::format("{}:{}: expected a word and a vector", name, line_no));
    if (table.dim_ == 0) table.dim_ = static_cast<std::uint32_t>(fields.size() - 1);
    if (fields.size() - 1 != table.dim_) {
      throw ValidationError(fmt::format("{}:{}: {} values, expected {}", name, line_no, fields.size() - 1, table.dim_));
    }
    vec.resize(table.dim_);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      // std::from_chars for float is missing from older libstdc++.
      char* end = nullptr;
      const std::string field(fields[i]);
      const float v = std::strtof(field.c_str(), &end);
      if (end != field.c_str() + field.size() || !std::isfinite(v)) {
        throw ValidationError(fmt::format("{}:{}: bad number '{}'", name, line_no, field));
      }
      vec[i - 1] = v;
    }
    table.add(std::string(fields[0]), vec);
  }
  if (table.dim_ == 0) throw ValidationError(fmt::format("{}: no word vectors found", name));
  return table;
}

void WordVectorTable::add(std::string word, std::span<const float> vec) {
  if (dim_ == 0) dim_ = static_cast<std::uint32_t>(vec.size());
  if (vec.size() != dim_) throw ValidationError(fmt::format("vector for '{}' has the wrong width", word));
  if (index_.contains(word)) return;  // first occurrence wins
  index_.emplace(std::move(word), values_.size() / dim_);
  values_.insert(values_.end(), vec.begin(), vec.end());
}

const float* WordVectorTable::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? nullptr : values_.data() + it->second * dim_;
}

AveragedVector average_word_vectors(std::string_view text, const WordVectorTable& table) {
  AveragedVector out;
  std::vector<double> sum(table.dim(), 0.0);
  for (const auto& token : tokenize(text)) {
    const float* v = table.find(token);
    if (v == nullptr) continue;
    for (std::uint32_t i = 0; i < table.dim(); ++i) sum[i] += v[i];
    ++out.in_vocabulary;
  }
  out.values.assign(table.dim(), 0.0f);
  if (out.in_vocabulary > 0) {
    for (std::uint32_t i = 0; i < table.dim(); ++i) {
      out.values[i] = static_cast<float>(sum[i] / static_cast<double>(out.in_vocabulary));
    }
  }
  return out;
}

EmbeddingMatrix word_vector_embeddings(const LabeledDataset& dataset, const WordVectorTable& table,
                                       std::size_t* all_oov, std::string source) {
  std::vector<float> values;
  values.reserve(dataset.size() * table.dim());
  std::size_t oov = 0;
  for (const auto& r : dataset.records()) {
    const AveragedVector avg = average_word_vectors(r.text, table);
    if (avg.in_vocabulary == 0) {
      ++oov;
      spdlog::warn("record '{}': every token is out of vocabulary, using the zero vector", r.id);
    }
    values.insert(values.end(), avg.values.begin(), avg.values.end());
  }
  if (all_oov != nullptr) *all_oov = oov;
  Manifest m;
  m.dataset_id = dataset.fingerprint();
  m.source = std::move(source);
  m.dim = table.dim();
  m.count = dataset.size();
  return EmbeddingMatrix(std::move(m), std::move(values));
}

EmbeddingMatrix random_embeddings(std::size_t count, std::uint32_t dim, std::uint64_t seed, std::string dataset_id) {
  if (count < 1) throw ValidationError("random embeddings need count >= 1");
  if (dim < 1) throw ValidationError("random embeddings need dim >= 1");
  Rng rng(seed);
  std::vector<float> values(count * dim);
  for (auto& v : values) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  Manifest m;
  m.dataset_id = std::move(dataset_id);
  m.source = "random";
  m.dim = dim;
  m.count = count;
  m.seed = seed;
  return EmbeddingMatrix(std::move(m), std::move(values));
}

}  // namespace topicprobe
