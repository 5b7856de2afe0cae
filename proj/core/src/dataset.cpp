#include "topicprobe/dataset.hpp"

#include <fstream>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

#include "topicprobe/error.hpp"

namespace topicprobe {

using nlohmann::json;

std::string dataset_fingerprint(const std::vector<SentenceRecord>& records) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const auto& r : records) {
    for (char c : r.id) mix(static_cast<unsigned char>(c));
    mix(0x1F);
    for (char c : r.text) mix(static_cast<unsigned char>(c));
    mix(0x1E);
  }
  return fmt::format("fnv1a64:{:016x}", h);
}

LabeledDataset LabeledDataset::from_records(std::vector<SentenceRecord> records) {
  if (records.empty()) throw ValidationError("dataset is empty");
  LabeledDataset ds;
  std::unordered_set<std::string> seen_ids;
  std::map<std::string, int> label_index;
  ds.label_ids_.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.id.empty()) throw ValidationError(fmt::format("record {} has an empty id", i));
    if (!seen_ids.insert(r.id).second) {
      throw ValidationError(fmt::format("duplicate id '{}' at record {}", r.id, i));
    }
    if (r.label.empty()) throw ValidationError(fmt::format("record '{}' has an empty label", r.id));
    auto [it, inserted] = label_index.try_emplace(r.label, static_cast<int>(ds.label_set_.size()));
    if (inserted) ds.label_set_.push_back(r.label);
    ds.label_ids_.push_back(it->second);
  }
  if (ds.label_set_.size() < 2) {
    throw ValidationError(fmt::format("dataset needs at least 2 distinct labels, found {}",
                                      ds.label_set_.size()));
  }
  ds.fingerprint_ = dataset_fingerprint(records);
  ds.records_ = std::move(records);
  return ds;
}

std::map<std::string, std::size_t> LabeledDataset::label_counts() const {
  std::map<std::string, std::size_t> counts;
  for (const auto& r : records_) ++counts[r.label];
  return counts;
}

bool LabeledDataset::has_expressions() const {
  for (const auto& r : records_) {
    if (r.expression) return true;
  }
  return false;
}

namespace {

std::string required_string(const json& obj, const char* key, std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ValidationError(fmt::format("line {}: missing \"{}\" field", line_no, key));
  }
  if (!it->is_string()) {
    throw ValidationError(fmt::format("line {}: \"{}\" must be a string", line_no, key));
  }
  return it->get<std::string>();
}

}  // namespace

LabeledDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot open dataset '{}'", path.string()));

  std::vector<SentenceRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError(fmt::format("line {}: malformed JSON ({})", line_no, e.what()));
    }
    if (!obj.is_object()) throw ValidationError(fmt::format("line {}: expected a JSON object", line_no));
    SentenceRecord rec;
    rec.id = required_string(obj, "id", line_no);
    rec.text = required_string(obj, "text", line_no);
    rec.label = required_string(obj, "label", line_no);
    if (auto it = obj.find("expression"); it != obj.end() && !it->is_null()) {
      if (!it->is_string()) {
        throw ValidationError(fmt::format("line {}: \"expression\" must be a string", line_no));
      }
      rec.expression = it->get<std::string>();
    }
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw ValidationError(fmt::format("dataset '{}' is empty", path.string()));
  return LabeledDataset::from_records(std::move(records));
}

void write_dataset(const LabeledDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure(fmt::format("cannot write '{}'", path.string()));
  for (const auto& r : dataset.records()) {
    json obj = {{"id", r.id}, {"text", r.text}, {"label", r.label}};
    if (r.expression) obj["expression"] = *r.expression;
    out << obj.dump() << '\n';
  }
  if (!out) throw RuntimeFailure(fmt::format("write to '{}' failed", path.string()));
}

}  // namespace topicprobe
