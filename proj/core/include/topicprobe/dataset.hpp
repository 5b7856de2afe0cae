#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace topicprobe {

struct SentenceRecord {
  std::string id;
  std::string text;
  std::string label;
  std::optional<std::string> expression;  // the multiword expression, when annotated
};

// An ordered, validated probing corpus. Record order is the canonical row
// index shared by every embedding matrix built for the dataset.
class LabeledDataset {
 public:
  LabeledDataset() = default;

  // Validates ids (non-empty, unique) and requires at least two labels.
  // label_set is derived in first-appearance order.
  static LabeledDataset from_records(std::vector<SentenceRecord> records);

  const std::vector<SentenceRecord>& records() const { return records_; }
  const SentenceRecord& operator[](std::size_t i) const { return records_[i]; }
  std::size_t size() const { return records_.size(); }

  const std::vector<std::string>& label_set() const { return label_set_; }
  std::size_t num_labels() const { return label_set_.size(); }

  // Per-record index into label_set().
  const std::vector<int>& label_ids() const { return label_ids_; }

  std::map<std::string, std::size_t> label_counts() const;

  bool has_expressions() const;

  // Order-sensitive fingerprint of (id, text) pairs; embeddings record it in
  // their manifest so that a reordered or edited dataset is detected.
  const std::string& fingerprint() const { return fingerprint_; }

 private:
  std::vector<SentenceRecord> records_;
  std::vector<std::string> label_set_;
  std::vector<int> label_ids_;
  std::string fingerprint_;
};

// Reads JSON Lines: one {"id", "text", "label", ["expression"]} object per
// line. Blank lines are ignored. Throws ValidationError naming the line.
LabeledDataset load_dataset(const std::filesystem::path& path);

void write_dataset(const LabeledDataset& dataset, const std::filesystem::path& path);

// FNV-1a 64 over id 0x1F text 0x1E for every record, rendered "fnv1a64:<hex>".
std::string dataset_fingerprint(const std::vector<SentenceRecord>& records);

}  // namespace topicprobe
