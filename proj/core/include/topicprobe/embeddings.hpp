#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "topicprobe/dataset.hpp"

namespace topicprobe {

struct Manifest {
  std::string dataset_id;
  std::string source;         // "glove", "random", "bert-base-uncased", ...
  std::optional<int> layer;   // 0..11 for per-layer transformer exports
  std::uint32_t dim = 0;
  std::uint64_t count = 0;
  std::optional<std::uint64_t> seed;

  // Display name used in reports: source, or source + layer.
  std::string display_name() const;
};

// count x dim sentence vectors, row-major f32, rows aligned with a dataset.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(Manifest manifest, std::vector<float> values);

  std::uint32_t dim() const { return manifest_.dim; }
  std::uint64_t count() const { return manifest_.count; }
  const Manifest& manifest() const { return manifest_; }
  const std::vector<float>& values() const { return values_; }

  std::span<const float> row(std::size_t i) const {
    return {values_.data() + i * dim(), dim()};
  }

  // Gathers the given rows into a double-precision design matrix.
  Eigen::MatrixXd gather(std::span<const std::size_t> rows) const;

 private:
  Manifest manifest_;
  std::vector<float> values_;
};

inline constexpr std::uint32_t kTapbVersion = 1;

// Format-level parse of a .tapb file (magic "TAPB", u32 version, u32 dim,
// u64 count, f32 payload, u32-prefixed JSON manifest).
EmbeddingMatrix read_embeddings(const std::filesystem::path& path);
EmbeddingMatrix decode_embeddings(std::span<const std::byte> bytes);

// read_embeddings plus the requirement that count equals the dataset size.
EmbeddingMatrix load_embeddings(const std::filesystem::path& path, const LabeledDataset& dataset);

std::vector<std::byte> encode_embeddings(const EmbeddingMatrix& matrix);
void write_embeddings(const EmbeddingMatrix& matrix, const std::filesystem::path& path);

struct AlignmentEntry {
  std::size_t index = 0;
  std::string source;
  bool ok = true;
  std::vector<std::string> problems;
};

struct AlignmentReport {
  std::vector<AlignmentEntry> entries;

  bool all_ok() const;
  std::size_t failures() const;
};

// Checks every matrix against the dataset's size and fingerprint. Never
// throws; callers decide what a failure means.
AlignmentReport validate_alignment(const LabeledDataset& dataset,
                                   std::span<const EmbeddingMatrix> matrices);

}  // namespace topicprobe
