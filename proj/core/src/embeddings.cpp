#include "topicprobe/embeddings.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include <fmt/format.h>
#include <json.hpp>

#include "topicprobe/error.hpp"

namespace topicprobe {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "the .tapb codec assumes a little-endian host");

namespace {

constexpr std::array<unsigned char, 4> kMagic{0x54, 0x41, 0x50, 0x42};  // "TAPB"
constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 8;

template <typename T>
void put(std::vector<std::byte>& out, T value) {
  const auto* p = reinterpret_cast<const std::byte*>(&value);
  out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T get(std::span<const std::byte> bytes, std::size_t offset) {
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  return value;
}

json manifest_to_json(const Manifest& m) {
  json j = {{"dataset_id", m.dataset_id}, {"source", m.source}, {"dim", m.dim}, {"count", m.count}};
  if (m.layer) j["layer"] = *m.layer;
  if (m.seed) j["seed"] = *m.seed;
  return j;
}

Manifest manifest_from_json(const json& j) {
  Manifest m;
  try {
    m.dataset_id = j.at("dataset_id").get<std::string>();
    m.source = j.at("source").get<std::string>();
    m.dim = j.at("dim").get<std::uint32_t>();
    m.count = j.at("count").get<std::uint64_t>();
    if (j.contains("layer") && !j["layer"].is_null()) m.layer = j["layer"].get<int>();
    if (j.contains("seed") && !j["seed"].is_null()) m.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("invalid embedding manifest: {}", e.what()));
  }
  return m;
}

}  // namespace

std::string Manifest::display_name() const {
  return layer ? fmt::format("{}{}", source, *layer) : source;
}

EmbeddingMatrix::EmbeddingMatrix(Manifest manifest, std::vector<float> values)
    : manifest_(std::move(manifest)), values_(std::move(values)) {
  if (manifest_.dim == 0) throw ValidationError("embedding dim must be positive");
  if (values_.size() != manifest_.dim * manifest_.count) {
    throw ValidationError(fmt::format("embedding payload has {} values, expected {}x{}",
                                      values_.size(), manifest_.count, manifest_.dim));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw ValidationError(
          fmt::format("non-finite value at row {} column {}", i / manifest_.dim, i % manifest_.dim));
    }
  }
}

Eigen::MatrixXd EmbeddingMatrix::gather(std::span<const std::size_t> rows) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), dim());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const float* src = values_.data() + rows[r] * dim();
    for (std::uint32_t c = 0; c < dim(); ++c) out(static_cast<Eigen::Index>(r), c) = src[c];
  }
  return out;
}

std::vector<std::byte> encode_embeddings(const EmbeddingMatrix& matrix) {
  std::vector<std::byte> out;
  const std::string blob = manifest_to_json(matrix.manifest()).dump();
  out.reserve(kHeaderBytes + matrix.values().size() * 4 + 4 + blob.size());
  for (auto b : kMagic) out.push_back(static_cast<std::byte>(b));
  put<std::uint32_t>(out, kTapbVersion);
  put<std::uint32_t>(out, matrix.dim());
  put<std::uint64_t>(out, matrix.count());
  const auto* payload = reinterpret_cast<const std::byte*>(matrix.values().data());
  out.insert(out.end(), payload, payload + matrix.values().size() * sizeof(float));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(blob.size()));
  const auto* text = reinterpret_cast<const std::byte*>(blob.data());
  out.insert(out.end(), text, text + blob.size());
  return out;
}

EmbeddingMatrix decode_embeddings(std::span<const std::byte> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic.data(), 4) != 0) {
    throw ValidationError("bad magic: not a TAPB embedding file");
  }
  if (bytes.size() < kHeaderBytes) throw ValidationError("truncated TAPB header");
  const auto version = get<std::uint32_t>(bytes, 4);
  if (version != kTapbVersion) {
    throw ValidationError(fmt::format("unsupported TAPB version {} (expected {})", version, kTapbVersion));
  }
  const auto dim = get<std::uint32_t>(bytes, 8);
  const auto count = get<std::uint64_t>(bytes, 12);
  if (dim == 0) throw ValidationError("TAPB header declares dim 0");
  const std::uint64_t n_values = static_cast<std::uint64_t>(dim) * count;
  const std::uint64_t payload_end = kHeaderBytes + n_values * sizeof(float);
  if (n_values / dim != count || payload_end < kHeaderBytes || bytes.size() < payload_end + 4) {
    throw ValidationError(fmt::format("truncated payload: header declares {}x{} floats", count, dim));
  }
  const auto blob_len = get<std::uint32_t>(bytes, payload_end);
  if (bytes.size() != payload_end + 4 + blob_len) {
    throw ValidationError(fmt::format("manifest length {} does not match the remaining {} bytes",
                                      blob_len, bytes.size() - payload_end - 4));
  }
  std::vector<float> values(n_values);
  std::memcpy(values.data(), bytes.data() + kHeaderBytes, n_values * sizeof(float));

  const auto* text = reinterpret_cast<const char*>(bytes.data() + payload_end + 4);
  json j;
  try {
    j = json::parse(std::string_view(text, blob_len));
  } catch (const json::parse_error& e) {
    throw ValidationError(fmt::format("manifest is not valid JSON: {}", e.what()));
  }
  Manifest manifest = manifest_from_json(j);
  if (manifest.dim != dim || manifest.count != count) {
    throw ValidationError(fmt::format("manifest says {}x{} but header says {}x{}", manifest.count,
                                      manifest.dim, count, dim));
  }
  return EmbeddingMatrix(std::move(manifest), std::move(values));
}

EmbeddingMatrix read_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(fmt::format("cannot open embedding file '{}'", path.string()));
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_embeddings(std::as_bytes(std::span(raw)));
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path, const LabeledDataset& dataset) {
  EmbeddingMatrix m = read_embeddings(path);
  if (m.count() != dataset.size()) {
    throw ValidationError(fmt::format("{}: {} rows but the dataset has {} records", path.string(),
                                      m.count(), dataset.size()));
  }
  return m;
}

void write_embeddings(const EmbeddingMatrix& matrix, const std::filesystem::path& path) {
  const auto bytes = encode_embeddings(matrix);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure(fmt::format("cannot write '{}'", path.string()));
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw RuntimeFailure(fmt::format("write to '{}' failed", path.string()));
}

bool AlignmentReport::all_ok() const { return failures() == 0; }

std::size_t AlignmentReport::failures() const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.ok ? 0 : 1;
  return n;
}

AlignmentReport validate_alignment(const LabeledDataset& dataset,
                                   std::span<const EmbeddingMatrix> matrices) {
  AlignmentReport report;
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    const auto& m = matrices[i].manifest();
    AlignmentEntry entry{i, m.display_name(), true, {}};
    if (m.count != dataset.size()) {
      entry.problems.push_back(fmt::format("count {} != dataset size {}", m.count, dataset.size()));
    }
    if (m.dataset_id != dataset.fingerprint()) {
      entry.problems.push_back(
          fmt::format("dataset_id '{}' != '{}'", m.dataset_id, dataset.fingerprint()));
    }
    entry.ok = entry.problems.empty();
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace topicprobe
