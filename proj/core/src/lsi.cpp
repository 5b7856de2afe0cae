#include "topicprobe/lsi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>
#include <Eigen/SVD>
#include <Eigen/SparseCore>
#include <fmt/format.h>

#include "topicprobe/error.hpp"
#include "topicprobe/random.hpp"

namespace topicprobe {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

SparseMatrix build_matrix(std::span<const SparseDocVector> corpus, std::size_t num_terms) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    for (const auto& e : corpus[d]) {
      if (e.term >= num_terms) {
        throw ValidationError(fmt::format("document {} references term {} beyond vocabulary size {}",
                                          d, e.term, num_terms));
      }
      triplets.emplace_back(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(e.term), e.weight);
    }
  }
  SparseMatrix a(static_cast<Eigen::Index>(corpus.size()), static_cast<Eigen::Index>(num_terms));
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

// Top singular triplets of A via a randomized range finder with power
// iterations; returns (singular values, right singular vectors).
std::pair<Eigen::VectorXd, Eigen::MatrixXd> randomized_svd(const SparseMatrix& a, Eigen::Index rank,
                                                           std::uint64_t seed, const LsiOptions& opt) {
  const Eigen::Index width = std::min<Eigen::Index>(rank + opt.oversampling, std::min(a.rows(), a.cols()));
  Rng rng(seed);
  Eigen::MatrixXd omega(a.cols(), width);
  for (Eigen::Index j = 0; j < width; ++j) {
    for (Eigen::Index i = 0; i < a.cols(); ++i) omega(i, j) = rng.normal();
  }
  Eigen::MatrixXd q = orthonormal_basis(a * omega);
  for (int it = 0; it < opt.power_iterations; ++it) {
    Eigen::MatrixXd z = orthonormal_basis(a.transpose() * q);
    q = orthonormal_basis(a * z);
  }
  // B = Q^T A is small (width x terms); take its SVD through B^T.
  Eigen::MatrixXd bt = a.transpose() * q;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(bt, Eigen::ComputeThinU);
  return {svd.singularValues(), svd.matrixU()};
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> dense_svd(const SparseMatrix& a) {
  Eigen::MatrixXd dense(a);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(dense, Eigen::ComputeThinV);
  return {svd.singularValues(), svd.matrixV()};
}

void fix_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      const double v = std::abs(vectors(i, j));
      if (v > best_abs + 1e-12) {
        best_abs = v;
        best = i;
      }
    }
    if (vectors(best, j) < 0.0) vectors.col(j) *= -1.0;
  }
}

}  // namespace

Eigen::VectorXd LsiModel::project(const SparseDocVector& doc) const {
  Eigen::VectorXd coords = Eigen::VectorXd::Zero(n_topics());
  for (const auto& e : doc) {
    if (static_cast<Eigen::Index>(e.term) < term_topic.rows()) {
      coords += e.weight * term_topic.row(static_cast<Eigen::Index>(e.term)).transpose();
    }
  }
  return coords;
}

LsiModel fit_lsi(std::span<const SparseDocVector> corpus, std::size_t num_terms, int n_topics,
                 std::uint64_t seed, const LsiOptions& options) {
  if (corpus.empty()) throw ValidationError("cannot fit LSI on an empty corpus");
  if (n_topics < 1) throw ValidationError(fmt::format("n_topics must be >= 1, got {}", n_topics));

  const SparseMatrix a = build_matrix(corpus, num_terms);
  LsiModel model;
  model.requested_topics = n_topics;
  const Eigen::Index max_rank = std::min(a.rows(), a.cols());
  if (max_rank == 0 || a.nonZeros() == 0) {
    model.term_topic.resize(static_cast<Eigen::Index>(num_terms), 0);
    return model;
  }

  auto [values, vectors] = corpus.size() < options.dense_threshold
                               ? dense_svd(a)
                               : randomized_svd(a, std::min<Eigen::Index>(n_topics, max_rank), seed, options);

  const double tol = static_cast<double>(std::max(a.rows(), a.cols())) *
                     std::numeric_limits<double>::epsilon() * values(0);
  Eigen::Index kept = 0;
  while (kept < values.size() && kept < n_topics && values(kept) > tol) ++kept;

  model.singular_values = values.head(kept);
  model.term_topic = vectors.leftCols(kept);
  fix_signs(model.term_topic);
  return model;
}

int argmax_abs(std::span<const double> coords) {
  int best = 0;
  double best_abs = -1.0;
  for (std::size_t j = 0; j < coords.size(); ++j) {
    const double v = std::abs(coords[j]);
    if (v > best_abs) {
      best_abs = v;
      best = static_cast<int>(j);
    }
  }
  return best;
}

std::vector<int> assign_topics(const LsiModel& model, std::span<const SparseDocVector> corpus) {
  std::vector<int> topics;
  topics.reserve(corpus.size());
  for (const auto& doc : corpus) {
    if (doc.empty() || model.n_topics() == 0) {
      topics.push_back(0);
      continue;
    }
    const Eigen::VectorXd coords = model.project(doc);
    topics.push_back(argmax_abs(std::span<const double>(coords.data(), static_cast<std::size_t>(coords.size()))));
  }
  return topics;
}

}  // namespace topicprobe
