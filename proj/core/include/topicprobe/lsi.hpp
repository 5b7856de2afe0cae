#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "topicprobe/text.hpp"

namespace topicprobe {

struct LsiOptions {
  int power_iterations = 2;
  int oversampling = 10;
  // Corpora with fewer documents use an exact dense SVD.
  std::size_t dense_threshold = 1000;
};

// Truncated SVD of the document-term tf-idf matrix. term_topic holds the
// right singular vectors (one unit-norm column per topic over the
// vocabulary); each column's largest-magnitude entry is positive so that the
// model is sign-deterministic.
struct LsiModel {
  Eigen::MatrixXd term_topic;       // num_terms x n_topics
  Eigen::VectorXd singular_values;  // nonincreasing
  int requested_topics = 0;

  int n_topics() const { return static_cast<int>(singular_values.size()); }

  // Topic coordinates of one document: term_topic^T * d.
  Eigen::VectorXd project(const SparseDocVector& doc) const;
};

// If the matrix rank r is below n_topics, only r topics are kept.
LsiModel fit_lsi(std::span<const SparseDocVector> corpus, std::size_t num_terms, int n_topics,
                 std::uint64_t seed, const LsiOptions& options = {});

// Index of the largest |x_j|; ties go to the lowest index. Empty input -> 0.
int argmax_abs(std::span<const double> coords);

// Document -> argmax_j |projection onto topic j|; empty documents -> 0.
std::vector<int> assign_topics(const LsiModel& model, std::span<const SparseDocVector> corpus);

}  // namespace topicprobe
