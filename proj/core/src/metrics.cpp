#include "topicprobe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <fmt/format.h>

#include "topicprobe/error.hpp"

namespace topicprobe {

std::string_view to_string(ScoreKind kind) { return kind == ScoreKind::seen ? "seen" : "unseen"; }

double auc_roc_binary(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw ValidationError(fmt::format("{} scores for {} labels", scores.size(), labels.size()));
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of midranks of the positives (1-based), ties sharing the average rank.
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1) {
        positive_rank_sum += midrank;
        ++positives;
      } else if (labels[order[k]] != 0) {
        throw ValidationError(fmt::format("binary label must be 0 or 1, got {}", labels[order[k]]));
      }
    }
    i = j + 1;
  }
  const std::size_t negatives = scores.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw UndefinedMetric("AUC is undefined when the test set contains a single class");
  }
  const double p = static_cast<double>(positives);
  const double n = static_cast<double>(negatives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

double auc_roc_multiclass(const Eigen::MatrixXd& scores, std::span<const int> labels) {
  if (static_cast<std::size_t>(scores.rows()) != labels.size()) {
    throw ValidationError(fmt::format("{} score rows for {} labels", scores.rows(), labels.size()));
  }
  std::vector<std::size_t> counts(static_cast<std::size_t>(scores.cols()), 0);
  for (int l : labels) {
    if (l < 0 || l >= scores.cols()) {
      throw ValidationError(fmt::format("label {} has no score column", l));
    }
    ++counts[static_cast<std::size_t>(l)];
  }
  const auto present = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; });
  if (present < 2) throw UndefinedMetric("AUC is undefined when the test set contains a single class");

  std::vector<double> column(labels.size());
  if (scores.cols() == 2) {
    // Both one-vs-rest AUCs coincide; score class 1 directly so the result
    // is bit-identical to the binary routine.
    for (std::size_t i = 0; i < labels.size(); ++i) column[i] = scores(static_cast<Eigen::Index>(i), 1);
    return auc_roc_binary(column, labels);
  }
  std::vector<int> binary(labels.size());
  double total = 0.0;
  for (Eigen::Index c = 0; c < scores.cols(); ++c) {
    if (counts[static_cast<std::size_t>(c)] == 0) continue;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      column[i] = scores(static_cast<Eigen::Index>(i), c);
      binary[i] = labels[i] == c ? 1 : 0;
    }
    total += auc_roc_binary(column, binary);
  }
  return total / static_cast<double>(present);
}

double pearson_corr(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("pearson_corr needs equal-length inputs");
  if (x.size() < 2) throw ValidationError("pearson_corr needs at least 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedMetric("correlation is undefined for a constant series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) throw ValidationError("cannot average an empty selection");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / n), values.size()};
}

MeanStd micro_average(std::span<const ScoreRecord> records, ScoreKind kind) {
  std::vector<double> values;
  for (const auto& r : records) {
    if (r.kind == kind) values.push_back(r.auc);
  }
  if (values.empty()) {
    throw ValidationError(fmt::format("no {} records to average", to_string(kind)));
  }
  return mean_std(values);
}

}  // namespace topicprobe
