#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include <Eigen/Core>

namespace topicprobe {

enum class ScoreKind { seen, unseen };

std::string_view to_string(ScoreKind kind);

// AUC of one probe on one test fold. topic_id is the topic the probe was
// trained on; eval_topic is the topic the test fold came from (equal to
// topic_id for seen records).
struct ScoreRecord {
  int topic_model_size = 0;
  int topic_id = 0;
  int eval_topic = 0;
  int fold = 0;
  ScoreKind kind = ScoreKind::seen;
  double auc = 0.0;
  std::size_t n_test = 0;
};

// Mann-Whitney form: (wins + 0.5 ties) / (P * N). labels are 0/1.
// Throws UndefinedMetric when either class is missing.
double auc_roc_binary(std::span<const double> scores, std::span<const int> labels);

// Macro average of one-vs-rest AUCs over the classes present in labels
// (class indices address columns of scores). Throws UndefinedMetric when
// fewer than two classes are present.
double auc_roc_multiclass(const Eigen::MatrixXd& scores, std::span<const int> labels);

// Throws UndefinedMetric for constant input.
double pearson_corr(std::span<const double> x, std::span<const double> y);

struct MeanStd {
  double mean = 0.0;
  double stdev = 0.0;  // population
  std::size_t n = 0;
};

MeanStd mean_std(std::span<const double> values);

// Unweighted mean and population stdev of the AUCs of all records of the
// given kind. Throws ValidationError on an empty selection.
MeanStd micro_average(std::span<const ScoreRecord> records, ScoreKind kind);

}  // namespace topicprobe
