#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <topicprobe/error.hpp>
#include <topicprobe/report.hpp>
#include <topicprobe/sensitivity.hpp>

#include "published.hpp"
#include "tempdir.hpp"

namespace {

using namespace topicprobe;

std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

TEST(Sensitivity, MeasuresPerTask) {
  const TaskSensitivity obj{"Obj", 0.8597, 0.7873, 0.5143};
  EXPECT_NEAR(obj.measure_a(), 0.3454, 1e-12);
  EXPECT_NEAR(obj.measure_b(), 0.0724, 1e-12);
  const TaskSensitivity flat{"Flat", 0.5, 0.5, 0.5};
  EXPECT_DOUBLE_EQ(flat.measure_a(), 0.0);
}

TEST(Sensitivity, CorrelationAndDegenerateCases) {
  auto r = compute_sensitivity({{"a", 0.9, 0.8, 0.5}, {"b", 0.7, 0.65, 0.5}, {"c", 0.6, 0.58, 0.5}});
  ASSERT_TRUE(r.correlation.has_value());
  EXPECT_GT(*r.correlation, 0.9);
  auto flat = compute_sensitivity({{"a", 0.9, 0.8, 0.4}, {"b", 0.7, 0.6, 0.2}});
  EXPECT_FALSE(flat.correlation.has_value());  // measure_b constant
  EXPECT_THROW(compute_sensitivity({{"a", 0.9, 0.8, 0.5}}), ValidationError);
}

TEST(Sensitivity, PublishedTasksReplay) {
  std::vector<TaskSensitivity> tasks;
  for (const auto& row : published::kProbingTasks) {
    tasks.push_back({row.task, row.glove_seen, row.glove_unseen, row.random_seen});
  }
  const auto r = compute_sensitivity(tasks);
  ASSERT_TRUE(r.correlation.has_value());
  EXPECT_NEAR(*r.correlation, published::kReportedCorrelation, 0.01);
}

SweepResult toy_sweep(std::string name, std::optional<int> layer, int n_records) {
  SweepResult s;
  s.embedding = std::move(name);
  s.layer = layer;
  for (int i = 0; i < n_records; ++i) {
    s.records.push_back({5, i % 3, i % 3 == 0 ? i % 3 : (i + 1) % 3, i % 5, i % 3 == 0 ? ScoreKind::seen : ScoreKind::unseen,
                         0.5 + 0.01 * i, 10});
  }
  s.skips.push_back({5, 1, 2, 3, "unseen test fold holds a single class"});
  s.summary = summarize(s.records);
  return s;
}

TEST(Report, WritesAllFiles) {
  testing_support::TempDir dir;
  const std::vector<SweepResult> sweeps{toy_sweep("glove", std::nullopt, 45), toy_sweep("bert", 7, 12)};
  const auto sens = compute_sensitivity({{"t1", 0.9, 0.8, 0.5}, {"t2", 0.7, 0.68, 0.51}, {"t3", 0.8, 0.7, 0.49},
                                         {"t4", 0.6, 0.6, 0.5}, {"t5", 0.85, 0.8, 0.5}, {"t6", 0.7, 0.66, 0.5},
                                         {"t7", 0.53, 0.51, 0.5}, {"t8", 0.52, 0.51, 0.5}});
  emit_report({sweeps, {}, &sens}, dir.path() / "out");

  const auto scores = read_lines(dir / "out/scores.csv");
  ASSERT_EQ(scores.size(), 1u + 45u + 12u);
  EXPECT_EQ(scores[0], "embedding,source_layer,topic_model_size,topic_id,fold,kind,auc,n_test");
  EXPECT_EQ(scores[1].rfind("glove,,5,0,0,seen,", 0), 0u) << scores[1];
  EXPECT_EQ(scores[46].rfind("bert,7,5,", 0), 0u) << scores[46];

  const auto summary = read_lines(dir / "out/summary.csv");
  ASSERT_EQ(summary.size(), 3u);
  EXPECT_EQ(summary[0], "embedding,seen_mean,seen_std,unseen_mean,unseen_std,diff_mean,diff_std");
  EXPECT_EQ(summary[2].rfind("bert7,", 0), 0u);

  const auto sensitivity = read_lines(dir / "out/sensitivity.csv");
  ASSERT_EQ(sensitivity.size(), 1u + 8u + 1u);
  EXPECT_EQ(sensitivity.back().rfind("correlation,", 0), 0u);

  const auto skips = read_lines(dir / "out/skips.csv");
  EXPECT_EQ(skips.size(), 3u);

  std::ifstream md(dir / "out/report.md");
  std::stringstream buf;
  buf << md.rdbuf();
  EXPECT_NE(buf.str().find("| glove |"), std::string::npos);
  EXPECT_NE(buf.str().find("Seen"), std::string::npos);
}

TEST(Report, UndefinedCorrelationFooter) {
  testing_support::TempDir dir;
  const auto sens = compute_sensitivity({{"a", 0.9, 0.8, 0.4}, {"b", 0.7, 0.6, 0.2}});
  emit_report({{}, {}, &sens}, dir.path());
  EXPECT_EQ(read_lines(dir / "sensitivity.csv").back(), "correlation,undefined");
  EXPECT_FALSE(std::filesystem::exists(dir / "scores.csv"));
}

TEST(Report, UnwritableDirectoryFails) {
  testing_support::TempDir dir;
  std::ofstream(dir / "file") << "x";
  EXPECT_THROW(emit_report({}, dir / "file" / "sub"), RuntimeFailure);
}

}  // namespace
