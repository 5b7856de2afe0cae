#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topicprobe/runner.hpp"

namespace topicprobe {

// Per-task AUCs feeding the two topic-sensitivity measures.
struct TaskSensitivity {
  std::string task;
  double glove_seen = 0.0;
  double glove_unseen = 0.0;
  double random_seen = 0.0;

  // Word-vector seen minus random seen.
  double measure_a() const { return glove_seen - random_seen; }
  // Word-vector seen minus word-vector unseen.
  double measure_b() const { return glove_seen - glove_unseen; }
};

struct SensitivityReport {
  std::vector<TaskSensitivity> tasks;
  std::optional<double> correlation;  // empty when a measure is constant
};

TaskSensitivity task_sensitivity(std::string task, const SweepResult& glove, const SweepResult& random);

// Needs at least two tasks.
SensitivityReport compute_sensitivity(std::vector<TaskSensitivity> tasks);

}  // namespace topicprobe
