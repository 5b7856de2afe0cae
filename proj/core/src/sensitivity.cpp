#include "topicprobe/sensitivity.hpp"

#include "topicprobe/error.hpp"
#include "topicprobe/metrics.hpp"

namespace topicprobe {

TaskSensitivity task_sensitivity(std::string task, const SweepResult& glove, const SweepResult& random) {
  return {std::move(task), glove.summary.seen.mean, glove.summary.unseen.mean, random.summary.seen.mean};
}

SensitivityReport compute_sensitivity(std::vector<TaskSensitivity> tasks) {
  if (tasks.size() < 2) throw ValidationError("sensitivity correlation needs at least 2 tasks");
  SensitivityReport report;
  std::vector<double> a;
  std::vector<double> b;
  for (const auto& t : tasks) {
    a.push_back(t.measure_a());
    b.push_back(t.measure_b());
  }
  try {
    report.correlation = pearson_corr(a, b);
  } catch (const UndefinedMetric&) {
    report.correlation.reset();
  }
  report.tasks = std::move(tasks);
  return report;
}

}  // namespace topicprobe
