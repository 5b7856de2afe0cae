#include "topicprobe/report.hpp"

#include <fstream>

#include <fmt/format.h>

#include "topicprobe/error.hpp"

namespace topicprobe {

namespace {

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure(fmt::format("cannot write '{}'", path.string()));
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw RuntimeFailure(fmt::format("write to '{}' failed", path.string()));
}

std::string display_name(const SweepResult& r) {
  return r.layer ? fmt::format("{}{}", r.embedding, *r.layer) : r.embedding;
}

std::string mean_std_cell(const MeanStd& m) { return fmt::format("{:.4f}({:.4f})", m.mean, m.stdev); }

void write_scores(std::span<const SweepResult> sweeps, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "embedding,source_layer,topic_model_size,topic_id,fold,kind,auc,n_test\n";
  for (const auto& s : sweeps) {
    const std::string layer = s.layer ? std::to_string(*s.layer) : "";
    for (const auto& r : s.records) {
      out << fmt::format("{},{},{},{},{},{},{:.10f},{}\n", csv_field(s.embedding), layer, r.topic_model_size,
                         r.topic_id, r.fold, to_string(r.kind), r.auc, r.n_test);
    }
  }
  finish(out, path);
}

void write_summary(std::span<const SweepResult> sweeps, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "embedding,seen_mean,seen_std,unseen_mean,unseen_std,diff_mean,diff_std\n";
  for (const auto& s : sweeps) {
    const auto& m = s.summary;
    out << fmt::format("{},{:.10f},{:.10f},{:.10f},{:.10f},{:.10f},{:.10f}\n", csv_field(display_name(s)),
                       m.seen.mean, m.seen.stdev, m.unseen.mean, m.unseen.stdev, m.diff.mean, m.diff.stdev);
  }
  finish(out, path);
}

void write_skips(std::span<const SweepResult> sweeps, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "embedding,topic_model_size,topic_id,eval_topic,fold,reason\n";
  for (const auto& s : sweeps) {
    for (const auto& k : s.skips) {
      out << fmt::format("{},{},{},{},{},{}\n", csv_field(display_name(s)), k.topic_model_size, k.topic_id,
                         k.eval_topic, k.fold, csv_field(k.reason));
    }
  }
  finish(out, path);
}

void write_sensitivity(const SensitivityReport& report, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "task,glove_seen,glove_unseen,random_seen,measure_a,measure_b\n";
  for (const auto& t : report.tasks) {
    out << fmt::format("{},{:.10f},{:.10f},{:.10f},{:.10f},{:.10f}\n", csv_field(t.task), t.glove_seen,
                       t.glove_unseen, t.random_seen, t.measure_a(), t.measure_b());
  }
  if (report.correlation) {
    out << fmt::format("correlation,{:.10f}\n", *report.correlation);
  } else {
    out << "correlation,undefined\n";
  }
  finish(out, path);
}

void write_markdown(const ReportInput& input, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "# Topic-aware probing report\n\n";
  if (!input.sweeps.empty()) {
    out << "## Seen vs. unseen topic AUC-ROC\n\n";
    out << "| Embedding | Seen Mean(Stdev) | Unseen Mean(Stdev) | Difference Mean(Stdev) |\n";
    out << "|---|---|---|---|\n";
    for (const auto& s : input.sweeps) {
      out << fmt::format("| {} | {} | {} | {} |\n", display_name(s), mean_std_cell(s.summary.seen),
                         mean_std_cell(s.summary.unseen), mean_std_cell(s.summary.diff));
    }
    std::size_t skipped = 0;
    for (const auto& s : input.sweeps) skipped += s.skips.size();
    out << fmt::format("\nSkipped test folds: {} (see skips.csv)\n\n", skipped);
  }
  if (!input.models.empty()) {
    out << "## Topic models\n\n| Requested topics |";
    for (const auto& m : input.models) out << ' ' << m.requested_topics << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < input.models.size(); ++i) out << "---|";
    out << "\n| LSI topics |";
    for (const auto& m : input.models) out << ' ' << m.lsi_topics << " |";
    out << "\n| Tail topics |";
    for (const auto& m : input.models) out << ' ' << m.tails_before_merge << " |";
    out << "\n| Topics after merging |";
    for (const auto& m : input.models) out << ' ' << m.partition.m << " |";
    out << "\n\n";
  }
  if (input.sensitivity) {
    out << "## Topic sensitivity\n\n";
    out << "| Task | Random seen | Word-vector seen | Word-vector unseen | (a) seen - random | (b) seen - unseen |\n";
    out << "|---|---|---|---|---|---|\n";
    for (const auto& t : input.sensitivity->tasks) {
      out << fmt::format("| {} | {:.4f} | {:.4f} | {:.4f} | {:.4f} | {:.4f} |\n", t.task, t.random_seen,
                         t.glove_seen, t.glove_unseen, t.measure_a(), t.measure_b());
    }
    if (input.sensitivity->correlation) {
      out << fmt::format("\nCorrelation between (a) and (b): {:.4f}\n", *input.sensitivity->correlation);
    } else {
      out << "\nCorrelation between (a) and (b): undefined (constant measure)\n";
    }
  }
  finish(out, path);
}

}  // namespace

void emit_report(const ReportInput& input, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw RuntimeFailure(fmt::format("cannot create output directory '{}'", out_dir.string()));
  }
  if (!input.sweeps.empty()) {
    write_scores(input.sweeps, out_dir / "scores.csv");
    write_summary(input.sweeps, out_dir / "summary.csv");
    write_skips(input.sweeps, out_dir / "skips.csv");
  }
  if (input.sensitivity) write_sensitivity(*input.sensitivity, out_dir / "sensitivity.csv");
  write_markdown(input, out_dir / "report.md");
}

}  // namespace topicprobe
