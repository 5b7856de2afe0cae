// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <fmt/core.h>
#include <spdlog/spdlog.h>

#include <topicprobe/baselines.hpp>
#include <topicprobe/entropy.hpp>
#include <topicprobe/folds.hpp>
#include <topicprobe/lsi.hpp>
#include <topicprobe/metrics.hpp>
#include <topicprobe/partition.hpp>
#include <topicprobe/probe.hpp>
#include <topicprobe/random.hpp>
#include <topicprobe/runner.hpp>
#include <topicprobe/sensitivity.hpp>
#include <topicprobe/synth.hpp>
#include <topicprobe/text.hpp>

#include "oracles.hpp"
#include "published.hpp"

namespace {

using namespace topicprobe;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void check(const std::string& name, const std::function<Outcome()>& fn) {
  const auto start = Clock::now();
  Outcome out;
  try {
    out = fn();
  } catch (const std::exception& e) {
    out = {false, fmt::format("exception: {}", e.what())};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (!out.pass) ++failures;
  fmt::print("{} {} ({}; {:.1f}s)\n", out.pass ? "PASS" : "FAIL", name, out.detail, secs);
  std::fflush(stdout);
}

int worker_count() { return std::max(1, static_cast<int>(std::thread::hardware_concurrency())); }

// ---------------------------------------------------------------------------

Outcome entropy_fidelity() {
  const std::vector<double> pure{1.0, 0.0, 0.0};
  const std::vector<double> thirds{1.0 / 3, 1.0 / 3, 1.0 / 3};
  const std::vector<double> halves{0.5, 0.5, 0.0};
  const double a = normalized_entropy(pure);
  const double b = normalized_entropy(thirds);
  const double c = normalized_entropy(halves);
  const bool ok = std::abs(a - 0.0) <= 0.005 && std::abs(b - 1.0) <= 0.005 && std::abs(c - 0.63) <= 0.005;
  return {ok, fmt::format("{:.4f} {:.4f} {:.4f} vs 0 1 0.63, tol 0.005", a, b, c)};
}

Outcome auc_oracle() {
  const auto start = Clock::now();
  Rng rng(404);
  double worst = 0.0;
  int with_ties = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.below(59);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    const std::uint64_t grid = 2 + rng.below(8);  // coarse grids force ties
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = trial % 2 ? static_cast<double>(rng.below(grid)) / static_cast<double>(grid) : rng.uniform();
      labels[i] = static_cast<int>(rng.below(2));
    }
    labels[0] = 0;
    labels[1] = 1;
    if (std::set<double>(scores.begin(), scores.end()).size() < n) ++with_ties;
    worst = std::max(worst, std::abs(auc_roc_binary(scores, labels) - oracle::pairwise_auc(scores, labels)));
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  return {worst <= 1e-9 && secs < 10.0 && with_ties > 0,
          fmt::format("max |diff| {:.2e} over 500 instances ({} tied), {:.2f}s", worst, with_ties, secs)};
}

// m topics of `per_topic` records with balanced labels.
struct Toy {
  LabeledDataset dataset;
  EmbeddingMatrix embedding;
  TopicPartition partition;
};

Toy make_toy(int m, int per_topic, std::uint64_t seed) {
  Rng rng(seed);
  const std::uint32_t dim = 6;
  std::vector<SentenceRecord> records;
  std::vector<float> values;
  Toy toy;
  toy.partition.m = m;
  for (int t = 0; t < m; ++t) {
    for (int i = 0; i < per_topic; ++i) {
      const int label = i % 2;
      records.push_back({fmt::format("t{}-{}", t, i), fmt::format("topic {} row {}", t, i), label ? "a" : "b", {}});
      for (std::uint32_t j = 0; j < dim; ++j) {
        values.push_back(static_cast<float>(rng.normal() + (j == 0 ? label : 0) + (j == 1 ? 0.5 * t : 0.0)));
      }
      toy.partition.topic_of.push_back(t);
    }
  }
  toy.dataset = LabeledDataset::from_records(std::move(records));
  Manifest man;
  man.dataset_id = toy.dataset.fingerprint();
  man.source = "toy";
  man.dim = dim;
  man.count = toy.dataset.size();
  toy.embedding = EmbeddingMatrix(man, std::move(values));
  return toy;
}

Outcome score_counts() {
  ProbeConfig probe;
  probe.hidden_width = 8;
  probe.max_epochs = 10;
  std::string detail;
  bool ok = true;
  for (int m : {1, 2, 3, 8}) {
    const auto toy = make_toy(m, 20, static_cast<std::uint64_t>(m));
    const auto plan = plan_folds(toy.partition, toy.dataset.label_ids(), 2, 5, 1);
    const auto res =
        run_topic_aware_probe(toy.dataset, toy.embedding, toy.partition, plan, probe, 3, m, worker_count());
    std::size_t seen = 0, unseen = 0;
    for (const auto& r : res.records) (r.kind == ScoreKind::seen ? seen : unseen)++;
    const auto want_seen = static_cast<std::size_t>(m * 5);
    const auto want_unseen = static_cast<std::size_t>(m * 5 * (m - 1));
    ok = ok && res.skips.empty() && seen == want_seen && unseen == want_unseen;
    detail += fmt::format("{}m={}: {}/{} seen {}/{} unseen", detail.empty() ? "" : "; ", m, seen, want_seen,
                          unseen, want_unseen);
  }
  return {ok, detail};
}

// Independent pairing: each unseen record minus the seen record of the same
// probe (size, training topic, fold).
double pairing_average(const std::vector<ScoreRecord>& records) {
  std::map<std::tuple<int, int, int>, double> seen;
  for (const auto& r : records) {
    if (r.kind == ScoreKind::seen) seen[{r.topic_model_size, r.topic_id, r.fold}] = r.auc;
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : records) {
    if (r.kind != ScoreKind::unseen) continue;
    sum += seen.at({r.topic_model_size, r.topic_id, r.fold}) - r.auc;
    ++n;
  }
  return sum / static_cast<double>(n);
}

Outcome averaging_identity(const std::vector<ScoreRecord>& sweep_records) {
  // A fabricated complete table over three sizes plus the records of a real
  // synthetic sweep.
  Rng rng(77);
  std::vector<ScoreRecord> table;
  for (auto [size, m] : {std::pair{5, 3}, std::pair{10, 6}, std::pair{15, 9}}) {
    for (int t = 0; t < m; ++t) {
      for (int f = 0; f < 5; ++f) {
        table.push_back({size, t, t, f, ScoreKind::seen, rng.uniform(), 10});
        for (int u = 0; u < m; ++u) {
          if (u != t) table.push_back({size, t, u, f, ScoreKind::unseen, rng.uniform(), 10});
        }
      }
    }
  }
  const std::vector<ScoreRecord>& fabricated = table;
  double worst = 0.0;
  for (const auto* recs : {&fabricated, &sweep_records}) {
    if (recs->empty()) return {false, "no sweep records to check"};
    worst = std::max(worst, std::abs(summarize(*recs).diff.mean - pairing_average(*recs)));
    // Within a single size the difference of averages is the average of
    // differences.
    std::map<int, std::vector<ScoreRecord>> by_size;
    for (const auto& r : *recs) by_size[r.topic_model_size].push_back(r);
    for (const auto& [size, rs] : by_size) {
      const auto s = summarize(rs);
      worst = std::max(worst, std::abs(s.diff.mean - (s.seen.mean - s.unseen.mean)));
    }
  }
  return {worst <= 1e-12, fmt::format("max deviation {:.2e}, tol 1e-12", worst)};
}

Outcome tail_merge() {
  Rng rng(5150);
  int bad = 0;
  std::size_t max_merges = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n_topics = 1 + static_cast<int>(rng.below(40));
    const int n_labels = 2 + static_cast<int>(rng.below(3));
    const std::size_t n = 40 + rng.below(500);
    std::vector<int> topics(n), labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      topics[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_topics)));
      labels[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_labels)));
    }
    for (int l = 0; l < n_labels; ++l) {
      for (int k = 0; k < 5; ++k) labels[static_cast<std::size_t>(l * 5 + k)] = l;
    }
    const auto p = merge_tail_topics(topics, labels, n_labels, 5, rng.next());
    const std::set<int> initial(topics.begin(), topics.end());

    // Recount labels per output topic without the library helpers.
    std::map<int, std::map<int, std::size_t>> counts;
    for (std::size_t i = 0; i < n; ++i) ++counts[p.topic_of[i]][labels[i]];
    bool any_tail = false;
    std::size_t total = 0;
    for (const auto& [t, per_label] : counts) {
      for (int l = 0; l < n_labels; ++l) {
        const auto it = per_label.find(l);
        if (it == per_label.end() || it->second < 5) any_tail = true;
      }
      for (const auto& [l, c] : per_label) total += c;
    }
    const bool ok = !any_tail && total == n && p.topic_of.size() == n &&
                    p.merge_log.size() <= initial.size() - 1 && static_cast<int>(counts.size()) == p.m;
    if (!ok) ++bad;
    max_merges = std::max(max_merges, p.merge_log.size());
  }
  return {bad == 0, fmt::format("{} of 200 partitions violate the contract, most merges {}", bad, max_merges)};
}

Outcome stratification() {
  Rng rng(8080);
  int bad = 0;
  std::size_t worst_spread = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(10));
    const int n_labels = 2 + static_cast<int>(rng.below(3));
    const int k = 2 + static_cast<int>(rng.below(9));
    TopicPartition p;
    p.m = m;
    std::vector<int> labels;
    for (int t = 0; t < m; ++t) {
      for (int l = 0; l < n_labels; ++l) {
        const std::size_t count = static_cast<std::size_t>(k) + rng.below(40);
        for (std::size_t i = 0; i < count; ++i) {
          p.topic_of.push_back(t);
          labels.push_back(l);
        }
      }
    }
    // Shuffle row order so fold assignment cannot lean on contiguity.
    std::vector<std::size_t> perm(labels.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    rng.shuffle(std::span<std::size_t>(perm));
    TopicPartition shuffled = p;
    std::vector<int> shuffled_labels(labels.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      shuffled.topic_of[i] = p.topic_of[perm[i]];
      shuffled_labels[i] = labels[perm[i]];
    }
    const auto plan = plan_folds(shuffled, shuffled_labels, n_labels, k, rng.next());
    std::map<std::pair<int, int>, std::vector<std::size_t>> per_cell;
    for (std::size_t i = 0; i < plan.fold_of.size(); ++i) {
      auto& v = per_cell[{shuffled.topic_of[i], shuffled_labels[i]}];
      v.resize(static_cast<std::size_t>(k));
      ++v[static_cast<std::size_t>(plan.fold_of[i])];
    }
    bool ok = plan.fold_of.size() == labels.size();
    for (const auto& [cell, folds] : per_cell) {
      const auto [lo, hi] = std::minmax_element(folds.begin(), folds.end());
      worst_spread = std::max(worst_spread, *hi - *lo);
      if (*hi - *lo > 1) ok = false;
    }
    if (!ok) ++bad;
  }
  return {bad == 0, fmt::format("{} of 200 plans violate, widest per-label spread {}", bad, worst_spread)};
}

struct SyntheticOutcome {
  Outcome outcome;
  std::vector<ScoreRecord> records;  // corr 0.9 synthetic sweep
};

std::vector<SweepResult> sweep_synthetic(const SyntheticCorpus& corpus, std::vector<EmbeddingMatrix> extra) {
  std::vector<std::string> texts;
  texts.reserve(corpus.dataset.size());
  for (const auto& r : corpus.dataset.records()) texts.push_back(r.text);
  const auto prepared = prepare_corpus(texts);
  SweepOptions opts;
  opts.seed = 0;
  opts.jobs = worker_count();
  const auto models = build_topic_models(corpus.dataset, prepared, opts);
  std::vector<EmbeddingMatrix> embeddings{corpus.embeddings};
  for (auto& e : extra) embeddings.push_back(std::move(e));
  return run_sweep(corpus.dataset, embeddings, models, opts);
}

SyntheticOutcome synthetic_validation() {
  const auto start = Clock::now();
  SynthSpec spec;  // 8 topics x 200 samples, dim 64
  spec.topic_label_corr = 0.9;
  const auto planted = generate_synthetic(spec);
  auto random = random_embeddings(planted.dataset.size(), 64, 7, planted.dataset.fingerprint());
  const auto with_topic = sweep_synthetic(planted, {std::move(random)});

  spec.topic_label_corr = 0.0;
  const auto flat = sweep_synthetic(generate_synthetic(spec), {});
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();

  const auto& s9 = with_topic[0].summary;
  const auto& rnd = with_topic[1].summary;
  const auto& s0 = flat[0].summary;
  const bool ok = s9.diff.mean >= 0.05 && std::abs(s0.diff.mean) <= 0.02 && rnd.seen.mean >= 0.45 &&
                  rnd.seen.mean <= 0.55 && rnd.unseen.mean >= 0.45 && rnd.unseen.mean <= 0.55 && secs < 300.0;
  return {{ok, fmt::format("corr 0.9 seen {:.4f} unseen {:.4f} diff {:.4f} (>= 0.05); corr 0 diff {:.4f} "
                           "(|.| <= 0.02); random seen {:.4f} unseen {:.4f} (in [0.45, 0.55]); {:.0f}s (< 300s)",
                           s9.seen.mean, s9.unseen.mean, s9.diff.mean, s0.diff.mean, rnd.seen.mean,
                           rnd.unseen.mean, secs)},
          with_topic[0].records};
}

Outcome probe_gates() {
  Rng rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.below(7));
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.below(5));
    const int classes = 2 + static_cast<int>(rng.below(2));
    Eigen::MatrixXd x(n, d);
    std::vector<int> y(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) x(i, j) = rng.uniform(-1.0, 1.0);
      y[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(static_cast<std::uint64_t>(classes)));
    }
    ProbeConfig cfg;
    cfg.hidden_width = 1 + static_cast<int>(rng.below(6));
    cfg.seed = rng.next();
    worst = std::max(worst, gradient_check(cfg, x, y, classes));
  }

  // Two well separated Gaussian blobs.
  Eigen::MatrixXd x(200, 10);
  std::vector<int> y(200);
  for (Eigen::Index i = 0; i < 200; ++i) {
    const int c = static_cast<int>(i % 2);
    y[static_cast<std::size_t>(i)] = c;
    for (Eigen::Index j = 0; j < 10; ++j) x(i, j) = rng.normal() + (j % 2 == c ? 4.0 : 0.0);
  }
  ProbeConfig cfg;
  cfg.seed = 17;
  const auto a = train_probe(x, y, {"neg", "pos"}, cfg);
  const auto b = train_probe(x, y, {"neg", "pos"}, cfg);
  const Eigen::MatrixXd p = a.predict_scores(x);
  const std::vector<double> pos(p.col(1).data(), p.col(1).data() + p.rows());
  const double auc = auc_roc_binary(pos, y);
  const auto& pa = a.parameters();
  const auto& pb = b.parameters();
  const bool identical = pa.w_hidden == pb.w_hidden && pa.b_hidden == pb.b_hidden && pa.w_out == pb.w_out &&
                         pa.b_out == pb.b_out && a.loss_curve() == b.loss_curve();
  return {worst < 1e-4 && auc == 1.0 && identical,
          fmt::format("gradient check max {:.2e} (< 1e-4); blob training AUC {:.6f}; rerun {}", worst, auc,
                      identical ? "bit-identical" : "differs")};
}

std::vector<SparseDocVector> to_sparse(const oracle::Dense& m) {
  std::vector<SparseDocVector> docs(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) {
      if (m(i, j) != 0.0) docs[i].push_back({j, m(i, j)});
    }
  }
  return docs;
}

Outcome lsi_fidelity() {
  Rng rng(31337);
  double worst = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t rows = trial == 0 ? 50 : 2 + rng.below(49);
    const std::size_t cols = trial == 0 ? 50 : 2 + rng.below(49);
    oracle::Dense m{rows, cols, std::vector<double>(rows * cols, 0.0)};
    const double density = 0.3 + 0.7 * rng.uniform();
    for (auto& v : m.a) {
      if (rng.uniform() < density) v = rng.uniform();
    }
    const auto expected = oracle::jacobi_singular_values(m);
    const auto model = fit_lsi(to_sparse(m), cols, static_cast<int>(std::min(rows, cols)), 1);
    for (std::size_t j = 0; j < expected.size(); ++j) {
      const double got = j < static_cast<std::size_t>(model.n_topics()) ? model.singular_values(static_cast<Eigen::Index>(j)) : 0.0;
      worst = std::max(worst, std::abs(got - expected[j]));
    }
  }

  double min_purity = 1.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng r(1000 + seed);
    std::vector<SparseDocVector> docs;
    std::vector<int> truth;
    for (int c = 0; c < 3; ++c) {
      for (int d = 0; d < 60; ++d) {
        std::map<std::size_t, double> bag;
        for (int w = 0; w < 8; ++w) bag[static_cast<std::size_t>(c * 30) + r.below(30)] += 1.0;
        double norm = 0.0;
        for (const auto& [t, v] : bag) norm += v * v;
        SparseDocVector doc;
        for (const auto& [t, v] : bag) doc.push_back({t, v / std::sqrt(norm)});
        docs.push_back(std::move(doc));
        truth.push_back(c);
      }
    }
    const auto assigned = assign_topics(fit_lsi(docs, 90, 3, seed), docs);
    std::map<int, std::map<int, int>> joint;
    for (std::size_t i = 0; i < truth.size(); ++i) ++joint[assigned[i]][truth[i]];
    int hit = 0;
    for (const auto& [k, row] : joint) {
      int best = 0;
      for (const auto& [t, n] : row) best = std::max(best, n);
      hit += best;
    }
    min_purity = std::min(min_purity, static_cast<double>(hit) / static_cast<double>(truth.size()));
  }
  return {worst <= 1e-6 && min_purity >= 0.95,
          fmt::format("singular value max |diff| {:.2e} (<= 1e-6) on 40 matrices up to 50x50; "
                      "planted purity min {:.3f} (>= 0.95)",
                      worst, min_purity)};
}

Outcome sensitivity_replay() {
  std::vector<TaskSensitivity> tasks;
  for (const auto& row : published::kProbingTasks) {
    tasks.push_back({row.task, row.glove_seen, row.glove_unseen, row.random_seen});
  }
  const auto r = compute_sensitivity(tasks);
  if (!r.correlation) return {false, "correlation undefined"};
  return {std::abs(*r.correlation - published::kReportedCorrelation) <= 0.01,
          fmt::format("correlation {:.4f} vs {:.2f} +/- 0.01", *r.correlation, published::kReportedCorrelation)};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);

  check("entropy fidelity", entropy_fidelity);
  check("AUC oracle equivalence", auc_oracle);
  check("score-count identity", score_counts);

  SyntheticOutcome synthetic;
  try {
    synthetic = synthetic_validation();
  } catch (const std::exception& e) {
    synthetic.outcome = {false, fmt::format("exception: {}", e.what())};
  }
  check("averaging identity", [&] { return averaging_identity(synthetic.records); });
  check("tail-merge contract", tail_merge);
  check("stratification", stratification);
  check("synthetic methodology validation", [&] { return synthetic.outcome; });
  check("probe quality gates", probe_gates);
  check("LSI fidelity", lsi_fidelity);
  check("sensitivity correlation replay", sensitivity_replay);

  fmt::print("{} criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
