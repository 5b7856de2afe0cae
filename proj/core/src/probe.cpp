#include "topicprobe/probe.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>

#include <fmt/format.h>
#include <json.hpp>

#include "topicprobe/error.hpp"
#include "topicprobe/random.hpp"

namespace topicprobe {

using nlohmann::json;

void ProbeConfig::validate() const {
  if (hidden_width < 1) throw ValidationError("hidden_width must be positive");
  if (!(l2_penalty >= 0.0)) throw ValidationError("l2_penalty must be non-negative");
  if (!(learning_rate > 0.0)) throw ValidationError("learning_rate must be positive");
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0) || !(adam_beta2 > 0.0 && adam_beta2 < 1.0)) {
    throw ValidationError("Adam betas must lie in (0, 1)");
  }
  if (!(adam_epsilon > 0.0)) throw ValidationError("adam_epsilon must be positive");
  if (max_batch_size < 1) throw ValidationError("batch size must be positive");
  if (max_epochs < 1) throw ValidationError("max_epochs must be positive");
  if (!(tol > 0.0)) throw ValidationError("tol must be positive");
  if (patience < 1) throw ValidationError("patience must be >= 1");
}

std::size_t ProbeConfig::batch_size(std::size_t n_train) const {
  return std::min<std::size_t>(static_cast<std::size_t>(max_batch_size), n_train);
}

ProbeParameters ProbeParameters::glorot(Eigen::Index input_dim, Eigen::Index hidden, Eigen::Index classes,
                                        std::uint64_t seed) {
  Rng rng(seed);
  auto fill = [&rng](Eigen::Index fan_in, Eigen::Index fan_out, Eigen::MatrixXd& w, Eigen::VectorXd& b) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    w.resize(fan_in, fan_out);
    b.resize(fan_out);
    for (Eigen::Index i = 0; i < fan_in; ++i) {
      for (Eigen::Index j = 0; j < fan_out; ++j) w(i, j) = rng.uniform(-bound, bound);
    }
    for (Eigen::Index j = 0; j < fan_out; ++j) b(j) = rng.uniform(-bound, bound);
  };
  ProbeParameters p;
  fill(input_dim, hidden, p.w_hidden, p.b_hidden);
  fill(hidden, classes, p.w_out, p.b_out);
  return p;
}

ProbeParameters ProbeParameters::zeros(Eigen::Index input_dim, Eigen::Index hidden, Eigen::Index classes) {
  return {Eigen::MatrixXd::Zero(input_dim, hidden), Eigen::VectorXd::Zero(hidden),
          Eigen::MatrixXd::Zero(hidden, classes), Eigen::VectorXd::Zero(classes)};
}

double ProbeParameters::weight_norm() const {
  return std::sqrt(w_hidden.squaredNorm() + w_out.squaredNorm());
}

bool ProbeParameters::all_finite() const {
  return w_hidden.allFinite() && b_hidden.allFinite() && w_out.allFinite() && b_out.allFinite();
}

namespace {

void softmax_rows(Eigen::MatrixXd& logits) {
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double mx = logits.row(i).maxCoeff();
    logits.row(i) = (logits.row(i).array() - mx).exp();
    logits.row(i) /= logits.row(i).sum();
  }
}

void check_labels(std::span<const int> y, Eigen::Index classes) {
  for (int label : y) {
    if (label < 0 || label >= classes) {
      throw ValidationError(fmt::format("label index {} outside 0..{}", label, classes - 1));
    }
  }
}

struct AdamState {
  ProbeParameters m;
  ProbeParameters v;
  long step = 0;
};

template <typename Param, typename Grad>
void adam_update(Param& p, const Grad& g, Param& m, Param& v, double beta1, double beta2, double lr_t,
                 double eps) {
  m = beta1 * m + (1.0 - beta1) * g;
  v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
  p.array() -= lr_t * m.array() / (v.array().sqrt() + eps);
}

}  // namespace

Eigen::MatrixXd forward_probabilities(const ProbeParameters& params, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd hidden = ((x * params.w_hidden).rowwise() + params.b_hidden.transpose()).cwiseMax(0.0);
  Eigen::MatrixXd out = (hidden * params.w_out).rowwise() + params.b_out.transpose();
  softmax_rows(out);
  return out;
}

LossAndGradient loss_and_gradient(const ProbeParameters& params, const Eigen::MatrixXd& x,
                                  std::span<const int> y, double l2_penalty) {
  const Eigen::Index n = x.rows();
  const Eigen::Index classes = params.w_out.cols();
  check_labels(y, classes);
  const double inv_n = 1.0 / static_cast<double>(n);

  const Eigen::MatrixXd pre = (x * params.w_hidden).rowwise() + params.b_hidden.transpose();
  const Eigen::MatrixXd hidden = pre.cwiseMax(0.0);
  Eigen::MatrixXd prob = (hidden * params.w_out).rowwise() + params.b_out.transpose();
  softmax_rows(prob);

  LossAndGradient out;
  double ce = 0.0;
  constexpr double kFloor = 1e-300;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto label = static_cast<Eigen::Index>(y[static_cast<std::size_t>(i)]);
    ce -= std::log(std::max(prob(i, label), kFloor));
    prob(i, label) -= 1.0;  // prob now holds the residual P - Y
  }
  out.loss = ce * inv_n + 0.5 * l2_penalty * inv_n * (params.w_hidden.squaredNorm() + params.w_out.squaredNorm());

  const Eigen::MatrixXd d_out = prob * inv_n;
  out.grad.w_out = hidden.transpose() * d_out + (l2_penalty * inv_n) * params.w_out;
  out.grad.b_out = d_out.colwise().sum().transpose();
  const Eigen::MatrixXd d_hidden = (d_out * params.w_out.transpose()).cwiseProduct(
      (pre.array() > 0.0).cast<double>().matrix());
  out.grad.w_hidden = x.transpose() * d_hidden + (l2_penalty * inv_n) * params.w_hidden;
  out.grad.b_hidden = d_hidden.colwise().sum().transpose();
  return out;
}

TrainedProbe::TrainedProbe(ProbeParameters params, std::vector<std::string> label_order, ProbeConfig config,
                           std::vector<double> loss_curve)
    : params_(std::move(params)),
      label_order_(std::move(label_order)),
      config_(config),
      loss_curve_(std::move(loss_curve)) {}

Eigen::MatrixXd TrainedProbe::predict_scores(const Eigen::MatrixXd& x) const {
  if (x.cols() != input_dim()) {
    throw ValidationError(fmt::format("probe expects {} features, got {}", input_dim(), x.cols()));
  }
  return forward_probabilities(params_, x);
}

TrainedProbe train_probe(const Eigen::MatrixXd& x, std::span<const int> y, std::vector<std::string> label_order,
                         const ProbeConfig& config) {
  config.validate();
  const auto n = static_cast<std::size_t>(x.rows());
  const auto classes = static_cast<Eigen::Index>(label_order.size());
  if (n < 2) throw ValidationError("need at least 2 training examples");
  if (y.size() != n) throw ValidationError(fmt::format("{} rows but {} labels", n, y.size()));
  if (classes < 2) throw ValidationError("need at least 2 classes");
  check_labels(y, classes);
  if (std::all_of(y.begin(), y.end(), [&](int v) { return v == y[0]; })) {
    throw ValidationError("training labels contain a single class");
  }
  if (!x.allFinite()) throw ValidationError("training inputs contain non-finite values");

  const std::uint64_t init_seed = derive_seed(config.seed, {1});
  Rng shuffle_rng(derive_seed(config.seed, {2}));
  ProbeParameters params = ProbeParameters::glorot(x.cols(), config.hidden_width, classes, init_seed);
  AdamState adam{ProbeParameters::zeros(x.cols(), config.hidden_width, classes),
                 ProbeParameters::zeros(x.cols(), config.hidden_width, classes), 0};

  const std::size_t batch = config.batch_size(n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> curve;
  double best = std::numeric_limits<double>::infinity();
  int stale = 0;
  Eigen::MatrixXd xb;
  std::vector<int> yb;

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    shuffle_rng.shuffle(std::span(order));
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t len = std::min(batch, n - start);
      xb.resize(static_cast<Eigen::Index>(len), x.cols());
      yb.resize(len);
      for (std::size_t r = 0; r < len; ++r) {
        xb.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(order[start + r]));
        yb[r] = y[order[start + r]];
      }
      const LossAndGradient lg = loss_and_gradient(params, xb, yb, config.l2_penalty);
      epoch_loss += lg.loss * static_cast<double>(len);

      ++adam.step;
      const double t = static_cast<double>(adam.step);
      const double lr_t = config.learning_rate * std::sqrt(1.0 - std::pow(config.adam_beta2, t)) /
                          (1.0 - std::pow(config.adam_beta1, t));
      const double b1 = config.adam_beta1;
      const double b2 = config.adam_beta2;
      const double eps = config.adam_epsilon;
      adam_update(params.w_hidden, lg.grad.w_hidden, adam.m.w_hidden, adam.v.w_hidden, b1, b2, lr_t, eps);
      adam_update(params.b_hidden, lg.grad.b_hidden, adam.m.b_hidden, adam.v.b_hidden, b1, b2, lr_t, eps);
      adam_update(params.w_out, lg.grad.w_out, adam.m.w_out, adam.v.w_out, b1, b2, lr_t, eps);
      adam_update(params.b_out, lg.grad.b_out, adam.m.b_out, adam.v.b_out, b1, b2, lr_t, eps);
    }
    epoch_loss /= static_cast<double>(n);
    curve.push_back(epoch_loss);
    if (!std::isfinite(epoch_loss)) throw RuntimeFailure(fmt::format("training diverged at epoch {}", epoch));

    stale = epoch_loss > best - config.tol ? stale + 1 : 0;
    best = std::min(best, epoch_loss);
    if (stale >= config.patience) break;
  }
  return TrainedProbe(std::move(params), std::move(label_order), config, std::move(curve));
}

double gradient_check(const ProbeConfig& config, const Eigen::MatrixXd& x, std::span<const int> y,
                      int num_classes, const GradientCheckOptions& options) {
  ProbeParameters params =
      ProbeParameters::glorot(x.cols(), config.hidden_width, num_classes, derive_seed(config.seed, {1}));

  for (Eigen::Index j = 0; j < params.b_hidden.size(); ++j) {
    for (int guard = 0; guard < 1000; ++guard) {
      const Eigen::VectorXd pre = (x * params.w_hidden.col(j)).array() + params.b_hidden(j);
      if (pre.cwiseAbs().minCoeff() >= options.kink_margin) break;
      params.b_hidden(j) += 3.0 * options.kink_margin;
    }
  }

  const LossAndGradient analytic = loss_and_gradient(params, x, y, config.l2_penalty);
  double worst = 0.0;
  auto probe_block = [&](auto& block, const auto& grad_block) {
    for (Eigen::Index i = 0; i < block.size(); ++i) {
      const double saved = block.data()[i];
      block.data()[i] = saved + options.step;
      const double up = loss_and_gradient(params, x, y, config.l2_penalty).loss;
      block.data()[i] = saved - options.step;
      const double down = loss_and_gradient(params, x, y, config.l2_penalty).loss;
      block.data()[i] = saved;
      const double numeric = (up - down) / (2.0 * options.step);
      const double a = grad_block.data()[i];
      worst = std::max(worst, std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), 1e-6));
    }
  };
  probe_block(params.w_hidden, analytic.grad.w_hidden);
  probe_block(params.b_hidden, analytic.grad.b_hidden);
  probe_block(params.w_out, analytic.grad.w_out);
  probe_block(params.b_out, analytic.grad.b_out);
  return worst;
}

namespace {

constexpr std::array<char, 4> kProbeMagic{'T', 'A', 'P', 'P'};
constexpr std::uint32_t kProbeVersion = 1;

json config_to_json(const ProbeConfig& c) {
  return {{"hidden_width", c.hidden_width}, {"l2_penalty", c.l2_penalty},
          {"learning_rate", c.learning_rate}, {"adam_beta1", c.adam_beta1},
          {"adam_beta2", c.adam_beta2},       {"adam_epsilon", c.adam_epsilon},
          {"max_batch_size", c.max_batch_size}, {"max_epochs", c.max_epochs},
          {"tol", c.tol},                     {"patience", c.patience},
          {"seed", c.seed}};
}

ProbeConfig config_from_json(const json& j) {
  ProbeConfig c;
  c.hidden_width = j.at("hidden_width").get<int>();
  c.l2_penalty = j.at("l2_penalty").get<double>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.adam_beta1 = j.at("adam_beta1").get<double>();
  c.adam_beta2 = j.at("adam_beta2").get<double>();
  c.adam_epsilon = j.at("adam_epsilon").get<double>();
  c.max_batch_size = j.at("max_batch_size").get<int>();
  c.max_epochs = j.at("max_epochs").get<int>();
  c.tol = j.at("tol").get<double>();
  c.patience = j.at("patience").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

template <typename Derived>
void write_f32(std::ostream& out, const Eigen::DenseBase<Derived>& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const auto v = static_cast<float>(m(i, j));
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  }
}

template <typename Derived>
void read_f32(std::istream& in, Eigen::DenseBase<Derived>& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      float v;
      if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw ValidationError("truncated probe checkpoint");
      m(i, j) = v;
    }
  }
}

}  // namespace

void TrainedProbe::save(const std::filesystem::path& path) const {
  static_assert(std::endian::native == std::endian::little);
  const json meta = {{"config", config_to_json(config_)},
                     {"labels", label_order_},
                     {"input_dim", params_.w_hidden.rows()},
                     {"hidden", params_.w_hidden.cols()},
                     {"loss_curve", loss_curve_}};
  const std::string blob = meta.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure(fmt::format("cannot write '{}'", path.string()));
  out.write(kProbeMagic.data(), 4);
  out.write(reinterpret_cast<const char*>(&kProbeVersion), 4);
  const auto len = static_cast<std::uint32_t>(blob.size());
  out.write(reinterpret_cast<const char*>(&len), 4);
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  write_f32(out, params_.w_hidden);
  write_f32(out, params_.b_hidden);
  write_f32(out, params_.w_out);
  write_f32(out, params_.b_out);
  if (!out) throw RuntimeFailure(fmt::format("write to '{}' failed", path.string()));
}

TrainedProbe TrainedProbe::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(fmt::format("cannot open probe checkpoint '{}'", path.string()));
  std::array<char, 4> magic{};
  std::uint32_t version = 0;
  std::uint32_t len = 0;
  in.read(magic.data(), 4);
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&len), 4);
  if (!in || magic != kProbeMagic) throw ValidationError("not a probe checkpoint");
  if (version != kProbeVersion) throw ValidationError(fmt::format("unsupported checkpoint version {}", version));
  std::string blob(len, '\0');
  if (!in.read(blob.data(), len)) throw ValidationError("truncated probe checkpoint");
  json meta;
  try {
    meta = json::parse(blob);
    const ProbeConfig config = config_from_json(meta.at("config"));
    auto labels = meta.at("labels").get<std::vector<std::string>>();
    const auto input_dim = meta.at("input_dim").get<Eigen::Index>();
    const auto hidden = meta.at("hidden").get<Eigen::Index>();
    ProbeParameters p = ProbeParameters::zeros(input_dim, hidden, static_cast<Eigen::Index>(labels.size()));
    read_f32(in, p.w_hidden);
    read_f32(in, p.b_hidden);
    read_f32(in, p.w_out);
    read_f32(in, p.b_out);
    return TrainedProbe(std::move(p), std::move(labels), config, meta.at("loss_curve").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("invalid probe checkpoint metadata: {}", e.what()));
  }
}

}  // namespace topicprobe
