#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace topicprobe {

// One-hidden-layer ReLU MLP trained with mini-batch Adam. Defaults follow the
// common reference MLP classifier.
struct ProbeConfig {
  int hidden_width = 100;
  double l2_penalty = 1e-4;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int max_batch_size = 200;  // effective batch = min(max_batch_size, n_train)
  int max_epochs = 200;
  double tol = 1e-4;
  int patience = 10;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t batch_size(std::size_t n_train) const;
};

struct ProbeParameters {
  Eigen::MatrixXd w_hidden;  // input_dim x hidden
  Eigen::VectorXd b_hidden;
  Eigen::MatrixXd w_out;     // hidden x classes
  Eigen::VectorXd b_out;

  // Glorot-uniform weights and biases, bound sqrt(6 / (fan_in + fan_out)).
  static ProbeParameters glorot(Eigen::Index input_dim, Eigen::Index hidden, Eigen::Index classes,
                                std::uint64_t seed);
  static ProbeParameters zeros(Eigen::Index input_dim, Eigen::Index hidden, Eigen::Index classes);

  double weight_norm() const;
  bool all_finite() const;
};

struct LossAndGradient {
  double loss = 0.0;
  ProbeParameters grad;
};

// Mean cross-entropy over the rows of x plus 0.5 * l2 * ||W||^2 / n
// (weights only), and its analytic gradient.
LossAndGradient loss_and_gradient(const ProbeParameters& params, const Eigen::MatrixXd& x,
                                  std::span<const int> y, double l2_penalty);

// Row-wise softmax of the output logits.
Eigen::MatrixXd forward_probabilities(const ProbeParameters& params, const Eigen::MatrixXd& x);

class TrainedProbe {
 public:
  TrainedProbe() = default;
  TrainedProbe(ProbeParameters params, std::vector<std::string> label_order, ProbeConfig config,
               std::vector<double> loss_curve);

  // m x c class probabilities; column order = label_order().
  Eigen::MatrixXd predict_scores(const Eigen::MatrixXd& x) const;

  const ProbeParameters& parameters() const { return params_; }
  const std::vector<std::string>& label_order() const { return label_order_; }
  const ProbeConfig& config() const { return config_; }
  const std::vector<double>& loss_curve() const { return loss_curve_; }
  Eigen::Index input_dim() const { return params_.w_hidden.rows(); }

  // Binary checkpoint: "TAPP", u32 version, u32-prefixed JSON (config,
  // labels, shapes, loss curve), then w_hidden, b_hidden, w_out, b_out as
  // row-major f32 LE.
  void save(const std::filesystem::path& path) const;
  static TrainedProbe load(const std::filesystem::path& path);

 private:
  ProbeParameters params_;
  std::vector<std::string> label_order_;
  ProbeConfig config_;
  std::vector<double> loss_curve_;
};

// y holds indices into label_order. Deterministic for a fixed config.seed.
TrainedProbe train_probe(const Eigen::MatrixXd& x, std::span<const int> y,
                         std::vector<std::string> label_order, const ProbeConfig& config);

struct GradientCheckOptions {
  double step = 1e-5;
  // Hidden pre-activations closer than this to 0 are pushed away by
  // shifting the unit's bias, keeping finite differences off the ReLU kink.
  double kink_margin = 1e-3;
};

// Max relative error |a - f| / max(|a| + |f|, 1e-6) between the analytic
// gradient and central finite differences, over every parameter of a
// freshly initialized probe.
double gradient_check(const ProbeConfig& config, const Eigen::MatrixXd& x, std::span<const int> y,
                      int num_classes, const GradientCheckOptions& options = {});

}  // namespace topicprobe
