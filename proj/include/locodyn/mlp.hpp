#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace locodyn {

// Fully connected bottleneck regressor mapping motion-window features
// (flattened gamma_q, l_sub, total mass -> 104) to force/torque coefficients
// (gamma_f 48 + gamma_tau 36 -> 84). Five weight layers, Leaky-ReLU between
// them, linear output. Inputs are z-scored and outputs de-normalized with
// statistics frozen from the training set.
struct MlpConfig {
  std::vector<int> sizes{104, 32, 16, 16, 32, 84};
  double leaky_slope = 0.01;
};

struct Mlp {
  MlpConfig cfg;
  std::vector<Eigen::MatrixXd> weights;  // out x in per layer
  std::vector<Eigen::VectorXd> biases;
  Eigen::VectorXd in_mean, in_std;    // feature normalization
  Eigen::VectorXd out_mean, out_std;  // output de-normalization

  int num_layers() const { return static_cast<int>(weights.size()); }
  int input_dim() const { return cfg.sizes.front(); }
  int output_dim() const { return cfg.sizes.back(); }
  int param_count() const;
};

Mlp net_init(uint64_t seed, const MlpConfig& cfg = {});

// Normalization statistics from training data (rows = samples).
void fit_normalization(Mlp& net, const Eigen::MatrixXd& inputs,
                       const Eigen::MatrixXd& outputs);

struct MlpCache {
  Eigen::VectorXd input_norm;
  std::vector<Eigen::VectorXd> pre;   // pre-activations per layer
  std::vector<Eigen::VectorXd> act;   // post-activations per layer
  bool valid = false;
};

Eigen::VectorXd net_forward(const Mlp& net, const Eigen::VectorXd& input);
Eigen::VectorXd net_forward_cached(const Mlp& net, const Eigen::VectorXd& input,
                                   MlpCache& cache);

struct MlpGrad {
  std::vector<Eigen::MatrixXd> dW;
  std::vector<Eigen::VectorXd> db;

  void init_like(const Mlp& net);
  void set_zero();
  void add(const MlpGrad& other, double scale = 1.0);
  double squared_norm() const;
};

// Accumulates parameter gradients for upstream dL/d(denormalized output).
void net_backward(const Mlp& net, const MlpCache& cache,
                  const Eigen::VectorXd& dL_dout, MlpGrad& grad);

// SGD with momentum and global gradient-norm clipping.
struct SgdOptimizer {
  double learning_rate = 1e-3;
  double momentum = 0.9;
  double clip_norm = 10.0;
  MlpGrad velocity;
  bool initialized = false;

  void step(Mlp& net, const MlpGrad& grad);
};

void save_checkpoint(const Mlp& net, const std::string& path);
Mlp load_checkpoint(const std::string& path);

}  // namespace locodyn
