#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "locodyn/dataset.hpp"
#include "locodyn/forward_layer.hpp"
#include "locodyn/inverse_layer.hpp"
#include "locodyn/mlp.hpp"

namespace locodyn {

enum class TrainMode { baseline, F, cFI, transfer_F, transfer_cFI };

TrainMode parse_train_mode(const std::string& name);
std::string train_mode_name(TrainMode mode);

struct LossWeights {
  double mse = 1.0;
  double forward = 1.0;
  double inverse = 1.0;
  double contact = 1.0;
};

struct TrainConfig {
  TrainMode mode = TrainMode::baseline;
  int epochs = 120;
  int batch_size = 16;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  double clip_norm = 10.0;
  uint64_t seed = 1;
  // Caps on dynamics-layer batches per epoch (they dominate the runtime).
  int motion_batches_per_epoch = 8;
  int contact_batches_per_epoch = 6;
  bool mirror_augment = false;
  double val_fraction = 0.25;         // subject-wise validation share
  int val_motion_windows = 24;        // cap for validation forward loss
  double weight_floor = 1e-4;
  double weight_ceiling = 1e4;
  double alpha = 1.0;                 // damping-penalty weight in the forward loss
  double damping_k = 10.0;
  double sigma_floor = 1e-6;
  bool include_gyroscopic = false;    // inverse layer moment balance
  MlpConfig net;
  std::string anthropometry_path;
  int threads = 0;

  void validate() const;
};

struct EpochReport {
  int epoch = 0;
  std::map<std::string, double> loss_averages;  // per active loss kind
  std::map<std::string, int> batch_counts;
  LossWeights weights;          // weights that were in effect this epoch
  double val_total = 0.0;       // weighted validation loss
  int skipped_samples = 0;      // diverged forward windows
};

struct TrainResult {
  Mlp net;                        // best checkpoint by validation loss
  std::vector<EpochReport> epochs;
  Eigen::VectorXd sigma_xdot;     // damping statistics used for the layers
  int best_epoch = -1;
};

// ---- loss building blocks --------------------------------------------------

// Eq.-style supervised loss: squared L2 on coefficient vectors, gamma_tau
// term dropped when the sample has no torque labels. Mean over the batch is
// taken by the caller.
double loss_mse(const Eigen::VectorXd& pred_gamma_f,
                const Eigen::VectorXd& pred_gamma_tau,
                const Eigen::VectorXd& true_gamma_f,
                const Eigen::VectorXd* true_gamma_tau,
                Eigen::VectorXd* grad_f = nullptr,
                Eigen::VectorXd* grad_tau = nullptr);

// Penalizes predicted GRF/M on frames whose foot is not in contact:
// mean over penalized foot-frames of the squared 6-component block norm.
double loss_contact(const PolyCoeffs& pred_gamma_f,
                    const std::vector<ContactFrame>& contact,
                    Eigen::VectorXd* grad_gamma_f = nullptr);

// ---- adaptive weighting ----------------------------------------------------

// Sets each auxiliary weight so weight * average == anchor average; the
// anchor (mse when observed, else forward) keeps weight 1.
LossWeights update_adaptive_weights(const LossWeights& current,
                                    const std::map<std::string, double>& averages,
                                    double floor, double ceiling);

// ---- torque preprocessing (forward-dynamics optimization) ------------------

struct TorqueOptConfig {
  int max_iters = 30;
  double rmse_threshold = 0.05;  // state RMSE acceptance
  std::string method = "lm";     // "lm" | "gd"
  double lm_lambda_init = 1e-3;
  double gd_learning_rate = 1e-2;
  int gd_iters = 400;
};

struct TorqueOptResult {
  bool success = false;
  PolyCoeffs gamma_tau;
  double state_rmse = 0.0;
  double loss = 0.0;
  int iters = 0;
};

TorqueOptResult optimize_torques(const BodyModel& model,
                                 const Eigen::MatrixXd& x_true,  // nx x n targets
                                 const Eigen::VectorXd& x0, const PolyCoeffs& gamma_f,
                                 const Eigen::VectorXd& m_xdot, double dt,
                                 const DampingConfig& damping,
                                 const TorqueOptConfig& cfg,
                                 const PolyCoeffs* init = nullptr);

// Convenience: targets evaluated from the sample's motion polynomial.
TorqueOptResult optimize_torques(const BodyModel& model, const WindowSample& sample,
                                 const DampingConfig& damping,
                                 const TorqueOptConfig& cfg,
                                 const PolyCoeffs* init = nullptr);

// ---- training --------------------------------------------------------------

TrainResult train(const Dataset& dataset, const AnthropometryConfig& anthro,
                  const TrainConfig& cfg);

// Fine-tuning with motion-only losses on the target set (transfer_F /
// transfer_cFI): no ground-reaction or torque supervision is consumed.
TrainResult run_transfer(const Mlp& pretrained, const Dataset& target,
                         const AnthropometryConfig& anthro, const TrainConfig& cfg);

// Shared helpers.
BodyModel model_for_sample(const WindowSample& sample,
                           const AnthropometryConfig& anthro);
void predict_window(const Mlp& net, const WindowSample& sample, PolyCoeffs& gamma_f,
                    PolyCoeffs& gamma_tau);

}  // namespace locodyn
