#pragma once

#include <Eigen/Dense>
#include <vector>

#include "locodyn/dynamics.hpp"
#include "locodyn/trajectory.hpp"

namespace locodyn {

// Input of one forward-dynamics window: initial state plus either polynomial
// force/torque coefficients (evaluated per step inside the layer) or explicit
// per-step sequences. Step t of n uses the inputs at normalized time t/n and
// produces state t+1.
struct ForwardInput {
  enum class Mode { polynomial, per_step };

  Mode mode = Mode::polynomial;
  Eigen::VectorXd x0;        // 2*dof
  PolyCoeffs gamma_f;        // 12 channels, cubic (channels may be 0: no GRF/M)
  PolyCoeffs gamma_tau;      // dof-6 channels, linear
  Eigen::MatrixXd Fc_seq;    // 12 x n (per_step mode; may have 0 rows)
  Eigen::MatrixXd tau_seq;   // (dof-6) x n (per_step mode)
  Eigen::VectorXd m_xdot;    // 2*dof per-component max |velocity|,|acceleration|
  double dt = 0.01;
  int n = 24;

  static ForwardInput polynomials(const Eigen::VectorXd& x0, const PolyCoeffs& gamma_f,
                                  const PolyCoeffs& gamma_tau,
                                  const Eigen::VectorXd& m_xdot, double dt, int n);
  static ForwardInput sequences(const Eigen::VectorXd& x0, const Eigen::MatrixXd& Fc_seq,
                                const Eigen::MatrixXd& tau_seq,
                                const Eigen::VectorXd& m_xdot, double dt);

  void validate(const BodyModel& model) const;
  GrfmVector Fc_at(int t) const;
  Eigen::VectorXd tau_at(int t) const;

  // Flattened sensitivity-parameter dimension: x0, then gamma_f coefficients
  // (channel-major), then gamma_tau (polynomial mode), or per-step inputs
  // [Fc_t; tau_t] for t = 0..n-1 (per_step mode).
  int param_dim() const;
  int grfm_param_count() const;
};

struct SimResult {
  Eigen::MatrixXd states;   // 2*dof x n, columns are x_1..x_n
  Eigen::MatrixXd damping;  // 2*dof x n, damping factors applied at each step
};

struct SensitivityBundle {
  int n = 0;
  int nx = 0;                         // state dimension 2*dof
  int np = 0;                         // flattened parameter dimension
  ForwardInput::Mode mode = ForwardInput::Mode::polynomial;
  double alpha = 1.0;                 // damping-penalty weight captured from cfg
  std::vector<Eigen::MatrixXd> dx_dp; // n entries, nx x np (for x_1..x_n)
  Eigen::VectorXd pen_grad;           // d mean(1 - d) / dp
};

SimResult simulate(const ForwardInput& inp, const BodyModel& model,
                   const DampingConfig& cfg);

SimResult simulate_with_sensitivities(const ForwardInput& inp, const BodyModel& model,
                                      const DampingConfig& cfg,
                                      SensitivityBundle& bundle);

// MSE(x_sim, x_true) + alpha * mean(1 - d); both terms averaged over all
// steps and components.
double forward_loss(const Eigen::MatrixXd& x_sim, const Eigen::MatrixXd& x_true,
                    const Eigen::MatrixXd& d_steps, double alpha);

// Gradient of the MSE part w.r.t. x_sim.
Eigen::MatrixXd forward_loss_state_grad(const Eigen::MatrixXd& x_sim,
                                        const Eigen::MatrixXd& x_true);

// Chains per-step loss gradients through the stored sensitivities and adds
// the damping-penalty contribution: dL/dp = sum_t (dL/dx_t) dx_t/dp
// + alpha * d mean(1-d)/dp.
Eigen::VectorXd backprop_forward(const Eigen::MatrixXd& dL_dx_sim,
                                 const SensitivityBundle& bundle);

}  // namespace locodyn
