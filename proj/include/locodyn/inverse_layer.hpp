#pragma once

#include <Eigen/Dense>
#include <vector>

#include "locodyn/dynamics.hpp"
#include "locodyn/trajectory.hpp"

namespace locodyn {

struct InverseConfig {
  // The printed moment balance omits the omega x (I omega) term; this flag
  // adds it, which makes forward-simulated motion exactly self-consistent.
  bool include_gyroscopic = false;
};

struct SegmentMotion {
  SegmentPose pose;
  Eigen::Vector3d omega;     // rad/s, world
  Eigen::Vector3d alpha;     // rad/s^2, world
  Eigen::Vector3d acc_com;   // m/s^2, world
};

struct Residual {
  Eigen::Vector3d force = Eigen::Vector3d::Zero();    // N
  Eigen::Vector3d moment = Eigen::Vector3d::Zero();   // Nm
};

// Jacobians of the residual w.r.t. the 12 GRF/M components (affine map).
struct ResidualJacobian {
  Eigen::Matrix<double, 3, 12> dF = Eigen::Matrix<double, 3, 12>::Zero();
  Eigen::Matrix<double, 3, 12> dM = Eigen::Matrix<double, 3, 12>::Zero();
};

// Per-segment pose and accelerations at time t (seconds into the window),
// obtained analytically from the motion polynomial derivatives.
std::vector<SegmentMotion> segment_kinematics(const BodyModel& model,
                                              const PolyCoeffs& gamma_q, double t);

// Same propagation from an explicit (q, qd, qdd) sample, e.g. simulator states.
std::vector<SegmentMotion> segment_kinematics_from_state(const BodyModel& model,
                                                         const Eigen::VectorXd& q,
                                                         const Eigen::VectorXd& qd,
                                                         const Eigen::VectorXd& qdd);

// Bottom-up Newton-Euler propagation from the foot COMs (where the GRF/M are
// applied) to the upper-body COM, returning the residual force and moment.
Residual propagate(const BodyModel& model, const std::vector<SegmentMotion>& kin,
                   const GrfmVector& F_c, const InverseConfig& cfg = {},
                   ResidualJacobian* jac = nullptr);

// ||F_res||^2 + ||M_res||^2
double inverse_loss(const Residual& res);

// Mean per-frame inverse loss over a window.
double inverse_window_loss(const std::vector<Residual>& residuals);

// dL/dgamma_f for the window-mean inverse loss:
// (2/n) sum_t (F_res dF/dFc + M_res dM/dFc) chained through the polynomial
// evaluation at the frame times s_values. Returns 12*(poly_order+1) values,
// channel-major.
Eigen::VectorXd backprop_inverse(const std::vector<Residual>& residuals,
                                 const std::vector<ResidualJacobian>& jacobians,
                                 const std::vector<double>& s_values,
                                 int poly_order);

}  // namespace locodyn
