#pragma once

#include <Eigen/Dense>
#include <utility>

#include "locodyn/body_model.hpp"
#include "locodyn/errors.hpp"
#include "locodyn/kinematics.hpp"

namespace locodyn {

// GRF/M vector layout: [f_left(3), f_right(3), m_left(3), m_right(3)],
// forces in N and moments in Nm, applied at the foot centers of mass.
using GrfmVector = Eigen::Matrix<double, 12, 1>;

struct DampingConfig {
  double k = 10.0;                // steepness of the damping curve
  Eigen::VectorXd sigma_xdot;     // per-component std of |velocities|,|accelerations|
  double alpha = 1.0;             // forward-loss damping weight
  double sigma_floor = 1e-6;      // substituted for zero-variance channels

  void validate(int nx) const;
  // Returns a config whose band is wide enough that d == 1 always.
  static DampingConfig disabled(int nx);
};

// Generalized inertia matrix assembled as T^T M T over the segment Jacobians.
// Symmetric positive definite away from singular configurations.
Eigen::MatrixXd mass_matrix(const BodyModel& model, const Eigen::VectorXd& q);

// Sum of all acting generalized forces: gravity, velocity-product terms,
// joint torques on the joint coordinates, and the GRF/M mapped through the
// transposed foot-COM Jacobians. tau has dof-6 entries.
Eigen::VectorXd generalized_force(const BodyModel& model, const Eigen::VectorXd& x,
                                  const GrfmVector& F_c, const Eigen::VectorXd& tau);

// d_j = exp(-max((|xdot_j| - m_j - k sigma_j) / (k sigma_j), 0))
Eigen::VectorXd damping_vector(const Eigen::VectorXd& xdot_undamped,
                               const Eigen::VectorXd& m_xdot,
                               const DampingConfig& cfg);

// Damped state derivative: ([qd; M^-1 F] .* d, d).
std::pair<Eigen::VectorXd, Eigen::VectorXd> state_derivative(
    const BodyModel& model, const Eigen::VectorXd& x, const GrfmVector& F_c,
    const Eigen::VectorXd& tau, const Eigen::VectorXd& m_xdot,
    const DampingConfig& cfg);

// ---- templated core (double / Dual), shared by the forward layer ----------

template <typename S>
struct DynamicsWorkspace {
  KinematicsCacheT<S> kin;
  MatXT<S> M;       // dof x dof
  VecXT<S> force;   // dof
  VecXT<S> accel;   // dof
};

// In-place lower Cholesky; returns false when a pivot is non-positive.
template <typename S>
bool cholesky_factor(MatXT<S>& a) {
  const int n = static_cast<int>(a.rows());
  for (int j = 0; j < n; ++j) {
    S d = a(j, j);
    for (int k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (!(value_of(d) > 0.0)) return false;
    using std::sqrt;
    const S root = sqrt(d);
    a(j, j) = root;
    for (int i = j + 1; i < n; ++i) {
      S s = a(i, j);
      for (int k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / root;
    }
  }
  return true;
}

template <typename S, typename Rhs>
void cholesky_solve_in_place(const MatXT<S>& l, Rhs& b) {
  const int n = static_cast<int>(l.rows());
  for (int c = 0; c < b.cols(); ++c) {
    for (int i = 0; i < n; ++i) {
      S s = b(i, c);
      for (int k = 0; k < i; ++k) s -= l(i, k) * b(k, c);
      b(i, c) = s / l(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
      S s = b(i, c);
      for (int k = i + 1; k < n; ++k) s -= l(k, i) * b(k, c);
      b(i, c) = s / l(i, i);
    }
  }
}

// Assembles mass matrix and generalized force from the kinematics cache and
// solves for the undamped state derivative [qd; M^-1 F]. The kinematics cache
// inside `ws` is left populated (used by callers for foot Jacobians), and
// ws.M holds the Cholesky factor afterwards.
template <typename S>
VecXT<S> undamped_state_derivative(const BodyModel& model, const VecXT<S>& q,
                                   const VecXT<S>& qd,
                                   const Eigen::Matrix<S, 12, 1>& F_c,
                                   const VecXT<S>& tau, DynamicsWorkspace<S>& ws) {
  const int dof = model.dof();
  const int nseg = model.num_segments();
  const VecXT<S> zero = VecXT<S>::Zero(dof);
  compute_kinematics<S>(model, q, qd, zero, true, ws.kin);

  ws.M.setZero(dof, dof);
  ws.force.setZero(dof);
  const Eigen::Vector3d g = model.gravity();

  for (int i = 0; i < nseg; ++i) {
    const Segment& sg = model.segment(i);
    const auto& st = ws.kin.seg[i];
    const auto& Jv = ws.kin.jac_v[i];
    const auto& Jw = ws.kin.jac_w[i];
    const auto& cols = model.active_cols(i);

    const Mat3T<S> I_world =
        st.rot * sg.inertia.template cast<S>() * st.rot.transpose();

    // Segment wrench: gravity minus inertial bias terms, plus externals.
    Vec3T<S> f = sg.mass * (g.template cast<S>() - st.acc_com);
    Vec3T<S> n = -(I_world * st.alpha) - st.omega.cross(I_world * st.omega);
    if (i == model.left_foot) {
      f += F_c.template segment<3>(0);
      n += F_c.template segment<3>(6);
    } else if (i == model.right_foot) {
      f += F_c.template segment<3>(3);
      n += F_c.template segment<3>(9);
    }

    for (size_t a = 0; a < cols.size(); ++a) {
      const int ca = cols[a];
      ws.force[ca] += Jv.col(ca).dot(f) + Jw.col(ca).dot(n);
      const Vec3T<S> mv = sg.mass * Jv.col(ca);
      const Vec3T<S> iw = I_world * Jw.col(ca);
      for (size_t b = a; b < cols.size(); ++b) {
        const int cb = cols[b];
        const S m_ab = mv.dot(Jv.col(cb)) + iw.dot(Jw.col(cb));
        ws.M(ca, cb) += m_ab;
        if (cb != ca) ws.M(cb, ca) += m_ab;
      }
    }
  }

  for (int j = 6; j < dof; ++j) ws.force[j] += tau[j - 6];

  ws.accel = ws.force;
  if (!cholesky_factor(ws.M))
    throw SingularConfigurationError("mass matrix not positive definite");
  cholesky_solve_in_place(ws.M, ws.accel);

  VecXT<S> xdot(2 * dof);
  xdot.head(dof) = qd;
  xdot.tail(dof) = ws.accel;
  return xdot;
}

}  // namespace locodyn
