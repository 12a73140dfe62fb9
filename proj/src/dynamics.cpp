#include "locodyn/dynamics.hpp"

#include <cmath>

namespace locodyn {

void DampingConfig::validate(int nx) const {
  if (!(k > 0.0)) throw ConfigError("damping k must be positive");
  if (sigma_xdot.size() != nx)
    throw ConfigError("damping sigma_xdot has wrong dimension");
  if ((sigma_xdot.array() < 0.0).any())
    throw ConfigError("damping sigma_xdot must be non-negative");
  if (!(sigma_floor > 0.0)) throw ConfigError("damping sigma floor must be positive");
}

DampingConfig DampingConfig::disabled(int nx) {
  DampingConfig cfg;
  cfg.sigma_xdot = Eigen::VectorXd::Constant(nx, 1e12);
  return cfg;
}

Eigen::MatrixXd mass_matrix(const BodyModel& model, const Eigen::VectorXd& q) {
  if (q.size() != model.dof()) throw InvalidParameterError("q has wrong dimension");
  if (!q.allFinite()) throw NumericInputError("q contains non-finite values");

  const int dof = model.dof();
  KinematicsCacheT<double> kin;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(dof);
  compute_kinematics<double>(model, q, zero, zero, true, kin);

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dof, dof);
  for (int i = 0; i < model.num_segments(); ++i) {
    const Segment& sg = model.segment(i);
    const auto& st = kin.seg[i];
    const auto& Jv = kin.jac_v[i];
    const auto& Jw = kin.jac_w[i];
    const Eigen::Matrix3d I_world = st.rot * sg.inertia * st.rot.transpose();
    const auto& cols = model.active_cols(i);
    for (size_t a = 0; a < cols.size(); ++a) {
      const int ca = cols[a];
      const Eigen::Vector3d mv = sg.mass * Jv.col(ca);
      const Eigen::Vector3d iw = I_world * Jw.col(ca);
      for (size_t b = a; b < cols.size(); ++b) {
        const int cb = cols[b];
        const double m_ab = mv.dot(Jv.col(cb)) + iw.dot(Jw.col(cb));
        M(ca, cb) += m_ab;
        if (cb != ca) M(cb, ca) += m_ab;
      }
    }
  }

  // Surface singular configurations eagerly.
  Eigen::MatrixXd chol = M;
  if (!cholesky_factor(chol))
    throw SingularConfigurationError("mass matrix not positive definite");
  return M;
}

Eigen::VectorXd generalized_force(const BodyModel& model, const Eigen::VectorXd& x,
                                  const GrfmVector& F_c, const Eigen::VectorXd& tau) {
  const int dof = model.dof();
  if (x.size() != 2 * dof) throw InvalidParameterError("x has wrong dimension");
  if (tau.size() != dof - 6) throw InvalidParameterError("tau has wrong dimension");
  if (!x.allFinite() || !F_c.allFinite() || !tau.allFinite())
    throw NumericInputError("non-finite dynamics input");

  KinematicsCacheT<double> kin;
  const Eigen::VectorXd q = x.head(dof);
  const Eigen::VectorXd qd = x.tail(dof);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(dof);
  compute_kinematics<double>(model, q, qd, zero, true, kin);

  Eigen::VectorXd force = Eigen::VectorXd::Zero(dof);
  for (int i = 0; i < model.num_segments(); ++i) {
    const Segment& sg = model.segment(i);
    const auto& st = kin.seg[i];
    const Eigen::Matrix3d I_world = st.rot * sg.inertia * st.rot.transpose();
    Eigen::Vector3d f = sg.mass * (model.gravity() - st.acc_com);
    Eigen::Vector3d n = -(I_world * st.alpha) - st.omega.cross(I_world * st.omega);
    if (i == model.left_foot) {
      f += F_c.segment<3>(0);
      n += F_c.segment<3>(6);
    } else if (i == model.right_foot) {
      f += F_c.segment<3>(3);
      n += F_c.segment<3>(9);
    }
    for (int c : model.active_cols(i))
      force[c] += kin.jac_v[i].col(c).dot(f) + kin.jac_w[i].col(c).dot(n);
  }
  for (int j = 6; j < dof; ++j) force[j] += tau[j - 6];
  return force;
}

Eigen::VectorXd damping_vector(const Eigen::VectorXd& xdot_undamped,
                               const Eigen::VectorXd& m_xdot,
                               const DampingConfig& cfg) {
  const int nx = static_cast<int>(xdot_undamped.size());
  if (m_xdot.size() != nx) throw InvalidParameterError("m_xdot has wrong dimension");
  if ((m_xdot.array() < 0.0).any())
    throw InvalidParameterError("m_xdot must be non-negative");
  cfg.validate(nx);

  Eigen::VectorXd d(nx);
  for (int j = 0; j < nx; ++j) {
    const double ks = cfg.k * std::max(cfg.sigma_xdot[j], cfg.sigma_floor);
    const double excess = (std::abs(xdot_undamped[j]) - m_xdot[j] - ks) / ks;
    // cap keeps exp from underflowing to an exact zero
    d[j] = std::exp(-std::min(std::max(excess, 0.0), 700.0));
  }
  return d;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> state_derivative(
    const BodyModel& model, const Eigen::VectorXd& x, const GrfmVector& F_c,
    const Eigen::VectorXd& tau, const Eigen::VectorXd& m_xdot,
    const DampingConfig& cfg) {
  const int dof = model.dof();
  if (x.size() != 2 * dof) throw InvalidParameterError("x has wrong dimension");
  if (!x.allFinite() || !F_c.allFinite() || !tau.allFinite())
    throw NumericInputError("non-finite dynamics input");

  DynamicsWorkspace<double> ws;
  const Eigen::VectorXd q = x.head(dof);
  const Eigen::VectorXd qd = x.tail(dof);
  const Eigen::VectorXd xdot_u =
      undamped_state_derivative<double>(model, q, qd, F_c, tau, ws);
  const Eigen::VectorXd d = damping_vector(xdot_u, m_xdot, cfg);
  return {xdot_u.cwiseProduct(d), d};
}

}  // namespace locodyn
