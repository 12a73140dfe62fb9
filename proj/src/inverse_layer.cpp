#include "locodyn/inverse_layer.hpp"

#include <cmath>

#include "locodyn/kinematics.hpp"

namespace locodyn {

std::vector<SegmentMotion> segment_kinematics_from_state(const BodyModel& model,
                                                         const Eigen::VectorXd& q,
                                                         const Eigen::VectorXd& qd,
                                                         const Eigen::VectorXd& qdd) {
  const int dof = model.dof();
  if (q.size() != dof || qd.size() != dof || qdd.size() != dof)
    throw InvalidParameterError("segment kinematics: wrong state dimension");
  if (!q.allFinite() || !qd.allFinite() || !qdd.allFinite())
    throw NumericInputError("segment kinematics: non-finite input");

  KinematicsCacheT<double> cache;
  compute_kinematics<double>(model, q, qd, qdd, false, cache);

  std::vector<SegmentMotion> out(model.num_segments());
  for (int i = 0; i < model.num_segments(); ++i) {
    out[i].pose.rotation = cache.seg[i].rot;
    out[i].pose.origin = cache.seg[i].origin;
    out[i].pose.com_world = cache.seg[i].com;
    out[i].omega = cache.seg[i].omega;
    out[i].alpha = cache.seg[i].alpha;
    out[i].acc_com = cache.seg[i].acc_com;
  }
  return out;
}

std::vector<SegmentMotion> segment_kinematics(const BodyModel& model,
                                              const PolyCoeffs& gamma_q, double t) {
  if (gamma_q.channels() != model.dof())
    throw InvalidParameterError("gamma_q channel count must match model DOF");
  if (t < -1e-12 || t > gamma_q.duration + 1e-12)
    throw InvalidParameterError("time outside the window");
  const double s = std::clamp(t / gamma_q.duration, 0.0, 1.0);
  const Eigen::VectorXd q = eval_polynomial(gamma_q, s, 0);
  const Eigen::VectorXd qd = eval_polynomial(gamma_q, s, 1);
  const Eigen::VectorXd qdd = eval_polynomial(gamma_q, s, 2);
  return segment_kinematics_from_state(model, q, qd, qdd);
}

Residual propagate(const BodyModel& model, const std::vector<SegmentMotion>& kin,
                   const GrfmVector& F_c, const InverseConfig& cfg,
                   ResidualJacobian* jac) {
  const int nseg = model.num_segments();
  if (static_cast<int>(kin.size()) != nseg)
    throw InvalidParameterError("propagate: kinematics size mismatch");

  const Eigen::Vector3d g = model.gravity();
  std::vector<Eigen::Vector3d> Fp(nseg), Mp(nseg);
  std::vector<Eigen::Matrix<double, 3, 12>> dFp, dMp;
  if (jac) {
    dFp.assign(nseg, Eigen::Matrix<double, 3, 12>::Zero());
    dMp.assign(nseg, Eigen::Matrix<double, 3, 12>::Zero());
  }

  // Children have larger indices than their parents; walk leaves-to-root.
  for (int i = nseg - 1; i >= 0; --i) {
    const Segment& sg = model.segment(i);
    const SegmentMotion& km = kin[i];

    Eigen::Vector3d f_ext = Eigen::Vector3d::Zero();
    Eigen::Vector3d m_ext = Eigen::Vector3d::Zero();
    int fc_col = -1;
    if (i == model.left_foot) {
      f_ext = F_c.segment<3>(0);
      m_ext = F_c.segment<3>(6);
      fc_col = 0;
    } else if (i == model.right_foot) {
      f_ext = F_c.segment<3>(3);
      m_ext = F_c.segment<3>(9);
      fc_col = 3;
    }

    Eigen::Vector3d sumF = Eigen::Vector3d::Zero();
    Eigen::Vector3d sumM = Eigen::Vector3d::Zero();
    Eigen::Matrix<double, 3, 12> dSumF = Eigen::Matrix<double, 3, 12>::Zero();
    Eigen::Matrix<double, 3, 12> dSumM = Eigen::Matrix<double, 3, 12>::Zero();
    for (int c : model.children(i)) {
      const Eigen::Vector3d r_d = kin[c].pose.origin - km.pose.com_world;
      sumF += Fp[c];
      sumM += Mp[c] + r_d.cross(Fp[c]);
      if (jac) {
        dSumF += dFp[c];
        dSumM += dMp[c] + skew<double>(r_d) * dFp[c];
      }
    }

    Fp[i] = sg.mass * (km.acc_com - g) - f_ext + sumF;

    const Eigen::Matrix3d I_world =
        km.pose.rotation * sg.inertia * km.pose.rotation.transpose();
    Mp[i] = I_world * km.alpha - m_ext + sumM;
    if (cfg.include_gyroscopic) Mp[i] += km.omega.cross(I_world * km.omega);
    if (i != 0) {
      const Eigen::Vector3d r_p = km.pose.origin - km.pose.com_world;
      Mp[i] -= r_p.cross(Fp[i]);
    }

    if (jac) {
      dFp[i] = dSumF;
      if (fc_col >= 0)
        dFp[i].middleCols<3>(fc_col) -= Eigen::Matrix3d::Identity();
      dMp[i] = dSumM;
      if (fc_col >= 0)
        dMp[i].middleCols<3>(fc_col + 6) -= Eigen::Matrix3d::Identity();
      if (i != 0) {
        const Eigen::Vector3d r_p = km.pose.origin - km.pose.com_world;
        dMp[i] -= skew<double>(r_p) * dFp[i];
      }
    }
  }

  Residual res;
  res.force = Fp[0];
  res.moment = Mp[0];
  if (jac) {
    jac->dF = dFp[0];
    jac->dM = dMp[0];
  }
  return res;
}

double inverse_loss(const Residual& res) {
  return res.force.squaredNorm() + res.moment.squaredNorm();
}

double inverse_window_loss(const std::vector<Residual>& residuals) {
  if (residuals.empty()) throw InvalidParameterError("empty residual window");
  double sum = 0.0;
  for (const Residual& r : residuals) sum += inverse_loss(r);
  return sum / residuals.size();
}

Eigen::VectorXd backprop_inverse(const std::vector<Residual>& residuals,
                                 const std::vector<ResidualJacobian>& jacobians,
                                 const std::vector<double>& s_values,
                                 int poly_order) {
  const size_t n = residuals.size();
  if (jacobians.size() != n || s_values.size() != n)
    throw InvalidParameterError("backprop_inverse: window length mismatch");
  if (n == 0) throw InvalidParameterError("backprop_inverse: empty window");

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(12 * (poly_order + 1));
  for (size_t t = 0; t < n; ++t) {
    const Eigen::Matrix<double, 1, 12> dL_dFc =
        2.0 / n *
        (residuals[t].force.transpose() * jacobians[t].dF +
         residuals[t].moment.transpose() * jacobians[t].dM);
    double pw = 1.0;
    for (int k = 0; k <= poly_order; ++k) {
      for (int ch = 0; ch < 12; ++ch)
        grad[ch * (poly_order + 1) + k] += dL_dFc[ch] * pw;
      pw *= s_values[t];
    }
  }
  return grad;
}

}  // namespace locodyn
