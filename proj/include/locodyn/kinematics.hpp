#pragma once

#include <Eigen/Dense>
#include <vector>

#include "locodyn/body_model.hpp"
#include "locodyn/dual.hpp"

namespace locodyn {

template <typename S>
using Vec3T = Eigen::Matrix<S, 3, 1>;
template <typename S>
using Mat3T = Eigen::Matrix<S, 3, 3>;
template <typename S>
using VecXT = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <typename S>
using MatXT = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <typename S>
inline Mat3T<S> skew(const Vec3T<S>& v) {
  Mat3T<S> m;
  m << S(0), -v.z(), v.y(), v.z(), S(0), -v.x(), -v.y(), v.x(), S(0);
  return m;
}

template <typename S>
inline Mat3T<S> rot_z(const S& a) {
  using std::cos;
  using std::sin;
  const S c = cos(a), s = sin(a);
  Mat3T<S> m;
  m << c, -s, S(0), s, c, S(0), S(0), S(0), S(1);
  return m;
}

template <typename S>
inline Mat3T<S> rot_y(const S& a) {
  using std::cos;
  using std::sin;
  const S c = cos(a), s = sin(a);
  Mat3T<S> m;
  m << c, S(0), s, S(0), S(1), S(0), -s, S(0), c;
  return m;
}

template <typename S>
inline Mat3T<S> rot_x(const S& a) {
  using std::cos;
  using std::sin;
  const S c = cos(a), s = sin(a);
  Mat3T<S> m;
  m << S(1), S(0), S(0), S(0), c, -s, S(0), s, c;
  return m;
}

// R = Rz(a0) Ry(a1) Rx(a2)
template <typename S>
inline Mat3T<S> euler_zyx(const S& az, const S& ay, const S& ax) {
  return rot_z(az) * rot_y(ay) * rot_x(ax);
}

template <typename S>
struct SegmentStateT {
  Mat3T<S> rot;        // world orientation
  Vec3T<S> origin;     // world segment origin (= joint point)
  Vec3T<S> com;        // world COM
  Vec3T<S> omega;      // world angular velocity
  Vec3T<S> alpha;      // world angular acceleration
  Vec3T<S> v_origin;   // velocity of the origin point
  Vec3T<S> a_origin;   // acceleration of the origin point
  Vec3T<S> vel_com;    // world COM velocity
  Vec3T<S> acc_com;    // world COM linear acceleration
};

template <typename S>
struct KinematicsCacheT {
  std::vector<SegmentStateT<S>> seg;
  // 3 x dof Jacobians per segment: COM linear velocity, angular velocity, and
  // origin-point linear velocity. Only the model's active columns are
  // meaningful; the rest stay zero.
  std::vector<Eigen::Matrix<S, 3, Eigen::Dynamic>> jac_v;
  std::vector<Eigen::Matrix<S, 3, Eigen::Dynamic>> jac_w;
  std::vector<Eigen::Matrix<S, 3, Eigen::Dynamic>> jac_vo;

  void resize(int segments, int dof, bool with_jacobians) {
    seg.resize(segments);
    if (with_jacobians) {
      jac_v.resize(segments);
      jac_w.resize(segments);
      jac_vo.resize(segments);
      for (int i = 0; i < segments; ++i) {
        jac_v[i].setZero(3, dof);
        jac_w[i].setZero(3, dof);
        jac_vo[i].setZero(3, dof);
      }
    }
  }
};

// Propagates poses, velocities and accelerations through the tree for given
// q, qd, qdd (pass qdd = 0 to obtain the velocity-product bias accelerations
// used by the equations of motion). When with_jacobians is set, also builds
// the Jacobians needed for the mass matrix and the generalized forces.
template <typename S>
void compute_kinematics(const BodyModel& model, const VecXT<S>& q,
                        const VecXT<S>& qd, const VecXT<S>& qdd,
                        bool with_jacobians, KinematicsCacheT<S>& cache) {
  const int nseg = model.num_segments();
  const int dof = model.dof();
  cache.resize(nseg, dof, with_jacobians);

  const Vec3T<S> zhat(S(0), S(0), S(1));
  const Vec3T<S> yhat(S(0), S(1), S(0));
  const Vec3T<S> xhat(S(1), S(0), S(0));

  for (int i = 0; i < nseg; ++i) {
    const Segment& sg = model.segment(i);
    SegmentStateT<S>& st = cache.seg[i];

    const int col = (i == 0) ? 3 : model.joint_col(i);
    const S az = q[col], ay = q[col + 1], ax = q[col + 2];
    const S rz = qd[col], ry = qd[col + 1], rx = qd[col + 2];
    const S sz = qdd[col], sy = qdd[col + 1], sx = qdd[col + 2];

    const Mat3T<S> Rz = rot_z(az);
    const Mat3T<S> RzRy = Rz * rot_y(ay);
    const Mat3T<S> R_rel = RzRy * rot_x(ax);

    // ZYX Euler axes in the parent frame; each axis rotates with the angular
    // velocity of the rotations preceding it.
    const Vec3T<S> a1 = zhat;
    const Vec3T<S> a2 = Rz * yhat;
    const Vec3T<S> a3 = RzRy * xhat;
    const Vec3T<S> a2dot = (rz * a1).cross(a2);
    const Vec3T<S> a3dot = (rz * a1 + ry * a2).cross(a3);

    const Vec3T<S> w_rel_local = rz * a1 + ry * a2 + rx * a3;
    const Vec3T<S> alpha_rel_local =
        ry * a2dot + rx * a3dot + sz * a1 + sy * a2 + sx * a3;

    if (i == 0) {
      st.rot = R_rel;
      st.origin = q.template head<3>();
      st.omega = w_rel_local;
      st.alpha = alpha_rel_local;
      st.v_origin = qd.template head<3>();
      st.a_origin = qdd.template head<3>();
    } else {
      const SegmentStateT<S>& ps = cache.seg[sg.parent];
      const Vec3T<S> r_off = ps.rot * sg.joint_offset.template cast<S>();
      const Vec3T<S> w_rel = ps.rot * w_rel_local;

      st.rot = ps.rot * R_rel;
      st.origin = ps.origin + r_off;
      st.omega = ps.omega + w_rel;
      st.alpha = ps.alpha + ps.omega.cross(w_rel) + ps.rot * alpha_rel_local;
      st.v_origin = ps.v_origin + ps.omega.cross(r_off);
      st.a_origin = ps.a_origin + ps.alpha.cross(r_off) +
                    ps.omega.cross(ps.omega.cross(r_off));
    }

    const Vec3T<S> rc = st.rot * sg.com_offset.template cast<S>();
    st.com = st.origin + rc;
    st.vel_com = st.v_origin + st.omega.cross(rc);
    st.acc_com = st.a_origin + st.alpha.cross(rc) +
                 st.omega.cross(st.omega.cross(rc));

    if (!with_jacobians) continue;

    auto& Jv = cache.jac_v[i];
    auto& Jw = cache.jac_w[i];
    auto& Jvo = cache.jac_vo[i];
    const Mat3T<S> rc_hat = skew(rc);

    if (i == 0) {
      Jvo.col(0) = Vec3T<S>(S(1), S(0), S(0));
      Jvo.col(1) = Vec3T<S>(S(0), S(1), S(0));
      Jvo.col(2) = Vec3T<S>(S(0), S(0), S(1));
      Jw.col(3) = a1;
      Jw.col(4) = a2;
      Jw.col(5) = a3;
    } else {
      const int p = sg.parent;
      const Vec3T<S> r_off = st.origin - cache.seg[p].origin;
      const Mat3T<S> r_off_hat = skew(r_off);
      const Vec3T<S> A1 = cache.seg[p].rot * a1;
      const Vec3T<S> A2 = cache.seg[p].rot * a2;
      const Vec3T<S> A3 = cache.seg[p].rot * a3;
      for (int c : model.active_cols(p)) {
        Jw.col(c) = cache.jac_w[p].col(c);
        Jvo.col(c) = cache.jac_vo[p].col(c) - r_off_hat * cache.jac_w[p].col(c);
      }
      const int jc = model.joint_col(i);
      Jw.col(jc) = A1;
      Jw.col(jc + 1) = A2;
      Jw.col(jc + 2) = A3;
    }
    for (int c : model.active_cols(i)) Jv.col(c) = Jvo.col(c) - rc_hat * Jw.col(c);
  }
}

}  // namespace locodyn
