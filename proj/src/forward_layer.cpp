#include "locodyn/forward_layer.hpp"

#include <cmath>

namespace locodyn {

namespace {
constexpr int kMaxLanes = 48;  // dual tangent width: supports up to 24 DOF
using D48 = Dual<kMaxLanes>;
}  // namespace

ForwardInput ForwardInput::polynomials(const Eigen::VectorXd& x0,
                                       const PolyCoeffs& gamma_f,
                                       const PolyCoeffs& gamma_tau,
                                       const Eigen::VectorXd& m_xdot, double dt,
                                       int n) {
  ForwardInput inp;
  inp.mode = Mode::polynomial;
  inp.x0 = x0;
  inp.gamma_f = gamma_f;
  inp.gamma_tau = gamma_tau;
  inp.m_xdot = m_xdot;
  inp.dt = dt;
  inp.n = n;
  return inp;
}

ForwardInput ForwardInput::sequences(const Eigen::VectorXd& x0,
                                     const Eigen::MatrixXd& Fc_seq,
                                     const Eigen::MatrixXd& tau_seq,
                                     const Eigen::VectorXd& m_xdot, double dt) {
  ForwardInput inp;
  inp.mode = Mode::per_step;
  inp.x0 = x0;
  inp.Fc_seq = Fc_seq;
  inp.tau_seq = tau_seq;
  inp.m_xdot = m_xdot;
  inp.dt = dt;
  inp.n = static_cast<int>(tau_seq.cols());
  return inp;
}

void ForwardInput::validate(const BodyModel& model) const {
  const int dof = model.dof();
  if (2 * dof > kMaxLanes)
    throw InvalidParameterError("model exceeds supported state dimension");
  if (n < 1) throw InvalidParameterError("forward input needs n >= 1 steps");
  if (dt <= 0.0) throw InvalidParameterError("dt must be positive");
  if (x0.size() != 2 * dof) throw InvalidParameterError("x0 has wrong dimension");
  if (!x0.allFinite()) throw NumericInputError("x0 contains non-finite values");
  if (m_xdot.size() != 2 * dof)
    throw InvalidParameterError("m_xdot has wrong dimension");
  if (mode == Mode::polynomial) {
    if (gamma_f.channels() != 0 && gamma_f.channels() != 12)
      throw InvalidParameterError("gamma_f must have 12 channels (or none)");
    if (gamma_tau.channels() != dof - 6)
      throw InvalidParameterError("gamma_tau channel count must match joint DOF");
  } else {
    if (Fc_seq.rows() != 0 && Fc_seq.rows() != 12)
      throw InvalidParameterError("Fc sequence must have 12 rows (or none)");
    if (Fc_seq.rows() == 12 && Fc_seq.cols() != n)
      throw InvalidParameterError("Fc sequence must have n columns");
    if (tau_seq.rows() != dof - 6 || tau_seq.cols() != n)
      throw InvalidParameterError("tau sequence must be (dof-6) x n");
  }
  if (gamma_f.channels() != 0 && model.left_foot < 0)
    throw InvalidParameterError("GRF/M given for a model without feet");
}

GrfmVector ForwardInput::Fc_at(int t) const {
  GrfmVector F = GrfmVector::Zero();
  if (mode == Mode::polynomial) {
    if (gamma_f.channels() == 12)
      F = eval_polynomial(gamma_f, static_cast<double>(t) / n, 0);
  } else if (Fc_seq.rows() == 12) {
    F = Fc_seq.col(t);
  }
  return F;
}

Eigen::VectorXd ForwardInput::tau_at(int t) const {
  if (mode == Mode::polynomial)
    return eval_polynomial(gamma_tau, static_cast<double>(t) / n, 0);
  return tau_seq.col(t);
}

int ForwardInput::grfm_param_count() const {
  if (mode == Mode::polynomial)
    return gamma_f.channels() == 12 ? 12 * (gamma_f.order + 1) : 0;
  return Fc_seq.rows() == 12 ? 12 : 0;  // per step
}

int ForwardInput::param_dim() const {
  const int nx = static_cast<int>(x0.size());
  if (mode == Mode::polynomial) {
    const int nf = grfm_param_count();
    const int nt = gamma_tau.channels() * (gamma_tau.order + 1);
    return nx + nf + nt;
  }
  const int nu = grfm_param_count() + static_cast<int>(tau_seq.rows());
  return nx + n * nu;
}

SimResult simulate(const ForwardInput& inp, const BodyModel& model,
                   const DampingConfig& cfg) {
  inp.validate(model);
  const int dof = model.dof();
  const int nx = 2 * dof;
  cfg.validate(nx);

  SimResult res;
  res.states.resize(nx, inp.n);
  res.damping.resize(nx, inp.n);

  DynamicsWorkspace<double> ws;
  Eigen::VectorXd x = inp.x0;
  for (int t = 0; t < inp.n; ++t) {
    const Eigen::VectorXd q = x.head(dof);
    const Eigen::VectorXd qd = x.tail(dof);
    const GrfmVector Fc = inp.Fc_at(t);
    const Eigen::VectorXd tau = inp.tau_at(t);
    const Eigen::VectorXd xdot_u =
        undamped_state_derivative<double>(model, q, qd, Fc, tau, ws);
    const Eigen::VectorXd d = damping_vector(xdot_u, inp.m_xdot, cfg);
    x += inp.dt * xdot_u.cwiseProduct(d);
    if (!x.allFinite())
      throw DivergenceError("non-finite state during forward simulation", t);
    res.states.col(t) = x;
    res.damping.col(t) = d;
  }
  return res;
}

SimResult simulate_with_sensitivities(const ForwardInput& inp, const BodyModel& model,
                                      const DampingConfig& cfg,
                                      SensitivityBundle& bundle) {
  inp.validate(model);
  const int dof = model.dof();
  const int nx = 2 * dof;
  cfg.validate(nx);
  const int np = inp.param_dim();
  const int njoint = dof - 6;
  const int nfc = inp.grfm_param_count() > 0 ? 12 : 0;
  const int nu = nfc + njoint;

  bundle.n = inp.n;
  bundle.nx = nx;
  bundle.np = np;
  bundle.mode = inp.mode;
  bundle.alpha = cfg.alpha;
  bundle.dx_dp.assign(inp.n, Eigen::MatrixXd());
  bundle.pen_grad = Eigen::VectorXd::Zero(np);

  SimResult res;
  res.states.resize(nx, inp.n);
  res.damping.resize(nx, inp.n);

  DynamicsWorkspace<D48> ws;
  VecXT<D48> q(dof), qd(dof), tau_d(njoint);
  Eigen::Matrix<D48, 12, 1> Fc_d;

  Eigen::VectorXd x = inp.x0;
  Eigen::MatrixXd S(nx, np);  // dx_t/dp
  S.setZero();
  S.topLeftCorner(nx, nx).setIdentity();

  Eigen::MatrixXd A(nx, nx);
  Eigen::MatrixXd B(nx, nu);
  Eigen::MatrixXd P(nx, np);
  Eigen::MatrixXd L(dof, dof);
  Eigen::MatrixXd B_acc(dof, nu);

  for (int t = 0; t < inp.n; ++t) {
    const GrfmVector Fc = inp.Fc_at(t);
    const Eigen::VectorXd tau = inp.tau_at(t);
    for (int i = 0; i < dof; ++i) {
      q[i] = D48(x[i], i);
      qd[i] = D48(x[dof + i], dof + i);
    }
    for (int i = 0; i < 12; ++i) Fc_d[i] = D48(Fc[i]);
    for (int i = 0; i < njoint; ++i) tau_d[i] = D48(tau[i]);

    const VecXT<D48> xdot_dual =
        undamped_state_derivative<D48>(model, q, qd, Fc_d, tau_d, ws);

    Eigen::VectorXd v(nx);
    for (int r = 0; r < nx; ++r) {
      v[r] = xdot_dual[r].v;
      for (int c = 0; c < nx; ++c) A(r, c) = xdot_dual[r].g[c];
    }

    // Inputs enter the acceleration affinely: B = [0; M^-1 [Jv^T Jw^T S_tau]].
    // The value part of the dual Cholesky factor is the double factor.
    for (int r = 0; r < dof; ++r)
      for (int c = 0; c <= r; ++c) L(r, c) = ws.M(r, c).v;
    B_acc.setZero();
    if (nfc == 12) {
      const auto value_col = [&](const Eigen::Matrix<D48, 3, Eigen::Dynamic>& J,
                                 int col) {
        return Eigen::Vector3d(J(0, col).v, J(1, col).v, J(2, col).v);
      };
      for (int foot = 0; foot < 2; ++foot) {
        const int seg = foot == 0 ? model.left_foot : model.right_foot;
        for (int c : model.active_cols(seg)) {
          const Eigen::Vector3d jv = value_col(ws.kin.jac_v[seg], c);
          const Eigen::Vector3d jw = value_col(ws.kin.jac_w[seg], c);
          for (int k = 0; k < 3; ++k) {
            B_acc(c, 3 * foot + k) = jv[k];       // forces f_l, f_r
            B_acc(c, 6 + 3 * foot + k) = jw[k];   // moments m_l, m_r
          }
        }
      }
    }
    for (int j = 0; j < njoint; ++j) B_acc(6 + j, nfc + j) = 1.0;
    cholesky_solve_in_place(L, B_acc);
    B.setZero();
    B.bottomRows(dof) = B_acc;

    // P = d xdot_u / dp at step t.
    P.noalias() = A * S;
    if (inp.mode == ForwardInput::Mode::polynomial) {
      const double s = static_cast<double>(t) / inp.n;
      if (nfc == 12) {
        double pw = 1.0;
        for (int k = 0; k <= inp.gamma_f.order; ++k) {
          for (int ch = 0; ch < 12; ++ch)
            P.col(nx + ch * (inp.gamma_f.order + 1) + k) += pw * B.col(ch);
          pw *= s;
        }
      }
      const int toff = nx + (nfc == 12 ? 12 * (inp.gamma_f.order + 1) : 0);
      double pw = 1.0;
      for (int k = 0; k <= inp.gamma_tau.order; ++k) {
        for (int ch = 0; ch < njoint; ++ch)
          P.col(toff + ch * (inp.gamma_tau.order + 1) + k) += pw * B.col(nfc + ch);
        pw *= s;
      }
    } else {
      P.middleCols(nx + t * nu, nu) += B;
    }

    // Damping and its derivative w.r.t. the undamped component.
    Eigen::VectorXd d(nx), dprime(nx);
    for (int j = 0; j < nx; ++j) {
      const double ks = cfg.k * std::max(cfg.sigma_xdot[j], cfg.sigma_floor);
      const double excess = (std::abs(v[j]) - inp.m_xdot[j] - ks) / ks;
      if (excess > 0.0) {
        d[j] = std::exp(-std::min(excess, 700.0));
        dprime[j] = -(v[j] >= 0.0 ? 1.0 : -1.0) / ks * d[j];
      } else {
        d[j] = 1.0;
        dprime[j] = 0.0;
      }
    }

    for (int j = 0; j < nx; ++j)
      if (dprime[j] != 0.0)
        bundle.pen_grad.noalias() -= dprime[j] / (nx * inp.n) * P.row(j).transpose();

    // d(x + dt*(v.*d))/dp, with d depending on v componentwise.
    const Eigen::VectorXd dscale = d + v.cwiseProduct(dprime);
    S.noalias() += inp.dt * (dscale.asDiagonal() * P);

    x += inp.dt * v.cwiseProduct(d);
    if (!x.allFinite())
      throw DivergenceError("non-finite state during forward simulation", t);
    res.states.col(t) = x;
    res.damping.col(t) = d;
    bundle.dx_dp[t] = S;
  }
  return res;
}

double forward_loss(const Eigen::MatrixXd& x_sim, const Eigen::MatrixXd& x_true,
                    const Eigen::MatrixXd& d_steps, double alpha) {
  if (x_sim.rows() != x_true.rows() || x_sim.cols() != x_true.cols())
    throw InvalidParameterError("forward loss: state shape mismatch");
  if (d_steps.rows() != x_sim.rows() || d_steps.cols() != x_sim.cols())
    throw InvalidParameterError("forward loss: damping shape mismatch");
  const double mse = (x_sim - x_true).squaredNorm() / x_sim.size();
  const double pen = (1.0 - d_steps.array()).abs().sum() / d_steps.size();
  return mse + alpha * pen;
}

Eigen::MatrixXd forward_loss_state_grad(const Eigen::MatrixXd& x_sim,
                                        const Eigen::MatrixXd& x_true) {
  if (x_sim.rows() != x_true.rows() || x_sim.cols() != x_true.cols())
    throw InvalidParameterError("forward loss: state shape mismatch");
  return 2.0 / x_sim.size() * (x_sim - x_true);
}

Eigen::VectorXd backprop_forward(const Eigen::MatrixXd& dL_dx_sim,
                                 const SensitivityBundle& bundle) {
  if (dL_dx_sim.rows() != bundle.nx || dL_dx_sim.cols() != bundle.n)
    throw InvalidParameterError("backprop_forward: gradient shape mismatch");
  Eigen::VectorXd grad = bundle.alpha * bundle.pen_grad;
  for (int t = 0; t < bundle.n; ++t)
    grad.noalias() += bundle.dx_dp[t].transpose() * dL_dx_sim.col(t);
  return grad;
}

}  // namespace locodyn
