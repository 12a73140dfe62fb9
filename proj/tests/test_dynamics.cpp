#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "locodyn/body_model.hpp"
#include "locodyn/dynamics.hpp"
#include "locodyn/errors.hpp"
#include "test_helpers.hpp"

using namespace locodyn;
using namespace locodyn::test;

TEST_CASE("single free rigid body: translational block is m I3") {
  // Reduced model: torso only.
  std::vector<Segment> segs;
  Segment s;
  s.name = "body";
  s.length = 0.5;
  s.mass = 12.0;
  s.inertia = cuboid_inertia(12.0, 0.2, 0.3, 0.5);
  s.com_offset = Eigen::Vector3d(0, 0, 0.25);
  s.shape = SegmentShape::cuboid;
  s.parent = -1;
  const BodyModel m({s});
  const Eigen::VectorXd q = Eigen::VectorXd::Zero(6);
  const Eigen::MatrixXd M = mass_matrix(m, q);
  CHECK((M.topLeftCorner<3, 3>() - 12.0 * Eigen::Matrix3d::Identity())
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("mass matrix symmetric for 100 random poses") {
  const BodyModel m = humanoid();
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const Eigen::MatrixXd M = mass_matrix(m, random_pose(m, rng));
    CHECK((M - M.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("mass matrix SPD on 1000 random locomotion-range poses") {
  const BodyModel m = humanoid();
  std::mt19937_64 rng(6);
  for (int i = 0; i < 1000; ++i) {
    Eigen::MatrixXd M = mass_matrix(m, random_pose(m, rng));
    CHECK(cholesky_factor(M));  // mass_matrix already throws if not SPD
  }
}

TEST_CASE("double pendulum restriction matches the Lagrangian oracle") {
  const double m1 = 5.0, m2 = 3.0, L1 = 0.4, L2 = 0.35;
  std::vector<Segment> segs;
  Segment root;
  root.name = "base";
  root.length = 0.2;
  root.mass = 10.0;
  root.inertia = cuboid_inertia(10.0, 0.2, 0.2, 0.2);
  root.com_offset = Eigen::Vector3d::Zero();
  root.parent = -1;
  segs.push_back(root);
  Segment l1;
  l1.name = "link1";
  l1.length = L1;
  l1.mass = m1;
  l1.inertia = cylinder_inertia(m1, 0.04, L1);
  l1.com_offset = Eigen::Vector3d(0, 0, -L1 / 2);
  l1.parent = 0;
  l1.joint_offset = Eigen::Vector3d::Zero();
  segs.push_back(l1);
  Segment l2 = l1;
  l2.name = "link2";
  l2.length = L2;
  l2.mass = m2;
  l2.inertia = cylinder_inertia(m2, 0.03, L2);
  l2.com_offset = Eigen::Vector3d(0, 0, -L2 / 2);
  l2.parent = 1;
  l2.joint_offset = Eigen::Vector3d(0, 0, -L1);
  segs.push_back(l2);
  const BodyModel model(segs);

  DoublePendulumOracle oracle;
  oracle.m1 = m1;
  oracle.c1 = L1 / 2;
  oracle.I1 = l1.inertia(1, 1);
  oracle.L1 = L1;
  oracle.m2 = m2;
  oracle.c2 = L2 / 2;
  oracle.I2 = l2.inertia(1, 1);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int trial = 0; trial < 50; ++trial) {
    const double th1 = u(rng), th2 = u(rng), w1 = u(rng), w2 = u(rng);
    Eigen::VectorXd q = Eigen::VectorXd::Zero(12);
    Eigen::VectorXd qd = Eigen::VectorXd::Zero(12);
    q[7] = th1;   // link1 joint, y component
    q[10] = th2;  // link2 joint, y component
    qd[7] = w1;
    qd[10] = w2;

    const Eigen::MatrixXd M = mass_matrix(model, q);
    const Eigen::Matrix2d M_oracle = oracle.mass_matrix(th2);
    CHECK(std::abs(M(7, 7) - M_oracle(0, 0)) < 1e-8);
    CHECK(std::abs(M(7, 10) - M_oracle(0, 1)) < 1e-8);
    CHECK(std::abs(M(10, 10) - M_oracle(1, 1)) < 1e-8);

    // Fixed-base accelerations: joint rows of the EOM with the root clamped.
    Eigen::VectorXd x(24);
    x << q, qd;
    const Eigen::Vector2d tau(u(rng), u(rng));
    Eigen::VectorXd tau_full = Eigen::VectorXd::Zero(6);
    tau_full[1] = tau[0];
    tau_full[4] = tau[1];
    const Eigen::VectorXd F = generalized_force(model, x, GrfmVector::Zero(), tau_full);
    Eigen::Matrix2d M_sub;
    M_sub << M(7, 7), M(7, 10), M(10, 7), M(10, 10);
    const Eigen::Vector2d qdd = M_sub.ldlt().solve(Eigen::Vector2d(F[7], F[10]));
    const Eigen::Vector2d qdd_oracle = oracle.accel(th1, th2, w1, w2, tau);
    CHECK(std::abs(qdd[0] - qdd_oracle[0]) < 1e-8);
    CHECK(std::abs(qdd[1] - qdd_oracle[1]) < 1e-8);
  }
}

TEST_CASE("generalized force: gravity term equals minus potential gradient") {
  const BodyModel m = humanoid();
  std::mt19937_64 rng(19);
  const Eigen::VectorXd q = random_pose(m, rng);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(48);
  x.head(24) = q;
  const Eigen::VectorXd F =
      generalized_force(m, x, GrfmVector::Zero(), Eigen::VectorXd::Zero(18));

  auto potential = [&](const Eigen::VectorXd& qq) {
    const auto poses = forward_kinematics(m, qq);
    double V = 0.0;
    for (int i = 0; i < m.num_segments(); ++i)
      V -= m.segment(i).mass * m.gravity().dot(poses[i].com_world);
    return V;
  };
  const double h = 1e-6;
  for (int j = 0; j < 24; ++j) {
    Eigen::VectorXd qp = q, qm = q;
    qp[j] += h;
    qm[j] -= h;
    const double fd = -(potential(qp) - potential(qm)) / (2 * h);
    CHECK(F[j] == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("generalized force: torque on one DOF and linearity") {
  const BodyModel m = humanoid(70.0, 1.78, Eigen::Vector3d::Zero());  // gravity off
  Eigen::VectorXd x = Eigen::VectorXd::Zero(48);
  Eigen::VectorXd tau = Eigen::VectorXd::Zero(18);
  tau[4] = 2.5;
  const Eigen::MatrixXd M = mass_matrix(m, x.head(24));
  const Eigen::VectorXd F = generalized_force(m, x, GrfmVector::Zero(), tau);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(24);
  e[6 + 4] = 2.5;
  CHECK((F - e).cwiseAbs().maxCoeff() < 1e-12);

  const Eigen::VectorXd qdd = M.ldlt().solve(F);
  const Eigen::VectorXd qdd_neg = M.ldlt().solve(
      generalized_force(m, x, GrfmVector::Zero(), (-tau).eval()));
  CHECK((qdd + qdd_neg).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("generalized force affine in (F_c, tau) at fixed state") {
  const BodyModel m = humanoid();
  std::mt19937_64 rng(29);
  Eigen::VectorXd x(48);
  x << random_pose(m, rng), random_vector(24, rng, 0.8);
  const GrfmVector F1 = GrfmVector::Random();
  const GrfmVector F2 = GrfmVector::Random();
  const Eigen::VectorXd t1 = random_vector(18, rng, 5.0);
  const Eigen::VectorXd t2 = random_vector(18, rng, 5.0);

  const Eigen::VectorXd base =
      generalized_force(m, x, GrfmVector::Zero(), Eigen::VectorXd::Zero(18));
  const Eigen::VectorXd a = generalized_force(m, x, F1, t1) - base;
  const Eigen::VectorXd b = generalized_force(m, x, F2, t2) - base;
  const Eigen::VectorXd ab =
      generalized_force(m, x, (F1 + F2).eval(), (t1 + t2).eval()) - base;
  CHECK((ab - a - b).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("hanging pendulum at equilibrium has zero joint force") {
  const BodyModel chain = chain_model(1);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(18);  // dof 9, hanging straight down
  const Eigen::VectorXd F =
      generalized_force(chain, x, GrfmVector::Zero(), Eigen::VectorXd::Zero(3));
  CHECK(std::abs(F[7]) < 1e-12);  // y-angle component of the link joint
}

TEST_CASE("damping closed forms") {
  DampingConfig cfg;
  const int nx = 4;
  cfg.sigma_xdot = Eigen::VectorXd::Constant(nx, 0.5);
  cfg.k = 10.0;
  Eigen::VectorXd m_x = Eigen::VectorXd::Constant(nx, 2.0);

  SUBCASE("inside the band d = 1") {
    Eigen::VectorXd v(nx);
    v << 0.0, 1.0, -6.9, 6.9;  // band edge at 2 + 5 = 7
    const Eigen::VectorXd d = damping_vector(v, m_x, cfg);
    for (int i = 0; i < nx; ++i) CHECK(d[i] == 1.0);
  }

  SUBCASE("at m + 2 k sigma the damping is exactly 1/e") {
    Eigen::VectorXd v = Eigen::VectorXd::Constant(nx, 2.0 + 2.0 * 10.0 * 0.5);
    const Eigen::VectorXd d = damping_vector(v, m_x, cfg);
    for (int i = 0; i < nx; ++i)
      CHECK(d[i] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(d[0] == doctest::Approx(0.367879).epsilon(1e-5));
  }

  SUBCASE("worked example") {
    // k = 10, sigma = 0.5, m = 2, |v| = 8 -> max((8-2-5)/5, 0) = 0.2
    Eigen::VectorXd v = Eigen::VectorXd::Constant(nx, 8.0);
    const Eigen::VectorXd d = damping_vector(v, m_x, cfg);
    CHECK(d[0] == doctest::Approx(std::exp(-0.2)).epsilon(1e-12));
    CHECK(d[0] == doctest::Approx(0.818731).epsilon(1e-5));
  }

  SUBCASE("bounds: 0 < d <= 1 always") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-500.0, 500.0);
    for (int trial = 0; trial < 1000; ++trial) {
      Eigen::VectorXd v(nx);
      for (int i = 0; i < nx; ++i) v[i] = u(rng);
      const Eigen::VectorXd d = damping_vector(v, m_x, cfg);
      for (int i = 0; i < nx; ++i) {
        CHECK(d[i] > 0.0);
        CHECK(d[i] <= 1.0);
      }
    }
  }

  SUBCASE("zero sigma uses the configured floor") {
    DampingConfig zero = cfg;
    zero.sigma_xdot.setZero();
    Eigen::VectorXd v = Eigen::VectorXd::Constant(nx, 10.0);
    const Eigen::VectorXd d = damping_vector(v, m_x, zero);
    for (int i = 0; i < nx; ++i) {
      CHECK(std::isfinite(d[i]));
      CHECK(d[i] > 0.0);
    }
  }
}

TEST_CASE("state derivative basics") {
  const int nx = 48;
  SUBCASE("rest with no forces and gravity off is a fixed point") {
    const BodyModel m = humanoid(70.0, 1.78, Eigen::Vector3d::Zero());
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(nx);
    const auto [xdot, d] = state_derivative(
        m, x, GrfmVector::Zero(), Eigen::VectorXd::Zero(18),
        Eigen::VectorXd::Zero(nx), DampingConfig::disabled(nx));
    CHECK(xdot.cwiseAbs().maxCoeff() < 1e-12);
    CHECK((d.array() == 1.0).all());
  }

  SUBCASE("inside the damping band the derivative is exactly undamped") {
    const BodyModel m = humanoid();
    std::mt19937_64 rng(41);
    Eigen::VectorXd x(nx);
    x << random_pose(m, rng), random_vector(24, rng, 0.5);
    DampingConfig cfg;
    cfg.sigma_xdot = Eigen::VectorXd::Constant(nx, 1e4);
    const Eigen::VectorXd m_x = Eigen::VectorXd::Zero(nx);
    const Eigen::VectorXd tau = random_vector(18, rng, 3.0);
    const auto [xdot, d] = state_derivative(m, x, GrfmVector::Zero(), tau, m_x, cfg);
    CHECK((d.array() == 1.0).all());
    // undamped reference via mass matrix solve
    const Eigen::MatrixXd M = mass_matrix(m, x.head(24));
    const Eigen::VectorXd F = generalized_force(m, x, GrfmVector::Zero(), tau);
    const Eigen::VectorXd qdd = M.ldlt().solve(F);
    CHECK((xdot.tail(24) - qdd).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((xdot.head(24) - x.tail(24)).cwiseAbs().maxCoeff() < 1e-14);
  }

  SUBCASE("damping shrinks extreme accelerations") {
    const BodyModel m = humanoid();
    std::mt19937_64 rng(43);
    Eigen::VectorXd x(nx);
    x << random_pose(m, rng), random_vector(24, rng, 0.5);
    DampingConfig cfg;
    cfg.sigma_xdot = Eigen::VectorXd::Constant(nx, 0.1);
    const Eigen::VectorXd m_x = Eigen::VectorXd::Zero(nx);
    const Eigen::VectorXd tau = random_vector(18, rng, 500.0);
    const auto [xdot, d] = state_derivative(m, x, GrfmVector::Zero(), tau, m_x, cfg);
    const Eigen::MatrixXd M = mass_matrix(m, x.head(24));
    const Eigen::VectorXd F = generalized_force(m, x, GrfmVector::Zero(), tau);
    const Eigen::VectorXd qdd = M.ldlt().solve(F);
    bool any_damped = false;
    for (int j = 0; j < 24; ++j) {
      CHECK(std::abs(xdot[24 + j]) <= std::abs(qdd[j]) + 1e-12);
      if (d[24 + j] < 1.0) any_damped = true;
    }
    CHECK(any_damped);
  }
}
