#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "locodyn/errors.hpp"
#include "locodyn/trajectory.hpp"

using namespace locodyn;

TEST_CASE("cubic fit recovers exact polynomial coefficients") {
  const int frames = 25;
  Eigen::MatrixXd samples(frames, 1);
  for (int i = 0; i < frames; ++i) {
    const double s = static_cast<double>(i) / (frames - 1);
    samples(i, 0) = 2.0 + 3.0 * s * s * s;
  }
  const PolyCoeffs c = fit_polynomial(samples, 3, 0.24);
  CHECK(c.coeffs(0, 0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(std::abs(c.coeffs(0, 1)) < 1e-10);
  CHECK(std::abs(c.coeffs(0, 2)) < 1e-10);
  CHECK(c.coeffs(0, 3) == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("constant samples give zero leading coefficients") {
  Eigen::MatrixXd samples = Eigen::MatrixXd::Constant(10, 3, 4.2);
  const PolyCoeffs c = fit_polynomial(samples, 3, 0.09);
  for (int ch = 0; ch < 3; ++ch) {
    CHECK(c.coeffs(ch, 0) == doctest::Approx(4.2).epsilon(1e-12));
    for (int k = 1; k <= 3; ++k) CHECK(std::abs(c.coeffs(ch, k)) < 1e-10);
  }
}

TEST_CASE("noisy line matches the normal-equations solution") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> noise(0.0, 0.1);
  const int frames = 25;
  Eigen::MatrixXd samples(frames, 1);
  Eigen::MatrixXd vander(frames, 2);
  for (int i = 0; i < frames; ++i) {
    const double s = static_cast<double>(i) / (frames - 1);
    samples(i, 0) = 1.5 - 0.7 * s + noise(rng);
    vander(i, 0) = 1.0;
    vander(i, 1) = s;
  }
  // Independent oracle: explicit normal equations.
  const Eigen::Vector2d beta =
      (vander.transpose() * vander).ldlt().solve(vander.transpose() * samples);

  const PolyCoeffs c = fit_polynomial(samples, 1, 0.24);
  CHECK(c.coeffs(0, 0) == doctest::Approx(beta[0]).epsilon(1e-9));
  CHECK(c.coeffs(0, 1) == doctest::Approx(beta[1]).epsilon(1e-9));
}

TEST_CASE("evaluation closed forms and derivative scaling") {
  PolyCoeffs c;
  c.order = 3;
  c.duration = 0.24;
  c.coeffs.resize(1, 4);
  c.coeffs << 0, 0, 0, 1;  // s^3
  CHECK(eval_polynomial(c, 1.0, 0)[0] == doctest::Approx(1.0));
  // second derivative 6s / T^2 at s=1 over a 0.24 s window
  CHECK(eval_polynomial(c, 1.0, 2)[0] == doctest::Approx(6.0 / (0.24 * 0.24)).epsilon(1e-12));
  CHECK(eval_polynomial(c, 1.0, 2)[0] == doctest::Approx(104.1667).epsilon(1e-4));
  CHECK_THROWS_AS(eval_polynomial(c, 0.5, 4), InvalidParameterError);
}

TEST_CASE("derivatives match finite differences of order-0 evaluation") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PolyCoeffs c;
  c.order = 3;
  c.duration = 0.3;
  c.coeffs.resize(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) c.coeffs(i, k) = u(rng);

  const double h = 1e-6;
  for (double s : {0.2, 0.5, 0.8}) {
    const Eigen::VectorXd d1 = eval_polynomial(c, s, 1);
    const Eigen::VectorXd fd1 = (eval_polynomial(c, s + h, 0) -
                                 eval_polynomial(c, s - h, 0)) /
                                (2.0 * h * c.duration);
    CHECK((d1 - fd1).cwiseAbs().maxCoeff() < 1e-6);
    const Eigen::VectorXd d2 = eval_polynomial(c, s, 2);
    const Eigen::VectorXd fd2 = (eval_polynomial(c, s + h, 1) -
                                 eval_polynomial(c, s - h, 1)) /
                                (2.0 * h * c.duration);
    CHECK((d2 - fd2).cwiseAbs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("window slicing") {
  WindowSpec spec{25, 12, 0.01};
  const std::vector<int> starts = window_starts(49, spec);
  REQUIRE(starts.size() == 3);
  CHECK(starts[0] == 0);
  CHECK(starts[1] == 12);
  CHECK(starts[2] == 24);

  WindowSpec disjoint{25, 25, 0.01};
  const std::vector<int> d = window_starts(75, disjoint);
  REQUIRE(d.size() == 3);
  CHECK(d[2] == 50);

  CHECK_THROWS_AS(window_starts(0, spec), InvalidParameterError);
  WindowSpec bad{3, 1, 0.01};
  CHECK_THROWS_AS(window_starts(10, bad), ConfigError);
}

TEST_CASE("every frame covered by at least one window when it fits") {
  for (int frames = 25; frames < 80; frames += 7) {
    WindowSpec spec{25, 12, 0.01};
    const auto starts = window_starts(frames, spec);
    std::vector<int> cover(frames, 0);
    for (int s : starts)
      for (int f = s; f < s + spec.length; ++f) cover[f]++;
    const int last_covered = starts.back() + spec.length;
    for (int f = 0; f < last_covered; ++f) CHECK(cover[f] >= 1);
  }
}

TEST_CASE("merging windows") {
  WindowSpec spec{25, 12, 0.01};

  SUBCASE("single window is identity") {
    Eigen::MatrixXd w = Eigen::MatrixXd::Random(25, 2);
    const Eigen::MatrixXd merged = merge_windows({w}, {0}, 25, spec);
    CHECK((merged - w).cwiseAbs().maxCoeff() < 1e-15);
  }

  SUBCASE("identical overlapping predictions stay unchanged") {
    Eigen::MatrixXd seq = Eigen::MatrixXd::Random(37, 2);
    std::vector<Eigen::MatrixXd> windows = {seq.topRows(25), seq.bottomRows(25)};
    const Eigen::MatrixXd merged = merge_windows(windows, {0, 12}, 37, spec);
    CHECK((merged - seq).cwiseAbs().maxCoeff() < 1e-14);
  }

  SUBCASE("fit -> evaluate -> merge round trip stays within fit residual") {
    // Smooth synthetic sequence; per-window cubic fits re-evaluated and merged.
    const int frames = 61;
    Eigen::MatrixXd seq(frames, 1);
    for (int i = 0; i < frames; ++i)
      seq(i, 0) = std::sin(0.07 * i) + 0.3 * std::cos(0.11 * i);
    const auto starts = window_starts(frames, spec);
    std::vector<Eigen::MatrixXd> windows;
    double max_fit_err = 0.0;
    for (int s : starts) {
      const PolyCoeffs c =
          fit_polynomial(seq.middleRows(s, spec.length), 3, spec.duration());
      Eigen::MatrixXd w(spec.length, 1);
      for (int f = 0; f < spec.length; ++f) {
        w(f, 0) = eval_polynomial(c, static_cast<double>(f) / (spec.length - 1), 0)[0];
        max_fit_err = std::max(max_fit_err, std::abs(w(f, 0) - seq(s + f, 0)));
      }
      windows.push_back(w);
    }
    const int covered = starts.back() + spec.length;
    const Eigen::MatrixXd merged = merge_windows(windows, starts, frames, spec);
    double rmse = 0.0;
    for (int f = 0; f < covered; ++f) {
      const double e = merged(f, 0) - seq(f, 0);
      rmse += e * e;
    }
    rmse = std::sqrt(rmse / covered);
    CHECK(rmse <= max_fit_err + 1e-12);
  }
}

TEST_CASE("fit-evaluate round trip exact for polynomial inputs") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int order : {1, 2, 3}) {
    Eigen::MatrixXd truth(1, order + 1);
    for (int k = 0; k <= order; ++k) truth(0, k) = u(rng);
    const int frames = 25;
    Eigen::MatrixXd samples(frames, 1);
    for (int i = 0; i < frames; ++i) {
      const double s = static_cast<double>(i) / (frames - 1);
      double acc = 0.0;
      for (int k = order; k >= 0; --k) acc = acc * s + truth(0, k);
      samples(i, 0) = acc;
    }
    const PolyCoeffs c = fit_polynomial(samples, order, 0.24);
    for (int i = 0; i < frames; ++i) {
      const double s = static_cast<double>(i) / (frames - 1);
      CHECK(eval_polynomial(c, s, 0)[0] == doctest::Approx(samples(i, 0)).epsilon(1e-10));
    }
  }
}

TEST_CASE("fit rejects too few frames") {
  Eigen::MatrixXd samples = Eigen::MatrixXd::Zero(3, 1);
  CHECK_THROWS_AS(fit_polynomial(samples, 3, 0.1), InvalidParameterError);
}
