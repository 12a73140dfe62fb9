#include "locodyn/trajectory.hpp"

#include <cmath>

#include "locodyn/errors.hpp"

namespace locodyn {

void WindowSpec::validate() const {
  if (length < 4) throw ConfigError("window length must be >= 4 frames");
  if (stride < 1 || stride > length)
    throw ConfigError("window stride must be in [1, length]");
  if (dt <= 0.0) throw ConfigError("window dt must be positive");
}

PolyCoeffs fit_polynomial(const Eigen::MatrixXd& samples, int order, double duration) {
  const int frames = static_cast<int>(samples.rows());
  if (frames < order + 1)
    throw InvalidParameterError("polynomial fit needs at least order+1 frames");
  if (duration <= 0.0) throw InvalidParameterError("window duration must be positive");

  Eigen::MatrixXd vander(frames, order + 1);
  for (int i = 0; i < frames; ++i) {
    const double s = frames == 1 ? 0.0 : static_cast<double>(i) / (frames - 1);
    double p = 1.0;
    for (int k = 0; k <= order; ++k) {
      vander(i, k) = p;
      p *= s;
    }
  }

  PolyCoeffs out;
  out.order = order;
  out.duration = duration;
  // One QR factorization shared by all channels.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(vander);
  out.coeffs = qr.solve(samples).transpose();
  return out;
}

Eigen::VectorXd eval_polynomial(const PolyCoeffs& c, double s, int derivative_order) {
  if (derivative_order < 0 || derivative_order > c.order)
    throw InvalidParameterError("derivative order exceeds polynomial order");
  const int n = c.channels();
  Eigen::VectorXd out(n);
  // Horner on the derivative-shifted coefficients; scale converts d/ds to d/dt.
  for (int ch = 0; ch < n; ++ch) {
    double acc = 0.0;
    for (int k = c.order; k >= derivative_order; --k) {
      double fac = 1.0;
      for (int j = 0; j < derivative_order; ++j) fac *= (k - j);
      acc = acc * s + fac * c.coeffs(ch, k);
    }
    out[ch] = acc;
  }
  if (derivative_order > 0) out /= std::pow(c.duration, derivative_order);
  return out;
}

std::vector<int> window_starts(int frames, const WindowSpec& spec) {
  spec.validate();
  if (frames <= 0) throw InvalidParameterError("empty sequence");
  std::vector<int> starts;
  for (int s = 0; s + spec.length <= frames; s += spec.stride) starts.push_back(s);
  return starts;
}

Eigen::MatrixXd merge_windows(const std::vector<Eigen::MatrixXd>& windows,
                              const std::vector<int>& starts, int total_frames,
                              const WindowSpec& spec) {
  if (windows.size() != starts.size())
    throw InvalidParameterError("windows/starts size mismatch");
  if (windows.empty()) throw InvalidParameterError("no windows to merge");
  const int channels = static_cast<int>(windows.front().cols());

  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(total_frames, channels);
  Eigen::VectorXd count = Eigen::VectorXd::Zero(total_frames);
  for (size_t w = 0; w < windows.size(); ++w) {
    if (windows[w].rows() != spec.length || windows[w].cols() != channels)
      throw InvalidParameterError("inconsistent window shape in merge");
    for (int f = 0; f < spec.length; ++f) {
      const int frame = starts[w] + f;
      if (frame < 0 || frame >= total_frames)
        throw InvalidParameterError("window extends past sequence in merge");
      sum.row(frame) += windows[w].row(f);
      count[frame] += 1.0;
    }
  }
  for (int f = 0; f < total_frames; ++f)
    if (count[f] > 0.0) sum.row(f) /= count[f];
  return sum;
}

}  // namespace locodyn
