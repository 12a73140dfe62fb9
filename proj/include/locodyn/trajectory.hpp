#pragma once

#include <Eigen/Dense>
#include <vector>

namespace locodyn {

// Per-window polynomial representation. Each channel is a polynomial in the
// normalized window time s in [0,1]; `duration` is the physical window length
// in seconds so derivative evaluation can be returned in physical units.
struct PolyCoeffs {
  int order = 3;
  double duration = 0.0;                   // seconds spanned by s in [0,1]
  Eigen::MatrixXd coeffs;                  // channels x (order+1), ascending powers

  int channels() const { return static_cast<int>(coeffs.rows()); }
};

struct WindowSpec {
  int length = 25;   // frames
  int stride = 12;   // frames
  double dt = 0.01;  // seconds between frames

  double duration() const { return (length - 1) * dt; }
  void validate() const;
};

// Least-squares fit per channel on normalized time; exact for inputs that are
// polynomials of degree <= order. `samples` is frames x channels.
PolyCoeffs fit_polynomial(const Eigen::MatrixXd& samples, int order, double duration);

// Evaluate all channels (or their 1st/2nd physical-time derivative) at s.
Eigen::VectorXd eval_polynomial(const PolyCoeffs& c, double s, int derivative_order = 0);

// Window start frames for a sequence of `frames` frames; the tail shorter
// than spec.length is dropped.
std::vector<int> window_starts(int frames, const WindowSpec& spec);

// Per-frame average of all overlapping window predictions. `windows[i]` holds
// spec.length x channels values for the window starting at starts[i].
Eigen::MatrixXd merge_windows(const std::vector<Eigen::MatrixXd>& windows,
                              const std::vector<int>& starts, int total_frames,
                              const WindowSpec& spec);

}  // namespace locodyn
