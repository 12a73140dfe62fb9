#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "locodyn/body_model.hpp"
#include "locodyn/dynamics.hpp"
#include "locodyn/trajectory.hpp"

namespace locodyn {

struct ContactFrame {
  bool left = false;
  bool right = false;
};

// One training sample: a motion window with optional force, torque and
// contact annotations. Subset membership is derived from field presence:
// motion-set (always), contact-set (contact), ground-reaction-set (gamma_f),
// torque-set (gamma_f and gamma_tau).
struct WindowSample {
  PolyCoeffs gamma_q;                              // 24 channels, cubic
  Eigen::VectorXd l_sub;                           // 7 segment lengths
  double total_mass = 0.0;                         // kg
  std::optional<PolyCoeffs> gamma_f;               // 12 channels, cubic
  std::optional<PolyCoeffs> gamma_tau;             // 18 channels, linear
  std::optional<std::vector<ContactFrame>> contact;  // per frame
  Eigen::VectorXd x0;                              // 48, = gamma_q state at s=0
  Eigen::VectorXd m_xdot;                          // 48 per-component max |xdot|
  double dt = 0.01;
  int n = 24;  // Euler steps = frames - 1
  int subject = 0;
  int sequence = 0;
  int window_start = 0;
  std::string style = "walk";

  int frames() const { return n + 1; }
  double duration() const { return n * dt; }
  bool in_motion_set() const { return true; }
  bool in_contact_set() const { return contact.has_value(); }
  bool in_ground_reaction_set() const { return gamma_f.has_value(); }
  bool in_torque_set() const { return gamma_f.has_value() && gamma_tau.has_value(); }

  void validate() const;
};

struct Dataset {
  WindowSpec window;
  Eigen::VectorXd sigma_xdot;  // damping statistics of the generating set (48)
  std::vector<WindowSample> samples;

  std::vector<int> subjects() const;
};

// Per-frame force-plate-style record for one time instant.
struct ContactRecord {
  bool contact_l = false, contact_r = false;
  Eigen::Vector3d cop_l = Eigen::Vector3d::Zero();  // center of pressure, world
  Eigen::Vector3d cop_r = Eigen::Vector3d::Zero();
  Eigen::Vector3d f_l = Eigen::Vector3d::Zero();    // reaction force, N
  Eigen::Vector3d f_r = Eigen::Vector3d::Zero();
  Eigen::Vector3d tz_l = Eigen::Vector3d::Zero();   // torsional torque, Nm
  Eigen::Vector3d tz_r = Eigen::Vector3d::Zero();
};

// m_c = d_cop x f + t_z with d_cop from the foot COM (world frame) to the COP.
GrfmVector assemble_grfm(const BodyModel& model, const Eigen::VectorXd& q,
                         const ContactRecord& rec);

struct SynthConfig {
  int subjects = 8;
  int sequences_per_subject = 6;
  int frames_per_sequence = 145;
  WindowSpec window{25, 12, 0.01};
  std::string style = "walk";  // walk | run | mixed
  double fraction_torque = 0.35;       // of windows; subset of fraction_gr
  double fraction_gr = 0.45;
  double fraction_contact_extra = 0.6;  // of remaining windows, contact-only labels
  uint64_t seed = 1;
  // Subject sampling ranges (demographics of a plausible adult population).
  double height_min = 1.67, height_max = 1.94;
  double mass_min = 55.7, mass_max = 95.8;
  double amplitude_scale = 1.0;  // 0 -> standing sequences
  // Torque labelling: forward-dynamics optimization acceptance threshold.
  double torque_rmse_threshold = 0.05;
  int torque_opt_iters = 30;
  int max_sequence_retries = 5;
  std::string anthropometry_path;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

Dataset synthesize_dataset(const SynthConfig& cfg);

// Sagittal-plane mirroring: left/right channels swapped, lateral components
// negated per the documented sign table. An involution.
WindowSample mirror_augment(const WindowSample& sample);

// Gaussian angle noise (degrees) on the joint-angle channels with polynomial
// refit, plus random contact-label flips: `select_fraction` of the labels are
// chosen and each flips with probability `flip_prob`.
WindowSample add_noise(const WindowSample& sample, double angle_sigma_deg,
                       double select_fraction, double flip_prob, uint64_t seed);

// Noise presets used by the degradation protocol, degrees.
inline const std::vector<double> kNoiseSigmaPresetsDeg = {0.3, 0.6, 1.1, 2.3};

void save_dataset(const std::string& path, const Dataset& dataset);
Dataset load_dataset(const std::string& path);

// Generic per-frame motion CSV: header line, then time plus 24 generalized
// coordinates per row (translations in meters, angles in degrees).
Dataset import_motion_csv(const std::string& path, const WindowSpec& spec,
                          const Eigen::VectorXd& l_sub, double total_mass);

// Std of |velocities| and |accelerations| per state component over all
// frames of all samples (frame states evaluated from gamma_q).
Eigen::VectorXd damping_sigma_from(const std::vector<WindowSample>& samples);

// Per-component max |velocity| / |acceleration| over the window's frames.
Eigen::VectorXd m_xdot_from_polynomial(const PolyCoeffs& gamma_q, int frames);

// Network feature vector: flattened gamma_q (96), l_sub (7), mass (1).
Eigen::VectorXd net_input_features(const WindowSample& sample);
// Target/output packing: gamma_f coefficients (48) then gamma_tau (36).
Eigen::VectorXd pack_targets(const PolyCoeffs& gamma_f, const PolyCoeffs& gamma_tau);
void unpack_outputs(const Eigen::VectorXd& out, double duration, PolyCoeffs& gamma_f,
                    PolyCoeffs& gamma_tau);

// Deterministic stream derivation for parallel generation.
uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0);

}  // namespace locodyn
