#include "locodyn/body_model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <fstream>
#include <sstream>

#include "locodyn/errors.hpp"
#include "locodyn/kinematics.hpp"

namespace locodyn {

namespace {

void validate_inertia(const std::string& name, const Eigen::Matrix3d& inertia) {
  if ((inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidParameterError("segment '" + name + "': inertia not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(inertia);
  const Eigen::Vector3d ev = es.eigenvalues();
  if (ev.minCoeff() <= 0.0)
    throw InvalidParameterError("segment '" + name + "': inertia not positive definite");
  // Triangle inequality on principal moments.
  if (ev[0] + ev[1] < ev[2] - 1e-12 * ev[2])
    throw InvalidParameterError("segment '" + name +
                                "': inertia violates triangle inequality");
}

}  // namespace

BodyModel::BodyModel(std::vector<Segment> segments, const Eigen::Vector3d& gravity)
    : segments_(std::move(segments)), gravity_(gravity) {
  const int n = static_cast<int>(segments_.size());
  if (n < 1) throw InvalidParameterError("body model needs at least one segment");
  if (segments_[0].parent != -1)
    throw InvalidParameterError("segment 0 must be the root (parent == -1)");
  children_.resize(n);
  total_mass_ = 0.0;
  for (int i = 0; i < n; ++i) {
    const Segment& s = segments_[i];
    if (s.length <= 0.0)
      throw InvalidParameterError("segment '" + s.name + "': non-positive length");
    if (s.mass <= 0.0)
      throw InvalidParameterError("segment '" + s.name + "': non-positive mass");
    validate_inertia(s.name, s.inertia);
    if (i > 0) {
      if (s.parent < 0 || s.parent >= i)
        throw InvalidParameterError(
            "segment '" + s.name + "': parent must precede child (tree topology)");
      children_[s.parent].push_back(i);
    }
    total_mass_ += s.mass;
  }
  active_cols_.resize(n);
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      active_cols_[0] = {0, 1, 2, 3, 4, 5};
    } else {
      active_cols_[i] = active_cols_[segments_[i].parent];
      const int jc = joint_col(i);
      active_cols_[i].push_back(jc);
      active_cols_[i].push_back(jc + 1);
      active_cols_[i].push_back(jc + 2);
    }
  }
}

Eigen::VectorXd BodyModel::l_sub() const {
  Eigen::VectorXd out(num_segments());
  for (int i = 0; i < num_segments(); ++i) out[i] = segments_[i].length;
  return out;
}

Eigen::Matrix3d cylinder_inertia(double mass, double radius, double length) {
  Eigen::Matrix3d inertia = Eigen::Matrix3d::Zero();
  const double transverse = mass * (3.0 * radius * radius + length * length) / 12.0;
  inertia(0, 0) = transverse;
  inertia(1, 1) = transverse;
  inertia(2, 2) = 0.5 * mass * radius * radius;  // axis along local z
  return inertia;
}

Eigen::Matrix3d cuboid_inertia(double mass, double dx, double dy, double dz) {
  Eigen::Matrix3d inertia = Eigen::Matrix3d::Zero();
  inertia(0, 0) = mass * (dy * dy + dz * dz) / 12.0;
  inertia(1, 1) = mass * (dx * dx + dz * dz) / 12.0;
  inertia(2, 2) = mass * (dx * dx + dy * dy) / 12.0;
  return inertia;
}

double AnthropometryConfig::fraction_sum() const {
  double sum = 0.0;
  for (const auto& [kind, f] : mass_fraction)
    sum += (kind == "torso") ? f : 2.0 * f;
  return sum;
}

void AnthropometryConfig::validate() const {
  for (const char* kind : {"torso", "thigh", "shank", "foot"}) {
    if (!mass_fraction.count(kind))
      throw ConfigError(std::string("anthropometry: missing mass_fraction for ") + kind);
    if (!shape.count(kind))
      throw ConfigError(std::string("anthropometry: missing shape for ") + kind);
  }
  if (std::abs(fraction_sum() - 1.0) > 1e-6)
    throw ConfigError("anthropometry: mass fractions must sum to 1 (got " +
                      std::to_string(fraction_sum()) + ")");
}

AnthropometryConfig AnthropometryConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open anthropometry config: " + path);
  AnthropometryConfig cfg;
  cfg.mass_fraction.clear();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      // blank or comment-only line
      std::istringstream rest(line);
      std::string tok;
      if (rest >> tok)
        throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key or value");

    auto num = [&]() {
      try {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
      } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": bad number '" +
                          value + "'");
      }
    };

    const auto dot = key.find('.');
    if (key == "schema_version") {
      cfg.schema_version = static_cast<int>(num());
    } else if (key == "hip_offset_ratio") {
      cfg.hip_offset_ratio = num();
    } else if (dot != std::string::npos) {
      const std::string head = key.substr(0, dot);
      const std::string tail = key.substr(dot + 1);
      if (tail == "mass_fraction") cfg.mass_fraction[head] = num();
      else if (tail == "shape") cfg.shape[head] = value;
      else if (tail == "radius_ratio") cfg.radius_ratio[head] = num();
      else if (tail == "width_ratio") cfg.width_ratio[head] = num();
      else if (tail == "depth_ratio") cfg.depth_ratio[head] = num();
      else if (tail == "height_ratio") cfg.height_ratio[head] = num();
      else if (head == "length_ratio") cfg.length_ratio[tail] = num();
      else throw ConfigError(path + ": unknown key '" + key + "'");
    } else {
      throw ConfigError(path + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

namespace {

Segment make_segment(const std::string& name, const std::string& kind,
                     double length, double mass, const AnthropometryConfig& a,
                     int parent, const Eigen::Vector3d& joint_offset) {
  Segment s;
  s.name = name;
  s.length = length;
  s.mass = mass;
  s.parent = parent;
  s.joint_offset = joint_offset;
  const std::string shape = a.shape.at(kind);
  if (shape == "cylinder") {
    s.shape = SegmentShape::cylinder;
    const double r = a.radius_ratio.at(kind) * length;
    s.inertia = cylinder_inertia(mass, r, length);
    // Legs hang downward from the joint.
    s.com_offset = Eigen::Vector3d(0, 0, -0.5 * length);
  } else if (shape == "cuboid") {
    s.shape = SegmentShape::cuboid;
    if (kind == "torso") {
      const double dx = a.depth_ratio.at(kind) * length;
      const double dy = a.width_ratio.at(kind) * length;
      s.inertia = cuboid_inertia(mass, dx, dy, length);
      s.com_offset = Eigen::Vector3d(0, 0, 0.5 * length);
    } else {
      // Foot: box extending forward (+x) from the ankle, top at ankle level.
      const double dy = a.width_ratio.at(kind) * length;
      const double dz = a.height_ratio.at(kind) * length;
      s.inertia = cuboid_inertia(mass, length, dy, dz);
      s.com_offset = Eigen::Vector3d(0.5 * length, 0, -0.5 * dz);
    }
  } else {
    throw ConfigError("anthropometry: unknown shape '" + shape + "' for " + kind);
  }
  return s;
}

}  // namespace

BodyModel build_body_model(const Eigen::VectorXd& l_sub,
                           const AnthropometryConfig& anthro,
                           double total_body_mass, const Eigen::Vector3d& gravity) {
  if (l_sub.size() != 7)
    throw InvalidParameterError("l_sub must have 7 entries (torso, l/r thigh, shank, foot)");
  for (int i = 0; i < 7; ++i)
    if (!(l_sub[i] > 0.0) || !std::isfinite(l_sub[i]))
      throw InvalidParameterError("l_sub entries must be positive and finite");
  if (!(total_body_mass > 0.0))
    throw InvalidParameterError("total body mass must be positive");
  anthro.validate();

  const double m_torso = anthro.mass_fraction.at("torso") * total_body_mass;
  const double m_thigh = anthro.mass_fraction.at("thigh") * total_body_mass;
  const double m_shank = anthro.mass_fraction.at("shank") * total_body_mass;
  const double m_foot = anthro.mass_fraction.at("foot") * total_body_mass;

  const double hip = anthro.hip_offset_ratio * l_sub[0];

  std::vector<Segment> segs;
  segs.push_back(make_segment("torso", "torso", l_sub[0], m_torso, anthro, -1,
                              Eigen::Vector3d::Zero()));
  // Left leg (+y), indices 1..3, lengths l_sub[1..3].
  segs.push_back(make_segment("thigh_l", "thigh", l_sub[1], m_thigh, anthro, 0,
                              Eigen::Vector3d(0, hip, 0)));
  segs.push_back(make_segment("shank_l", "shank", l_sub[2], m_shank, anthro, 1,
                              Eigen::Vector3d(0, 0, -l_sub[1])));
  segs.push_back(make_segment("foot_l", "foot", l_sub[3], m_foot, anthro, 2,
                              Eigen::Vector3d(0, 0, -l_sub[2])));
  // Right leg (-y), indices 4..6, lengths l_sub[4..6].
  segs.push_back(make_segment("thigh_r", "thigh", l_sub[4], m_thigh, anthro, 0,
                              Eigen::Vector3d(0, -hip, 0)));
  segs.push_back(make_segment("shank_r", "shank", l_sub[5], m_shank, anthro, 4,
                              Eigen::Vector3d(0, 0, -l_sub[4])));
  segs.push_back(make_segment("foot_r", "foot", l_sub[6], m_foot, anthro, 5,
                              Eigen::Vector3d(0, 0, -l_sub[5])));

  BodyModel model(std::move(segs), gravity);
  model.left_foot = 3;
  model.right_foot = 6;

  const double mass_err =
      std::abs(model.total_mass() - total_body_mass) / total_body_mass;
  if (mass_err > 1e-9)
    throw InvalidParameterError("segment masses do not sum to total body mass");
  return model;
}

std::vector<SegmentPose> forward_kinematics(const BodyModel& model,
                                            const Eigen::VectorXd& q) {
  if (q.size() != model.dof())
    throw InvalidParameterError("q has wrong dimension");
  if (!q.allFinite()) throw NumericInputError("q contains non-finite values");

  KinematicsCacheT<double> cache;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(model.dof());
  compute_kinematics<double>(model, q, zero, zero, false, cache);

  std::vector<SegmentPose> poses(model.num_segments());
  for (int i = 0; i < model.num_segments(); ++i) {
    poses[i].rotation = cache.seg[i].rot;
    poses[i].origin = cache.seg[i].origin;
    poses[i].com_world = cache.seg[i].com;
  }
  return poses;
}

}  // namespace locodyn
