#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

namespace locodyn {

enum class SegmentShape { cylinder, cuboid };

struct Segment {
  std::string name;
  double length = 0.0;                     // m
  double mass = 0.0;                       // kg
  Eigen::Matrix3d inertia;                 // about COM, segment frame, kg m^2
  Eigen::Vector3d com_offset;              // COM position in segment frame, m
  SegmentShape shape = SegmentShape::cylinder;
  int parent = -1;                         // -1 for the root segment
  Eigen::Vector3d joint_offset;            // joint position in parent frame, m
};

struct SegmentPose {
  Eigen::Matrix3d rotation;   // world orientation
  Eigen::Vector3d origin;     // world position of the segment origin (= joint)
  Eigen::Vector3d com_world;  // world COM position
};

// Articulated tree: a 6-DOF floating root plus one 3-DOF ball joint per
// further segment (ZYX Euler angles throughout). The humanoid instance has
// 7 segments / 24 DOF; reduced trees are used by tests and tools.
class BodyModel {
public:
  explicit BodyModel(std::vector<Segment> segments,
                     const Eigen::Vector3d& gravity = Eigen::Vector3d(0, 0, -9.81));

  const std::vector<Segment>& segments() const { return segments_; }
  const Segment& segment(int i) const { return segments_[i]; }
  int num_segments() const { return static_cast<int>(segments_.size()); }
  int dof() const { return 6 + 3 * (num_segments() - 1); }
  const Eigen::Vector3d& gravity() const { return gravity_; }
  double total_mass() const { return total_mass_; }
  const std::vector<int>& children(int i) const { return children_[i]; }
  // Generalized-coordinate columns that move segment i (root block + chain).
  const std::vector<int>& active_cols(int i) const { return active_cols_[i]; }
  // First generalized-coordinate column of the ball joint of segment i >= 1.
  int joint_col(int i) const { return 6 + 3 * (i - 1); }

  Eigen::VectorXd l_sub() const;

  // Foot segment indices, or -1 when the model has none (reduced models).
  int left_foot = -1;
  int right_foot = -1;

private:
  std::vector<Segment> segments_;
  Eigen::Vector3d gravity_;
  double total_mass_ = 0.0;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<int>> active_cols_;
};

// Anthropometry configuration: mass fractions, shapes, and length-based
// scaling factors. Loaded from a versioned key = value text file; the schema
// is documented in the repository README.
struct AnthropometryConfig {
  int schema_version = 1;
  // Per segment kind: torso, thigh, shank, foot.
  std::map<std::string, double> mass_fraction;      // per side for legs
  std::map<std::string, std::string> shape;         // "cylinder" | "cuboid"
  std::map<std::string, double> radius_ratio;       // cylinders: r / length
  std::map<std::string, double> width_ratio;        // cuboids: y size / length
  std::map<std::string, double> depth_ratio;        // cuboids: x size / length
  std::map<std::string, double> height_ratio;       // foot cuboid: z size / length
  double hip_offset_ratio = 0.11;                   // lateral offset / torso length
  std::map<std::string, double> length_ratio;       // segment length / body height

  static AnthropometryConfig load(const std::string& path);
  void validate() const;
  // thigh + shank + foot fractions count twice (two legs).
  double fraction_sum() const;
};

// Segment order: torso, thigh_l, shank_l, foot_l, thigh_r, shank_r, foot_r.
// l_sub follows the same order.
BodyModel build_body_model(const Eigen::VectorXd& l_sub,
                           const AnthropometryConfig& anthro,
                           double total_body_mass,
                           const Eigen::Vector3d& gravity = Eigen::Vector3d(0, 0, -9.81));

std::vector<SegmentPose> forward_kinematics(const BodyModel& model,
                                            const Eigen::VectorXd& q);

// Inertia of the supported primitive shapes about their COM (principal frame).
Eigen::Matrix3d cylinder_inertia(double mass, double radius, double length);
Eigen::Matrix3d cuboid_inertia(double mass, double dx, double dy, double dz);

}  // namespace locodyn
