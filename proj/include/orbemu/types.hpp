/**
 * @file types.hpp
 * @brief Shared value types: Eigen aliases, rigid poses, frame-tagged wrenches, error types.
 */

#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace orbemu {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using VecX = Eigen::VectorXd;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using MatX = Eigen::MatrixXd;
using Quat = Eigen::Quaterniond;  // coeffs() order is (x, y, z, w)

/// Raised when a caller breaks a documented precondition (dimensions, frame tags, unit norms).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine cannot produce a result (e.g. a failed SPD factorization).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * @brief Rigid transform: position in meters plus a unit quaternion (scalar-last storage).
 *
 * Interpreted as "child expressed in parent": a point p in the child frame maps to
 * position + orientation * p in the parent frame.
 */
struct Pose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();

  static Pose identity() { return {}; }
  static Pose from_translation(const Vec3& t) { return {t, Quat::Identity()}; }

  Mat3 rotation() const { return orientation.toRotationMatrix(); }
  Vec3 transform_point(const Vec3& p) const { return position + orientation * p; }

  Pose operator*(const Pose& rhs) const {
    Pose out;
    out.position = position + orientation * rhs.position;
    out.orientation = (orientation * rhs.orientation).normalized();
    return out;
  }

  Pose inverse() const {
    Pose out;
    out.orientation = orientation.conjugate().normalized();
    out.position = -(out.orientation * position);
    return out;
  }
};

enum class Frame { Sensor, Lab, R, Task };

std::string to_string(Frame f);

/// Force/torque pair tagged with the frame its components are expressed in.
struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
  Frame frame = Frame::R;

  static Wrench zero(Frame f) { return {Vec3::Zero(), Vec3::Zero(), f}; }

  Vec6 stacked() const {
    Vec6 w;
    w << force, torque;
    return w;
  }
};

/// Throws ContractViolation unless `w` carries the `expected` tag.
void require_frame(const Wrench& w, Frame expected, const char* where);

/// Axis-angle vector of a rotation; magnitude in [0, pi].
Vec3 rotation_vector(const Quat& q);

/// Rotation about a unit axis by `angle` radians.
Quat axis_angle_quat(const Vec3& axis, double angle);

}  // namespace orbemu
