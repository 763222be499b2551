// Copyright 2026 The ACM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Piecewise-constant-curvature (PCC) kinematics of a continuum arm.
//
// Each segment is a circular arc of length L bent by alpha in the plane at
// azimuth beta about the local z axis. The local z axis points along the
// undeformed backbone. Everything here is templated on the scalar type so
// the dynamics can push automatic-differentiation scalars through it.

#pragma once

#include <cmath>
#include <vector>

#include "acm/common.hpp"
#include "acm/rigid_pose.hpp"

namespace acm {

/// Below this bend angle the tip displacement uses the sixth-order Taylor
/// polynomial instead of the closed form.
inline constexpr double kAlphaSwitch = 0.01;
inline constexpr double kDefaultAlphaMax = kPi / 2.0;
inline constexpr int kDefaultSegmentCount = 5;
inline constexpr double kDefaultSegmentLength = 0.05;

template <typename Scalar>
struct SegmentConfigT {
  Scalar alpha{0};   // bending angle, rad
  Scalar beta{0};    // bending-plane azimuth, rad
  Scalar length{kDefaultSegmentLength};  // arc length, m
};

using SegmentConfig = SegmentConfigT<double>;

/// Throws InvalidArgument unless 0 <= alpha <= alpha_max, beta in (-pi, pi]
/// and length > 0.
void validate(const SegmentConfig& cfg, double alpha_max = kDefaultAlphaMax);

struct ArmConfig {
  std::vector<SegmentConfig> segments;

  static ArmConfig uniform(int n = kDefaultSegmentCount,
                           double length = kDefaultSegmentLength, double alpha = 0.0,
                           double beta = 0.0);

  int size() const { return static_cast<int>(segments.size()); }
  double total_length() const;
};

void validate(const ArmConfig& arm, double alpha_max = kDefaultAlphaMax);

namespace detail {

// sin(a)/a and (1 - cos(a))/a^2 as functions of a^2, smooth through a = 0.
// The small-angle branch is the same polynomial the Taylor tip displacement
// uses.
template <typename Scalar>
Scalar sinc_sq(const Scalar& a2) {
  using std::sin;
  using std::sqrt;
  if (a2 < Scalar(kAlphaSwitch * kAlphaSwitch)) {
    return (a2 * a2 - Scalar(20) * a2 + Scalar(120)) / Scalar(120);
  }
  const Scalar a = sqrt(a2);
  return sin(a) / a;
}

template <typename Scalar>
Scalar versine_sq(const Scalar& a2) {
  using std::cos;
  using std::sqrt;
  if (a2 < Scalar(kAlphaSwitch * kAlphaSwitch)) {
    return (a2 * a2 - Scalar(30) * a2 + Scalar(360)) / Scalar(720);
  }
  const Scalar a = sqrt(a2);
  return (Scalar(1) - cos(a)) / a2;
}

}  // namespace detail

/// Closed-form tip displacement, singular at alpha = 0.
template <typename Scalar>
Vector3<Scalar> tip_displacement_closed_form(const SegmentConfigT<Scalar>& cfg) {
  using std::cos;
  using std::sin;
  const Scalar k = cfg.length / cfg.alpha;
  const Scalar v = Scalar(1) - cos(cfg.alpha);
  return {k * v * cos(cfg.beta), k * v * sin(cfg.beta), k * sin(cfg.alpha)};
}

/// Sixth-order Taylor expansion of the tip displacement about alpha = 0.
template <typename Scalar>
Vector3<Scalar> tip_displacement_taylor(const SegmentConfigT<Scalar>& cfg) {
  using std::cos;
  using std::sin;
  const Scalar a = cfg.alpha;
  const Scalar a2 = a * a;
  const Scalar lateral = a * (a2 * a2 - Scalar(30) * a2 + Scalar(360)) / Scalar(720);
  const Scalar axial = (a2 * a2 - Scalar(20) * a2 + Scalar(120)) / Scalar(120);
  return cfg.length * Vector3<Scalar>(lateral * cos(cfg.beta), lateral * sin(cfg.beta), axial);
}

/// Position of the segment tip in the segment base frame.
template <typename Scalar>
Vector3<Scalar> segment_tip_displacement(const SegmentConfigT<Scalar>& cfg) {
  if (cfg.alpha < Scalar(kAlphaSwitch)) return tip_displacement_taylor(cfg);
  return tip_displacement_closed_form(cfg);
}

/// Raw inverse map: alpha = 2 acos(|z| / |p|), beta = atan2(y, x).
/// Uses the equivalent 2 atan2(|p_xy|, |z|) for conditioning near alpha = 0.
/// No validation; beta = 0 when the tip lies on the axis.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> bend_angles_from_tip(const Vector3<Scalar>& p) {
  using std::abs;
  using std::atan2;
  using std::sqrt;
  const Scalar rho2 = p(0) * p(0) + p(1) * p(1);
  if (rho2 == Scalar(0)) return {Scalar(0), Scalar(0)};
  return {Scalar(2) * atan2(sqrt(rho2), abs(p(2))), atan2(p(1), p(0))};
}

/// Recovers (alpha, beta) from a tip position reached by an arc of length L.
/// Throws UnreachablePointError when p = 0, or when |p| does not match the
/// chord an arc of length L would have for the recovered alpha.
SegmentConfig segment_config_from_tip(const Vector3d& p, double length,
                                      double chord_tolerance = 1e-6);

/// Homogeneous transform of one segment: rotation Rz(beta) Ry(alpha) Rz(-beta)
/// and translation segment_tip_displacement(cfg).
template <typename Scalar>
RigidPoseT<Scalar> segment_transform(const SegmentConfigT<Scalar>& cfg) {
  RigidPoseT<Scalar> pose;
  pose.rotation = rot_z<Scalar>(cfg.beta) * rot_y<Scalar>(cfg.alpha) * rot_z<Scalar>(-cfg.beta);
  pose.translation = segment_tip_displacement(cfg);
  return pose;
}

/// Segment transform parameterised by the bending vector
/// (kx, ky) = alpha (cos beta, sin beta). Smooth through the straight
/// configuration, which the (alpha, beta) form is not.
template <typename Scalar>
RigidPoseT<Scalar> bend_transform(const Scalar& kx, const Scalar& ky, const Scalar& length) {
  const Scalar a2 = kx * kx + ky * ky;
  const Scalar f = detail::versine_sq(a2);
  const Scalar g = detail::sinc_sq(a2);
  // Rotation about the in-plane axis (-sin beta, cos beta, 0) by alpha.
  const Vector3<Scalar> axis(-ky, kx, Scalar(0));
  const Matrix3<Scalar> k = skew(axis);
  RigidPoseT<Scalar> pose;
  pose.rotation = Matrix3<Scalar>::Identity() + g * k + f * (k * k);
  pose.translation = length * Vector3<Scalar>(kx * f, ky * f, g);
  return pose;
}

/// Cumulative transforms from the arm base to the tip of each segment.
template <typename Scalar>
std::vector<RigidPoseT<Scalar>> compose_chain(const std::vector<SegmentConfigT<Scalar>>& segments) {
  std::vector<RigidPoseT<Scalar>> chain;
  chain.reserve(segments.size());
  RigidPoseT<Scalar> acc;
  for (const auto& cfg : segments) {
    const RigidPoseT<Scalar> local = segment_transform(cfg);
    acc.translation = acc.translation + acc.rotation * local.translation;
    acc.rotation = acc.rotation * local.rotation;
    chain.push_back(acc);
  }
  return chain;
}

inline std::vector<RigidPose> compose_chain(const ArmConfig& arm) {
  return compose_chain(arm.segments);
}

/// Arm-base-to-end-effector transform (last element of compose_chain).
RigidPose arm_tip_pose(const ArmConfig& arm);

/// World pose of the end effector: uav_pose * mount * arm_tip_pose(arm).
RigidPose end_effector_world_pose(const RigidPose& uav_pose, const RigidPose& mount,
                                  const ArmConfig& arm);

/// Tilt of a tip frame: angle between its z axis and the base z axis, and the
/// azimuth of that tilt. Azimuth is 0 for an untilted frame.
Vector2d tilt_of(const Matrix3d& rotation);

}  // namespace acm
