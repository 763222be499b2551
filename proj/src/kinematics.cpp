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

#include "acm/kinematics.hpp"

#include <fmt/format.h>

namespace acm {

void validate(const SegmentConfig& cfg, double alpha_max) {
  if (!(cfg.alpha >= 0.0 && cfg.alpha <= alpha_max)) {
    throw InvalidArgument(
        fmt::format("segment alpha {} outside [0, {}]", cfg.alpha, alpha_max));
  }
  if (!(cfg.beta > -kPi && cfg.beta <= kPi)) {
    throw InvalidArgument(fmt::format("segment beta {} outside (-pi, pi]", cfg.beta));
  }
  if (!(cfg.length > 0.0)) {
    throw InvalidArgument(fmt::format("segment length {} must be positive", cfg.length));
  }
}

ArmConfig ArmConfig::uniform(int n, double length, double alpha, double beta) {
  if (n < 1) throw InvalidArgument("arm needs at least one segment");
  ArmConfig arm;
  arm.segments.assign(static_cast<std::size_t>(n), SegmentConfig{alpha, beta, length});
  return arm;
}

double ArmConfig::total_length() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.length;
  return total;
}

void validate(const ArmConfig& arm, double alpha_max) {
  if (arm.segments.empty()) throw InvalidArgument("arm needs at least one segment");
  for (const auto& s : arm.segments) validate(s, alpha_max);
}

SegmentConfig segment_config_from_tip(const Vector3d& p, double length, double chord_tolerance) {
  const double norm = p.norm();
  if (!(norm > 0.0)) throw UnreachablePointError("tip displacement has zero length");
  if (std::abs(p.z()) > norm) {
    throw UnreachablePointError("tip displacement violates |z| <= |p|");
  }
  const Vector2d angles = bend_angles_from_tip<double>(p);
  // Chord of an arc of length L bent by alpha: L sin(alpha/2) / (alpha/2).
  const double half = 0.5 * angles(0);
  const double chord = half > 0.0 ? length * std::sin(half) / half : length;
  if (std::abs(norm - chord) > chord_tolerance * length) {
    throw UnreachablePointError(fmt::format(
        "tip at distance {} is not reachable by an arc of length {} (chord {})", norm, length,
        chord));
  }
  return {angles(0), angles(1), length};
}

RigidPose arm_tip_pose(const ArmConfig& arm) {
  if (arm.segments.empty()) return RigidPose::identity();
  return compose_chain(arm).back();
}

RigidPose end_effector_world_pose(const RigidPose& uav_pose, const RigidPose& mount,
                                  const ArmConfig& arm) {
  return uav_pose * mount * arm_tip_pose(arm);
}

Vector2d tilt_of(const Matrix3d& rotation) {
  const Vector3d z = rotation.col(2);
  const double rho = std::hypot(z.x(), z.y());
  if (rho == 0.0) return {z.z() >= 0.0 ? 0.0 : kPi, 0.0};
  return {std::atan2(rho, z.z()), std::atan2(z.y(), z.x())};
}

}  // namespace acm
