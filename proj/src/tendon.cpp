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

#include "acm/tendon.hpp"

#include <fmt/format.h>

#include <unsupported/Eigen/AutoDiff>

namespace acm {

void validate(const TendonGeometry& geom) {
  if (!(geom.routing_radius > 0.0)) {
    throw InvalidArgument("tendon routing radius must be positive");
  }
  if (std::abs(geom.tendon_spacing - kPi / 2.0) > 1e-12) {
    throw InvalidArgument("four-tendon routing requires a spacing of pi/2");
  }
}

Vector4d actuation_from_config(const SegmentConfig& cfg, const TendonGeometry& geom) {
  // With pi/2 spacing, cos(beta + (i - 1) mu) cycles through c, -s, -c, s.
  // Writing the pairs as exact negations keeps q1 + q3 = q2 + q4 = 0 bitwise.
  const double ar = cfg.alpha * geom.routing_radius;
  const double q1 = -ar * std::cos(cfg.beta);
  const double q2 = ar * std::sin(cfg.beta);
  return {q1, q2, -q1, -q2};
}

Vector4d tendon_lengths(const SegmentConfig& cfg, const TendonGeometry& geom) {
  const Vector4d lengths = Vector4d::Constant(cfg.length) + actuation_from_config(cfg, geom);
  if (lengths.minCoeff() <= 0.0) {
    throw InfeasibleConfigError(fmt::format(
        "bend alpha={} with routing radius {} collapses a tendon of segment length {}",
        cfg.alpha, geom.routing_radius, cfg.length));
  }
  return lengths;
}

SegmentConfig config_from_actuation(const Vector4d& q, const TendonGeometry& geom,
                                    double length, double pair_tolerance) {
  if (std::abs(q(0) + q(2)) > pair_tolerance || std::abs(q(1) + q(3)) > pair_tolerance) {
    throw InconsistentActuationError(fmt::format(
        "antagonistic pairs out of balance: q1+q3={}, q2+q4={}", q(0) + q(2), q(1) + q(3)));
  }
  // q1 = -alpha r cos(beta), q2 = alpha r sin(beta). Averaging each pair keeps
  // the estimate symmetric in the two tendons.
  const double c = -0.5 * (q(0) - q(2));
  const double s = 0.5 * (q(1) - q(3));
  const double ar = std::hypot(c, s);
  if (ar == 0.0) return {0.0, 0.0, length};
  return {ar / geom.routing_radius, std::atan2(s, c), length};
}

Matrix42d actuation_jacobian(const SegmentConfig& cfg, const TendonGeometry& geom) {
  Matrix42d j;
  const double r = geom.routing_radius;
  for (int i = 0; i < kTendonCount; ++i) {
    const double phase = cfg.beta + geom.azimuth(i);
    j(i, 0) = -r * std::cos(phase);
    j(i, 1) = r * cfg.alpha * std::sin(phase);
  }
  return j;
}

Vector4d instantaneous_actuation(const SegmentConfig& cfg, const Vector3d& delta_tip,
                                 const TendonGeometry& geom) {
  if (cfg.alpha < kSingularAlpha) {
    throw SingularConfigurationError(fmt::format(
        "bend angle {} too small: bending plane is undefined for a straight segment",
        cfg.alpha));
  }
  using Jet = Eigen::AutoDiffScalar<Eigen::Vector3d>;
  const Vector3d tip = segment_tip_displacement(cfg);
  Vector3<Jet> p;
  for (int i = 0; i < 3; ++i) p(i) = Jet(tip(i), 3, i);
  const Eigen::Matrix<Jet, 2, 1> angles = bend_angles_from_tip<Jet>(p);
  Eigen::Matrix<double, 2, 3> dangles;
  dangles.row(0) = angles(0).derivatives().transpose();
  dangles.row(1) = angles(1).derivatives().transpose();
  return actuation_jacobian(cfg, geom) * (dangles * delta_tip);
}

Matrix24d tendon_force_map(const TendonGeometry& geom) {
  Matrix24d b;
  for (int i = 0; i < kTendonCount; ++i) {
    b(0, i) = geom.routing_radius * std::cos(geom.azimuth(i));
    b(1, i) = -geom.routing_radius * std::sin(geom.azimuth(i));
  }
  return b;
}

Vector4d section_actuation(const ArmConfig& arm, const TendonGeometry& geom) {
  Vector4d total = Vector4d::Zero();
  for (const auto& s : arm.segments) total += actuation_from_config(s, geom);
  return total;
}

std::vector<Vector4d> split_section_actuation(const Vector4d& total, int n) {
  if (n < 1) throw InvalidArgument("segment count must be positive");
  const double d13 = 0.5 * (total(0) - total(2));
  const double d24 = 0.5 * (total(1) - total(3));
  const Vector4d balanced(d13, d24, -d13, -d24);
  return std::vector<Vector4d>(static_cast<std::size_t>(n), balanced / n);
}

ArmConfig config_from_section_actuation(const Vector4d& total, const TendonGeometry& geom,
                                        int n, double segment_length) {
  ArmConfig arm;
  for (const auto& q : split_section_actuation(total, n)) {
    arm.segments.push_back(config_from_actuation(q, geom, segment_length));
  }
  return arm;
}

}  // namespace acm
