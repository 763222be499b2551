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

// Geometric map between segment configuration and the displacements of the
// four tendons routed at radius r around the backbone.
//
// Tendon i sits at azimuth (i - 1) * spacing. A negative displacement means
// the tendon is pulled in (shortened).

#pragma once

#include <vector>

#include "acm/common.hpp"
#include "acm/kinematics.hpp"

namespace acm {

inline constexpr int kTendonCount = 4;
inline constexpr double kDefaultRoutingRadius = 0.02;
/// Antagonistic-pair tolerance for measured or commanded actuation, m.
inline constexpr double kPairTolerance = 1e-6;
/// instantaneous_actuation refuses configurations straighter than this.
inline constexpr double kSingularAlpha = 1e-6;

struct TendonGeometry {
  double routing_radius = kDefaultRoutingRadius;
  double tendon_spacing = kPi / 2.0;

  double azimuth(int i) const { return i * tendon_spacing; }
};

void validate(const TendonGeometry& geom);

struct TendonState {
  Vector4d displacements = Vector4d::Zero();
  Vector4d lengths = Vector4d::Zero();
  Vector4d tensions = Vector4d::Zero();
};

using Matrix42d = Eigen::Matrix<double, 4, 2>;
using Matrix24d = Eigen::Matrix<double, 2, 4>;

/// L_i = L - alpha r cos(beta + (i - 1) mu). Throws InfeasibleConfigError
/// when a length would be non-positive.
Vector4d tendon_lengths(const SegmentConfig& cfg, const TendonGeometry& geom);

/// q_i = -alpha r cos(beta + (i - 1) mu).
Vector4d actuation_from_config(const SegmentConfig& cfg, const TendonGeometry& geom);

/// Inverse of actuation_from_config. Throws InconsistentActuationError when
/// |q1 + q3| or |q2 + q4| exceeds pair_tolerance.
SegmentConfig config_from_actuation(const Vector4d& q, const TendonGeometry& geom,
                                    double length = kDefaultSegmentLength,
                                    double pair_tolerance = kPairTolerance);

/// d q / d (alpha, beta), rows [-r cos(beta + (i-1) mu), r alpha sin(beta + (i-1) mu)].
Matrix42d actuation_jacobian(const SegmentConfig& cfg, const TendonGeometry& geom);

/// Tendon displacement increment produced by a small tip displacement. Maps the
/// tip differential to (d alpha, d beta) through the Jacobian of the inverse
/// map, then through actuation_jacobian. Throws SingularConfigurationError
/// for alpha < kSingularAlpha.
Vector4d instantaneous_actuation(const SegmentConfig& cfg, const Vector3d& delta_tip,
                                 const TendonGeometry& geom);

/// Generalized force on one segment's bending vector (kx, ky) produced by the
/// four tendon tensions. Constant; a uniform tension offset maps to zero.
Matrix24d tendon_force_map(const TendonGeometry& geom);

/// Motor-side displacement of a single-section arm: per-segment displacements
/// summed along the tendon path.
Vector4d section_actuation(const ArmConfig& arm, const TendonGeometry& geom);

/// Splits a motor-side displacement evenly over n segments after removing the
/// common mode of each antagonistic pair.
std::vector<Vector4d> split_section_actuation(const Vector4d& total, int n);

/// Per-segment configurations implied by a motor-side displacement under the
/// uniform-curvature section assumption.
ArmConfig config_from_section_actuation(const Vector4d& total, const TendonGeometry& geom,
                                        int n, double segment_length);

}  // namespace acm
