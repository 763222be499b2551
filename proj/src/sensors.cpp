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

#include "acm/sensors.hpp"

#include <fmt/format.h>

#include <algorithm>

#include <unsupported/Eigen/AutoDiff>

namespace acm {

NoiseModel NoiseModel::white(double sigma, std::uint64_t seed) {
  NoiseModel n;
  n.sigma = VectorXd::Constant(1, sigma);
  n.seed = seed;
  return n;
}

double NoiseModel::bias_of(int channel) const {
  if (bias.size() == 0) return 0.0;
  return bias.size() == 1 ? bias(0) : bias(channel);
}

double NoiseModel::sigma_of(int channel) const {
  if (sigma.size() == 0) return 0.0;
  return sigma.size() == 1 ? sigma(0) : sigma(channel);
}

void validate(const NoiseModel& noise) {
  if (noise.sigma.size() > 0 && (noise.sigma.array() < 0.0).any()) {
    throw InvalidArgument("noise standard deviations must be non-negative");
  }
}

namespace {

// Draws even when sigma is zero so the stream position does not depend on
// which channels are noisy.
double corrupt(double value, const NoiseModel& noise, int channel, std::mt19937_64& rng) {
  std::normal_distribution<double> unit(0.0, 1.0);
  return value + noise.bias_of(channel) + noise.sigma_of(channel) * unit(rng);
}

}  // namespace

ImuReading simulate_imu(const RigidPose& tip_pose, const Vector3d& rates, const NoiseModel& noise,
                        std::mt19937_64& rng, double timestamp) {
  const Vector3d rpy = euler_zyx_from_rotation<double>(tip_pose.rotation);
  ImuReading r;
  r.roll = wrap_angle(corrupt(rpy(0), noise, 0, rng));
  r.pitch = std::clamp(corrupt(rpy(1), noise, 1, rng), -kPi / 2, kPi / 2);
  r.yaw = wrap_angle(corrupt(rpy(2), noise, 2, rng));
  for (int i = 0; i < 3; ++i) r.angular_rate(i) = corrupt(rates(i), noise, 3 + i, rng);
  r.timestamp = timestamp;
  return r;
}

TensionReading simulate_tension(const Vector4d& forces, const NoiseModel& noise,
                                std::mt19937_64& rng, double timestamp) {
  TensionReading r;
  for (int i = 0; i < 4; ++i) r.tensions(i) = std::max(0.0, corrupt(forces(i), noise, i, rng));
  r.timestamp = timestamp;
  return r;
}

ImuSensor::ImuSensor(NoiseModel noise) : noise_(std::move(noise)), rng_(noise_.seed) {
  validate(noise_);
}

ImuReading ImuSensor::sample(const RigidPose& tip_pose, const Vector3d& rates, double timestamp) {
  if (timestamp < last_) throw InvalidArgument("IMU timestamps must not decrease");
  last_ = timestamp;
  return simulate_imu(tip_pose, rates, noise_, rng_, timestamp);
}

TensionSensor::TensionSensor(NoiseModel noise) : noise_(std::move(noise)), rng_(noise_.seed) {
  validate(noise_);
}

TensionReading TensionSensor::sample(const Vector4d& forces, double timestamp) {
  if (timestamp < last_) throw InvalidArgument("tension timestamps must not decrease");
  last_ = timestamp;
  return simulate_tension(forces, noise_, rng_, timestamp);
}

Vector4d encoder_displacements(const ArmConfig& truth, const Vector4d& tensions,
                               const TendonGeometry& geom, double tendon_stiffness) {
  Vector4d q = section_actuation(truth, geom);
  if (tendon_stiffness > 0.0) q -= tensions / tendon_stiffness;
  return q;
}

namespace {

using Jet = Eigen::AutoDiffScalar<Eigen::Vector2d>;

// Roll and pitch of the chain tip after scaling every alpha by c and shifting
// every beta by d.
template <typename S>
Eigen::Matrix<S, 2, 1> scaled_roll_pitch(const ArmConfig& base, const S& c, const S& d) {
  std::vector<SegmentConfigT<S>> segs;
  segs.reserve(base.segments.size());
  for (const auto& s : base.segments) {
    segs.push_back({c * S(s.alpha), S(s.beta) + d, S(s.length)});
  }
  const Vector3<S> rpy = euler_zyx_from_rotation<S>(compose_chain(segs).back().rotation);
  return {rpy(0), rpy(1)};
}

ArmConfig apply_correction(const ArmConfig& base, double c, double d, double alpha_max) {
  ArmConfig out = base;
  if (c < 0.0) {
    c = -c;
    d += kPi;
  }
  for (auto& s : out.segments) {
    s.alpha = std::clamp(c * s.alpha, 0.0, alpha_max);
    s.beta = s.alpha == 0.0 ? 0.0 : wrap_angle(s.beta + d);
  }
  return out;
}

}  // namespace

ArmConfig config_from_imu(const ImuReading& imu, const std::vector<Vector4d>& actuation,
                          const TendonGeometry& geom, const std::vector<double>& segment_lengths,
                          double alpha_max) {
  const int n = static_cast<int>(actuation.size());
  if (n < 1 || segment_lengths.size() != actuation.size()) {
    throw InvalidArgument("need one actuation vector per segment");
  }
  ArmConfig base;
  for (int s = 0; s < n; ++s) {
    base.segments.push_back(config_from_actuation(actuation[s], geom, segment_lengths[s]));
  }

  const Vector2d target(imu.roll, imu.pitch);
  const Matrix3d measured = rotation_from_euler_zyx<double>(Vector3d(imu.roll, imu.pitch, 0.0));
  const Vector2d tilt = tilt_of(measured);
  if (tilt(0) > n * alpha_max + 1e-9) {
    throw InconsistentMeasurementError(fmt::format(
        "IMU tilt {} rad exceeds what {} segments can bend ({} rad)", tilt(0), n, n * alpha_max));
  }
  if (tilt(0) == 0.0) return apply_correction(base, 0.0, 0.0, alpha_max);

  ArmConfig shape = base;
  double c = 1.0, d = 0.0;
  const Vector2d base_tilt = tilt_of(compose_chain(base).back().rotation);
  if (base_tilt(0) < 1e-9) {
    // No usable shape information: spread the tilt evenly in one plane.
    for (auto& s : shape.segments) s = {1.0 / n, 0.0, s.length};
    c = tilt(0);
    d = tilt(1);
  } else {
    c = tilt(0) / base_tilt(0);
    d = wrap_angle(tilt(1) - base_tilt(1));
  }

  // Gauss-Newton on the two roll/pitch residuals. The initial guess is exact
  // for planar shapes, so this only polishes out-of-plane cases.
  for (int iter = 0; iter < 50; ++iter) {
    const Eigen::Matrix<Jet, 2, 1> rp =
        scaled_roll_pitch<Jet>(shape, Jet(c, 2, 0), Jet(d, 2, 1));
    Vector2d r(wrap_angle(rp(0).value() - target(0)), rp(1).value() - target(1));
    if (r.norm() < 1e-14) break;
    Eigen::Matrix2d j;
    j.row(0) = rp(0).derivatives().transpose();
    j.row(1) = rp(1).derivatives().transpose();
    const Vector2d delta =
        (j.transpose() * j + 1e-12 * Eigen::Matrix2d::Identity()).ldlt().solve(-j.transpose() * r);
    c += delta(0);
    d += delta(1);
    if (delta.norm() < 1e-15) break;
  }
  return apply_correction(shape, c, d, alpha_max);
}

RigidPose estimate_ee_pose(const RigidPose& uav_pose, const RigidPose& mount,
                           const ArmConfig& corrected) {
  return end_effector_world_pose(uav_pose, mount, corrected);
}

}  // namespace acm
