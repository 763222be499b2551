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

// Simulated tip IMU, tendon tension sensors and motor encoders, and the
// IMU-assisted estimate of the arm configuration.

#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "acm/common.hpp"
#include "acm/kinematics.hpp"
#include "acm/rigid_pose.hpp"
#include "acm/tendon.hpp"

namespace acm {

struct ImuReading {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
  Vector3d angular_rate = Vector3d::Zero();
  double timestamp = 0.0;
};

struct TensionReading {
  Vector4d tensions = Vector4d::Zero();
  double timestamp = 0.0;
};

/// Per-channel bias and Gaussian standard deviation. A single entry applies to
/// every channel; an empty vector means zero.
struct NoiseModel {
  VectorXd bias;
  VectorXd sigma;
  std::uint64_t seed = 0;

  static NoiseModel none() { return {}; }
  static NoiseModel white(double sigma, std::uint64_t seed);
  double bias_of(int channel) const;
  double sigma_of(int channel) const;
};

void validate(const NoiseModel& noise);

/// Channels: roll, pitch, yaw, then the three body rates. Angles are wrapped
/// back to their principal ranges after noise is added.
ImuReading simulate_imu(const RigidPose& tip_pose, const Vector3d& rates, const NoiseModel& noise,
                        std::mt19937_64& rng, double timestamp = 0.0);

/// Adds noise per tendon and clamps at zero: a slack tendon reads zero.
TensionReading simulate_tension(const Vector4d& forces, const NoiseModel& noise,
                                std::mt19937_64& rng, double timestamp = 0.0);

/// Stateful sensor streams owning their generator. Timestamps must not
/// decrease.
class ImuSensor {
 public:
  explicit ImuSensor(NoiseModel noise);
  ImuReading sample(const RigidPose& tip_pose, const Vector3d& rates, double timestamp);

 private:
  NoiseModel noise_;
  std::mt19937_64 rng_;
  double last_ = -std::numeric_limits<double>::infinity();
};

class TensionSensor {
 public:
  explicit TensionSensor(NoiseModel noise);
  TensionReading sample(const Vector4d& forces, double timestamp);

 private:
  NoiseModel noise_;
  std::mt19937_64 rng_;
  double last_ = -std::numeric_limits<double>::infinity();
};

/// Motor-side tendon displacement read by the encoders. The tendons stretch
/// under load, so the motor has to reel in T / tendon_stiffness more than the
/// path change. tendon_stiffness <= 0 means inextensible.
Vector4d encoder_displacements(const ArmConfig& truth, const Vector4d& tensions,
                               const TendonGeometry& geom, double tendon_stiffness);

/// Corrects the actuation-implied configuration with the tip attitude.
///
/// The tip z axis is rebuilt from the reading (twist about it is not
/// observable and is ignored). All alpha_s are scaled by one factor and all
/// beta_s shifted by one offset until the chain's tip z axis matches. A
/// straight actuation estimate is replaced by a uniform bend. Throws
/// InconsistentMeasurementError when the measured tilt exceeds n alpha_max,
/// and propagates InconsistentActuationError.
ArmConfig config_from_imu(const ImuReading& imu, const std::vector<Vector4d>& actuation,
                          const TendonGeometry& geom, const std::vector<double>& segment_lengths,
                          double alpha_max = kDefaultAlphaMax);

RigidPose estimate_ee_pose(const RigidPose& uav_pose, const RigidPose& mount,
                           const ArmConfig& corrected);

}  // namespace acm
