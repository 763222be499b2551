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

// Sliding-mode controllers for the UAV and the arm tip, and the tension floor
// that keeps every tendon taut.
//
// Error convention throughout: e = actual - reference.

#pragma once

#include "acm/common.hpp"
#include "acm/dynamics.hpp"
#include "acm/tendon.hpp"

namespace acm {

inline constexpr double kPseudoInverseDamping = 1e-6;

struct UavGains {
  Matrix3d k_pos = 2.0 * Matrix3d::Identity();
  Matrix3d c_pos = 4.0 * Matrix3d::Identity();
  double lambda_m = 0.05;
  Matrix3d k_q = 20.0 * Matrix3d::Identity();
  Matrix3d c_q = 0.15 * Matrix3d::Identity();
  /// Projection interval for the mass estimate, kg.
  double mass_min = 0.3;
  double mass_max = 3.0;
};

void validate(const UavGains& gains);

struct ArmGains {
  MatrixXd lambda;
  MatrixXd k_p;
  MatrixXd k_v;
  MatrixXd k_adapt;

  /// Diagonal gains of the given task dimension. Defaults place the three
  /// closed-loop poles of each task axis at -8.
  static ArmGains isotropic(int dim, double lambda = 8.0, double k_v = 16.0, double k_p = 128.0,
                            double k_adapt = 64.0);
  int dimension() const { return static_cast<int>(lambda.rows()); }
};

void validate(const ArmGains& gains);

struct AdaptiveState {
  double m_hat = 1.2;
  VectorXd delta_hat;  // task-space uncertainty estimate
};

struct TensionLoopParams {
  double tension_floor = 0.5;  // T_min, N
  /// Extra co-contraction per newton that the lowest measured tension sits
  /// below the floor.
  double redistribution_gain = 1.0;
  double tension_max = 35.0;
};

void validate(const TensionLoopParams& params);

struct UavReference {
  Vector3d position = Vector3d::Zero();
  Vector3d velocity = Vector3d::Zero();
  Vector3d acceleration = Vector3d::Zero();
};

struct UavPositionCommand {
  Vector3d thrust;  // world-frame thrust vector U_quad, N
  AdaptiveState adaptive;
  Vector3d sliding;  // S_p
};

/// S_p = v_e + K_pos p_e;  U = m_hat (g e3 + a_ref - K_pos v_e) - C_pos S_p;
/// m_hat' = -lambda_m theta^T S_p with theta = g e3 + a_ref - K_pos v_e,
/// integrated with forward Euler over dt and projected onto
/// [mass_min, mass_max].
UavPositionCommand uav_position_control(const SystemState& state, const UavReference& ref,
                                        const UavGains& gains, const AdaptiveState& adaptive,
                                        double gravity, double dt);

/// Minimal-tilt unit quaternion rotating e3 onto U / |U| (Hamilton, active).
/// Throws ZeroThrustError for U = 0 and UnreachableAttitudeError when U points
/// straight down.
Eigen::Quaterniond desired_attitude(const Vector3d& thrust);

/// S_q = w_e + K_q q_e with q_e the vector part of conj(Q_c) Q.
Vector3d attitude_sliding_surface(const SystemState& state, const Eigen::Quaterniond& q_c,
                                  const Vector3d& body_rate_ref, const UavGains& gains);

/// S_q = w_e + K_q q_e with q_e the vector part of conj(Q_c) Q (scalar part
/// kept non-negative), both in the body frame;
/// tau = w x (J w) - C_q S_q.
Vector3d uav_attitude_control(const SystemState& state, const Eigen::Quaterniond& q_c,
                              const Vector3d& body_rate_ref, const UavGains& gains,
                              const Matrix3d& inertia);

/// Adds the smallest uniform offset that lifts every tendon to the floor,
/// plus redistribution_gain times any shortfall of the measured tensions.
/// Throws InfeasibleTensionError when the offset pushes a tendon above
/// tension_max; otherwise clamps to tension_max.
struct RegulatedTensions {
  Vector4d tensions;
  double offset = 0.0;
  bool saturated = false;
};

RegulatedTensions tension_regulator(const Vector4d& raw, const TendonState& measured,
                                    const TensionLoopParams& params);

struct TaskReference {
  VectorXd value;
  VectorXd rate;
  VectorXd accel;
};

/// Nominal task-space plant y'' = a_c + b_c T at the current state, with the
/// UAV inputs held fixed. Exact: the dynamics are affine in tension.
struct TaskPlant {
  TaskKinematics task;
  VectorXd a_c;
  MatrixXd b_c;
};

TaskPlant task_plant(const SystemState& state, const PlantModel& model, TaskKind kind,
                     const VectorXd& uav_tau);

struct ArmCommand {
  Vector4d tensions;  // after regulation (or clamping when the loop is off)
  Vector4d raw;       // control law output before the tension floor
  AdaptiveState adaptive;
  VectorXd error;
  VectorXd sliding;
  bool saturated = false;
};

struct ArmControlOptions {
  bool tension_loop = true;
  /// Threshold on sigma_2 / sigma_1 of b_c below which the task is treated as
  /// singular.
  double singular_ratio = 1e-6;
};

/// U = b_c^+ (y_r'' - a_c - K_v e' - K_p e + delta_hat), y_r'' = y_d'' - Lambda e',
/// delta_hat' = -K_adapt P S with S = e' + Lambda e and P the projector onto
/// the range of b_c. The pseudo-inverse is damped by kPseudoInverseDamping.
/// Adaptation is frozen while a tendon is saturated. Throws
/// SingularConfigurationError when b_c loses rank.
ArmCommand arm_ee_control(const SystemState& state, const PlantModel& model, TaskKind kind,
                          const TaskReference& ref, const ArmGains& gains,
                          const AdaptiveState& adaptive, double dt, const VectorXd& uav_tau,
                          const TendonState& measured, const TensionLoopParams& params,
                          const ArmControlOptions& options = {});

}  // namespace acm
