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

// Coupled quadrotor + continuum-arm rigid-body dynamics
//
//   M(q) q'' + C(q, q') q' + G(q) + S(q) = tau + tau_ext
//
// Generalized coordinates, in order:
//   [0, 3)   UAV centre position p, world frame
//   [3, 6)   UAV Z-Y-X Euler angles [roll, pitch, yaw]
//   [6, ..)  per segment s, the bending vector (kx, ky) = alpha (cos beta, sin beta)
//
// The bending vector is used instead of (alpha, beta) because it stays
// regular at the straight configuration, where beta is undefined and the
// (alpha, beta) mass matrix is singular. SystemState converts on demand.
//
// Each segment's mass is lumped at its mid-arc point with a thin-rod inertia.
// Body velocities and the velocity-product terms come from forward-mode
// automatic differentiation of the kinematic chain, so M, C q' and G are
// exact up to rounding and mutually consistent.

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "acm/common.hpp"
#include "acm/kinematics.hpp"
#include "acm/rigid_pose.hpp"
#include "acm/tendon.hpp"

namespace acm {

inline constexpr int kMaxSegments = 12;
inline constexpr int kUavDof = 6;
inline constexpr double kGimbalLockPitch = 85.0 * kPi / 180.0;

struct ArmGeometry {
  std::vector<double> segment_lengths =
      std::vector<double>(kDefaultSegmentCount, kDefaultSegmentLength);
  /// Arm base in the UAV body frame. Default hangs the arm straight down
  /// 5 cm below the centre of mass.
  RigidPose mount = {rot_x(kPi), Vector3d(0.0, 0.0, -0.05)};
  TendonGeometry tendons;
  double alpha_max = kDefaultAlphaMax;

  int segments() const { return static_cast<int>(segment_lengths.size()); }
  double total_length() const;
};

/// Thin rod of length L about its centre, plus the axial term of a disk of
/// the routing radius so the tensor stays positive definite.
Matrix3d thin_rod_inertia(double mass, double length, double radius);

struct InertiaParams {
  double uav_mass = 1.2;
  Matrix3d uav_inertia = Vector3d(0.012, 0.012, 0.02).asDiagonal();
  /// Per segment: distal disk + gimbal + two shafts + four springs.
  std::vector<double> segment_masses = {0.009, 0.009, 0.009, 0.009, 0.010};
  /// Empty means thin_rod_inertia of each segment.
  std::vector<Matrix3d> segment_inertias;
  /// Effective bending stiffness k_eff, N m / rad; restoring torque 4 k_eff alpha.
  /// Stiffer springs push the distal bending mode past what RK4 at 1 ms resolves.
  double spring_stiffness = 0.005;
  /// Viscous bending damping, N m s / rad per bending coordinate.
  double bending_damping = 0.0;
  double gravity = 9.81;
  /// Gripper and IMU, a point mass at the arm tip.
  double tool_mass = 0.015;
  /// Grasped payload, added to the tool at the arm tip.
  double tip_mass = 0.0;

  double total_mass() const;
};

struct PlantModel {
  ArmGeometry arm;
  InertiaParams inertia;

  int segments() const { return arm.segments(); }
  int dof() const { return kUavDof + 2 * arm.segments(); }
  const Matrix3d& segment_inertia(int s) const { return resolved_inertias_.at(s); }

  /// Fills derived quantities and checks invariants. Throws InvalidArgument.
  void finalize();

 private:
  std::vector<Matrix3d> resolved_inertias_;
};

PlantModel default_plant();

struct SystemState {
  VectorXd q;
  VectorXd qdot;

  static SystemState zero(const PlantModel& model);

  Vector3d position() const { return q.head<3>(); }
  Vector3d euler() const { return q.segment<3>(3); }
  Vector3d velocity() const { return qdot.head<3>(); }
  Vector3d euler_rates() const { return qdot.segment<3>(3); }
  Vector2d bend(int s) const { return q.segment<2>(kUavDof + 2 * s); }
  Vector2d bend_rate(int s) const { return qdot.segment<2>(kUavDof + 2 * s); }
  int segments() const { return static_cast<int>(q.size() - kUavDof) / 2; }

  void set_segment(int s, double alpha, double beta);
  SegmentConfig segment_config(int s, double length) const;
  ArmConfig arm_config(const ArmGeometry& arm) const;

  Matrix3d uav_rotation() const;
  RigidPose uav_pose() const;
  /// Body-frame angular velocity of the UAV.
  Vector3d body_rates() const;
};

struct GeneralizedForces {
  VectorXd tau;
  VectorXd tau_ext;

  static GeneralizedForces zero(const PlantModel& model);
};

// Energies and equation-of-motion terms.

double kinetic_energy(const SystemState& state, const PlantModel& model);
double potential_energy(const SystemState& state, const PlantModel& model);
double gravity_potential(const SystemState& state, const PlantModel& model);
double spring_potential(const SystemState& state, const PlantModel& model);

/// Restoring spring force per segment expressed on (alpha, beta):
/// (-4 k_eff alpha, 0).
std::vector<Vector2d> spring_forces(const SystemState& state, const PlantModel& model);
/// S(q) = d V_spring / d q in generalized coordinates.
VectorXd spring_vector(const SystemState& state, const PlantModel& model);

MatrixXd mass_matrix(const SystemState& state, const PlantModel& model);
/// C(q, q') from Christoffel symbols of central differences of M.
MatrixXd coriolis_matrix(const SystemState& state, const PlantModel& model,
                         double step = 1e-6);
/// C(q, q') q' evaluated directly from body accelerations (no M derivatives).
VectorXd velocity_product_forces(const SystemState& state, const PlantModel& model);
VectorXd gravity_vector(const SystemState& state, const PlantModel& model);

/// q'' = M^-1 (tau + tau_ext - C q' - G - S - D q'). Throws GimbalLockError
/// or SingularMassMatrixError.
VectorXd forward_dynamics(const SystemState& state, const GeneralizedForces& forces,
                          const PlantModel& model);

/// Generalized forces as a function of the (intermediate) state, so that
/// body-fixed inputs such as thrust follow the vehicle inside a step.
using ForceField = std::function<GeneralizedForces(const SystemState&)>;

/// One classical Runge-Kutta 4 step with fixed dt. Throws InvalidArgument for
/// dt <= 0, GimbalLockError, or NumericalFault when the result is not finite.
SystemState step(const SystemState& state, const GeneralizedForces& forces,
                 const PlantModel& model, double dt);
SystemState step(const SystemState& state, const ForceField& forces, const PlantModel& model,
                 double dt);

// Kinematic quantities of the coupled system.

/// World poses of every body: index 0 the UAV, 1..n the segment mid-arc
/// frames, n + 1 the arm tip.
std::vector<RigidPose> body_poses(const SystemState& state, const PlantModel& model);
RigidPose tip_world_pose(const SystemState& state, const PlantModel& model);
/// Tip pose in the arm base frame.
RigidPose tip_arm_pose(const SystemState& state, const PlantModel& model);
/// World-frame linear Jacobian of the tip position (3 x dof).
MatrixXd tip_position_jacobian(const SystemState& state, const PlantModel& model);

/// Quantities the end-effector controllers regulate.
enum class TaskKind {
  kTipPosition,     // world position of the arm tip, 3 rows
  kTipOrientation,  // Z-Y-X roll and pitch of the tip in the arm base frame, 2 rows
  kTipHorizontal,   // world x and y of the arm tip, 2 rows
};

int task_dimension(TaskKind kind);

struct TaskKinematics {
  VectorXd value;
  MatrixXd jacobian;  // d value / d q
  VectorXd drift;     // J' q', the task acceleration at zero q''
};

TaskKinematics evaluate_task(const SystemState& state, const PlantModel& model, TaskKind kind);

// Building generalized forces from physical inputs.

/// Thrust along the body z axis and a body-frame torque.
VectorXd uav_generalized_forces(const SystemState& state, const PlantModel& model,
                                double thrust, const Vector3d& body_torque);
/// Tendon tensions (four, newtons) acting on every segment of the section.
VectorXd tendon_generalized_forces(const PlantModel& model, const Vector4d& tensions);
/// World force applied at the arm tip.
VectorXd tip_force_generalized(const SystemState& state, const PlantModel& model,
                               const Vector3d& world_force);

}  // namespace acm
