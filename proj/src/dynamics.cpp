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

#include "acm/dynamics.hpp"

#include <array>

#include <fmt/format.h>

#include <unsupported/Eigen/AutoDiff>

namespace acm {
namespace {

constexpr int kMaxDof = kUavDof + 2 * kMaxSegments;

// First-order jet carrying derivatives with respect to every coordinate.
using Gradient = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDof, 1>;
using Jet = Eigen::AutoDiffScalar<Gradient>;
// Second-order jet along a single direction: value, d/dt and d2/dt2.
using Jet1 = Eigen::AutoDiffScalar<Eigen::Matrix<double, 1, 1>>;
using Jet2 = Eigen::AutoDiffScalar<Eigen::Matrix<Jet1, 1, 1>>;

template <typename S>
using VectorX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

template <typename S>
RigidPoseT<S> uav_pose_of(const VectorX<S>& q) {
  const Vector3<S> rpy(q(3), q(4), q(5));
  return {rotation_from_euler_zyx<S>(rpy), Vector3<S>(q(0), q(1), q(2))};
}

// Arm-base-to-tip transform from the bending coordinates alone.
template <typename S>
RigidPoseT<S> arm_tip_from_coords(const ArmGeometry& arm, const VectorX<S>& q) {
  RigidPoseT<S> acc;
  for (int s = 0; s < arm.segments(); ++s) {
    acc = acc * bend_transform<S>(q(kUavDof + 2 * s), q(kUavDof + 2 * s + 1),
                                  S(arm.segment_lengths[s]));
  }
  return acc;
}

// World poses of UAV, segment mid-arcs and tip.
template <typename S>
void compute_body_poses(const PlantModel& model, const VectorX<S>& q,
                        std::vector<RigidPoseT<S>>& out) {
  const int n = model.segments();
  out.resize(static_cast<std::size_t>(n) + 2);
  out[0] = uav_pose_of(q);
  RigidPoseT<S> acc = out[0] * model.arm.mount.template cast<S>();
  for (int s = 0; s < n; ++s) {
    const S kx = q(kUavDof + 2 * s);
    const S ky = q(kUavDof + 2 * s + 1);
    const S length(model.arm.segment_lengths[s]);
    out[1 + s] = acc * bend_transform<S>(kx * S(0.5), ky * S(0.5), length * S(0.5));
    acc = acc * bend_transform<S>(kx, ky, length);
  }
  out[n + 1] = acc;
}

VectorX<Jet> seed_gradient(const VectorXd& q) {
  const auto dof = static_cast<int>(q.size());
  VectorX<Jet> x(dof);
  for (int i = 0; i < dof; ++i) x(i) = Jet(q(i), dof, i);
  return x;
}

// q + t v as a second-order jet in t.
VectorX<Jet2> seed_direction(const VectorXd& q, const VectorXd& v) {
  VectorX<Jet2> x(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    x(i).value() = Jet1(q(i), Eigen::Matrix<double, 1, 1>::Constant(v(i)));
    x(i).derivatives()(0) = Jet1(v(i), Eigen::Matrix<double, 1, 1>::Zero());
  }
  return x;
}

double value_of(const Jet2& x) { return x.value().value(); }
double rate_of(const Jet2& x) { return x.derivatives()(0).value(); }
double accel_of(const Jet2& x) { return x.derivatives()(0).derivatives()(0); }

Eigen::RowVectorXd gradient_of(const Jet& x, int dof) {
  if (x.derivatives().size() == 0) return Eigen::RowVectorXd::Zero(dof);
  return x.derivatives().transpose();
}

struct BodyJacobians {
  std::vector<RigidPose> poses;
  std::vector<Eigen::Matrix<double, 3, Eigen::Dynamic>> linear;
  std::vector<Eigen::Matrix<double, 3, Eigen::Dynamic>> angular;  // world frame
};

BodyJacobians body_jacobians(const PlantModel& model, const VectorXd& q) {
  const int dof = model.dof();
  std::vector<RigidPoseT<Jet>> jet_poses;
  compute_body_poses<Jet>(model, seed_gradient(q), jet_poses);

  BodyJacobians out;
  out.poses.resize(jet_poses.size());
  out.linear.resize(jet_poses.size());
  out.angular.resize(jet_poses.size());
  for (std::size_t b = 0; b < jet_poses.size(); ++b) {
    const auto& jp = jet_poses[b];
    RigidPose& pose = out.poses[b];
    auto& jv = out.linear[b];
    auto& jw = out.angular[b];
    jv.resize(3, dof);
    jw.resize(3, dof);
    std::array<Eigen::RowVectorXd, 9> drot;
    for (int i = 0; i < 3; ++i) {
      pose.translation(i) = jp.translation(i).value();
      jv.row(i) = gradient_of(jp.translation(i), dof);
      for (int k = 0; k < 3; ++k) {
        pose.rotation(i, k) = jp.rotation(i, k).value();
        drot[3 * i + k] = gradient_of(jp.rotation(i, k), dof);
      }
    }
    const Matrix3d rt = pose.rotation.transpose();
    for (int j = 0; j < dof; ++j) {
      Matrix3d d;
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) d(i, k) = drot[3 * i + k](j);
      jw.col(j) = vee<double>(d * rt);
    }
  }
  return out;
}

struct BodyMotion {
  Vector3d velocity, angular_velocity;        // world frame
  Vector3d drift_accel, drift_angular_accel;  // accelerations at zero q''
};

std::vector<BodyMotion> body_motion(const PlantModel& model, const VectorXd& q,
                                    const VectorXd& qdot) {
  std::vector<RigidPoseT<Jet2>> jet_poses;
  compute_body_poses<Jet2>(model, seed_direction(q, qdot), jet_poses);
  std::vector<BodyMotion> out(jet_poses.size());
  for (std::size_t b = 0; b < jet_poses.size(); ++b) {
    const auto& jp = jet_poses[b];
    Matrix3d r, rdot, rddot;
    for (int i = 0; i < 3; ++i) {
      out[b].velocity(i) = rate_of(jp.translation(i));
      out[b].drift_accel(i) = accel_of(jp.translation(i));
      for (int k = 0; k < 3; ++k) {
        r(i, k) = value_of(jp.rotation(i, k));
        rdot(i, k) = rate_of(jp.rotation(i, k));
        rddot(i, k) = accel_of(jp.rotation(i, k));
      }
    }
    // [w] = R' R^T; the skew part of R'' R^T is [w'] since R' R'^T is symmetric.
    out[b].angular_velocity = vee<double>(rdot * r.transpose());
    out[b].drift_angular_accel = vee<double>(rddot * r.transpose());
  }
  return out;
}

struct BodyInertia {
  double mass;
  Matrix3d inertia;  // body frame
};

std::vector<BodyInertia> body_inertias(const PlantModel& model) {
  const int n = model.segments();
  std::vector<BodyInertia> out;
  out.reserve(static_cast<std::size_t>(n) + 2);
  out.push_back({model.inertia.uav_mass, model.inertia.uav_inertia});
  for (int s = 0; s < n; ++s) {
    out.push_back({model.inertia.segment_masses[s], model.segment_inertia(s)});
  }
  out.push_back({model.inertia.tool_mass + model.inertia.tip_mass, Matrix3d::Zero()});
  return out;
}

MatrixXd assemble_mass_matrix(const PlantModel& model, const BodyJacobians& jac) {
  const int dof = model.dof();
  MatrixXd m = MatrixXd::Zero(dof, dof);
  const auto bodies = body_inertias(model);
  for (std::size_t b = 0; b < bodies.size(); ++b) {
    if (bodies[b].mass == 0.0) continue;
    const Matrix3d& r = jac.poses[b].rotation;
    const Matrix3d world_inertia = r * bodies[b].inertia * r.transpose();
    m.noalias() += bodies[b].mass * jac.linear[b].transpose() * jac.linear[b];
    m.noalias() += jac.angular[b].transpose() * world_inertia * jac.angular[b];
  }
  return 0.5 * (m + m.transpose());
}

VectorXd assemble_velocity_products(const PlantModel& model, const BodyJacobians& jac,
                                    const std::vector<BodyMotion>& motion) {
  VectorXd h = VectorXd::Zero(model.dof());
  const auto bodies = body_inertias(model);
  for (std::size_t b = 0; b < bodies.size(); ++b) {
    if (bodies[b].mass == 0.0) continue;
    const Matrix3d& r = jac.poses[b].rotation;
    const Matrix3d world_inertia = r * bodies[b].inertia * r.transpose();
    const Vector3d& w = motion[b].angular_velocity;
    h.noalias() += jac.linear[b].transpose() * (bodies[b].mass * motion[b].drift_accel);
    h.noalias() += jac.angular[b].transpose() *
                   (world_inertia * motion[b].drift_angular_accel + w.cross(world_inertia * w));
  }
  return h;
}

VectorXd assemble_gravity(const PlantModel& model, const BodyJacobians& jac) {
  VectorXd g = VectorXd::Zero(model.dof());
  const auto bodies = body_inertias(model);
  for (std::size_t b = 0; b < bodies.size(); ++b) {
    g += bodies[b].mass * model.inertia.gravity * jac.linear[b].row(2).transpose();
  }
  return g;
}

void check_state(const SystemState& state, const PlantModel& model) {
  if (state.q.size() != model.dof() || state.qdot.size() != model.dof()) {
    throw InvalidArgument(fmt::format("state has {} coordinates, model expects {}",
                                      state.q.size(), model.dof()));
  }
}

void check_gimbal(const SystemState& state) {
  const double pitch = state.q(4);
  if (std::abs(pitch) >= kGimbalLockPitch) {
    throw GimbalLockError(fmt::format("UAV pitch {:.3f} rad reached the gimbal-lock guard", pitch));
  }
}

}  // namespace

double ArmGeometry::total_length() const {
  double total = 0.0;
  for (double l : segment_lengths) total += l;
  return total;
}

Matrix3d thin_rod_inertia(double mass, double length, double radius) {
  const double transverse = mass * length * length / 12.0;
  const double axial = 0.5 * mass * radius * radius;
  return Vector3d(transverse, transverse, axial).asDiagonal();
}

double InertiaParams::total_mass() const {
  double total = uav_mass + tool_mass + tip_mass;
  for (double m : segment_masses) total += m;
  return total;
}

void PlantModel::finalize() {
  const int n = arm.segments();
  if (n < 1 || n > kMaxSegments) {
    throw InvalidArgument(fmt::format("segment count {} outside [1, {}]", n, kMaxSegments));
  }
  for (double l : arm.segment_lengths) {
    if (!(l > 0.0)) throw InvalidArgument("segment lengths must be positive");
  }
  validate(arm.tendons);
  if (!is_valid_rotation(arm.mount.rotation)) {
    throw InvalidArgument("mount rotation is not a rotation");
  }
  if (static_cast<int>(inertia.segment_masses.size()) != n) {
    throw InvalidArgument(fmt::format("{} segment masses for {} segments",
                                      inertia.segment_masses.size(), n));
  }
  if (!(inertia.uav_mass > 0.0)) throw InvalidArgument("UAV mass must be positive");
  for (double m : inertia.segment_masses) {
    if (!(m > 0.0)) throw InvalidArgument("segment masses must be positive");
  }
  if (inertia.spring_stiffness < 0.0) throw InvalidArgument("spring stiffness must be >= 0");
  if (inertia.bending_damping < 0.0) throw InvalidArgument("bending damping must be >= 0");
  if (inertia.tool_mass < 0.0) throw InvalidArgument("tool mass must be >= 0");
  if (inertia.tip_mass < 0.0) throw InvalidArgument("tip mass must be >= 0");

  resolved_inertias_.clear();
  if (inertia.segment_inertias.empty()) {
    for (int s = 0; s < n; ++s) {
      resolved_inertias_.push_back(thin_rod_inertia(
          inertia.segment_masses[s], arm.segment_lengths[s], arm.tendons.routing_radius));
    }
  } else {
    if (static_cast<int>(inertia.segment_inertias.size()) != n) {
      throw InvalidArgument("segment inertia count does not match segment count");
    }
    resolved_inertias_ = inertia.segment_inertias;
  }
  auto check_spd = [](const Matrix3d& i, const char* what) {
    if ((i - i.transpose()).cwiseAbs().maxCoeff() > 1e-12 ||
        Eigen::SelfAdjointEigenSolver<Matrix3d>(i).eigenvalues().minCoeff() <= 0.0) {
      throw InvalidArgument(fmt::format("{} inertia must be symmetric positive definite", what));
    }
  };
  check_spd(inertia.uav_inertia, "UAV");
  for (const auto& i : resolved_inertias_) check_spd(i, "segment");
}

PlantModel default_plant() {
  PlantModel model;
  model.finalize();
  return model;
}

SystemState SystemState::zero(const PlantModel& model) {
  return {VectorXd::Zero(model.dof()), VectorXd::Zero(model.dof())};
}

void SystemState::set_segment(int s, double alpha, double beta) {
  q.segment<2>(kUavDof + 2 * s) = alpha * Vector2d(std::cos(beta), std::sin(beta));
}

SegmentConfig SystemState::segment_config(int s, double length) const {
  const Vector2d k = bend(s);
  const double alpha = k.norm();
  return {alpha, alpha == 0.0 ? 0.0 : std::atan2(k.y(), k.x()), length};
}

ArmConfig SystemState::arm_config(const ArmGeometry& arm) const {
  ArmConfig out;
  for (int s = 0; s < arm.segments(); ++s) {
    out.segments.push_back(segment_config(s, arm.segment_lengths[s]));
  }
  return out;
}

Matrix3d SystemState::uav_rotation() const { return rotation_from_euler_zyx<double>(euler()); }

RigidPose SystemState::uav_pose() const { return {uav_rotation(), position()}; }

Vector3d SystemState::body_rates() const {
  return euler_rate_to_body_rate<double>(euler()) * euler_rates();
}

GeneralizedForces GeneralizedForces::zero(const PlantModel& model) {
  return {VectorXd::Zero(model.dof()), VectorXd::Zero(model.dof())};
}

double kinetic_energy(const SystemState& state, const PlantModel& model) {
  return 0.5 * state.qdot.dot(mass_matrix(state, model) * state.qdot);
}

double gravity_potential(const SystemState& state, const PlantModel& model) {
  check_state(state, model);
  std::vector<RigidPose> poses;
  compute_body_poses<double>(model, state.q, poses);
  const auto bodies = body_inertias(model);
  double v = 0.0;
  for (std::size_t b = 0; b < bodies.size(); ++b) {
    v += bodies[b].mass * model.inertia.gravity * poses[b].translation.z();
  }
  return v;
}

double spring_potential(const SystemState& state, const PlantModel& model) {
  check_state(state, model);
  double v = 0.0;
  for (int s = 0; s < model.segments(); ++s) {
    v += 0.5 * 4.0 * model.inertia.spring_stiffness * state.bend(s).squaredNorm();
  }
  return v;
}

double potential_energy(const SystemState& state, const PlantModel& model) {
  return gravity_potential(state, model) + spring_potential(state, model);
}

std::vector<Vector2d> spring_forces(const SystemState& state, const PlantModel& model) {
  check_state(state, model);
  std::vector<Vector2d> out;
  for (int s = 0; s < model.segments(); ++s) {
    out.emplace_back(-4.0 * model.inertia.spring_stiffness * state.bend(s).norm(), 0.0);
  }
  return out;
}

VectorXd spring_vector(const SystemState& state, const PlantModel& model) {
  check_state(state, model);
  VectorXd s = VectorXd::Zero(model.dof());
  const Eigen::Index n = model.dof() - kUavDof;
  s.tail(n) = 4.0 * model.inertia.spring_stiffness * state.q.tail(n);
  return s;
}

MatrixXd mass_matrix(const SystemState& state, const PlantModel& model) {
  check_state(state, model);
  return assemble_mass_matrix(model, body_jacobians(model, state.q));
}

MatrixXd coriolis_matrix(const SystemState& state, const PlantModel& model, double step) {
  check_state(state, model);
  const int dof = model.dof();
  std::vector<MatrixXd> dm(static_cast<std::size_t>(dof));
  for (int i = 0; i < dof; ++i) {
    SystemState plus = state, minus = state;
    plus.q(i) += step;
    minus.q(i) -= step;
    dm[i] = (mass_matrix(plus, model) - mass_matrix(minus, model)) / (2.0 * step);
  }
  MatrixXd c = MatrixXd::Zero(dof, dof);
  for (int k = 0; k < dof; ++k) {
    for (int j = 0; j < dof; ++j) {
      double sum = 0.0;
      for (int i = 0; i < dof; ++i) {
        sum += 0.5 * (dm[i](k, j) + dm[j](k, i) - dm[k](i, j)) * state.qdot(i);
      }
      c(k, j) = sum;
    }
  }
  return c;
}

VectorXd velocity_product_forces(const SystemState& state, const PlantModel& model) {
  check_state(state, model);
  return assemble_velocity_products(model, body_jacobians(model, state.q),
                                    body_motion(model, state.q, state.qdot));
}

VectorXd gravity_vector(const SystemState& state, const PlantModel& model) {
  check_state(state, model);
  return assemble_gravity(model, body_jacobians(model, state.q));
}

VectorXd forward_dynamics(const SystemState& state, const GeneralizedForces& forces,
                          const PlantModel& model) {
  check_state(state, model);
  check_gimbal(state);
  const int dof = model.dof();
  const BodyJacobians jac = body_jacobians(model, state.q);
  const MatrixXd m = assemble_mass_matrix(model, jac);
  VectorXd rhs = -assemble_velocity_products(model, jac, body_motion(model, state.q, state.qdot));
  rhs -= assemble_gravity(model, jac);
  rhs -= spring_vector(state, model);
  rhs.tail(dof - kUavDof) -= model.inertia.bending_damping * state.qdot.tail(dof - kUavDof);
  if (forces.tau.size() == dof) rhs += forces.tau;
  if (forces.tau_ext.size() == dof) rhs += forces.tau_ext;

  const Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw SingularMassMatrixError("mass matrix is not positive definite");
  }
  return llt.solve(rhs);
}

SystemState step(const SystemState& state, const GeneralizedForces& forces,
                 const PlantModel& model, double dt) {
  return step(state, ForceField([&forces](const SystemState&) { return forces; }), model, dt);
}

SystemState step(const SystemState& state, const ForceField& forces, const PlantModel& model,
                 double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("integration step must be positive");
  check_state(state, model);
  auto deriv = [&](const SystemState& s) { return forward_dynamics(s, forces(s), model); };
  auto advance = [](const SystemState& s, const VectorXd& dq, const VectorXd& dv, double h) {
    return SystemState{s.q + h * dq, s.qdot + h * dv};
  };

  const VectorXd a1 = deriv(state);
  const SystemState s2 = advance(state, state.qdot, a1, 0.5 * dt);
  const VectorXd a2 = deriv(s2);
  const SystemState s3 = advance(state, s2.qdot, a2, 0.5 * dt);
  const VectorXd a3 = deriv(s3);
  const SystemState s4 = advance(state, s3.qdot, a3, dt);
  const VectorXd a4 = deriv(s4);

  SystemState next;
  next.q = state.q + (dt / 6.0) * (state.qdot + 2.0 * s2.qdot + 2.0 * s3.qdot + s4.qdot);
  next.qdot = state.qdot + (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
  if (!next.q.allFinite() || !next.qdot.allFinite()) {
    throw NumericalFault(fmt::format("non-finite state after a step of {} s", dt));
  }
  check_gimbal(next);
  return next;
}

std::vector<RigidPose> body_poses(const SystemState& state, const PlantModel& model) {
  check_state(state, model);
  std::vector<RigidPose> poses;
  compute_body_poses<double>(model, state.q, poses);
  return poses;
}

RigidPose tip_world_pose(const SystemState& state, const PlantModel& model) {
  return body_poses(state, model).back();
}

RigidPose tip_arm_pose(const SystemState& state, const PlantModel& model) {
  check_state(state, model);
  return arm_tip_from_coords<double>(model.arm, state.q);
}

MatrixXd tip_position_jacobian(const SystemState& state, const PlantModel& model) {
  check_state(state, model);
  return body_jacobians(model, state.q).linear.back();
}

int task_dimension(TaskKind kind) { return kind == TaskKind::kTipPosition ? 3 : 2; }

namespace {

template <typename S>
VectorX<S> task_value(const PlantModel& model, const VectorX<S>& q, TaskKind kind) {
  VectorX<S> y(task_dimension(kind));
  if (kind == TaskKind::kTipPosition || kind == TaskKind::kTipHorizontal) {
    std::vector<RigidPoseT<S>> poses;
    compute_body_poses<S>(model, q, poses);
    y = poses.back().translation.head(y.size());
  } else {
    const Vector3<S> rpy = euler_zyx_from_rotation<S>(arm_tip_from_coords<S>(model.arm, q).rotation);
    y << rpy(0), rpy(1);
  }
  return y;
}

}  // namespace

TaskKinematics evaluate_task(const SystemState& state, const PlantModel& model, TaskKind kind) {
  check_state(state, model);
  const int dof = model.dof();
  const int rows = task_dimension(kind);
  TaskKinematics out;
  out.value.resize(rows);
  out.jacobian.resize(rows, dof);
  out.drift.resize(rows);

  const VectorX<Jet> y1 = task_value<Jet>(model, seed_gradient(state.q), kind);
  for (int i = 0; i < rows; ++i) {
    out.value(i) = y1(i).value();
    out.jacobian.row(i) = gradient_of(y1(i), dof);
  }
  const VectorX<Jet2> y2 = task_value<Jet2>(model, seed_direction(state.q, state.qdot), kind);
  for (int i = 0; i < rows; ++i) out.drift(i) = accel_of(y2(i));
  return out;
}

VectorXd uav_generalized_forces(const SystemState& state, const PlantModel& model,
                                double thrust, const Vector3d& body_torque) {
  check_state(state, model);
  VectorXd tau = VectorXd::Zero(model.dof());
  tau.head<3>() = thrust * state.uav_rotation().col(2);
  tau.segment<3>(3) = euler_rate_to_body_rate<double>(state.euler()).transpose() * body_torque;
  return tau;
}

VectorXd tendon_generalized_forces(const PlantModel& model, const Vector4d& tensions) {
  VectorXd tau = VectorXd::Zero(model.dof());
  const Vector2d per_segment = tendon_force_map(model.arm.tendons) * tensions;
  for (int s = 0; s < model.segments(); ++s) tau.segment<2>(kUavDof + 2 * s) = per_segment;
  return tau;
}

VectorXd tip_force_generalized(const SystemState& state, const PlantModel& model,
                               const Vector3d& world_force) {
  return tip_position_jacobian(state, model).transpose() * world_force;
}

}  // namespace acm
