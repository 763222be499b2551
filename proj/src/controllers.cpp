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

#include "acm/controllers.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace acm {
namespace {

bool is_spd(const MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) return false;
  return Eigen::LLT<MatrixXd>(m).info() == Eigen::Success;
}

void require_spd(const MatrixXd& m, const char* name) {
  if (!is_spd(m)) {
    throw InvalidArgument(fmt::format("{} must be symmetric positive definite", name));
  }
}

void require_finite(const VectorXd& v, const char* what) {
  if (!v.allFinite()) throw NumericalFault(fmt::format("non-finite {}", what));
}

}  // namespace

void validate(const UavGains& gains) {
  require_spd(gains.k_pos, "K_pos");
  require_spd(gains.c_pos, "C_pos");
  require_spd(gains.k_q, "K_q");
  require_spd(gains.c_q, "C_q");
  if (!(gains.lambda_m > 0.0)) throw InvalidArgument("lambda_m must be positive");
  if (!(gains.mass_min > 0.0 && gains.mass_min < gains.mass_max)) {
    throw InvalidArgument("mass projection interval must satisfy 0 < min < max");
  }
}

ArmGains ArmGains::isotropic(int dim, double lambda, double k_v, double k_p, double k_adapt) {
  const MatrixXd eye = MatrixXd::Identity(dim, dim);
  return {lambda * eye, k_p * eye, k_v * eye, k_adapt * eye};
}

void validate(const ArmGains& gains) {
  require_spd(gains.lambda, "Lambda");
  require_spd(gains.k_p, "K_p");
  require_spd(gains.k_v, "K_v");
  require_spd(gains.k_adapt, "K_adapt");
  const int d = gains.dimension();
  if (gains.k_p.rows() != d || gains.k_v.rows() != d || gains.k_adapt.rows() != d) {
    throw InvalidArgument("arm gain matrices must share one dimension");
  }
}

void validate(const TensionLoopParams& params) {
  if (!(params.tension_floor > 0.0 && params.tension_floor < params.tension_max)) {
    throw InvalidArgument("tension limits must satisfy 0 < T_min < tension_max");
  }
  if (!(params.redistribution_gain >= 0.0)) {
    throw InvalidArgument("redistribution gain must be non-negative");
  }
}

UavPositionCommand uav_position_control(const SystemState& state, const UavReference& ref,
                                        const UavGains& gains, const AdaptiveState& adaptive,
                                        double gravity, double dt) {
  const Vector3d p_e = state.position() - ref.position;
  const Vector3d v_e = state.velocity() - ref.velocity;
  const Vector3d s_p = v_e + gains.k_pos * p_e;
  const Vector3d theta = gravity * Vector3d::UnitZ() + ref.acceleration - gains.k_pos * v_e;

  UavPositionCommand out;
  out.thrust = adaptive.m_hat * theta - gains.c_pos * s_p;
  out.sliding = s_p;
  out.adaptive = adaptive;
  out.adaptive.m_hat = std::clamp(adaptive.m_hat - dt * gains.lambda_m * theta.dot(s_p),
                                  gains.mass_min, gains.mass_max);
  require_finite(out.thrust, "UAV thrust command");
  return out;
}

Eigen::Quaterniond desired_attitude(const Vector3d& thrust) {
  const double norm = thrust.norm();
  if (!(norm > 0.0)) throw ZeroThrustError("thrust command has zero magnitude");
  // sigma^2 = (|U| + U_z) / (2 |U|); for U_z < 0 the numerator is rewritten
  // as (U_x^2 + U_y^2) / (|U| - U_z) to avoid cancellation.
  const double z = thrust.z();
  const double sigma = std::sqrt(z >= 0.0 ? (norm + z) / (2.0 * norm)
                                          : thrust.head<2>().squaredNorm() /
                                                (2.0 * norm * (norm - z)));
  if (sigma < 1e-9) {
    throw UnreachableAttitudeError("thrust command points straight down");
  }
  const double scale = 1.0 / (2.0 * norm * sigma);
  // Axis e3 x U, so that the active rotation carries e3 onto U.
  return Eigen::Quaterniond(sigma, -thrust.y() * scale, thrust.x() * scale, 0.0);
}

Vector3d attitude_sliding_surface(const SystemState& state, const Eigen::Quaterniond& q_c,
                                  const Vector3d& body_rate_ref, const UavGains& gains) {
  const Eigen::Quaterniond q(state.uav_rotation());
  Eigen::Quaterniond q_err = q_c.conjugate() * q;
  if (q_err.w() < 0.0) q_err.coeffs() = -q_err.coeffs();
  return (state.body_rates() - body_rate_ref) + gains.k_q * q_err.vec();
}

Vector3d uav_attitude_control(const SystemState& state, const Eigen::Quaterniond& q_c,
                              const Vector3d& body_rate_ref, const UavGains& gains,
                              const Matrix3d& inertia) {
  const Vector3d w = state.body_rates();
  const Vector3d s_q = attitude_sliding_surface(state, q_c, body_rate_ref, gains);
  const Vector3d tau = w.cross(inertia * w) - gains.c_q * s_q;
  require_finite(tau, "UAV torque command");
  return tau;
}

RegulatedTensions tension_regulator(const Vector4d& raw, const TendonState& measured,
                                    const TensionLoopParams& params) {
  if (!raw.allFinite()) throw NumericalFault("non-finite tension command");
  RegulatedTensions out;
  const double shortfall = std::max(0.0, params.tension_floor - measured.tensions.minCoeff());
  out.offset = std::max(0.0, params.tension_floor - raw.minCoeff()) +
               params.redistribution_gain * shortfall;
  out.tensions = raw.array() + out.offset;
  // raw + (floor - raw) can land one ulp under the floor.
  if (out.offset > 0.0) out.tensions = out.tensions.cwiseMax(params.tension_floor);
  if (out.tensions.maxCoeff() > params.tension_max) {
    if (out.offset > 0.0) {
      throw InfeasibleTensionError(fmt::format(
          "tension floor {} N needs offset {} N, pushing a tendon to {} N above the {} N limit",
          params.tension_floor, out.offset, out.tensions.maxCoeff(), params.tension_max));
    }
    out.tensions = out.tensions.cwiseMin(params.tension_max);
    out.saturated = true;
  }
  return out;
}

TaskPlant task_plant(const SystemState& state, const PlantModel& model, TaskKind kind,
                     const VectorXd& uav_tau) {
  TaskPlant out;
  out.task = evaluate_task(state, model, kind);
  GeneralizedForces forces = GeneralizedForces::zero(model);
  if (uav_tau.size() == model.dof()) forces.tau = uav_tau;
  const VectorXd qdd = forward_dynamics(state, forces, model);
  out.a_c = out.task.jacobian * qdd + out.task.drift;

  MatrixXd b_full(model.dof(), kTendonCount);
  for (int i = 0; i < kTendonCount; ++i) {
    b_full.col(i) = tendon_generalized_forces(model, Vector4d::Unit(i));
  }
  const Eigen::LLT<MatrixXd> llt(mass_matrix(state, model));
  out.b_c = out.task.jacobian * llt.solve(b_full);
  return out;
}

ArmCommand arm_ee_control(const SystemState& state, const PlantModel& model, TaskKind kind,
                          const TaskReference& ref, const ArmGains& gains,
                          const AdaptiveState& adaptive, double dt, const VectorXd& uav_tau,
                          const TendonState& measured, const TensionLoopParams& params,
                          const ArmControlOptions& options) {
  const int d = task_dimension(kind);
  if (gains.dimension() != d || ref.value.size() != d || ref.rate.size() != d ||
      ref.accel.size() != d) {
    throw InvalidArgument(fmt::format("arm task has dimension {}", d));
  }
  const TaskPlant plant = task_plant(state, model, kind, uav_tau);

  const Eigen::JacobiSVD<MatrixXd> svd(plant.b_c, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& sv = svd.singularValues();
  if (sv.size() < 2 || !(sv(1) > options.singular_ratio * sv(0))) {
    throw SingularConfigurationError(
        fmt::format("tendon-to-task map lost rank (singular values {} {})", sv(0),
                    sv.size() > 1 ? sv(1) : 0.0));
  }
  VectorXd inv = sv.array() / (sv.array().square() + kPseudoInverseDamping);
  const MatrixXd pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  int rank = 0;
  while (rank < sv.size() && sv(rank) > options.singular_ratio * sv(0)) ++rank;
  const MatrixXd range = svd.matrixU().leftCols(rank);

  ArmCommand out;
  out.adaptive = adaptive;
  if (out.adaptive.delta_hat.size() != d) out.adaptive.delta_hat = VectorXd::Zero(d);
  VectorXd e = plant.task.value - ref.value;
  if (kind == TaskKind::kTipOrientation) {
    for (int i = 0; i < d; ++i) e(i) = wrap_angle(e(i));
  }
  const VectorXd e_dot = plant.task.jacobian * state.qdot - ref.rate;
  out.error = e;
  out.sliding = e_dot + gains.lambda * e;

  const VectorXd y_r_dd = ref.accel - gains.lambda * e_dot;
  const VectorXd v =
      y_r_dd - plant.a_c - gains.k_v * e_dot - gains.k_p * e + out.adaptive.delta_hat;
  out.raw = pinv * v;
  require_finite(out.raw, "tendon tension command");

  if (options.tension_loop) {
    const RegulatedTensions reg = tension_regulator(out.raw, measured, params);
    out.tensions = reg.tensions;
    out.saturated = reg.saturated;
  } else {
    out.tensions = out.raw.cwiseMin(params.tension_max);
    out.saturated = (out.raw.array() > params.tension_max).any();
  }

  if (!out.saturated) {
    out.adaptive.delta_hat -= dt * gains.k_adapt * (range * (range.transpose() * out.sliding));
  }
  return out;
}

}  // namespace acm
