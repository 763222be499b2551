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

#include "acm/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace acm {
namespace {

constexpr double kDeg = kPi / 180.0;
constexpr double kHoverAltitude = 1.0;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

UavReference hold_position(double) {
  UavReference r;
  r.position = Vector3d(0.0, 0.0, kHoverAltitude);
  return r;
}

// Piecewise-constant roll/pitch setpoints starting at the given times.
struct Setpoint {
  double time;
  Vector2d roll_pitch;
};

ArmTarget orientation_steps(std::vector<Setpoint> steps) {
  ArmTarget target;
  target.kind = TaskKind::kTipOrientation;
  for (const auto& s : steps) target.setpoint_times.push_back(s.time);
  target.reference = [steps](double t) {
    Vector2d value = Vector2d::Zero();
    for (const auto& s : steps) {
      if (t >= s.time) value = s.roll_pitch;
    }
    return TaskReference{value, Vector2d::Zero(), Vector2d::Zero()};
  };
  return target;
}

// Quintic smoothstep on [0, 1] and its first two derivatives.
Vector3d smoothstep(double x) {
  if (x <= 0.0) return Vector3d::Zero();
  if (x >= 1.0) return Vector3d(1.0, 0.0, 0.0);
  const double x2 = x * x, x3 = x2 * x;
  return {x3 * (10.0 - 15.0 * x + 6.0 * x2), 30.0 * x2 * (1.0 - 2.0 * x + x2),
          60.0 * x * (1.0 - 3.0 * x + 2.0 * x2)};
}

// Horizontal circle under the hovering UAV; the radius ramps in smoothly.
ArmTarget tip_circle(double radius, double frequency, double ramp) {
  ArmTarget target;
  target.kind = TaskKind::kTipHorizontal;
  target.tracking_from = ramp;
  target.setpoint_times = {0.0};
  target.reference = [=](double t) {
    const Vector3d s = smoothstep(t / ramp);
    const double r = radius * s(0), rd = radius * s(1) / ramp, rdd = radius * s(2) / (ramp * ramp);
    const double w = 2.0 * kPi * frequency;
    const Vector2d u(std::cos(w * t), std::sin(w * t)), n(-u.y(), u.x());
    TaskReference ref;
    ref.value = r * u;
    ref.rate = rd * u + r * w * n;
    ref.accel = rdd * u + 2.0 * rd * w * n - r * w * w * u;
    return ref;
  };
  return target;
}

Scenario base(const std::string& name, const std::string& description, double duration) {
  Scenario s;
  s.name = name;
  s.description = description;
  s.duration = duration;
  s.uav_reference = hold_position;
  s.arm = orientation_steps({{0.0, Vector2d::Zero()}});
  return s;
}

}  // namespace

std::vector<std::string> scenario_names() {
  return {"hover-hold", "hover-adapt", "bend-pitch-30deg", "bend-pitch-roll", "circle",
          "payload-pickup"};
}

Scenario make_scenario(const std::string& name) {
  if (name == "hover-hold") {
    Scenario s = base(name, "hover at 1 m with a straight arm and an exact mass estimate", 10.0);
    s.checks["uav_position_error_max"] = {0.0, 1e-3};
    return s;
  }
  if (name == "hover-adapt") {
    Scenario s = base(name, "hover at 1 m starting from a 0.8 kg mass estimate", 15.0);
    s.initial_mass_estimate = 0.8;
    s.checks["m_hat_entry_time"] = {0.0, 10.0};
    return s;
  }
  if (name == "bend-pitch-30deg") {
    Scenario s = base(name, "hover and pitch the tip 30 deg", 5.0);
    s.arm = orientation_steps({{0.0, Vector2d(0.0, 30.0 * kDeg)}});
    s.checks["settling_time_max"] = {0.0, 2.0};
    s.checks["steady_state_error"] = {0.0, 1.0 * kDeg};
    s.checks["min_tension_margin"] = {0.0, std::numeric_limits<double>::infinity()};
    return s;
  }
  if (name == "bend-pitch-roll") {
    Scenario s = base(name, "hover and step the tip through pitch, roll and combined bends", 12.0);
    s.arm = orientation_steps({{0.0, Vector2d(0.0, 30.0 * kDeg)},
                               {4.0, Vector2d(20.0 * kDeg, 0.0)},
                               {8.0, Vector2d(15.0 * kDeg, -20.0 * kDeg)}});
    s.checks["settling_time_max"] = {0.0, 2.0};
    s.checks["steady_state_error"] = {0.0, 1.0 * kDeg};
    s.checks["min_tension_margin"] = {0.0, std::numeric_limits<double>::infinity()};
    return s;
  }
  if (name == "circle") {
    Scenario s = base(name, "hover and draw a 5 cm circle with the tip at 0.1 Hz", 12.0);
    s.arm = tip_circle(0.05, 0.1, 2.0);
    s.checks["task_error_rms"] = {0.0, 0.05 * 0.05};
    s.checks["min_tension_margin"] = {0.0, std::numeric_limits<double>::infinity()};
    return s;
  }
  if (name == "payload-pickup") {
    Scenario s = base(name, "hold a 30 deg pitch and pick up 0.1 kg at t = 3 s", 8.0);
    s.arm = orientation_steps({{0.0, Vector2d(0.0, 30.0 * kDeg)}});
    s.payload_schedule = {{3.0, 0.1}};
    s.checks["ee_orientation_error_imu_rms"] = {0.0, 0.5 * kDeg};
    s.checks["ee_orientation_error_ratio"] = {3.0, std::numeric_limits<double>::infinity()};
    return s;
  }
  throw ConfigError(fmt::format("unknown scenario '{}'", name));
}

void validate(const Scenario& scenario) {
  if (!(scenario.duration > 0.0)) throw ConfigError("scenario duration must be positive");
  if (!scenario.uav_reference || !scenario.arm.reference) {
    throw ConfigError("scenario needs UAV and arm references");
  }
  double last = 0.0;
  for (const auto& e : scenario.payload_schedule) {
    if (e.time < last || e.time > scenario.duration) {
      throw ConfigError("payload events must be sorted and inside the run");
    }
    if (e.mass < 0.0) throw ConfigError("payload mass must be non-negative");
    last = e.time;
  }
  for (const auto& d : scenario.disturbances) {
    if (d.start < 0.0 || d.end < d.start || d.end > scenario.duration) {
      throw ConfigError("disturbance windows must lie inside the run");
    }
  }
}

int SimConfig::control_substeps() const {
  if (!(dt_physics > 0.0) || !(dt_control >= dt_physics)) {
    throw ConfigError("need 0 < dt_physics <= dt_control");
  }
  const double ratio = dt_control / dt_physics;
  const long n = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(n)) > 1e-9 * ratio) {
    throw ConfigError("dt_control must be an integer multiple of dt_physics");
  }
  return static_cast<int>(n);
}

void validate(SimConfig& config) {
  config.control_substeps();
  try {
    config.plant.finalize();
    validate(config.uav_gains);
    validate(ArmGains::isotropic(2, config.arm_lambda, config.arm_k_v, config.arm_k_p,
                                 config.arm_k_adapt));
    validate(config.tension);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (!(config.sensors.imu_rate > 0.0 && config.sensors.tension_rate > 0.0)) {
    throw ConfigError("sensor rates must be positive");
  }
  if (config.sensors.imu_angle_sigma < 0.0 || config.sensors.imu_rate_sigma < 0.0 ||
      config.sensors.tension_sigma < 0.0) {
    throw ConfigError("sensor noise must be non-negative");
  }
}

void payload_step(PlantModel& model, const PayloadEvent& event) {
  model.inertia.tip_mass = event.mass;
  model.finalize();
}

namespace {

// Tip angular velocity in the tip frame, relative to the arm base.
Vector3d tip_rates(const SystemState& state, const PlantModel& model) {
  const double h = 1e-6;
  SystemState plus = state, minus = state;
  plus.q += h * state.qdot;
  minus.q -= h * state.qdot;
  const Matrix3d rdot =
      (tip_arm_pose(plus, model).rotation - tip_arm_pose(minus, model).rotation) / (2.0 * h);
  return vee<double>(tip_arm_pose(state, model).rotation.transpose() * rdot);
}

double total_energy_no_gravity(const SystemState& state, const PlantModel& model) {
  return kinetic_energy(state, model) + spring_potential(state, model);
}

struct Window {
  double sum_sq = 0.0;
  double max = 0.0;
  int count = 0;
  void add(double v) {
    sum_sq += v * v;
    max = std::max(max, v);
    ++count;
  }
  double rms() const { return count ? std::sqrt(sum_sq / count) : kNaN; }
  double peak() const { return count ? max : kNaN; }
};

}  // namespace

RunResult run_scenario(const Scenario& scenario, const SimConfig& config_in) {
  const auto wall_start = std::chrono::steady_clock::now();
  SimConfig config = config_in;
  validate(config);
  validate(scenario);

  PlantModel model = config.plant;
  const int substeps = config.control_substeps();
  const double dt = config.dt_physics;
  const double dt_c = config.dt_control;
  const long control_steps = std::lround(scenario.duration / dt_c);
  const TaskKind kind = scenario.arm.kind;
  const int task_dim = task_dimension(kind);
  const ArmGains arm_gains = ArmGains::isotropic(task_dim, config.arm_lambda, config.arm_k_v,
                                                 config.arm_k_p, config.arm_k_adapt);
  ArmControlOptions arm_options;
  arm_options.tension_loop = config.tension_loop;

  NoiseModel imu_noise;
  imu_noise.sigma.resize(6);
  imu_noise.sigma << Vector3d::Constant(config.sensors.imu_angle_sigma),
      Vector3d::Constant(config.sensors.imu_rate_sigma);
  imu_noise.seed = config.seed * 2 + 1;
  NoiseModel tension_noise = NoiseModel::white(config.sensors.tension_sigma, config.seed * 2 + 2);
  ImuSensor imu(imu_noise);
  TensionSensor tension_sensor(tension_noise);
  const long imu_every = std::max(1L, std::lround(1.0 / (config.sensors.imu_rate * dt)));
  const long tension_every = std::max(1L, std::lround(1.0 / (config.sensors.tension_rate * dt)));

  SystemState state = SystemState::zero(model);
  state.q.head<3>() = scenario.uav_reference(0.0).position;

  AdaptiveState uav_adaptive;
  uav_adaptive.m_hat = scenario.initial_mass_estimate.value_or(model.inertia.total_mass());
  AdaptiveState arm_adaptive;
  arm_adaptive.delta_hat = VectorXd::Zero(task_dim);

  TendonState measured;
  Vector4d command = Vector4d::Zero();
  ArmConfig estimate_actuation = state.arm_config(model.arm);
  ArmConfig estimate_imu = estimate_actuation;
  std::size_t next_payload = 0;

  RunResult result;
  result.records.reserve(static_cast<std::size_t>(control_steps));

  // Metric accumulators.
  Window uav_error, task_error, est_imu, est_act;
  double min_command = std::numeric_limits<double>::infinity();
  double min_raw = min_command, min_applied = min_command, min_measured = min_command;
  int slack_steps = 0, saturation_steps = 0;
  const double uav_mass = model.inertia.uav_mass;
  double m_hat_entry = kNaN;
  const auto& setpoints = scenario.arm.setpoint_times;
  std::vector<double> settle(setpoints.size(), kNaN);
  std::vector<double> step_size(setpoints.size(), 0.0);
  std::vector<Window> steady(setpoints.size());
  auto segment_of = [&](double t) {
    int seg = -1;
    for (std::size_t i = 0; i < setpoints.size(); ++i) {
      if (t >= setpoints[i]) seg = static_cast<int>(i);
    }
    return seg;
  };
  auto segment_end = [&](int seg) {
    return seg + 1 < static_cast<int>(setpoints.size()) ? setpoints[seg + 1] : scenario.duration;
  };
  const double estimate_from =
      scenario.payload_schedule.empty() ? scenario.arm.tracking_from
                                        : scenario.payload_schedule.back().time + 2.0;

  long physics_step = 0;
  double t = 0.0;
  try {
    for (long k = 0; k < control_steps; ++k) {
      t = k * dt_c;
      while (next_payload < scenario.payload_schedule.size() &&
             scenario.payload_schedule[next_payload].time <= t + 1e-12) {
        payload_step(model, scenario.payload_schedule[next_payload++]);
      }

      // UAV loop.
      const UavReference uav_ref = scenario.uav_reference(t);
      const UavPositionCommand pos = uav_position_control(
          state, uav_ref, config.uav_gains, uav_adaptive, model.inertia.gravity, dt_c);
      uav_adaptive = pos.adaptive;
      const double thrust = pos.thrust.norm();
      const Eigen::Quaterniond q_c = desired_attitude(pos.thrust);
      const Vector3d torque = uav_attitude_control(state, q_c, Vector3d::Zero(), config.uav_gains,
                                                   model.inertia.uav_inertia);
      const Vector3d s_q = attitude_sliding_surface(state, q_c, Vector3d::Zero(), config.uav_gains);
      const VectorXd uav_tau = uav_generalized_forces(state, model, thrust, torque);

      // Arm loop.
      const TaskReference arm_ref = scenario.arm.reference(t);
      const ArmCommand arm =
          arm_ee_control(state, model, kind, arm_ref, arm_gains, arm_adaptive, dt_c, uav_tau,
                         measured, config.tension, arm_options);
      arm_adaptive = arm.adaptive;
      command = arm.tensions;
      const Vector4d applied = command.cwiseMax(0.0).cwiseMin(config.tension.tension_max);

      // Record the state this command was computed from.
      LogRecord rec;
      rec.time = t;
      rec.state = state;
      rec.tension_command = command;
      rec.tension_raw = arm.raw;
      rec.tension_measured = measured.tensions;
      rec.s_p = pos.sliding;
      rec.s_q = s_q;
      rec.s_arm = arm.sliding;
      rec.m_hat = uav_adaptive.m_hat;
      rec.delta_hat = arm_adaptive.delta_hat;
      rec.task_error = arm.error;
      rec.ee_true = tip_world_pose(state, model);
      rec.ee_estimate = estimate_ee_pose(state.uav_pose(), model.arm.mount,
                                         config.imu_correction ? estimate_imu : estimate_actuation);
      rec.saturated = arm.saturated;
      rec.slack = arm.raw.minCoeff() < config.tension.tension_floor;

      uav_error.add((state.position() - uav_ref.position).norm());
      if (t >= scenario.arm.tracking_from) task_error.add(arm.error.norm());
      min_command = std::min(min_command, command.minCoeff());
      min_raw = std::min(min_raw, arm.raw.minCoeff());
      min_applied = std::min(min_applied, applied.minCoeff());
      if (k > 0) min_measured = std::min(min_measured, measured.tensions.minCoeff());
      slack_steps += rec.slack;
      saturation_steps += rec.saturated;
      const bool in_band = std::abs(uav_adaptive.m_hat - uav_mass) <= 0.1;
      if (!in_band) m_hat_entry = kNaN;
      else if (std::isnan(m_hat_entry)) m_hat_entry = t;

      const int seg = segment_of(t);
      if (seg >= 0) {
        const double err = arm.error.norm();
        if (t == setpoints[seg] || (seg == 0 && k == 0)) {
          const TaskReference before = scenario.arm.reference(std::max(0.0, t - dt_c));
          const VectorXd start =
              seg == 0 ? evaluate_task(state, model, kind).value : before.value;
          step_size[seg] = (arm_ref.value - start).norm();
        }
        const double band = std::max(0.02 * step_size[seg], 1e-4);
        if (err > band) settle[seg] = kNaN;
        else if (std::isnan(settle[seg])) settle[seg] = t - setpoints[seg];
        if (t >= segment_end(seg) - 1.0) steady[seg].add(err);
      }
      if (t >= estimate_from) {
        est_imu.add(rotation_angle_between(rec.ee_true.rotation,
                                           estimate_ee_pose(state.uav_pose(), model.arm.mount,
                                                            estimate_imu)
                                               .rotation));
        est_act.add(rotation_angle_between(rec.ee_true.rotation,
                                           estimate_ee_pose(state.uav_pose(), model.arm.mount,
                                                            estimate_actuation)
                                               .rotation));
      }
#ifndef NDEBUG
      if (!is_valid_rotation(state.uav_rotation(), 1e-9)) {
        throw NumericalFault("UAV rotation lost orthonormality");
      }
      if (config.tension_loop && !arm.saturated &&
          command.minCoeff() < config.tension.tension_floor) {
        throw NumericalFault("regulated tension below the floor");
      }
      if (k % 100 == 0 && mass_matrix(state, model).llt().info() != Eigen::Success) {
        throw NumericalFault("mass matrix not positive definite");
      }
#endif
      result.records.push_back(std::move(rec));

      // Physics, with sensors sampled on their own clocks.
      const ForceField forces = [&](const SystemState& x) {
        GeneralizedForces f = GeneralizedForces::zero(model);
        f.tau = uav_generalized_forces(x, model, thrust, torque) +
                tendon_generalized_forces(model, applied);
        for (const auto& d : scenario.disturbances) {
          if (t >= d.start && t < d.end) f.tau_ext += tip_force_generalized(x, model, d.tip_force);
        }
        return f;
      };
      for (int i = 0; i < substeps; ++i) {
        state = step(state, forces, model, dt);
        ++physics_step;
        const double ts = physics_step * dt;
        if (physics_step % tension_every == 0) {
          measured.tensions = tension_sensor.sample(applied, ts).tensions;
        }
        if (physics_step % imu_every == 0) {
          const ArmConfig truth = state.arm_config(model.arm);
          const Vector4d encoder = encoder_displacements(truth, applied, model.arm.tendons,
                                                         config.sensors.tendon_stiffness);
          const auto per_segment = split_section_actuation(encoder, model.segments());
          estimate_actuation = config_from_section_actuation(
              encoder, model.arm.tendons, model.segments(), model.arm.segment_lengths[0]);
          for (int s = 0; s < model.segments(); ++s) {
            estimate_actuation.segments[s].length = model.arm.segment_lengths[s];
          }
          const ImuReading reading =
              imu.sample(tip_arm_pose(state, model), tip_rates(state, model), ts);
          estimate_imu = config_from_imu(reading, per_segment, model.arm.tendons,
                                         model.arm.segment_lengths, model.arm.alpha_max);
        }
      }
    }
  } catch (const ScenarioFault&) {
    throw;
  } catch (const Error& e) {
    throw ScenarioFault(fmt::format("{} at t = {:.4f} s: {}", scenario.name, t, e.what()));
  }

  // Energy audit: release the final state with every input and gravity off.
  PlantModel free = model;
  free.inertia.gravity = 0.0;
  free.inertia.bending_damping = 0.0;
  free.finalize();
  SystemState audit = state;
  const double e0 = total_energy_no_gravity(audit, free);
  for (int i = 0; i < 500; ++i) audit = step(audit, GeneralizedForces::zero(free), free, dt);
  const double audit_abs = std::abs(total_energy_no_gravity(audit, free) - e0);

  double settle_max = 0.0, steady_max = 0.0;
  for (std::size_t i = 0; i < setpoints.size(); ++i) {
    settle_max = std::isnan(settle[i]) || std::isnan(settle_max) ? kNaN
                                                                 : std::max(settle_max, settle[i]);
    steady_max = std::max(steady_max, steady[i].rms());
  }

  Summary& s = result.summary;
  s.emplace_back("duration", scenario.duration);
  s.emplace_back("control_steps", static_cast<double>(control_steps));
  s.emplace_back("seed", static_cast<double>(config.seed));
  s.emplace_back("tension_loop", config.tension_loop ? 1.0 : 0.0);
  s.emplace_back("imu_correction", config.imu_correction ? 1.0 : 0.0);
  s.emplace_back("uav_position_error_max", uav_error.peak());
  s.emplace_back("uav_position_error_rms", uav_error.rms());
  s.emplace_back("task_error_rms", task_error.rms());
  s.emplace_back("task_error_max", task_error.peak());
  for (std::size_t i = 0; i < setpoints.size(); ++i) {
    s.emplace_back(fmt::format("settling_time_{}", i), settle[i]);
  }
  s.emplace_back("settling_time_max", settle_max);
  s.emplace_back("steady_state_error", steady_max);
  s.emplace_back("min_tension_command", min_command);
  s.emplace_back("min_tension_raw", min_raw);
  s.emplace_back("min_tension_applied", min_applied);
  s.emplace_back("min_tension_measured", min_measured);
  s.emplace_back("min_tension_margin", min_command - config.tension.tension_floor);
  s.emplace_back("slack_steps", slack_steps);
  s.emplace_back("saturation_steps", saturation_steps);
  s.emplace_back("m_hat_final", uav_adaptive.m_hat);
  s.emplace_back("m_hat_entry_time", m_hat_entry);
  s.emplace_back("ee_orientation_error_imu_rms", est_imu.rms());
  s.emplace_back("ee_orientation_error_imu_max", est_imu.peak());
  s.emplace_back("ee_orientation_error_actuation_rms", est_act.rms());
  s.emplace_back("ee_orientation_error_actuation_max", est_act.peak());
  s.emplace_back("ee_orientation_error_ratio", est_act.rms() / est_imu.rms());
  s.emplace_back("energy_audit_initial", e0);
  s.emplace_back("energy_audit_drift", audit_abs);
  s.emplace_back("energy_audit_relative_drift", e0 > 1e-12 ? audit_abs / e0 : 0.0);

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return result;
}

std::optional<double> summary_value(const Summary& summary, const std::string& key) {
  for (const auto& [k, v] : summary) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::vector<std::string> check_summary(const Scenario& scenario, const Summary& summary) {
  std::vector<std::string> failures;
  for (const auto& [key, bounds] : scenario.checks) {
    const auto v = summary_value(summary, key);
    if (!v) {
      failures.push_back(fmt::format("{}: missing", key));
    } else if (!(*v >= bounds.first && *v <= bounds.second)) {
      failures.push_back(
          fmt::format("{} = {:.6g} outside [{:.6g}, {:.6g}]", key, *v, bounds.first, bounds.second));
    }
  }
  return failures;
}

}  // namespace acm
