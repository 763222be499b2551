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

// Closed-loop scenario runner: plant, controllers and sensors stepped on a
// fixed clock, with per-control-step records and summary metrics.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "acm/controllers.hpp"
#include "acm/dynamics.hpp"
#include "acm/sensors.hpp"

namespace acm {

struct SensorConfig {
  double imu_rate = 200.0;      // Hz
  double tension_rate = 500.0;  // Hz
  double imu_angle_sigma = 0.002;  // rad
  double imu_rate_sigma = 0.01;    // rad/s
  double tension_sigma = 0.01;     // N
  /// Axial stiffness of one tendon seen by the motor encoder, N/m.
  double tendon_stiffness = 2000.0;
};

struct SimConfig {
  double dt_physics = 1e-3;
  double dt_control = 2e-3;
  std::uint64_t seed = 1;
  PlantModel plant = default_plant();
  UavGains uav_gains;
  /// Scalar gains of the isotropic arm law.
  double arm_lambda = 8.0;
  double arm_k_v = 16.0;
  double arm_k_p = 128.0;
  double arm_k_adapt = 64.0;
  TensionLoopParams tension;
  SensorConfig sensors;
  bool tension_loop = true;
  bool imu_correction = true;

  /// Steps per control period. Throws ConfigError unless dt_control is a
  /// positive integer multiple of dt_physics.
  int control_substeps() const;
};

void validate(SimConfig& config);

struct PayloadEvent {
  double time;
  double mass;  // tip payload from this time on, kg
};

struct Disturbance {
  double start;
  double end;
  Vector3d tip_force;  // world frame, N
};

struct ArmTarget {
  TaskKind kind = TaskKind::kTipOrientation;
  std::function<TaskReference(double)> reference;
  /// Times at which a new constant setpoint starts (for settling metrics).
  std::vector<double> setpoint_times;
  /// Start of the window used for tracking statistics.
  double tracking_from = 0.0;
};

struct Scenario {
  std::string name;
  std::string description;
  double duration = 10.0;
  std::function<UavReference(double)> uav_reference;
  ArmTarget arm;
  std::vector<PayloadEvent> payload_schedule;
  std::vector<Disturbance> disturbances;
  /// Initial mass estimate; unset means the true supported mass.
  std::optional<double> initial_mass_estimate;
  /// Threshold checks for --check: metric name to (lower, upper) bounds.
  std::map<std::string, std::pair<double, double>> checks;
};

void validate(const Scenario& scenario);

std::vector<std::string> scenario_names();
/// Throws ConfigError for unknown names.
Scenario make_scenario(const std::string& name);

struct LogRecord {
  double time = 0.0;
  SystemState state;
  Vector4d tension_command = Vector4d::Zero();
  Vector4d tension_raw = Vector4d::Zero();
  Vector4d tension_measured = Vector4d::Zero();
  Vector3d s_p = Vector3d::Zero();
  Vector3d s_q = Vector3d::Zero();
  VectorXd s_arm;
  double m_hat = 0.0;
  VectorXd delta_hat;
  VectorXd task_error;
  RigidPose ee_true;
  RigidPose ee_estimate;
  bool saturated = false;
  bool slack = false;  // the unregulated command would drop below the floor
};

/// Summary metrics in a stable key order.
using Summary = std::vector<std::pair<std::string, double>>;

struct RunResult {
  std::vector<LogRecord> records;
  Summary summary;
  double wall_seconds = 0.0;
};

/// Deterministic closed-loop run. Module faults surface as ScenarioFault
/// carrying the simulation time and the original message.
RunResult run_scenario(const Scenario& scenario, const SimConfig& config);

/// Adds the payload to the tip and refreshes the model.
void payload_step(PlantModel& model, const PayloadEvent& event);

std::optional<double> summary_value(const Summary& summary, const std::string& key);

/// Failed checks as human-readable lines; empty when every check passes.
std::vector<std::string> check_summary(const Scenario& scenario, const Summary& summary);

// Output files.

std::vector<std::string> csv_header(int dof, int task_dim);
std::string format_double(double value);
void write_csv(const std::vector<LogRecord>& records, int dof, int task_dim, std::ostream& out);
void write_summary(const std::string& scenario, const Summary& summary, std::ostream& out);
/// Writes <dir>/<scenario>.csv and <dir>/<scenario>.summary.txt. Throws IoError.
void emit_logs(const std::string& scenario, const RunResult& result, int dof, int task_dim,
               const std::filesystem::path& dir);

// Configuration files.

/// Parses the TOML-style configuration on top of the defaults. Throws
/// ConfigError with the offending line.
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::filesystem::path& path);
std::string dump_config(const SimConfig& config);

}  // namespace acm
