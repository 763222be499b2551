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

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "acm/harness.hpp"

namespace acm {
namespace {

void append_pose(std::vector<std::string>& cols, const std::string& prefix) {
  for (const char* c : {"x", "y", "z", "roll", "pitch", "yaw"}) cols.push_back(prefix + "_" + c);
}

void append_indexed(std::vector<std::string>& cols, const std::string& prefix, int n) {
  for (int i = 0; i < n; ++i) cols.push_back(fmt::format("{}_{}", prefix, i));
}

std::vector<std::string> coordinate_names(int dof) {
  std::vector<std::string> names = {"uav_x", "uav_y", "uav_z", "uav_roll", "uav_pitch", "uav_yaw"};
  for (int s = 0; s < (dof - kUavDof) / 2; ++s) {
    names.push_back(fmt::format("seg{}_kx", s));
    names.push_back(fmt::format("seg{}_ky", s));
  }
  return names;
}

class Row {
 public:
  explicit Row(std::ostream& out) : out_(out) {}
  void add(double v) {
    if (!first_) out_ << ',';
    first_ = false;
    out_ << format_double(v);
  }
  template <typename Derived>
  void add(const Eigen::MatrixBase<Derived>& v, Eigen::Index n) {
    for (Eigen::Index i = 0; i < n; ++i) add(i < v.size() ? v(i) : std::nan(""));
  }
  void pose(const RigidPose& p) {
    add(p.translation, 3);
    add(euler_zyx_from_rotation(p.rotation), 3);
  }
  void end() { out_ << '\n'; }

 private:
  std::ostream& out_;
  bool first_ = true;
};

}  // namespace

std::vector<std::string> csv_header(int dof, int task_dim) {
  std::vector<std::string> cols = {"time"};
  const auto names = coordinate_names(dof);
  cols.insert(cols.end(), names.begin(), names.end());
  for (const auto& n : names) cols.push_back(n + "_rate");
  append_indexed(cols, "tension_cmd", kTendonCount);
  append_indexed(cols, "tension_raw", kTendonCount);
  append_indexed(cols, "tension_meas", kTendonCount);
  for (const char* c : {"s_p_x", "s_p_y", "s_p_z", "s_q_x", "s_q_y", "s_q_z"}) cols.push_back(c);
  append_indexed(cols, "s_arm", task_dim);
  cols.push_back("m_hat");
  append_indexed(cols, "delta_hat", task_dim);
  append_indexed(cols, "task_error", task_dim);
  append_pose(cols, "ee_true");
  append_pose(cols, "ee_est");
  cols.push_back("saturated");
  cols.push_back("slack");
  return cols;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_csv(const std::vector<LogRecord>& records, int dof, int task_dim, std::ostream& out) {
  const auto header = csv_header(dof, task_dim);
  out << fmt::format("{}\n", fmt::join(header, ","));
  for (const auto& r : records) {
    Row row(out);
    row.add(r.time);
    row.add(r.state.q, dof);
    row.add(r.state.qdot, dof);
    row.add(r.tension_command, kTendonCount);
    row.add(r.tension_raw, kTendonCount);
    row.add(r.tension_measured, kTendonCount);
    row.add(r.s_p, 3);
    row.add(r.s_q, 3);
    row.add(r.s_arm, task_dim);
    row.add(r.m_hat);
    row.add(r.delta_hat, task_dim);
    row.add(r.task_error, task_dim);
    row.pose(r.ee_true);
    row.pose(r.ee_estimate);
    row.add(r.saturated ? 1.0 : 0.0);
    row.add(r.slack ? 1.0 : 0.0);
    row.end();
  }
}

void write_summary(const std::string& scenario, const Summary& summary, std::ostream& out) {
  out << "scenario: " << scenario << '\n';
  for (const auto& [key, value] : summary) out << key << ": " << format_double(value) << '\n';
}

void emit_logs(const std::string& scenario, const RunResult& result, int dof, int task_dim,
               const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  auto write = [&](const std::filesystem::path& path, auto&& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(fmt::format("cannot open {} for writing", path.string()));
    body(out);
    out.flush();
    if (!out) throw IoError(fmt::format("write to {} failed", path.string()));
  };
  write(dir / (scenario + ".csv"),
        [&](std::ostream& out) { write_csv(result.records, dof, task_dim, out); });
  write(dir / (scenario + ".summary.txt"),
        [&](std::ostream& out) { write_summary(scenario, result.summary, out); });
}

}  // namespace acm
