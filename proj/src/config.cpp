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

// TOML-style configuration: [section] tables of `key = value` lines, where a
// value is a number, true/false, or a flat [a, b, ...] array of numbers.
// '#' starts a comment. Unknown sections or keys are errors.

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <sstream>

#include "acm/harness.hpp"

namespace acm {
namespace {

enum class Kind { kNumber, kInteger, kBool, kArray };

struct Field {
  const char* section;
  const char* key;
  const char* doc;
  Kind kind;
  std::function<std::vector<double>()> get;
  std::function<void(const std::vector<double>&)> set;
  std::size_t fixed_size = 0;  // for arrays; 0 means any positive length
};

Field number(const char* section, const char* key, const char* doc, double& ref) {
  return {section, key, doc, Kind::kNumber, [&ref] { return std::vector<double>{ref}; },
          [&ref](const std::vector<double>& v) { ref = v[0]; }};
}

Field flag(const char* section, const char* key, const char* doc, bool& ref) {
  return {section, key, doc, Kind::kBool, [&ref] { return std::vector<double>{ref ? 1.0 : 0.0}; },
          [&ref](const std::vector<double>& v) { ref = v[0] != 0.0; }};
}

Field list(const char* section, const char* key, const char* doc, std::vector<double>& ref) {
  return {section, key, doc, Kind::kArray, [&ref] { return ref; },
          [&ref](const std::vector<double>& v) { ref = v; }};
}

Field vec3(const char* section, const char* key, const char* doc, Vector3d& ref) {
  return {section, key, doc, Kind::kArray,
          [&ref] { return std::vector<double>{ref.x(), ref.y(), ref.z()}; },
          [&ref](const std::vector<double>& v) { ref = Vector3d(v[0], v[1], v[2]); }, 3};
}

Field diagonal(const char* section, const char* key, const char* doc, Matrix3d& ref) {
  return {section, key, doc, Kind::kArray,
          [&ref] { return std::vector<double>{ref(0, 0), ref(1, 1), ref(2, 2)}; },
          [&ref](const std::vector<double>& v) {
            ref = Vector3d(v[0], v[1], v[2]).asDiagonal();
          },
          3};
}

std::vector<Field> fields(SimConfig& c) {
  auto& arm = c.plant.arm;
  auto& in = c.plant.inertia;
  auto& g = c.uav_gains;
  std::vector<Field> f = {
      number("sim", "dt_physics", "integrator step, s", c.dt_physics),
      number("sim", "dt_control", "controller period, s; integer multiple of dt_physics",
             c.dt_control),
      {"sim", "seed", "sensor noise seed", Kind::kInteger,
       [&c] { return std::vector<double>{static_cast<double>(c.seed)}; },
       [&c](const std::vector<double>& v) { c.seed = static_cast<std::uint64_t>(v[0]); }},
      flag("sim", "tension_loop", "tension feedback regulator on", c.tension_loop),
      flag("sim", "imu_correction", "IMU-corrected shape estimate on", c.imu_correction),
      list("arm", "segment_lengths", "per segment, m", arm.segment_lengths),
      vec3("arm", "mount_offset", "arm base in the UAV body frame, m", arm.mount.translation),
      number("arm", "routing_radius", "tendon routing radius, m", arm.tendons.routing_radius),
      number("arm", "alpha_max", "bend limit per segment, rad", arm.alpha_max),
      number("inertia", "uav_mass", "kg", in.uav_mass),
      diagonal("inertia", "uav_inertia", "principal inertia, kg m^2", in.uav_inertia),
      list("inertia", "segment_masses", "per segment, kg", in.segment_masses),
      number("inertia", "spring_stiffness", "k_eff, N m/rad", in.spring_stiffness),
      number("inertia", "bending_damping", "N m s/rad", in.bending_damping),
      number("inertia", "gravity", "m/s^2", in.gravity),
      number("inertia", "tool_mass", "gripper and IMU at the tip, kg", in.tool_mass),
      number("inertia", "tip_mass", "payload at the tip at t = 0, kg", in.tip_mass),
      diagonal("uav_gains", "k_pos", "position sliding-surface gain", g.k_pos),
      diagonal("uav_gains", "c_pos", "position surface feedback", g.c_pos),
      number("uav_gains", "lambda_m", "mass adaptation rate", g.lambda_m),
      diagonal("uav_gains", "k_q", "attitude sliding-surface gain", g.k_q),
      diagonal("uav_gains", "c_q", "attitude surface feedback", g.c_q),
      number("uav_gains", "mass_min", "mass estimate lower bound, kg", g.mass_min),
      number("uav_gains", "mass_max", "mass estimate upper bound, kg", g.mass_max),
      number("arm_gains", "lambda", "task sliding-surface gain", c.arm_lambda),
      number("arm_gains", "k_v", "task rate feedback", c.arm_k_v),
      number("arm_gains", "k_p", "task error feedback", c.arm_k_p),
      number("arm_gains", "k_adapt", "uncertainty adaptation rate", c.arm_k_adapt),
      number("tension", "floor", "T_min, N", c.tension.tension_floor),
      number("tension", "redistribution_gain", "co-contraction per N of measured deficit",
             c.tension.redistribution_gain),
      number("tension", "max", "actuator limit, N; 0.35 N m servo torque on a 0.01 m spool",
             c.tension.tension_max),
      number("sensors", "imu_rate", "Hz", c.sensors.imu_rate),
      number("sensors", "tension_rate", "Hz", c.sensors.tension_rate),
      number("sensors", "imu_angle_sigma", "rad", c.sensors.imu_angle_sigma),
      number("sensors", "imu_rate_sigma", "rad/s", c.sensors.imu_rate_sigma),
      number("sensors", "tension_sigma", "N", c.sensors.tension_sigma),
      number("sensors", "tendon_stiffness", "axial tendon stiffness, N/m; <= 0 inextensible",
             c.sensors.tendon_stiffness),
  };
  return f;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s[0] == '+') ++first;
  const auto res = std::from_chars(first, s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || first == s.data() + s.size()) {
    return std::nullopt;
  }
  return v;
}

std::string format_value(const Field& f) {
  const auto v = f.get();
  switch (f.kind) {
    case Kind::kBool:
      return v[0] != 0.0 ? "true" : "false";
    case Kind::kInteger:
      return fmt::format("{}", static_cast<std::uint64_t>(v[0]));
    case Kind::kNumber:
      return format_double(v[0]);
    case Kind::kArray: {
      std::vector<std::string> parts;
      for (double x : v) parts.push_back(format_double(x));
      return fmt::format("[{}]", fmt::join(parts, ", "));
    }
  }
  return {};
}

}  // namespace

SimConfig parse_config(const std::string& text) {
  SimConfig config;
  auto table = fields(config);
  std::istringstream in(text);
  std::string raw, section;
  int line_no = 0;
  auto fail = [&](const std::string& what) {
    throw ConfigError(fmt::format("line {}: {}: '{}'", line_no, what, trim(raw)));
  };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(std::string_view(raw).substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      bool known = false;
      for (const auto& f : table) known = known || section == f.section;
      if (!known) fail("unknown section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    Field* field = nullptr;
    for (auto& f : table) {
      if (section == f.section && key == f.key) field = &f;
    }
    if (!field) fail(section.empty() ? "key outside a section" : "unknown key");

    std::vector<double> parsed;
    switch (field->kind) {
      case Kind::kBool:
        if (value == "true") parsed = {1.0};
        else if (value == "false") parsed = {0.0};
        else fail("expected true or false");
        break;
      case Kind::kInteger: {
        const auto v = parse_number(value);
        if (!v || *v < 0.0 || *v != std::floor(*v) || *v > 9007199254740992.0) {
          fail("expected a non-negative integer");
        }
        parsed = {*v};
        break;
      }
      case Kind::kNumber: {
        const auto v = parse_number(value);
        if (!v) fail("expected a number");
        parsed = {*v};
        break;
      }
      case Kind::kArray: {
        if (value.size() < 2 || value.front() != '[' || value.back() != ']') {
          fail("expected an array [a, b, ...]");
        }
        std::istringstream items(value.substr(1, value.size() - 2));
        std::string item;
        while (std::getline(items, item, ',')) {
          const auto v = parse_number(trim(item));
          if (!v) fail("expected numbers in the array");
          parsed.push_back(*v);
        }
        if (parsed.empty()) fail("array must not be empty");
        if (field->fixed_size && parsed.size() != field->fixed_size) {
          fail(fmt::format("expected {} entries", field->fixed_size));
        }
        break;
      }
    }
    field->set(parsed);
  }
  if (config.plant.inertia.segment_masses.size() != config.plant.arm.segment_lengths.size()) {
    throw ConfigError("inertia.segment_masses and arm.segment_lengths differ in length");
  }
  validate(config);
  return config;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot read config {}", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string dump_config(const SimConfig& config) {
  SimConfig copy = config;
  const auto table = fields(copy);
  std::string out;
  std::string section;
  for (const auto& f : table) {
    if (section != f.section) {
      section = f.section;
      out += fmt::format("{}[{}]\n", out.empty() ? "" : "\n", section);
    }
    out += fmt::format("{} = {}  # {}\n", f.key, format_value(f), f.doc);
  }
  return out;
}

}  // namespace acm
