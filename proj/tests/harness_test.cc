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

#include <gtest/gtest.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace acm {
namespace {

constexpr double kDeg = kPi / 180.0;

Scenario shortened(const std::string& name, double duration) {
  Scenario s = make_scenario(name);
  s.duration = duration;
  return s;
}

std::string csv_of(const RunResult& r, const SimConfig& c, const Scenario& s) {
  std::ostringstream out;
  write_csv(r.records, c.plant.dof(), task_dimension(s.arm.kind), out);
  return out.str();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

double parse(const std::string& s) {
  if (s == "nan") return std::nan("");
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  EXPECT_EQ(res.ptr, s.data() + s.size()) << s;
  return v;
}

TEST(Csv, EmptyRecordsGiveHeaderOnly) {
  std::ostringstream out;
  write_csv({}, 16, 2, out);
  const std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
  EXPECT_EQ(split(text.substr(0, text.size() - 1)), csv_header(16, 2));
}

TEST(Csv, HeaderLayout) {
  const auto h = csv_header(16, 2);
  EXPECT_EQ(h.front(), "time");
  EXPECT_EQ(h[1], "uav_x");
  EXPECT_EQ(h[7], "seg0_kx");
  EXPECT_EQ(h[17], "uav_x_rate");
  EXPECT_EQ(h.back(), "slack");
  EXPECT_EQ(h.size(), 1u + 32 + 12 + 6 + 2 + 1 + 2 + 2 + 12 + 2);
}

TEST(Csv, FormatDoubleRoundTrips) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 10000; ++i) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    ASSERT_EQ(parse(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(std::nan("")), "nan");
}

TEST(Csv, ParseBackRecoversEveryField) {
  const Scenario s = shortened("bend-pitch-roll", 0.1);
  const SimConfig c;
  const RunResult r = run_scenario(s, c);
  ASSERT_EQ(r.records.size(), 50u);
  std::istringstream in(csv_of(r, c, s));
  std::string line;
  std::getline(in, line);
  const auto header = split(line);
  for (const auto& rec : r.records) {
    ASSERT_TRUE(std::getline(in, line));
    const auto f = split(line);
    ASSERT_EQ(f.size(), header.size());
    std::size_t i = 0;
    EXPECT_EQ(parse(f[i++]), rec.time);
    for (int k = 0; k < c.plant.dof(); ++k) EXPECT_EQ(parse(f[i++]), rec.state.q(k));
    for (int k = 0; k < c.plant.dof(); ++k) EXPECT_EQ(parse(f[i++]), rec.state.qdot(k));
    for (int k = 0; k < 4; ++k) EXPECT_EQ(parse(f[i++]), rec.tension_command(k));
    for (int k = 0; k < 4; ++k) EXPECT_EQ(parse(f[i++]), rec.tension_raw(k));
    for (int k = 0; k < 4; ++k) EXPECT_EQ(parse(f[i++]), rec.tension_measured(k));
    for (int k = 0; k < 3; ++k) EXPECT_EQ(parse(f[i++]), rec.s_p(k));
    for (int k = 0; k < 3; ++k) EXPECT_EQ(parse(f[i++]), rec.s_q(k));
    for (int k = 0; k < 2; ++k) EXPECT_EQ(parse(f[i++]), rec.s_arm(k));
    EXPECT_EQ(parse(f[i++]), rec.m_hat);
    for (int k = 0; k < 2; ++k) EXPECT_EQ(parse(f[i++]), rec.delta_hat(k));
    for (int k = 0; k < 2; ++k) EXPECT_EQ(parse(f[i++]), rec.task_error(k));
    for (const RigidPose* p : {&rec.ee_true, &rec.ee_estimate}) {
      for (int k = 0; k < 3; ++k) EXPECT_EQ(parse(f[i++]), p->translation(k));
      const Vector3d rpy = euler_zyx_from_rotation(p->rotation);
      for (int k = 0; k < 3; ++k) EXPECT_EQ(parse(f[i++]), rpy(k));
    }
    EXPECT_EQ(parse(f[i++]), rec.saturated ? 1.0 : 0.0);
    EXPECT_EQ(parse(f[i++]), rec.slack ? 1.0 : 0.0);
  }
  EXPECT_FALSE(std::getline(in, line));
}

TEST(RunScenario, RecordsOnePerControlStepWithMonotoneTime) {
  const Scenario s = shortened("circle", 0.2);
  SimConfig c;
  c.dt_control = 4e-3;
  const RunResult r = run_scenario(s, c);
  ASSERT_EQ(r.records.size(), 50u);
  for (std::size_t i = 1; i < r.records.size(); ++i) {
    EXPECT_GT(r.records[i].time, r.records[i - 1].time);
  }
}

TEST(RunScenario, IdenticalSeedsGiveIdenticalBytes) {
  const Scenario s = shortened("payload-pickup", 3.2);
  SimConfig c;
  c.seed = 17;
  const std::string a = csv_of(run_scenario(s, c), c, s);
  const std::string b = csv_of(run_scenario(s, c), c, s);
  EXPECT_EQ(a, b);
  c.seed = 18;
  EXPECT_NE(csv_of(run_scenario(s, c), c, s), a);
}

TEST(RunScenario, EmitLogsWritesBothFiles) {
  const Scenario s = shortened("hover-hold", 0.05);
  const SimConfig c;
  const RunResult r = run_scenario(s, c);
  const auto dir = std::filesystem::temp_directory_path() / "acm_emit_logs_test";
  std::filesystem::remove_all(dir);
  emit_logs(s.name, r, c.plant.dof(), 2, dir);
  std::ifstream csv(dir / "hover-hold.csv"), summary(dir / "hover-hold.summary.txt");
  ASSERT_TRUE(csv && summary);
  std::string first;
  std::getline(summary, first);
  EXPECT_EQ(first, "scenario: hover-hold");
  std::filesystem::remove_all(dir);
}

TEST(RunScenario, UnwritableDirectoryIsIoError) {
  const RunResult r;
  EXPECT_THROW(emit_logs("x", r, 16, 2, "/proc/acm/not/here"), IoError);
}

TEST(RunScenario, ModuleFaultCarriesTime) {
  SimConfig c;
  c.tension.tension_max = 0.55;
  try {
    run_scenario(shortened("bend-pitch-30deg", 1.0), c);
    FAIL() << "expected a fault";
  } catch (const ScenarioFault& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("bend-pitch-30deg at t = "), std::string::npos) << what;
  }
}

TEST(RunScenario, InvalidScenariosRejected) {
  EXPECT_THROW(make_scenario("nope"), ConfigError);
  Scenario s = make_scenario("payload-pickup");
  s.payload_schedule = {{2.0, 0.1}, {1.0, 0.0}};
  EXPECT_THROW(run_scenario(s, SimConfig{}), ConfigError);
  s = make_scenario("hover-hold");
  s.duration = 0.0;
  EXPECT_THROW(run_scenario(s, SimConfig{}), ConfigError);
}

TEST(PayloadStep, ZeroMassLeavesModelUnchanged) {
  PlantModel m = default_plant();
  SystemState s = SystemState::zero(m);
  s.set_segment(2, 0.3, 1.0);
  const MatrixXd before = mass_matrix(s, m);
  payload_step(m, {1.0, 0.0});
  EXPECT_EQ(mass_matrix(s, m), before);
  payload_step(m, {1.0, 0.1});
  EXPECT_NEAR(m.inertia.total_mass() - default_plant().inertia.total_mass(), 0.1, 1e-15);
}

// Hover with a payload at t = 1 s: the vehicle sags, then the mass estimate
// absorbs the new load and the altitude recovers.
TEST(PayloadStep, HoverAltitudeDipsAndRecovers) {
  Scenario s = make_scenario("hover-hold");
  s.duration = 12.0;
  s.payload_schedule = {{1.0, 0.1}};
  const SimConfig c;
  const RunResult r = run_scenario(s, c);
  double min_z = 1.0;
  for (const auto& rec : r.records) min_z = std::min(min_z, rec.state.q(2));
  EXPECT_LT(min_z, 1.0 - 5e-3);
  EXPECT_LT(std::abs(r.records.back().state.q(2) - 1.0), 1e-3);
  EXPECT_NEAR(r.records.back().m_hat, c.plant.inertia.total_mass() + 0.1, 5e-3);
}

// Constant horizontal push at the tip: the uncertainty estimate takes it up.
TEST(ArmAdaptation, ConstantTipLoadRejected) {
  Scenario s = make_scenario("circle");
  s.duration = 6.0;
  s.arm.reference = [](double) {
    return TaskReference{Vector2d(0.02, 0.0), Vector2d::Zero(), Vector2d::Zero()};
  };
  s.arm.setpoint_times = {0.0};
  s.disturbances = {{0.0, 6.0, Vector3d(0.05, -0.03, 0.0)}};
  const RunResult r = run_scenario(s, SimConfig{});
  EXPECT_LT(r.records.back().task_error.norm(), 1e-3);
  EXPECT_GT(r.records.back().delta_hat.norm(), 1.0);
}

TEST(Config, DumpParseRoundTrip) {
  SimConfig c;
  c.seed = 99;
  c.tension_loop = false;
  c.plant.inertia.segment_masses = {0.01, 0.02, 0.03};
  c.plant.arm.segment_lengths = {0.04, 0.05, 0.06};
  c.uav_gains.k_pos = Vector3d(1.0, 2.0, 3.0).asDiagonal();
  c.sensors.tendon_stiffness = 1234.5;
  const std::string text = dump_config(c);
  const SimConfig back = parse_config(text);
  EXPECT_EQ(dump_config(back), text);
  EXPECT_EQ(back.seed, 99u);
  EXPECT_FALSE(back.tension_loop);
  EXPECT_EQ(back.plant.segments(), 3);
  EXPECT_EQ(back.uav_gains.k_pos(2, 2), 3.0);
}

TEST(Config, DefaultsFromEmptyText) {
  EXPECT_EQ(dump_config(parse_config("# nothing\n\n")), dump_config(SimConfig{}));
}

TEST(Config, PartialOverride) {
  const SimConfig c = parse_config("[sim]\nseed = 5  # comment\n[tension]\nfloor = 0.75\n");
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.tension.tension_floor, 0.75);
  EXPECT_EQ(c.dt_physics, 1e-3);
}

TEST(Config, ErrorsNameTheLine) {
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("[sim]\n\nbogus = 1\n").find("line 3"), std::string::npos);
  EXPECT_NE(message("[nowhere]\n").find("unknown section"), std::string::npos);
  EXPECT_NE(message("seed = 1\n").find("outside a section"), std::string::npos);
  EXPECT_NE(message("[sim]\nseed = -1\n").find("integer"), std::string::npos);
  EXPECT_NE(message("[sim]\ntension_loop = yes\n").find("true or false"), std::string::npos);
  EXPECT_NE(message("[inertia]\nuav_inertia = [1, 2]\n").find("3 entries"), std::string::npos);
  EXPECT_NE(message("[sim]\ndt_physics = 1e-3x\n").find("number"), std::string::npos);
  EXPECT_NE(message("[sim]\ndt_control = 1.5e-3\n").find("multiple"), std::string::npos);
  EXPECT_NE(message("[arm]\nsegment_lengths = [0.05]\n").find("differ"), std::string::npos);
  EXPECT_NE(message("[tension]\nfloor = 50\n"), "no error");
}

TEST(Config, MissingFileIsIoError) {
  EXPECT_THROW(load_config("/nonexistent/acm.toml"), IoError);
}

// Committed summaries of the full scenario library. Tolerance absorbs
// floating-point differences between compilers and Eigen versions.
class Golden : public ::testing::TestWithParam<std::string> {};

TEST_P(Golden, SummaryMatches) {
  const std::string name = GetParam();
  std::ifstream in(std::string(ACM_GOLDEN_DIR) + "/" + name + ".summary.txt");
  ASSERT_TRUE(in) << "missing golden summary for " << name;
  std::map<std::string, double> golden;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto colon = line.find(": ");
    golden[line.substr(0, colon)] = parse(line.substr(colon + 2));
  }
  const Scenario s = make_scenario(name);
  const RunResult r = run_scenario(s, SimConfig{});
  ASSERT_EQ(r.summary.size(), golden.size());
  for (const auto& [key, value] : r.summary) {
    ASSERT_TRUE(golden.count(key)) << key;
    const double want = golden[key];
    if (std::isnan(want)) {
      EXPECT_TRUE(std::isnan(value)) << key;
    } else {
      EXPECT_NEAR(value, want, 1e-6 * std::abs(want) + 1e-9) << key;
    }
  }
  EXPECT_TRUE(check_summary(s, r.summary).empty());
}

INSTANTIATE_TEST_SUITE_P(Scenarios, Golden, ::testing::ValuesIn(scenario_names()),
                         [](const auto& info) {
                           std::string n = info.param;
                           std::replace(n.begin(), n.end(), '-', '_');
                           return n;
                         });

}  // namespace
}  // namespace acm
