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

// Scenario runner command line.
//
//   acm_sim run <scenario>|all [--config PATH] [--out DIR] [--seed N]
//           [--disable-tension-loop] [--disable-imu-correction] [--check]
//   acm_sim list-scenarios
//   acm_sim dump-default-config
//
// ACM_OUT_DIR sets the output directory when --out is not given.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <future>
#include <iostream>

#include "acm/harness.hpp"

namespace {

struct RunOptions {
  std::string scenario;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool no_tension_loop = false;
  bool no_imu_correction = false;
  bool check = false;
};

struct Outcome {
  std::string name;
  acm::Summary summary;
  double sim_seconds = 0.0;
  double wall_seconds = 0.0;
  std::vector<std::string> failures;
  std::string fault;
};

Outcome run_one(const std::string& name, const acm::SimConfig& config,
                const std::filesystem::path& out) {
  Outcome o;
  o.name = name;
  try {
    const acm::Scenario scenario = acm::make_scenario(name);
    const acm::RunResult result = acm::run_scenario(scenario, config);
    acm::emit_logs(name, result, config.plant.dof(), acm::task_dimension(scenario.arm.kind), out);
    o.summary = result.summary;
    o.sim_seconds = scenario.duration;
    o.wall_seconds = result.wall_seconds;
    o.failures = acm::check_summary(scenario, result.summary);
  } catch (const acm::Error& e) {
    o.fault = e.what();
  }
  return o;
}

int run(const RunOptions& opt) {
  acm::SimConfig config =
      opt.config_path.empty() ? acm::SimConfig{} : acm::load_config(opt.config_path);
  if (opt.seed_given) config.seed = opt.seed;
  if (opt.no_tension_loop) config.tension_loop = false;
  if (opt.no_imu_correction) config.imu_correction = false;
  acm::validate(config);

  std::filesystem::path out = opt.out_dir;
  if (out.empty()) {
    const char* env = std::getenv("ACM_OUT_DIR");
    out = env && *env ? env : "out";
  }

  const std::vector<std::string> names =
      opt.scenario == "all" ? acm::scenario_names() : std::vector<std::string>{opt.scenario};
  for (const auto& name : names) acm::make_scenario(name);

  std::vector<std::future<Outcome>> jobs;
  for (const auto& name : names) {
    jobs.push_back(std::async(std::launch::async, run_one, name, config, out));
  }

  int status = 0;
  for (auto& job : jobs) {
    const Outcome o = job.get();
    if (!o.fault.empty()) {
      fmt::print(stderr, "{}: FAULT {}\n", o.name, o.fault);
      status = 1;
      continue;
    }
    fmt::print("{}: {:.1f} s simulated in {:.2f} s wall (real-time factor {:.1f})\n", o.name,
               o.sim_seconds, o.wall_seconds, o.sim_seconds / o.wall_seconds);
    if (opt.check) {
      for (const auto& f : o.failures) fmt::print(stderr, "{}: CHECK FAILED {}\n", o.name, f);
      if (!o.failures.empty()) status = 2;
    }
  }
  fmt::print("logs in {}\n", out.string());
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aerial continuum manipulator simulator"};
  app.require_subcommand(1);

  RunOptions opt;
  auto* run_cmd = app.add_subcommand("run", "run a scenario (or all) and write logs");
  run_cmd->add_option("scenario", opt.scenario, "scenario name or 'all'")->required();
  run_cmd->add_option("--config", opt.config_path, "TOML-style configuration file");
  run_cmd->add_option("--out", opt.out_dir, "output directory (default $ACM_OUT_DIR or ./out)");
  run_cmd->add_option("--seed", opt.seed, "sensor noise seed")->each([&](const std::string&) {
    opt.seed_given = true;
  });
  run_cmd->add_flag("--disable-tension-loop", opt.no_tension_loop);
  run_cmd->add_flag("--disable-imu-correction", opt.no_imu_correction);
  run_cmd->add_flag("--check", opt.check, "exit nonzero when a scenario threshold is violated");

  auto* list_cmd = app.add_subcommand("list-scenarios", "print the scenario library");
  auto* dump_cmd = app.add_subcommand("dump-default-config", "print the default configuration");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list_cmd) {
      for (const auto& name : acm::scenario_names()) {
        fmt::print("{:<18} {}\n", name, acm::make_scenario(name).description);
      }
      return 0;
    }
    if (*dump_cmd) {
      std::cout << acm::dump_config(acm::SimConfig{});
      return 0;
    }
    return run(opt);
  } catch (const acm::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
