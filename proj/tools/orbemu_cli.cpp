// orbemu: run, inspect and serve emulation scenarios.
//
//   orbemu run --config <file> [--log <csv>] [--seed <n>] [--serve <host:port>] [--duration <s>] [--headless]
//   orbemu metrics --log <csv>
//   orbemu validate --config <file>
//
// Exit codes: 0 ok, 1 other failure, 2 configuration error, 3 numerical failure.

#include "orbemu/config.hpp"
#include "orbemu/log.hpp"
#include "orbemu/metrics.hpp"
#include "orbemu/simulation.hpp"
#include "orbemu/stream.hpp"

#include "CLI11.hpp"

#include <atomic>
#include <csignal>
#include <iostream>
#include <optional>

namespace {

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int cmd_validate(const std::string& path) {
  const auto cfg = orbemu::load_config(path);
  std::cout << path << ": ok (" << orbemu::to_string(cfg.scenario) << ", " << cfg.satellites.size()
            << " satellite" << (cfg.satellites.size() == 1 ? "" : "s") << ", " << cfg.duration << " s)\n";
  return 0;
}

int cmd_metrics(const std::string& path, std::optional<double> altitude) {
  const auto log = orbemu::read_log(path);
  if (log.empty()) {
    std::cerr << path << ": log has no records\n";
    return 1;
  }
  orbemu::OrbitParams orbit;
  if (altitude) orbit = orbemu::OrbitParams::from_altitude(*altitude);
  orbemu::print_metrics(orbemu::compute_metrics(log, orbit.omega()), std::cout);
  return 0;
}

struct RunArgs {
  std::string config;
  std::string log;
  std::optional<std::uint64_t> seed;
  std::string serve;
  std::optional<double> duration;
  bool headless = false;
  std::string record_script;
};

int cmd_run(const RunArgs& a) {
  auto cfg = orbemu::load_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (a.duration) {
    cfg.duration = *a.duration;
    if (auto issues = cfg.issues(); !issues.empty()) throw orbemu::ConfigError(std::move(issues));
  }

  std::vector<std::string> names;
  for (const auto& s : cfg.satellites) names.push_back(s.body.name);

  orbemu::RunOptions opts;
  opts.should_stop = [] { return g_interrupted.load(); };
  orbemu::CommandQueue commands;
  orbemu::TelemetryQueue telemetry;
  std::optional<orbemu::StreamServer> server;
  if (!a.serve.empty()) {
    server.emplace(orbemu::parse_endpoint(a.serve), names, commands, telemetry);
    server->start();
    std::cerr << "serving on port " << server->port() << "\n";
    opts.commands = [&commands] { return commands.pop(); };
    opts.telemetry = [&telemetry, &names](const orbemu::LogRecord& r, orbemu::RunStatus st) {
      telemetry.push(orbemu::format_state_frame(r, names, st));
    };
    opts.realtime = !a.headless;
    opts.hold_at_end = !a.headless;
  }

  const auto result = orbemu::run_scenario(cfg, opts);
  if (server) server->stop();

  if (!a.log.empty()) orbemu::write_log(result.records, a.log);
  if (!a.record_script.empty()) {
    auto replay = cfg;
    replay.force_script.insert(replay.force_script.end(), result.applied_impulses.begin(),
                               result.applied_impulses.end());
    orbemu::save_config(replay, a.record_script);
  }
  const auto m = orbemu::compute_metrics(result.records, cfg.orbit.omega());
  std::cerr << result.records.size() << " records in " << result.wall_seconds << " s";
  if (result.safety_stop) std::cerr << ", SAFETY_STOP";
  std::cerr << "\n";
  orbemu::print_metrics(m, std::cerr);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orbital motion emulation with position-controlled arms"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario");
  run_cmd->add_option("--config", run.config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--log", run.log, "Write the per-tick CSV log here");
  run_cmd->add_option("--seed", run.seed, "Override the scenario seed");
  run_cmd->add_option("--serve", run.serve, "Serve the telemetry/command stream on host:port");
  run_cmd->add_option("--duration", run.duration, "Override the scenario duration, s");
  run_cmd->add_flag("--headless", run.headless, "Run as fast as possible and stop at the end");
  run_cmd->add_option("--record-script", run.record_script,
                      "Write the config with live impulses appended to its force_script");

  std::string metrics_log;
  std::optional<double> altitude;
  auto* metrics_cmd = app.add_subcommand("metrics", "Summarise a run log");
  metrics_cmd->add_option("--log", metrics_log, "CSV log")->required()->check(CLI::ExistingFile);
  metrics_cmd->add_option("--altitude", altitude, "Orbit altitude for the CW integral, m (default 800 km)");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file");
  validate_cmd->add_option("--config", validate_path, "Scenario JSON")->required()->check(CLI::ExistingFile);

  std::string chain_name = "ur10e_nominal";
  auto* chain_cmd = app.add_subcommand("chain", "Print a bundled chain as an inline chain document");
  chain_cmd->add_option("--name", chain_name, "Bundled chain name");

  CLI11_PARSE(app, argc, argv);

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  try {
    if (*run_cmd) return cmd_run(run);
    if (*metrics_cmd) return cmd_metrics(metrics_log, altitude);
    if (*validate_cmd) return cmd_validate(validate_path);
    if (*chain_cmd) {
      std::cout << orbemu::chain_to_json(orbemu::bundled_chain(chain_name)).dump(2) << "\n";
      return 0;
    }
  } catch (const orbemu::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const orbemu::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const orbemu::ContractViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
