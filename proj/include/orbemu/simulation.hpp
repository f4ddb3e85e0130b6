/**
 * @file simulation.hpp
 * @brief The closed emulation loop: sensed wrench -> ODS -> waypoints -> VFDM -> servo.
 *
 * Tick k (k >= 1) advances from t_{k-1} to t_k = k dt_sim:
 *   1. external wrenches (contact, pulses) at the executed poses of t_{k-1}
 *   2. sensor measurement, low-pass and deadband
 *   3. sensor -> R with torque scaling
 *   4. ODS propagation by dt_sim
 *   5. waypoint sampling (zero-order hold)
 *   6. one VFDM cycle per robot
 *   7. servo step
 *   8. safety check
 *   9. record
 * Record 0 is the initial state.
 */

#pragma once

#include "orbemu/config.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace orbemu {

struct SatRecord {
  Pose desired;                  ///< ODS pose in R
  Pose executed;                 ///< plant TCP mapped back to R
  Vec3 desired_velocity = Vec3::Zero();
  Vec3 executed_velocity = Vec3::Zero();  ///< backward difference of executed position
  Wrench wrench = Wrench::zero(Frame::R);  ///< what the ODS received this tick (torque scaled)
  VecX q;
  VecX q_cmd;
  bool safety = false;
};

struct LogRecord {
  std::uint64_t tick = 0;
  double t = 0.0;
  std::vector<SatRecord> sats;
  /// r1 + r2 - distance at the executed poses; NaN with a single satellite.
  double contact_depth = std::numeric_limits<double>::quiet_NaN();
};

struct ImpulseCommand {
  std::string sat;
  Vec3 force = Vec3::Zero();   ///< N, R axes
  Vec3 torque = Vec3::Zero();  ///< N m, R axes
  double duration = 0.0;       ///< s
};

enum class ControlAction { Pause, Resume, Reset };

struct ControlCommand {
  ControlAction action = ControlAction::Pause;
};

struct SetParamCommand {
  std::string path;
  double value = 0.0;
};

using Command = std::variant<ImpulseCommand, ControlCommand, SetParamCommand>;

/// Runtime-tunable parameter paths.
const std::vector<std::string>& settable_params();

enum class RunStatus { Running, Paused, SafetyStop };

std::string to_string(RunStatus s);

class Simulation {
 public:
  /// Validates the config and places each arm on its satellite's initial pose.
  explicit Simulation(ScenarioConfig config);

  const ScenarioConfig& config() const { return config_; }
  std::uint64_t tick() const { return tick_; }
  double time() const { return static_cast<double>(tick_) * config_.dt_sim; }
  std::uint64_t total_ticks() const;
  bool done() const { return tick_ >= total_ticks(); }
  bool paused() const { return paused_; }
  bool any_safety_stop() const;
  RunStatus status() const;

  const LogRecord& last() const { return last_; }

  /// Advance one tick and return its record.
  const LogRecord& step();

  /// Apply a command at the current tick boundary. Throws ContractViolation on bad input.
  void apply(const Command& cmd);

  /// Back to the state right after construction (parameter changes are discarded).
  void reset();

  /// Impulses applied so far, as scripted pulses that reproduce them.
  const std::vector<ForcePulse>& applied_impulses() const { return applied_; }

 private:
  struct ActivePulse {
    std::size_t sat;
    std::uint64_t first;  ///< first step interval index
    std::uint64_t count;
    Wrench wrench;
  };
  struct SatRuntime {
    SatelliteState desired;
    Pose target;
    SerialChain virtual_chain;
    VecX q;
    VecX q_cmd;
    std::optional<CartesianError> prev_error;
    SensorNoise noise{0};
    Wrench filtered = Wrench::zero(Frame::Sensor);
    bool stopped = false;
  };

  void initialise();
  void schedule(std::size_t sat, double t_start, double duration, const Vec3& force, const Vec3& torque);
  LogRecord snapshot(const std::vector<Vec3>& prev_executed, const std::vector<Wrench>& wrenches) const;
  std::size_t sat_index(const std::string& name) const;

  ScenarioConfig loaded_;
  ScenarioConfig config_;
  std::vector<SatRuntime> sats_;
  std::vector<ActivePulse> pulses_;
  std::vector<ForcePulse> applied_;
  std::uint64_t tick_ = 0;
  std::uint64_t last_sample_ = 0;
  bool paused_ = false;
  LogRecord last_;
};

/// Command source polled at tick boundaries; returns nothing when empty.
using CommandSource = std::function<std::optional<Command>()>;
/// Receives every `decimation`-th record (and status changes) with the current status.
using TelemetrySink = std::function<void(const LogRecord&, RunStatus)>;

struct RunOptions {
  CommandSource commands;
  TelemetrySink telemetry;
  std::uint64_t decimation = 0;  ///< 0 = ceil(1 / (60 dt_sim))
  bool realtime = false;         ///< pace ticks against the wall clock
  /// Stop request checked every tick (e.g. from a signal handler).
  std::function<bool()> should_stop;
  /// Keep serving after the scenario duration elapses (live sessions).
  bool hold_at_end = false;
};

struct RunSummary {
  std::vector<LogRecord> records;
  std::vector<ForcePulse> applied_impulses;
  bool safety_stop = false;
  double wall_seconds = 0.0;
};

/// Run until the scenario duration. Numerical failures are rethrown as NumericalError naming the tick.
RunSummary run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// Telemetry decimation so that at most 60 records per simulated second are emitted.
std::uint64_t telemetry_decimation(double dt_sim);

}  // namespace orbemu
