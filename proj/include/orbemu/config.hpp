/**
 * @file config.hpp
 * @brief Scenario description, JSON loading with exhaustive validation, and saving.
 */

#pragma once

#include "orbemu/contact.hpp"
#include "orbemu/frames.hpp"
#include "orbemu/kinematics.hpp"
#include "orbemu/ods.hpp"
#include "orbemu/plant.hpp"
#include "orbemu/vfdm.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbemu {

enum class ScenarioKind { FreeFloat, Collision };

std::string to_string(ScenarioKind k);

/// External wrench held on one satellite's mockup for a whole number of ticks.
/// Force and torque are physical values in R axes; they reach the ODS through the sensor.
struct ForcePulse {
  std::string sat;
  double t_start = 0.0;   ///< s
  double duration = 0.0;  ///< s
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
};

struct SatelliteSetup {
  SatelliteBody body;
  SatelliteState initial;
  std::string chain_name;  ///< bundled chain name, empty when `chain` was given inline
  SerialChain chain;
  VecX q_seed;             ///< IK seed used to place the arm on the initial pose
  FrameMapping mapping;
  ServoParams servo;
  SensorParams sensor;
  std::optional<std::uint64_t> sensor_seed;  ///< explicit; otherwise derived from the scenario seed
};

struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::FreeFloat;
  double duration = 10.0;       ///< s
  double dt_sim = 1e-3;         ///< s
  double waypoint_rate = 100.0; ///< Hz
  std::uint64_t seed = 1;
  OrbitParams orbit;
  std::vector<SatelliteSetup> satellites;
  VfdmParams vfdm;
  ContactParams contact;
  std::vector<ForcePulse> force_script;

  /// Every broken invariant, one message each. Empty when valid.
  std::vector<std::string> issues() const;
};

/// Load/validation failure; `issues()` lists every problem found.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// Parse a scenario document; `origin` names the source in diagnostics.
ScenarioConfig parse_config(const std::string& text, const std::string& origin = "<string>");
ScenarioConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const ScenarioConfig& cfg);
void save_config(const ScenarioConfig& cfg, const std::filesystem::path& path);

/// Chain document: { "links": [...], "tcp_offset": {...} }
SerialChain chain_from_json(const nlohmann::json& j);
nlohmann::json chain_to_json(const SerialChain& chain);

/// Bundled chains by name ("ur10e_nominal").
SerialChain bundled_chain(const std::string& name);

/// Default seed configuration for the bundled arm with the default mapping.
VecX default_q_seed();

/// Default R placement in the robot base frame.
Pose default_lab_from_R();

/// Per-sensor seed derived from the scenario seed and the satellite index.
std::uint64_t derive_sensor_seed(std::uint64_t scenario_seed, std::size_t index);

}  // namespace orbemu
