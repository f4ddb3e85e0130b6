/**
 * @file metrics.hpp
 * @brief Tracking and consistency figures computed from a run log.
 */

#pragma once

#include "orbemu/ods.hpp"
#include "orbemu/simulation.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace orbemu {

struct SatMetrics {
  double max_position_error = 0.0;   ///< isochronous |executed - desired|, m
  double mean_position_error = 0.0;
  double max_velocity_error = 0.0;   ///< m/s
  double mean_velocity_error = 0.0;
  double peak_force = 0.0;           ///< N, as fed to the ODS
  double peak_torque = 0.0;          ///< N m, as fed to the ODS (scaled)
  /// Largest spread of y_dot + 2 Omega x within one force-free span of the desired state.
  double cw_integral_drift = 0.0;
  std::size_t ticks_evaluated = 0;   ///< ticks before any safety stop of this arm
};

struct Metrics {
  std::size_t ticks = 0;
  std::vector<SatMetrics> sats;
  /// Two-satellite logs only.
  std::size_t contact_episodes = 0;
  std::size_t contact_ticks = 0;
  std::optional<double> force_symmetry;  ///< max |F1 + F2| over ticks whose wrench came from contact
  /// Pearson correlation between desired speed and position error, pooled over satellites.
  std::optional<double> speed_error_correlation;
};

/// Throws ContractViolation on an empty log. `omega` is the orbit rate used for the CW integral.
Metrics compute_metrics(const std::vector<LogRecord>& log, double omega = OrbitParams{}.omega());

void print_metrics(const Metrics& m, std::ostream& out);

/// Maximal runs of ticks with contact_depth >= 0.
struct ContactEpisode {
  std::size_t first = 0;
  std::size_t last = 0;  ///< inclusive
};
std::vector<ContactEpisode> contact_episodes(const std::vector<LogRecord>& log);

double pearson(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace orbemu
