/**
 * @file frames.hpp
 * @brief Mapping between satellite states in R and robot TCP poses in the lab (robot base)
 *        frame, and re-expression of sensed wrenches into R.
 */

#pragma once

#include "orbemu/ods.hpp"
#include "orbemu/types.hpp"

namespace orbemu {

struct FrameMapping {
  Pose lab_from_R;               ///< R frame placed in the robot base frame
  double position_scale = 1.0;   ///< orbit meters per lab meter
  double torque_scale = 2000.0;  ///< divisor on sensed torques going into the ODS
  Pose tcp_from_sensor;          ///< sensor frame in the TCP frame; identity = COM-as-TCP

  void validate() const;
};

Pose sat_to_tcp(const SatelliteState& state, const FrameMapping& mapping);

/// (linear; angular) lab-frame TCP velocity of a satellite moving with `state`.
Vec6 sat_twist_to_lab(const SatelliteState& state, const FrameMapping& mapping);

/// Inverse of sat_to_tcp / sat_twist_to_lab. `twist` is (linear; angular) in the lab frame.
SatelliteState tcp_to_sat(const Pose& pose, const Vec6& twist, const FrameMapping& mapping);

/// Sensor reading -> R, with torque divided by torque_scale. Input must be tagged SENSOR.
Wrench wrench_sensor_to_R(const Wrench& w, const Pose& tcp_pose, const FrameMapping& mapping);

/// Physical wrench given in R axes at the mockup -> what the sensor sees (no scaling).
Wrench wrench_R_to_sensor(const Wrench& w, const Pose& tcp_pose, const FrameMapping& mapping);

}  // namespace orbemu
