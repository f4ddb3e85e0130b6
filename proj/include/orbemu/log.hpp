/**
 * @file log.hpp
 * @brief Per-tick CSV log.
 *
 * Columns: tick, t, then for each satellite i (1-based)
 *   si_des_p{x,y,z}, si_des_q{x,y,z,w}, si_act_p{x,y,z}, si_act_q{x,y,z,w},
 *   si_des_v{x,y,z}, si_act_v{x,y,z}, si_f{x,y,z}, si_t{x,y,z}, si_q1..si_qN, si_safety
 * and finally contact_depth. Numbers use the shortest representation that parses back
 * to the same double.
 */

#pragma once

#include "orbemu/simulation.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace orbemu {

/// Header names for `sats` satellites with `dof` joints each.
std::vector<std::string> log_columns(std::size_t sats, std::size_t dof);

void write_log(const std::vector<LogRecord>& records, std::ostream& out, std::size_t sats, std::size_t dof);
/// Layout is taken from the first record; an empty log writes a one-satellite, 6-joint header.
void write_log(const std::vector<LogRecord>& records, const std::filesystem::path& path);

/// Parses a log written by write_log. q_cmd is not stored and comes back empty.
std::vector<LogRecord> read_log(std::istream& in);
std::vector<LogRecord> read_log(const std::filesystem::path& path);

/// Shortest round-trip text for a double.
std::string format_double(double v);

}  // namespace orbemu
