#include "orbemu/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace orbemu {

std::vector<ContactEpisode> contact_episodes(const std::vector<LogRecord>& log) {
  std::vector<ContactEpisode> out;
  bool in = false;
  for (std::size_t k = 0; k < log.size(); ++k) {
    const bool touching = log[k].contact_depth >= 0.0;
    if (touching && !in) out.push_back({k, k});
    if (touching) out.back().last = k;
    in = touching;
  }
  return out;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw ContractViolation("pearson: need two equal series of >= 2");
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0 || sbb == 0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

Metrics compute_metrics(const std::vector<LogRecord>& log, double omega) {
  if (log.empty()) throw ContractViolation("compute_metrics: empty log");
  Metrics m;
  m.ticks = log.size();
  const std::size_t n = log.front().sats.size();
  m.sats.resize(n);
  std::vector<double> speeds, errors;

  for (std::size_t i = 0; i < n; ++i) {
    SatMetrics& sm = m.sats[i];
    double span_lo = 0, span_hi = 0;
    bool in_span = false;
    for (const auto& r : log) {
      const SatRecord& s = r.sats.at(i);
      if (s.safety) break;
      const double pe = (s.executed.position - s.desired.position).norm();
      const double ve = (s.executed_velocity - s.desired_velocity).norm();
      sm.max_position_error = std::max(sm.max_position_error, pe);
      sm.mean_position_error += pe;
      sm.max_velocity_error = std::max(sm.max_velocity_error, ve);
      sm.mean_velocity_error += ve;
      sm.peak_force = std::max(sm.peak_force, s.wrench.force.norm());
      sm.peak_torque = std::max(sm.peak_torque, s.wrench.torque.norm());
      ++sm.ticks_evaluated;
      speeds.push_back(s.desired_velocity.norm());
      errors.push_back(pe);

      // a tick with a non-zero wrench ends the span; the state after it starts a new one
      const double integral = s.desired_velocity.y() + 2.0 * omega * s.desired.position.x();
      const bool free = s.wrench.force.isZero(0.0) && s.wrench.torque.isZero(0.0);
      if (!free || !in_span) {
        span_lo = span_hi = integral;
        in_span = true;
      } else {
        span_lo = std::min(span_lo, integral);
        span_hi = std::max(span_hi, integral);
        sm.cw_integral_drift = std::max(sm.cw_integral_drift, span_hi - span_lo);
      }
    }
    if (sm.ticks_evaluated) {
      sm.mean_position_error /= static_cast<double>(sm.ticks_evaluated);
      sm.mean_velocity_error /= static_cast<double>(sm.ticks_evaluated);
    }
  }
  if (speeds.size() >= 2) m.speed_error_correlation = pearson(speeds, errors);

  if (n == 2) {
    const auto eps = contact_episodes(log);
    m.contact_episodes = eps.size();
    double worst = 0;
    // the wrench logged at tick k was computed from the poses of tick k - 1
    for (std::size_t k = 1; k < log.size(); ++k) {
      if (!(log[k - 1].contact_depth >= 0.0)) continue;
      ++m.contact_ticks;
      worst = std::max(worst, (log[k].sats[0].wrench.force + log[k].sats[1].wrench.force).norm());
    }
    if (m.contact_ticks) m.force_symmetry = worst;
  }
  return m;
}

void print_metrics(const Metrics& m, std::ostream& out) {
  out << "ticks: " << m.ticks << "\n";
  for (std::size_t i = 0; i < m.sats.size(); ++i) {
    const auto& s = m.sats[i];
    out << "s" << i + 1 << ": position error max " << s.max_position_error << " m, mean " << s.mean_position_error
        << " m\n"
        << "s" << i + 1 << ": velocity error max " << s.max_velocity_error << " m/s, mean " << s.mean_velocity_error
        << " m/s\n"
        << "s" << i + 1 << ": peak force " << s.peak_force << " N, peak torque " << s.peak_torque << " N m\n"
        << "s" << i + 1 << ": CW integral drift " << s.cw_integral_drift << " m/s over " << s.ticks_evaluated
        << " ticks\n";
  }
  if (m.sats.size() == 2) {
    out << "contact episodes: " << m.contact_episodes << " (" << m.contact_ticks << " ticks)\n";
    if (m.force_symmetry) out << "force symmetry residual: " << *m.force_symmetry << " N\n";
  }
  if (m.speed_error_correlation) out << "speed/error correlation: " << *m.speed_error_correlation << "\n";
}

}  // namespace orbemu
