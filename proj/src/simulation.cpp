#include "orbemu/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

namespace orbemu {

namespace {

// Newton iterations on the real chain; the arm is placed exactly before the run starts.
VecX place_arm(const SerialChain& chain, const VecX& seed, const Pose& target, const std::string& who) {
  VecX q = seed;
  for (int it = 0; it < 200; ++it) {
    const CartesianError e = pose_error(target, forward_kinematics(chain, q));
    if (e.translational.norm() < 1e-12 && e.rotational.norm() < 1e-12) return q;
    const MatX j = geometric_jacobian(chain, q);
    const MatX jjt = j * j.transpose() + 1e-10 * MatX::Identity(6, 6);
    VecX dq = j.transpose() * jjt.ldlt().solve(e.stacked());
    const double n = dq.norm();
    if (n > 0.5) dq *= 0.5 / n;
    q += dq;
  }
  const CartesianError e = pose_error(target, forward_kinematics(chain, q));
  if (e.translational.norm() < 1e-9 && e.rotational.norm() < 1e-9) return q;
  std::ostringstream os;
  os << who << ": initial pose is not reachable from q_seed (residual " << e.translational.norm() << " m, "
     << e.rotational.norm() << " rad)";
  throw ConfigError({os.str()});
}

}  // namespace

const std::vector<std::string>& settable_params() {
  static const std::vector<std::string> paths{"vfdm.kp_trans", "vfdm.kd_trans", "vfdm.kp_rot", "vfdm.kd_rot",
                                              "vfdm.dt_ctrl"};
  return paths;
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Running: return "running";
    case RunStatus::Paused: return "paused";
    case RunStatus::SafetyStop: return "safety_stop";
  }
  return "running";
}

std::uint64_t telemetry_decimation(double dt_sim) {
  if (!(dt_sim > 0)) throw ContractViolation("telemetry_decimation: dt_sim must be > 0");
  return static_cast<std::uint64_t>(std::max(1.0, std::ceil(1.0 / (60.0 * dt_sim) - 1e-9)));
}

Simulation::Simulation(ScenarioConfig config) : loaded_(std::move(config)) {
  if (auto issues = loaded_.issues(); !issues.empty()) throw ConfigError(std::move(issues));
  initialise();
}

void Simulation::initialise() {
  config_ = loaded_;
  sats_.clear();
  pulses_.clear();
  applied_.clear();
  tick_ = 0;
  last_sample_ = 0;
  paused_ = false;

  for (std::size_t i = 0; i < config_.satellites.size(); ++i) {
    auto& setup = config_.satellites[i];
    setup.sensor.seed = setup.sensor_seed ? *setup.sensor_seed : derive_sensor_seed(config_.seed, i);
    SatRuntime rt;
    rt.desired = setup.initial;
    rt.target = sat_to_tcp(rt.desired, setup.mapping);
    rt.virtual_chain = make_virtual_chain(setup.chain, config_.vfdm);
    rt.q = place_arm(setup.chain, setup.q_seed, rt.target, "satellite '" + setup.body.name + "'");
    rt.q_cmd = rt.q;
    rt.noise = SensorNoise(setup.sensor.seed);
    sats_.push_back(std::move(rt));
  }
  for (const auto& p : config_.force_script) schedule(sat_index(p.sat), p.t_start, p.duration, p.force, p.torque);

  std::vector<Vec3> prev;
  for (std::size_t i = 0; i < sats_.size(); ++i) {
    prev.push_back(tcp_to_sat(forward_kinematics(config_.satellites[i].chain, sats_[i].q), Vec6::Zero(),
                              config_.satellites[i].mapping)
                       .rho);
  }
  last_ = snapshot(prev, std::vector<Wrench>(sats_.size(), Wrench::zero(Frame::R)));
}

void Simulation::reset() { initialise(); }

std::uint64_t Simulation::total_ticks() const {
  return static_cast<std::uint64_t>(std::llround(config_.duration / config_.dt_sim));
}

bool Simulation::any_safety_stop() const {
  return std::any_of(sats_.begin(), sats_.end(), [](const SatRuntime& s) { return s.stopped; });
}

RunStatus Simulation::status() const {
  if (any_safety_stop()) return RunStatus::SafetyStop;
  return paused_ ? RunStatus::Paused : RunStatus::Running;
}

std::size_t Simulation::sat_index(const std::string& name) const {
  for (std::size_t i = 0; i < config_.satellites.size(); ++i) {
    if (config_.satellites[i].body.name == name) return i;
  }
  throw ContractViolation("unknown satellite '" + name + "'");
}

void Simulation::schedule(std::size_t sat, double t_start, double duration, const Vec3& force, const Vec3& torque) {
  const double dt = config_.dt_sim;
  const auto first = static_cast<std::uint64_t>(std::llround(t_start / dt));
  const auto count = static_cast<std::uint64_t>(std::llround(duration / dt));
  if (count == 0) return;
  pulses_.push_back({sat, first, count, Wrench{force, torque, Frame::R}});
}

void Simulation::apply(const Command& cmd) {
  if (const auto* imp = std::get_if<ImpulseCommand>(&cmd)) {
    const std::size_t idx = sat_index(imp->sat);
    if (!(imp->duration > 0)) throw ContractViolation("impulse duration must be > 0");
    if (!imp->force.allFinite() || !imp->torque.allFinite()) throw ContractViolation("impulse must be finite");
    const double t_start = time();
    schedule(idx, t_start, imp->duration, imp->force, imp->torque);
    applied_.push_back({imp->sat, t_start, imp->duration, imp->force, imp->torque});
  } else if (const auto* ctl = std::get_if<ControlCommand>(&cmd)) {
    switch (ctl->action) {
      case ControlAction::Pause: paused_ = true; break;
      case ControlAction::Resume: paused_ = false; break;
      case ControlAction::Reset: reset(); break;
    }
  } else if (const auto* sp = std::get_if<SetParamCommand>(&cmd)) {
    VfdmParams p = config_.vfdm;
    if (sp->path == "vfdm.kp_trans") p.kp_trans = sp->value;
    else if (sp->path == "vfdm.kd_trans") p.kd_trans = sp->value;
    else if (sp->path == "vfdm.kp_rot") p.kp_rot = sp->value;
    else if (sp->path == "vfdm.kd_rot") p.kd_rot = sp->value;
    else if (sp->path == "vfdm.dt_ctrl") p.dt_ctrl = sp->value;
    else throw ContractViolation("parameter '" + sp->path + "' is not settable");
    p.validate();
    config_.vfdm = p;
  }
}

LogRecord Simulation::snapshot(const std::vector<Vec3>& prev_executed, const std::vector<Wrench>& wrenches) const {
  LogRecord r;
  r.tick = tick_;
  r.t = static_cast<double>(tick_) * config_.dt_sim;
  for (std::size_t i = 0; i < sats_.size(); ++i) {
    const auto& setup = config_.satellites[i];
    const auto& s = sats_[i];
    SatRecord sr;
    sr.desired = s.desired.pose();
    sr.desired_velocity = s.desired.rho_dot;
    const SatelliteState exec = tcp_to_sat(forward_kinematics(setup.chain, s.q), Vec6::Zero(), setup.mapping);
    sr.executed = exec.pose();
    sr.executed_velocity = tick_ == 0 ? Vec3::Zero() : Vec3((exec.rho - prev_executed[i]) / config_.dt_sim);
    sr.wrench = wrenches[i];
    sr.q = s.q;
    sr.q_cmd = s.q_cmd;
    sr.safety = s.stopped;
    r.sats.push_back(std::move(sr));
  }
  if (sats_.size() == 2) {
    const double dist = (r.sats[1].executed.position - r.sats[0].executed.position).norm();
    r.contact_depth = config_.satellites[0].body.collision_radius + config_.satellites[1].body.collision_radius - dist;
  }
  return r;
}

const LogRecord& Simulation::step() {
  const std::uint64_t interval = tick_;
  const std::size_t n = sats_.size();
  const double dt = config_.dt_sim;
  try {
    // 1. physical wrenches at the executed poses of the previous record
    std::vector<Wrench> external(n, Wrench::zero(Frame::R));
    for (const auto& p : pulses_) {
      if (interval >= p.first && interval < p.first + p.count) {
        external[p.sat].force += p.wrench.force;
        external[p.sat].torque += p.wrench.torque;
      }
    }
    if (n == 2) {
      const auto& a = last_.sats[0];
      const auto& b = last_.sats[1];
      const auto hit = detect(a.executed, config_.satellites[0].body.collision_radius, b.executed,
                              config_.satellites[1].body.collision_radius);
      if (hit) {
        const auto [on1, on2] =
            contact_wrench(hit->depth, hit->normal, b.executed_velocity - a.executed_velocity, config_.contact);
        external[0].force += on1.force;
        external[1].force += on2.force;
      }
    }

    std::vector<Wrench> sensed(n);
    std::vector<Vec3> prev_executed(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& setup = config_.satellites[i];
      auto& s = sats_[i];
      const Pose tcp = forward_kinematics(setup.chain, s.q);
      prev_executed[i] = last_.sats[i].executed.position;
      // 2-3. measure and bring into R
      const Wrench at_sensor = wrench_R_to_sensor(external[i], tcp, setup.mapping);
      s.filtered = low_pass(s.filtered, measure_wrench(at_sensor, setup.sensor, s.noise),
                            setup.sensor.filter_time_constant, dt);
      const Wrench reading = apply_deadband(s.filtered, setup.sensor);
      sensed[i] = wrench_sensor_to_R(reading, tcp, setup.mapping);
      // 4. ODS
      s.desired = propagate(s.desired, sensed[i], setup.body, config_.orbit, dt);
    }

    ++tick_;
    // 5. waypoints at waypoint_rate, held between samples
    const auto sample = static_cast<std::uint64_t>(std::floor(time() * config_.waypoint_rate + 1e-9));
    const bool fresh = sample > last_sample_;
    if (fresh) last_sample_ = sample;

    for (std::size_t i = 0; i < n; ++i) {
      const auto& setup = config_.satellites[i];
      auto& s = sats_[i];
      if (fresh) s.target = sat_to_tcp(s.desired, setup.mapping);
      // 6. one virtual-dynamics cycle
      VfdmStep vs = vfdm_cycle_conditioned(s.virtual_chain, s.q_cmd, s.target, config_.vfdm, s.prev_error);
      s.prev_error = vs.error;
      s.q_cmd = std::move(vs.q_next);
      // 7-8. servo, then safety; a stopped arm holds its joints
      if (!s.stopped) {
        s.q = servo_step(s.q, s.q_cmd, setup.servo, dt);
        if (check_safety(s.q, setup.servo).stopped) s.stopped = true;
      }
      if (!s.q.allFinite() || !s.q_cmd.allFinite()) throw NumericalError("non-finite joint state");
    }
    // 9.
    last_ = snapshot(prev_executed, sensed);
  } catch (const NumericalError& e) {
    throw NumericalError("tick " + std::to_string(interval + 1) + ": " + e.what());
  }
  return last_;
}

RunSummary run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  using clock = std::chrono::steady_clock;
  const auto wall_start = clock::now();
  Simulation sim(config);
  RunSummary out;
  out.records.reserve(static_cast<std::size_t>(sim.total_ticks() + 1));
  out.records.push_back(sim.last());

  const std::uint64_t decimation =
      options.decimation ? options.decimation : telemetry_decimation(config.dt_sim);
  auto pace_origin = clock::now();
  std::uint64_t pace_tick = 0;
  RunStatus reported = sim.status();
  if (options.telemetry) options.telemetry(sim.last(), reported);

  for (;;) {
    if (options.should_stop && options.should_stop()) break;
    // commands apply between ticks
    bool changed = false;
    if (options.commands) {
      while (auto cmd = options.commands()) {
        const bool is_reset = std::holds_alternative<ControlCommand>(*cmd) &&
                              std::get<ControlCommand>(*cmd).action == ControlAction::Reset;
        try {
          sim.apply(*cmd);
        } catch (const ContractViolation&) {
          continue;  // validated upstream; stale names after a reset land here
        }
        changed = true;
        if (is_reset) {
          out.records.clear();
          out.records.push_back(sim.last());
        }
      }
    }
    if (changed || sim.status() != reported) {
      reported = sim.status();
      if (options.telemetry) options.telemetry(sim.last(), reported);
      pace_origin = clock::now();
      pace_tick = sim.tick();
    }
    if (sim.paused() || sim.done()) {
      if (sim.done() && !options.hold_at_end) break;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
      pace_origin = clock::now();
      pace_tick = sim.tick();
      continue;
    }

    const LogRecord& rec = sim.step();
    out.records.push_back(rec);
    if (options.telemetry && rec.tick % decimation == 0) options.telemetry(rec, sim.status());

    if (options.realtime) {
      const auto due = pace_origin + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(
                                         static_cast<double>(sim.tick() - pace_tick) * config.dt_sim));
      std::this_thread::sleep_until(due);
    }
  }
  out.applied_impulses = sim.applied_impulses();
  out.safety_stop = sim.any_safety_stop();
  out.wall_seconds = std::chrono::duration<double>(clock::now() - wall_start).count();
  return out;
}

}  // namespace orbemu
