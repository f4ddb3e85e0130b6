#include "orbemu/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace orbemu {

using nlohmann::json;

std::string to_string(ScenarioKind k) { return k == ScenarioKind::FreeFloat ? "FREE_FLOAT" : "COLLISION"; }

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::ostringstream os;
  os << issues.size() << " configuration issue" << (issues.size() == 1 ? "" : "s") << ":";
  for (const auto& i : issues) os << "\n  - " << i;
  return os.str();
}

/// Reads one JSON object, recording type errors and unknown keys into a shared issue list.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path, std::vector<std::string>& issues)
      : j_(j), path_(std::move(path)), issues_(issues) {
    if (!j_.is_object()) {
      fail("", "expected an object");
      valid_ = false;
    }
  }

  ObjectReader(const ObjectReader&) = delete;
  ObjectReader& operator=(const ObjectReader&) = delete;

  ~ObjectReader() {
    if (!valid_) return;
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) issues_.push_back(at(it.key()) + ": unknown key");
    }
  }

  bool valid() const { return valid_; }
  const std::string& path() const { return path_; }
  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    if (!valid_) return nullptr;
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void fail(const std::string& key, const std::string& msg) {
    issues_.push_back((key.empty() ? (path_.empty() ? "<root>" : path_) : at(key)) + ": " + msg);
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (v->is_number()) out = v->get<double>();
      else fail(key, "expected a number");
    }
  }

  void integer(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (v->is_number_integer()) out = v->get<int>();
      else fail(key, "expected an integer");
    }
  }

  void unsigned64(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (v->is_number_unsigned() || (v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
        out = v->get<std::uint64_t>();
      } else {
        fail(key, "expected a non-negative integer");
      }
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (v->is_boolean()) out = v->get<bool>();
      else fail(key, "expected true or false");
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (v->is_string()) out = v->get<std::string>();
      else fail(key, "expected a string");
    }
  }

  bool numbers(const json& v, const std::string& key, std::size_t n, std::vector<double>& out) {
    if (!v.is_array() || (n != 0 && v.size() != n)) {
      fail(key, n ? "expected an array of " + std::to_string(n) + " numbers" : "expected an array of numbers");
      return false;
    }
    out.clear();
    for (const auto& e : v) {
      if (!e.is_number()) {
        fail(key, "expected numeric entries");
        return false;
      }
      out.push_back(e.get<double>());
    }
    return true;
  }

  void vec3(const std::string& key, Vec3& out) {
    if (const json* v = find(key)) {
      std::vector<double> d;
      if (numbers(*v, key, 3, d)) out = Vec3(d[0], d[1], d[2]);
    }
  }

  void vecx(const std::string& key, VecX& out) {
    if (const json* v = find(key)) {
      std::vector<double> d;
      if (numbers(*v, key, 0, d)) out = Eigen::Map<VecX>(d.data(), static_cast<Eigen::Index>(d.size()));
    }
  }

  void quat(const std::string& key, Quat& out) {
    if (const json* v = find(key)) {
      std::vector<double> d;
      if (!numbers(*v, key, 4, d)) return;
      Quat q(d[3], d[0], d[1], d[2]);
      if (std::abs(q.norm() - 1.0) > 1e-6) {
        fail(key, "quaternion [x, y, z, w] must have unit norm");
        return;
      }
      out = q.normalized();
    }
  }

  void mat3(const std::string& key, Mat3& out) {
    if (const json* v = find(key)) {
      if (!v->is_array() || v->size() != 3) {
        fail(key, "expected a 3x3 nested array");
        return;
      }
      Mat3 m;
      for (int r = 0; r < 3; ++r) {
        std::vector<double> row;
        if (!numbers((*v)[static_cast<std::size_t>(r)], key, 3, row)) return;
        for (int c = 0; c < 3; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
      }
      out = m;
    }
  }

  void pose(const std::string& key, Pose& out) {
    if (const json* v = find(key)) {
      ObjectReader r(*v, at(key), issues_);
      if (!r.valid()) return;
      r.vec3("position", out.position);
      r.quat("orientation", out.orientation);
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string>& issues_;
  std::set<std::string> seen_;
  bool valid_ = true;
};

json vec_json(const Eigen::Ref<const VecX>& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json quat_json(const Quat& q) { return json::array({q.x(), q.y(), q.z(), q.w()}); }

json mat3_json(const Mat3& m) {
  json a = json::array();
  for (int r = 0; r < 3; ++r) a.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
  return a;
}

json pose_json(const Pose& p) { return {{"position", vec_json(p.position)}, {"orientation", quat_json(p.orientation)}}; }

void read_chain(ObjectReader& r, SerialChain& chain, std::vector<std::string>& issues) {
  chain = SerialChain{};
  if (const json* links = r.find("links")) {
    if (!links->is_array()) {
      r.fail("links", "expected an array");
    } else {
      for (std::size_t i = 0; i < links->size(); ++i) {
        ObjectReader lr((*links)[i], r.at("links[" + std::to_string(i) + "]"), issues);
        if (!lr.valid()) continue;
        ChainLink l;
        lr.pose("parent_transform", l.parent_transform);
        lr.vec3("joint_axis", l.joint_axis);
        lr.number("mass", l.mass);
        lr.vec3("com", l.com);
        lr.mat3("inertia", l.inertia);
        if (std::abs(l.joint_axis.norm() - 1.0) > 1e-12 && l.joint_axis.norm() > 0 &&
            std::abs(l.joint_axis.norm() - 1.0) < 1e-6) {
          l.joint_axis.normalize();
        }
        chain.links.push_back(l);
      }
    }
  } else {
    r.fail("links", "missing");
  }
  r.pose("tcp_offset", chain.tcp_offset);
}

void read_vfdm(ObjectReader& r, VfdmParams& p) {
  r.number("kp_trans", p.kp_trans);
  r.number("kd_trans", p.kd_trans);
  r.number("kp_rot", p.kp_rot);
  r.number("kd_rot", p.kd_rot);
  r.number("m_e", p.m_e);
  r.number("m_l", p.m_l);
  r.mat3("I_e", p.I_e);
  r.mat3("I_l", p.I_l);
  r.number("dt_ctrl", p.dt_ctrl);
  r.integer("max_iters", p.max_iters);
  r.number("tol_pos", p.tol_pos);
  r.number("tol_rot", p.tol_rot);
  r.number("regularization", p.regularization);
}

json vfdm_json(const VfdmParams& p) {
  return {{"kp_trans", p.kp_trans}, {"kd_trans", p.kd_trans}, {"kp_rot", p.kp_rot}, {"kd_rot", p.kd_rot},
          {"m_e", p.m_e},           {"m_l", p.m_l},           {"I_e", mat3_json(p.I_e)},
          {"I_l", mat3_json(p.I_l)}, {"dt_ctrl", p.dt_ctrl},   {"max_iters", p.max_iters},
          {"tol_pos", p.tol_pos},   {"tol_rot", p.tol_rot},   {"regularization", p.regularization}};
}

SatelliteSetup default_satellite(const std::string& name) {
  SatelliteSetup s;
  s.body = SatelliteBody::cubesat_4u(name);
  s.chain_name = "ur10e_nominal";
  s.chain = bundled_ur10e_chain();
  s.q_seed = default_q_seed();
  s.mapping.lab_from_R = default_lab_from_R();
  s.servo = ServoParams::defaults(s.chain.dof());
  return s;
}

void read_satellite(ObjectReader& r, SatelliteSetup& s, std::vector<std::string>& issues) {
  r.string("name", s.body.name);
  if (const json* b = r.find("body")) {
    ObjectReader br(*b, r.at("body"), issues);
    if (br.valid()) {
      br.number("mass", s.body.mass);
      br.vec3("inertia_principal", s.body.inertia_principal);
      br.number("collision_radius", s.body.collision_radius);
    }
  }
  if (const json* st = r.find("initial_state")) {
    ObjectReader sr(*st, r.at("initial_state"), issues);
    if (sr.valid()) {
      sr.vec3("rho", s.initial.rho);
      sr.vec3("rho_dot", s.initial.rho_dot);
      sr.quat("eps", s.initial.eps);
      sr.vec3("omega_body", s.initial.omega_body);
    }
  }
  bool chain_changed = false;
  if (const json* c = r.find("chain")) {
    chain_changed = true;
    if (c->is_string()) {
      s.chain_name = c->get<std::string>();
      try {
        s.chain = bundled_chain(s.chain_name);
      } catch (const ContractViolation& e) {
        r.fail("chain", e.what());
      }
    } else {
      s.chain_name.clear();
      ObjectReader cr(*c, r.at("chain"), issues);
      if (cr.valid()) read_chain(cr, s.chain, issues);
    }
  }
  if (chain_changed) {
    s.servo = ServoParams::defaults(s.chain.dof());
    if (s.q_seed.size() != static_cast<Eigen::Index>(s.chain.dof())) s.q_seed = VecX::Zero(static_cast<Eigen::Index>(s.chain.dof()));
  }
  r.vecx("q_seed", s.q_seed);
  if (const json* m = r.find("mapping")) {
    ObjectReader mr(*m, r.at("mapping"), issues);
    if (mr.valid()) {
      mr.pose("lab_from_R", s.mapping.lab_from_R);
      mr.number("position_scale", s.mapping.position_scale);
      mr.number("torque_scale", s.mapping.torque_scale);
      mr.pose("tcp_from_sensor", s.mapping.tcp_from_sensor);
    }
  }
  if (const json* p = r.find("plant")) {
    ObjectReader pr(*p, r.at("plant"), issues);
    if (pr.valid()) {
      if (const json* sv = pr.find("servo")) {
        ObjectReader svr(*sv, pr.at("servo"), issues);
        if (svr.valid()) {
          svr.number("time_constant", s.servo.time_constant);
          svr.number("qdot_max", s.servo.qdot_max);
          svr.vecx("q_min", s.servo.q_min);
          svr.vecx("q_max", s.servo.q_max);
        }
      }
      if (const json* se = pr.find("sensor")) {
        ObjectReader ser(*se, pr.at("sensor"), issues);
        if (ser.valid()) {
          ser.number("noise_sigma_force", s.sensor.noise_sigma_force);
          ser.number("noise_sigma_torque", s.sensor.noise_sigma_torque);
          ser.number("filter_time_constant", s.sensor.filter_time_constant);
          ser.number("deadband_force", s.sensor.deadband_force);
          ser.number("deadband_torque", s.sensor.deadband_torque);
          if (const json* b = ser.find("bias")) {
            ObjectReader bsr(*b, ser.at("bias"), issues);
            if (bsr.valid()) {
              bsr.vec3("force", s.sensor.bias.force);
              bsr.vec3("torque", s.sensor.bias.torque);
            }
          }
          if (ser.find("seed")) {
            std::uint64_t seed = 0;
            ser.unsigned64("seed", seed);
            s.sensor_seed = seed;
          }
        }
      }
    }
  }
}

json satellite_json(const SatelliteSetup& s) {
  json j;
  j["name"] = s.body.name;
  j["body"] = {{"mass", s.body.mass},
               {"inertia_principal", vec_json(s.body.inertia_principal)},
               {"collision_radius", s.body.collision_radius}};
  j["initial_state"] = {{"rho", vec_json(s.initial.rho)},
                        {"rho_dot", vec_json(s.initial.rho_dot)},
                        {"eps", quat_json(s.initial.eps)},
                        {"omega_body", vec_json(s.initial.omega_body)}};
  j["chain"] = s.chain_name.empty() ? chain_to_json(s.chain) : json(s.chain_name);
  j["q_seed"] = vec_json(s.q_seed);
  j["mapping"] = {{"lab_from_R", pose_json(s.mapping.lab_from_R)},
                  {"position_scale", s.mapping.position_scale},
                  {"torque_scale", s.mapping.torque_scale},
                  {"tcp_from_sensor", pose_json(s.mapping.tcp_from_sensor)}};
  json sensor = {{"noise_sigma_force", s.sensor.noise_sigma_force},
                 {"noise_sigma_torque", s.sensor.noise_sigma_torque},
                 {"filter_time_constant", s.sensor.filter_time_constant},
                 {"deadband_force", s.sensor.deadband_force},
                 {"deadband_torque", s.sensor.deadband_torque},
                 {"bias", {{"force", vec_json(s.sensor.bias.force)}, {"torque", vec_json(s.sensor.bias.torque)}}}};
  if (s.sensor_seed) sensor["seed"] = *s.sensor_seed;
  j["plant"] = {{"servo",
                 {{"time_constant", s.servo.time_constant},
                  {"qdot_max", s.servo.qdot_max},
                  {"q_min", vec_json(s.servo.q_min)},
                  {"q_max", vec_json(s.servo.q_max)}}},
                {"sensor", sensor}};
  return j;
}

template <class F>
void collect(std::vector<std::string>& issues, F&& check) {
  try {
    check();
  } catch (const std::exception& e) {
    issues.emplace_back(e.what());
  }
}

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

std::vector<std::string> ScenarioConfig::issues() const {
  std::vector<std::string> out;
  if (!(dt_sim > 0)) out.emplace_back("dt_sim must be > 0");
  if (!(duration >= 0)) out.emplace_back("duration must be >= 0");
  if (!(waypoint_rate > 0)) out.emplace_back("waypoint_rate must be > 0");
  if (dt_sim > 0 && waypoint_rate * dt_sim > 1.0 + 1e-12) {
    out.emplace_back("waypoint_rate * dt_sim must be <= 1 (at most one waypoint per tick)");
  }
  if (scenario == ScenarioKind::FreeFloat && satellites.size() != 1) {
    out.emplace_back("FREE_FLOAT requires exactly 1 satellite, got " + std::to_string(satellites.size()));
  }
  if (scenario == ScenarioKind::Collision && satellites.size() != 2) {
    out.emplace_back("COLLISION requires exactly 2 satellites, got " + std::to_string(satellites.size()));
  }
  collect(out, [&] { orbit.validate(); });
  collect(out, [&] { vfdm.validate(); });
  if (scenario == ScenarioKind::Collision) collect(out, [&] { contact.validate(); });

  std::set<std::string> names;
  for (std::size_t i = 0; i < satellites.size(); ++i) {
    const auto& s = satellites[i];
    const std::string where = "satellites[" + std::to_string(i) + "] ";
    if (!names.insert(s.body.name).second) out.push_back(where + "duplicate satellite name '" + s.body.name + "'");
    collect(out, [&] { s.body.validate(); });
    collect(out, [&] { s.chain.validate(); });
    collect(out, [&] { s.mapping.validate(); });
    collect(out, [&] { s.servo.validate(s.chain.dof()); });
    collect(out, [&] { s.sensor.validate(); });
    if (s.q_seed.size() != static_cast<Eigen::Index>(s.chain.dof())) {
      out.push_back(where + "q_seed must have " + std::to_string(s.chain.dof()) + " entries");
    }
    if (std::abs(s.initial.eps.norm() - 1.0) > 1e-9) out.push_back(where + "initial eps is not a unit quaternion");
  }
  for (std::size_t i = 0; i < force_script.size(); ++i) {
    const auto& p = force_script[i];
    const std::string where = "force_script[" + std::to_string(i) + "] ";
    if (!names.count(p.sat)) out.push_back(where + "names unknown satellite '" + p.sat + "'");
    if (!(p.duration > 0)) out.push_back(where + "duration must be > 0");
    if (!(p.t_start >= 0)) out.push_back(where + "t_start must be >= 0");
  }
  return out;
}

ScenarioConfig parse_config(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError({origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON parse error: " +
                       e.what()});
  }

  std::vector<std::string> issues;
  ScenarioConfig cfg;
  {
    ObjectReader r(doc, "", issues);
    if (!r.valid()) throw ConfigError(issues);

    std::string kind = "FREE_FLOAT";
    r.string("scenario", kind);
    if (kind == "FREE_FLOAT") cfg.scenario = ScenarioKind::FreeFloat;
    else if (kind == "COLLISION") cfg.scenario = ScenarioKind::Collision;
    else r.fail("scenario", "expected FREE_FLOAT or COLLISION, got '" + kind + "'");

    r.number("duration", cfg.duration);
    r.number("dt_sim", cfg.dt_sim);
    r.number("waypoint_rate", cfg.waypoint_rate);
    r.unsigned64("seed", cfg.seed);

    if (const json* o = r.find("orbit")) {
      ObjectReader orr(*o, "orbit", issues);
      if (orr.valid()) {
        orr.number("mu", cfg.orbit.mu);
        orr.number("a", cfg.orbit.a);
        orr.boolean("gravity_gradient", cfg.orbit.gravity_gradient);
      }
    }
    if (const json* v = r.find("vfdm")) {
      ObjectReader vr(*v, "vfdm", issues);
      if (vr.valid()) read_vfdm(vr, cfg.vfdm);
    }
    if (const json* c = r.find("contact")) {
      ObjectReader cr(*c, "contact", issues);
      if (cr.valid()) {
        cr.number("stiffness", cfg.contact.stiffness);
        cr.number("damping", cfg.contact.damping);
      }
    }
    if (const json* sats = r.find("satellites")) {
      if (!sats->is_array()) {
        r.fail("satellites", "expected an array");
      } else {
        for (std::size_t i = 0; i < sats->size(); ++i) {
          SatelliteSetup s = default_satellite("sat" + std::to_string(i + 1));
          ObjectReader sr((*sats)[i], "satellites[" + std::to_string(i) + "]", issues);
          if (sr.valid()) read_satellite(sr, s, issues);
          cfg.satellites.push_back(std::move(s));
        }
      }
    } else if (cfg.scenario == ScenarioKind::FreeFloat) {
      cfg.satellites.push_back(default_satellite("sat1"));
    }
    if (const json* fs = r.find("force_script")) {
      if (!fs->is_array()) {
        r.fail("force_script", "expected an array");
      } else {
        for (std::size_t i = 0; i < fs->size(); ++i) {
          ObjectReader pr((*fs)[i], "force_script[" + std::to_string(i) + "]", issues);
          if (!pr.valid()) continue;
          ForcePulse p;
          pr.string("sat", p.sat);
          pr.number("t_start", p.t_start);
          pr.number("duration", p.duration);
          pr.vec3("force", p.force);
          pr.vec3("torque", p.torque);
          cfg.force_script.push_back(p);
        }
      }
    }
  }

  // Only validate invariants when the document itself was well-formed.
  if (issues.empty()) issues = cfg.issues();
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path.string() + ": cannot open file"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

json to_json(const ScenarioConfig& cfg) {
  json j;
  j["scenario"] = to_string(cfg.scenario);
  j["duration"] = cfg.duration;
  j["dt_sim"] = cfg.dt_sim;
  j["waypoint_rate"] = cfg.waypoint_rate;
  j["seed"] = cfg.seed;
  j["orbit"] = {{"mu", cfg.orbit.mu}, {"a", cfg.orbit.a}, {"gravity_gradient", cfg.orbit.gravity_gradient}};
  j["vfdm"] = vfdm_json(cfg.vfdm);
  j["contact"] = {{"stiffness", cfg.contact.stiffness}, {"damping", cfg.contact.damping}};
  j["satellites"] = json::array();
  for (const auto& s : cfg.satellites) j["satellites"].push_back(satellite_json(s));
  j["force_script"] = json::array();
  for (const auto& p : cfg.force_script) {
    j["force_script"].push_back({{"sat", p.sat},
                                 {"t_start", p.t_start},
                                 {"duration", p.duration},
                                 {"force", vec_json(p.force)},
                                 {"torque", vec_json(p.torque)}});
  }
  return j;
}

void save_config(const ScenarioConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << to_json(cfg).dump(2) << "\n";
}

SerialChain chain_from_json(const json& j) {
  std::vector<std::string> issues;
  SerialChain chain;
  {
    ObjectReader r(j, "chain", issues);
    if (r.valid()) read_chain(r, chain, issues);
  }
  if (issues.empty()) collect(issues, [&] { chain.validate(); });
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return chain;
}

json chain_to_json(const SerialChain& chain) {
  json links = json::array();
  for (const auto& l : chain.links) {
    links.push_back({{"parent_transform", pose_json(l.parent_transform)},
                     {"joint_axis", vec_json(l.joint_axis)},
                     {"mass", l.mass},
                     {"com", vec_json(l.com)},
                     {"inertia", mat3_json(l.inertia)}});
  }
  return {{"links", links}, {"tcp_offset", pose_json(chain.tcp_offset)}};
}

SerialChain bundled_chain(const std::string& name) {
  if (name == "ur10e_nominal") return bundled_ur10e_chain();
  throw ContractViolation("unknown bundled chain '" + name + "' (available: ur10e_nominal)");
}

VecX default_q_seed() {
  VecX q(6);
  q << 2.8385, 0.6446, -2.0977, -1.6885, -1.2677, 1.5708;
  return q;
}

Pose default_lab_from_R() { return Pose::from_translation(Vec3(0.8, 0.0, 0.5)); }

std::uint64_t derive_sensor_seed(std::uint64_t scenario_seed, std::size_t index) {
  // splitmix64 finalizer over (seed, index)
  std::uint64_t z = scenario_seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace orbemu
