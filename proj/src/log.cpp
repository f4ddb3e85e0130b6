#include "orbemu/log.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace orbemu {

namespace {

constexpr std::size_t kSatFixedColumns = 3 + 4 + 3 + 4 + 3 + 3 + 3 + 3 + 1;

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw std::runtime_error("log line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> log_columns(std::size_t sats, std::size_t dof) {
  std::vector<std::string> cols{"tick", "t"};
  for (std::size_t i = 1; i <= sats; ++i) {
    const std::string p = "s" + std::to_string(i) + "_";
    for (const char* c : {"x", "y", "z"}) cols.push_back(p + "des_p" + c);
    for (const char* c : {"x", "y", "z", "w"}) cols.push_back(p + "des_q" + c);
    for (const char* c : {"x", "y", "z"}) cols.push_back(p + "act_p" + c);
    for (const char* c : {"x", "y", "z", "w"}) cols.push_back(p + "act_q" + c);
    for (const char* c : {"x", "y", "z"}) cols.push_back(p + "des_v" + c);
    for (const char* c : {"x", "y", "z"}) cols.push_back(p + "act_v" + c);
    for (const char* c : {"x", "y", "z"}) cols.push_back(p + "f" + c);
    for (const char* c : {"x", "y", "z"}) cols.push_back(p + "t" + c);
    for (std::size_t j = 1; j <= dof; ++j) cols.push_back(p + "q" + std::to_string(j));
    cols.push_back(p + "safety");
  }
  cols.emplace_back("contact_depth");
  return cols;
}

void write_log(const std::vector<LogRecord>& records, std::ostream& out, std::size_t sats, std::size_t dof) {
  const auto cols = log_columns(sats, dof);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  std::string line;
  for (const auto& r : records) {
    if (r.sats.size() != sats) throw ContractViolation("write_log: satellite count changes between records");
    line.clear();
    line += std::to_string(r.tick);
    auto put = [&line](double v) {
      line += ',';
      line += format_double(v);
    };
    put(r.t);
    for (const auto& s : r.sats) {
      if (static_cast<std::size_t>(s.q.size()) != dof) throw ContractViolation("write_log: joint count mismatch");
      for (const Pose* p : {&s.desired, &s.executed}) {
        for (int k = 0; k < 3; ++k) put(p->position[k]);
        put(p->orientation.x());
        put(p->orientation.y());
        put(p->orientation.z());
        put(p->orientation.w());
      }
      for (int k = 0; k < 3; ++k) put(s.desired_velocity[k]);
      for (int k = 0; k < 3; ++k) put(s.executed_velocity[k]);
      for (int k = 0; k < 3; ++k) put(s.wrench.force[k]);
      for (int k = 0; k < 3; ++k) put(s.wrench.torque[k]);
      for (Eigen::Index k = 0; k < s.q.size(); ++k) put(s.q[k]);
      line += s.safety ? ",1" : ",0";
    }
    put(r.contact_depth);
    line += '\n';
    out << line;
  }
  if (!out) throw std::runtime_error("write_log: output failure");
}

void write_log(const std::vector<LogRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  const std::size_t sats = records.empty() ? 1 : records.front().sats.size();
  const std::size_t dof = records.empty() || records.front().sats.empty()
                              ? 6
                              : static_cast<std::size_t>(records.front().sats.front().q.size());
  write_log(records, out, sats, dof);
}

std::vector<LogRecord> read_log(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("log: missing header");
  const auto cols = split(header);
  if (cols.size() < 3 || cols[0] != "tick" || cols[1] != "t" || cols.back() != "contact_depth") {
    throw std::runtime_error("log: unrecognised header");
  }
  const std::size_t body = cols.size() - 3;
  std::size_t sats = 0;
  std::size_t dof = 0;
  for (const auto& c : cols) {
    if (c.size() > 7 && c.compare(c.size() - 7, 7, "_safety") == 0) ++sats;
  }
  if (sats == 0 || body % sats != 0 || body / sats < kSatFixedColumns) throw std::runtime_error("log: bad layout");
  dof = body / sats - kSatFixedColumns;
  if (log_columns(sats, dof) != cols) throw std::runtime_error("log: unrecognised header");

  std::vector<LogRecord> out;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != cols.size()) {
      throw std::runtime_error("log line " + std::to_string(lineno) + ": expected " + std::to_string(cols.size()) +
                               " fields, got " + std::to_string(cells.size()));
    }
    std::size_t c = 0;
    auto next = [&] { return parse_double(cells[c++], lineno); };
    LogRecord r;
    {
      std::uint64_t tick = 0;
      const auto& s = cells[c++];
      const auto res = std::from_chars(s.data(), s.data() + s.size(), tick);
      if (res.ec != std::errc{}) throw std::runtime_error("log line " + std::to_string(lineno) + ": bad tick");
      r.tick = tick;
    }
    r.t = next();
    for (std::size_t i = 0; i < sats; ++i) {
      SatRecord s;
      for (Pose* p : {&s.desired, &s.executed}) {
        for (int k = 0; k < 3; ++k) p->position[k] = next();
        const double x = next(), y = next(), z = next(), w = next();
        p->orientation = Quat(w, x, y, z);
      }
      for (int k = 0; k < 3; ++k) s.desired_velocity[k] = next();
      for (int k = 0; k < 3; ++k) s.executed_velocity[k] = next();
      s.wrench.frame = Frame::R;
      for (int k = 0; k < 3; ++k) s.wrench.force[k] = next();
      for (int k = 0; k < 3; ++k) s.wrench.torque[k] = next();
      s.q.resize(static_cast<Eigen::Index>(dof));
      for (std::size_t k = 0; k < dof; ++k) s.q[static_cast<Eigen::Index>(k)] = next();
      s.safety = next() != 0.0;
      r.sats.push_back(std::move(s));
    }
    r.contact_depth = next();
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<LogRecord> read_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  return read_log(in);
}

}  // namespace orbemu
