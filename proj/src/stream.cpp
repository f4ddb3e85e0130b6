#include "orbemu/stream.hpp"

#include "json.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <openssl/evp.h>
#include <openssl/sha.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <memory>
#include <set>

namespace orbemu {

using nlohmann::json;

namespace {

Vec3 read_vec3(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 3) throw ProtocolError(std::string("'") + key + "' must be an array of 3 numbers");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    const auto& e = j[static_cast<std::size_t>(i)];
    if (!e.is_number()) throw ProtocolError(std::string("'") + key + "' must be an array of 3 numbers");
    v[i] = e.get<double>();
  }
  if (!v.allFinite()) throw ProtocolError(std::string("'") + key + "' must be finite");
  return v;
}

void only_keys(const json& j, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; })) {
      throw ProtocolError("unexpected key '" + it.key() + "'");
    }
  }
}

json pose_json(const Pose& p) {
  return {{"position", {p.position.x(), p.position.y(), p.position.z()}},
          {"orientation", {p.orientation.x(), p.orientation.y(), p.orientation.z(), p.orientation.w()}}};
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

Command parse_command(const std::string& text, const std::vector<std::string>& sat_names) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error&) {
    throw ProtocolError("malformed JSON");
  }
  if (!j.is_object()) throw ProtocolError("frame must be a JSON object");
  const auto type_it = j.find("type");
  if (type_it == j.end() || !type_it->is_string()) throw ProtocolError("missing string field 'type'");
  const std::string type = type_it->get<std::string>();

  if (type == "impulse") {
    only_keys(j, {"type", "sat", "force", "torque", "duration_s"});
    ImpulseCommand c;
    if (!j.contains("sat") || !j["sat"].is_string()) throw ProtocolError("impulse needs string field 'sat'");
    c.sat = j["sat"].get<std::string>();
    if (std::find(sat_names.begin(), sat_names.end(), c.sat) == sat_names.end()) {
      throw ProtocolError("unknown satellite '" + c.sat + "'");
    }
    if (!j.contains("force")) throw ProtocolError("impulse needs 'force'");
    c.force = read_vec3(j["force"], "force");
    if (j.contains("torque")) c.torque = read_vec3(j["torque"], "torque");
    if (!j.contains("duration_s") || !j["duration_s"].is_number()) {
      throw ProtocolError("impulse needs numeric 'duration_s'");
    }
    c.duration = j["duration_s"].get<double>();
    if (!std::isfinite(c.duration) || !(c.duration > 0)) throw ProtocolError("'duration_s' must be > 0");
    return c;
  }
  if (type == "cmd") {
    only_keys(j, {"type", "action"});
    if (!j.contains("action") || !j["action"].is_string()) throw ProtocolError("cmd needs string field 'action'");
    const std::string a = j["action"].get<std::string>();
    if (a == "pause") return ControlCommand{ControlAction::Pause};
    if (a == "resume") return ControlCommand{ControlAction::Resume};
    if (a == "reset") return ControlCommand{ControlAction::Reset};
    throw ProtocolError("unknown action '" + a + "'");
  }
  if (type == "set_param") {
    only_keys(j, {"type", "path", "value"});
    if (!j.contains("path") || !j["path"].is_string()) throw ProtocolError("set_param needs string field 'path'");
    SetParamCommand c;
    c.path = j["path"].get<std::string>();
    const auto& paths = settable_params();
    if (std::find(paths.begin(), paths.end(), c.path) == paths.end()) {
      throw ProtocolError("parameter '" + c.path + "' is not settable");
    }
    if (!j.contains("value") || !j["value"].is_number()) throw ProtocolError("set_param needs numeric 'value'");
    c.value = j["value"].get<double>();
    if (!std::isfinite(c.value) || c.value < 0) throw ProtocolError("'value' must be finite and >= 0");
    if (c.path == "vfdm.dt_ctrl" && !(c.value > 0)) throw ProtocolError("vfdm.dt_ctrl must be > 0");
    return c;
  }
  throw ProtocolError("unknown frame type '" + type + "'");
}

std::string format_state_frame(const LogRecord& r, const std::vector<std::string>& names, RunStatus status) {
  json sats = json::array();
  for (std::size_t i = 0; i < r.sats.size(); ++i) {
    const auto& s = r.sats[i];
    sats.push_back({{"name", i < names.size() ? names[i] : "s" + std::to_string(i + 1)},
                    {"des_pose", pose_json(s.desired)},
                    {"act_pose", pose_json(s.executed)},
                    {"des_vel", vec_json(s.desired_velocity)},
                    {"act_vel", vec_json(s.executed_velocity)},
                    {"wrench", {{"force", vec_json(s.wrench.force)}, {"torque", vec_json(s.wrench.torque)}}},
                    {"safety", s.safety}});
  }
  json frame = {{"type", "state"}, {"tick", r.tick}, {"t", r.t}, {"sats", sats}, {"status", to_string(status)}};
  if (!std::isnan(r.contact_depth)) frame["contact_depth"] = r.contact_depth;
  return frame.dump();
}

std::string format_error_frame(const std::string& message) {
  return json{{"type", "error"}, {"message", message}}.dump();
}

std::string format_command(const Command& cmd) {
  if (const auto* i = std::get_if<ImpulseCommand>(&cmd)) {
    return json{{"type", "impulse"},
                {"sat", i->sat},
                {"force", vec_json(i->force)},
                {"torque", vec_json(i->torque)},
                {"duration_s", i->duration}}
        .dump();
  }
  if (const auto* c = std::get_if<ControlCommand>(&cmd)) {
    const char* a = c->action == ControlAction::Pause ? "pause" : c->action == ControlAction::Resume ? "resume" : "reset";
    return json{{"type", "cmd"}, {"action", a}}.dump();
  }
  const auto& s = std::get<SetParamCommand>(cmd);
  return json{{"type", "set_param"}, {"path", s.path}, {"value", s.value}}.dump();
}

void CommandQueue::push(Command c) {
  std::lock_guard lock(mu_);
  q_.push_back(std::move(c));
}

std::optional<Command> CommandQueue::pop() {
  std::lock_guard lock(mu_);
  if (q_.empty()) return std::nullopt;
  Command c = std::move(q_.front());
  q_.pop_front();
  return c;
}

std::size_t CommandQueue::size() const {
  std::lock_guard lock(mu_);
  return q_.size();
}

void TelemetryQueue::push(std::string frame) {
  {
    std::lock_guard lock(mu_);
    if (capacity_ == 0) {
      ++dropped_;
      return;
    }
    if (q_.size() >= capacity_) {
      q_.pop_front();
      ++dropped_;
    }
    q_.push_back(std::move(frame));
  }
  cv_.notify_one();
}

std::optional<std::string> TelemetryQueue::pop() {
  std::lock_guard lock(mu_);
  if (q_.empty()) return std::nullopt;
  std::string f = std::move(q_.front());
  q_.pop_front();
  return f;
}

std::optional<std::string> TelemetryQueue::pop_wait(int timeout_ms) {
  std::unique_lock lock(mu_);
  if (!cv_.wait_for(lock, std::chrono::milliseconds(timeout_ms), [&] { return !q_.empty(); })) return std::nullopt;
  std::string f = std::move(q_.front());
  q_.pop_front();
  return f;
}

std::size_t TelemetryQueue::size() const {
  std::lock_guard lock(mu_);
  return q_.size();
}

std::uint64_t TelemetryQueue::dropped() const {
  std::lock_guard lock(mu_);
  return dropped_;
}

std::string websocket_accept_key(const std::string& client_key) {
  const std::string src = client_key + "258EAFA5-E914-47DA-95CA-C5AB0DC85B11";
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(src.data()), src.size(), digest);
  unsigned char out[4 * ((SHA_DIGEST_LENGTH + 2) / 3) + 1];
  const int n = EVP_EncodeBlock(out, digest, SHA_DIGEST_LENGTH);
  return std::string(reinterpret_cast<char*>(out), static_cast<std::size_t>(n));
}

Endpoint parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw ContractViolation("endpoint must be host:port, got '" + text + "'");
  Endpoint e;
  if (colon > 0) e.host = text.substr(0, colon);
  const std::string port = text.substr(colon + 1);
  if (port.empty() || port.size() > 5 || !std::all_of(port.begin(), port.end(), ::isdigit)) {
    throw ContractViolation("endpoint port must be a number, got '" + port + "'");
  }
  const unsigned long p = std::stoul(port);
  if (p > 65535) throw ContractViolation("endpoint port out of range: " + port);
  e.port = static_cast<std::uint16_t>(p);
  return e;
}

struct StreamServer::Client {
  enum class Mode { Unknown, Lines, WebSocket };
  int fd = -1;
  Mode mode = Mode::Unknown;
  std::string in;
  std::string fragment;
  bool closed = false;
  std::chrono::steady_clock::time_point accepted = std::chrono::steady_clock::now();

  void send_raw(const std::string& bytes) {
    std::size_t off = 0;
    while (!closed && off < bytes.size()) {
      const ssize_t n = ::send(fd, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
      if (n <= 0) {
        if (n < 0 && errno == EINTR) continue;
        closed = true;
        return;
      }
      off += static_cast<std::size_t>(n);
    }
  }

  void send_ws(unsigned char opcode, const std::string& payload) {
    std::string h;
    h.push_back(static_cast<char>(0x80 | opcode));
    const std::size_t n = payload.size();
    if (n < 126) {
      h.push_back(static_cast<char>(n));
    } else if (n <= 0xFFFF) {
      h.push_back(static_cast<char>(126));
      h.push_back(static_cast<char>((n >> 8) & 0xFF));
      h.push_back(static_cast<char>(n & 0xFF));
    } else {
      h.push_back(static_cast<char>(127));
      for (int s = 56; s >= 0; s -= 8) h.push_back(static_cast<char>((static_cast<std::uint64_t>(n) >> s) & 0xFF));
    }
    send_raw(h + payload);
  }

  void send_frame(const std::string& frame) {
    if (mode == Mode::WebSocket) send_ws(0x1, frame);
    else if (mode == Mode::Lines) send_raw(frame + "\n");
  }
};

StreamServer::StreamServer(Endpoint endpoint, std::vector<std::string> sat_names, CommandQueue& commands,
                           TelemetryQueue& telemetry)
    : endpoint_(std::move(endpoint)), sat_names_(std::move(sat_names)), commands_(commands), telemetry_(telemetry) {}

StreamServer::~StreamServer() { stop(); }

void StreamServer::start() {
  if (running_) return;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(endpoint_.port);
  if (const int rc = ::getaddrinfo(endpoint_.host.c_str(), port.c_str(), &hints, &res); rc != 0) {
    throw std::runtime_error("cannot resolve " + endpoint_.host + ": " + ::gai_strerror(rc));
  }
  std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res, ::freeaddrinfo);
  listen_fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (listen_fd_ < 0) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(listen_fd_, res->ai_addr, res->ai_addrlen) != 0 || ::listen(listen_fd_, 8) != 0) {
    const std::string err = std::strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw std::runtime_error("cannot listen on " + endpoint_.host + ":" + port + ": " + err);
  }
  sockaddr_in bound{};
  socklen_t len = sizeof bound;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  bound_port_ = ntohs(bound.sin_port);
  running_ = true;
  thread_ = std::thread([this] { loop(); });
}

void StreamServer::stop() {
  running_ = false;
  if (thread_.joinable()) thread_.join();
  if (listen_fd_ >= 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
}

void StreamServer::loop() {
  std::vector<std::unique_ptr<Client>> clients;

  auto handle_text = [&](Client& c, const std::string& text) {
    try {
      commands_.push(parse_command(text, sat_names_));
    } catch (const ProtocolError& e) {
      c.send_frame(format_error_frame(e.what()));
    }
  };

  auto process_lines = [&](Client& c) {
    std::size_t pos;
    while ((pos = c.in.find('\n')) != std::string::npos) {
      std::string line = c.in.substr(0, pos);
      c.in.erase(0, pos + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      handle_text(c, line);
    }
  };

  auto process_ws = [&](Client& c) {
    for (;;) {
      if (c.in.size() < 2) return;
      const auto b0 = static_cast<unsigned char>(c.in[0]);
      const auto b1 = static_cast<unsigned char>(c.in[1]);
      const bool fin = b0 & 0x80;
      const unsigned opcode = b0 & 0x0F;
      const bool masked = b1 & 0x80;
      std::uint64_t len = b1 & 0x7F;
      std::size_t off = 2;
      if (len == 126) {
        if (c.in.size() < 4) return;
        len = (static_cast<std::uint64_t>(static_cast<unsigned char>(c.in[2])) << 8) |
              static_cast<unsigned char>(c.in[3]);
        off = 4;
      } else if (len == 127) {
        if (c.in.size() < 10) return;
        len = 0;
        for (int i = 0; i < 8; ++i) len = (len << 8) | static_cast<unsigned char>(c.in[2 + static_cast<std::size_t>(i)]);
        off = 10;
      }
      if (len > (1u << 20)) {
        c.closed = true;
        return;
      }
      std::array<unsigned char, 4> mask{};
      if (masked) {
        if (c.in.size() < off + 4) return;
        for (std::size_t i = 0; i < 4; ++i) mask[i] = static_cast<unsigned char>(c.in[off + i]);
        off += 4;
      }
      if (c.in.size() < off + len) return;
      std::string payload = c.in.substr(off, static_cast<std::size_t>(len));
      c.in.erase(0, off + static_cast<std::size_t>(len));
      if (masked) {
        for (std::size_t i = 0; i < payload.size(); ++i) payload[i] = static_cast<char>(payload[i] ^ mask[i % 4]);
      }
      switch (opcode) {
        case 0x0:
        case 0x1:
        case 0x2:
          c.fragment += payload;
          if (fin) {
            handle_text(c, c.fragment);
            c.fragment.clear();
          }
          break;
        case 0x8:
          c.send_ws(0x8, payload.substr(0, std::min<std::size_t>(payload.size(), 2)));
          c.closed = true;
          return;
        case 0x9:
          c.send_ws(0xA, payload);
          break;
        default:
          break;
      }
    }
  };

  auto process = [&](Client& c) {
    if (c.mode == Client::Mode::Unknown) {
      static const std::string get = "GET ";
      const std::size_t n = std::min(c.in.size(), get.size());
      if (c.in.compare(0, n, get, 0, n) != 0) {
        c.mode = Client::Mode::Lines;
      } else if (c.in.size() >= get.size()) {
        const auto end = c.in.find("\r\n\r\n");
        if (end == std::string::npos) {
          if (c.in.size() > 16384) c.closed = true;
          return;
        }
        const std::string head = c.in.substr(0, end);
        c.in.erase(0, end + 4);
        std::string key;
        std::size_t p = 0;
        while (p < head.size()) {
          std::size_t e = head.find("\r\n", p);
          if (e == std::string::npos) e = head.size();
          const std::string line = head.substr(p, e - p);
          p = e + 2;
          const auto colon = line.find(':');
          if (colon == std::string::npos) continue;
          std::string name = line.substr(0, colon);
          std::transform(name.begin(), name.end(), name.begin(), ::tolower);
          if (name == "sec-websocket-key") {
            key = line.substr(colon + 1);
            key.erase(0, key.find_first_not_of(' '));
            key.erase(key.find_last_not_of(" \t") + 1);
          }
        }
        if (key.empty()) {
          c.send_raw("HTTP/1.1 400 Bad Request\r\nContent-Length: 0\r\nConnection: close\r\n\r\n");
          c.closed = true;
          return;
        }
        c.send_raw("HTTP/1.1 101 Switching Protocols\r\nUpgrade: websocket\r\nConnection: Upgrade\r\n"
                   "Sec-WebSocket-Accept: " +
                   websocket_accept_key(key) + "\r\n\r\n");
        c.mode = Client::Mode::WebSocket;
      } else {
        return;
      }
    }
    if (c.mode == Client::Mode::Lines) process_lines(c);
    else if (c.mode == Client::Mode::WebSocket) process_ws(c);
  };

  while (running_) {
    std::vector<pollfd> fds;
    fds.push_back({listen_fd_, POLLIN, 0});
    for (const auto& c : clients) fds.push_back({c->fd, POLLIN, 0});
    const int ready = ::poll(fds.data(), fds.size(), 10);
    if (ready > 0) {
      if (fds[0].revents & POLLIN) {
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd >= 0) {
          const int one = 1;
          ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
          timeval tv{0, 200000};
          ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
          auto c = std::make_unique<Client>();
          c->fd = fd;
          clients.push_back(std::move(c));
        }
      }
      for (std::size_t i = 1; i < fds.size(); ++i) {
        if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
        Client& c = *clients[i - 1];
        char buf[4096];
        const ssize_t n = ::recv(c.fd, buf, sizeof buf, 0);
        if (n <= 0) {
          c.closed = true;
          continue;
        }
        c.in.append(buf, static_cast<std::size_t>(n));
        if (c.in.size() > (1u << 22)) {
          c.closed = true;
          continue;
        }
        process(c);
      }
    }
    // a silent client is a plain line client
    const auto now = std::chrono::steady_clock::now();
    for (auto& c : clients) {
      if (c->mode == Client::Mode::Unknown && c->in.empty() && now - c->accepted > std::chrono::milliseconds(100)) {
        c->mode = Client::Mode::Lines;
      }
    }
    while (auto frame = telemetry_.pop()) {
      for (auto& c : clients) c->send_frame(*frame);
    }
    for (auto it = clients.begin(); it != clients.end();) {
      if ((*it)->closed) {
        ::close((*it)->fd);
        it = clients.erase(it);
      } else {
        ++it;
      }
    }
    client_count_ = clients.size();
  }
  for (auto& c : clients) ::close(c->fd);
  client_count_ = 0;
}

}  // namespace orbemu
