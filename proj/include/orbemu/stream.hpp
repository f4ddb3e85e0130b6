/**
 * @file stream.hpp
 * @brief Live telemetry/command stream.
 *
 * Frames are single-line JSON documents. A plain TCP client exchanges newline-delimited
 * frames; a client whose first bytes are an HTTP GET is upgraded to WebSocket and every
 * text message carries one frame.
 *
 * Outbound: {"type":"state", ...} telemetry and {"type":"error","message":...}.
 * Inbound:  impulse, cmd (pause/resume/reset) and set_param frames.
 */

#pragma once

#include "orbemu/simulation.hpp"

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace orbemu {

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parse and validate one inbound frame against the known satellite names.
Command parse_command(const std::string& text, const std::vector<std::string>& sat_names);

std::string format_state_frame(const LogRecord& record, const std::vector<std::string>& sat_names,
                               RunStatus status);
std::string format_error_frame(const std::string& message);
std::string format_command(const Command& cmd);

/// Unbounded FIFO of commands, filled by the server thread, drained by the simulation.
class CommandQueue {
 public:
  void push(Command c);
  std::optional<Command> pop();
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::deque<Command> q_;
};

/// Bounded FIFO of outbound frames; pushing onto a full queue drops the oldest entry.
class TelemetryQueue {
 public:
  explicit TelemetryQueue(std::size_t capacity = 256) : capacity_(capacity) {}
  void push(std::string frame);
  std::optional<std::string> pop();
  /// Waits up to `timeout_ms` for a frame.
  std::optional<std::string> pop_wait(int timeout_ms);
  std::size_t size() const;
  std::uint64_t dropped() const;

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::string> q_;
  std::size_t capacity_;
  std::uint64_t dropped_ = 0;
};

/// Sec-WebSocket-Accept for a client key.
std::string websocket_accept_key(const std::string& client_key);

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 8765;
};

/// "host:port" or ":port"; throws ContractViolation otherwise.
Endpoint parse_endpoint(const std::string& text);

class StreamServer {
 public:
  StreamServer(Endpoint endpoint, std::vector<std::string> sat_names, CommandQueue& commands,
               TelemetryQueue& telemetry);
  ~StreamServer();
  StreamServer(const StreamServer&) = delete;
  StreamServer& operator=(const StreamServer&) = delete;

  /// Binds and starts the I/O thread. Throws std::runtime_error when the socket cannot be bound.
  void start();
  void stop();
  /// Actual bound port (useful with port 0).
  std::uint16_t port() const { return bound_port_; }
  std::size_t clients() const { return client_count_.load(); }

 private:
  struct Client;
  void loop();

  Endpoint endpoint_;
  std::vector<std::string> sat_names_;
  CommandQueue& commands_;
  TelemetryQueue& telemetry_;
  int listen_fd_ = -1;
  std::uint16_t bound_port_ = 0;
  std::atomic<bool> running_{false};
  std::atomic<std::size_t> client_count_{0};
  std::thread thread_;
};

}  // namespace orbemu
