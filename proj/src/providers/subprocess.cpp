// SPDX-License-Identifier: Apache-2.0
#include "tartarus/providers/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <deque>
#include <thread>

#include <json.hpp>

extern char** environ;

namespace tartarus::providers {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] {
    struct sigaction sa {};
    sa.sa_handler = SIG_IGN;
    sigaction(SIGPIPE, &sa, nullptr);
  });
}

double seconds_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

}  // namespace

std::string encode_request(const PropertyRequest& r) {
  json j;
  j["id"] = r.id;
  j["smiles"] = r.smiles;
  j["props"] = r.props;
  return j.dump();
}

ProviderResponse decode_response(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("response is not JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("status")) {
    throw std::invalid_argument("response lacks id or status");
  }
  ProviderResponse r;
  r.id = j["id"].get<std::string>();
  const auto status = j["status"].get<std::string>();
  if (status == "ok") {
    r.status = Status::Ok;
    if (!j.contains("values") || !j["values"].is_object()) throw std::invalid_argument("ok response lacks values");
    for (const auto& [name, v] : j["values"].items()) {
      if (!v.is_object() || !v.contains("v") || !v["v"].is_number() || !v.contains("u") || !v["u"].is_string()) {
        throw std::invalid_argument("value '" + name + "' is not {v, u}");
      }
      r.values[name] = {v["v"].get<double>(), v["u"].get<std::string>()};
    }
  } else if (status == "error") {
    r.status = Status::ProviderError;
    r.error = j.value("error", std::string("provider reported an error"));
  } else {
    throw std::invalid_argument("unknown response status '" + status + "'");
  }
  return r;
}

class SubprocessProvider::Child {
 public:
  pid_t pid = -1;
  int in_fd = -1;   // child's stdin
  int out_fd = -1;  // child's stdout
  std::string buffer;
  bool alive = false;

  ~Child() { stop(); }

  void start(const std::string& command) {
    int to_child[2];
    int from_child[2];
    if (pipe2(to_child, O_CLOEXEC) != 0) throw HandshakeFailed(std::string("pipe: ") + std::strerror(errno));
    if (pipe2(from_child, O_CLOEXEC) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw HandshakeFailed(std::string("pipe: ") + std::strerror(errno));
    }
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);
    const char* argv[] = {"sh", "-c", command.c_str(), nullptr};
    const int rc = posix_spawn(&pid, "/bin/sh", &actions, nullptr, const_cast<char* const*>(argv), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(to_child[0]);
    ::close(from_child[1]);
    if (rc != 0) {
      ::close(to_child[1]);
      ::close(from_child[0]);
      throw HandshakeFailed(std::string("cannot start provider: ") + std::strerror(rc));
    }
    in_fd = to_child[1];
    out_fd = from_child[0];
    buffer.clear();
    alive = true;
  }

  void stop() {
    if (in_fd >= 0) ::close(in_fd);
    in_fd = -1;
    if (pid > 0) {
      // Give a well-behaved child a moment to exit on EOF.
      int status = 0;
      bool reaped = false;
      for (int i = 0; i < 20 && !reaped; ++i) {
        if (waitpid(pid, &status, WNOHANG) == pid) {
          reaped = true;
        } else {
          std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
      }
      if (!reaped) {
        kill(pid, SIGKILL);
        waitpid(pid, &status, 0);
      }
    }
    pid = -1;
    if (out_fd >= 0) ::close(out_fd);
    out_fd = -1;
    alive = false;
  }

  bool write_line(const std::string& line) {
    std::string data = line + "\n";
    std::size_t off = 0;
    while (off < data.size()) {
      const ssize_t n = ::write(in_fd, data.data() + off, data.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        alive = false;
        return false;
      }
      off += static_cast<std::size_t>(n);
    }
    return true;
  }

  enum class Read { Line, Timeout, Closed };

  /// Next line before the deadline.
  Read read_line(Clock::time_point deadline, std::string& line) {
    for (;;) {
      if (const auto nl = buffer.find('\n'); nl != std::string::npos) {
        line = buffer.substr(0, nl);
        buffer.erase(0, nl + 1);
        return Read::Line;
      }
      const auto now = Clock::now();
      if (now >= deadline) return Read::Timeout;
      const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count() + 1;
      pollfd pfd{out_fd, POLLIN, 0};
      const int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(ms, 1000000)));
      if (rc < 0) {
        if (errno == EINTR) continue;
        alive = false;
        return Read::Closed;
      }
      if (rc == 0) continue;
      char chunk[65536];
      const ssize_t n = ::read(out_fd, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        alive = false;
        return Read::Closed;
      }
      if (n == 0) {
        alive = false;
        return Read::Closed;
      }
      buffer.append(chunk, static_cast<std::size_t>(n));
    }
  }

  std::vector<std::string> handshake(double timeout_seconds) {
    std::string line;
    const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                             std::chrono::duration<double>(timeout_seconds));
    const auto r = read_line(deadline, line);
    if (r == Read::Timeout) throw HandshakeFailed("provider sent no handshake");
    if (r == Read::Closed) throw HandshakeFailed("provider exited before the handshake");
    try {
      const auto j = json::parse(line);
      if (j.at("protocol").get<int>() != kProtocolVersion) {
        throw HandshakeFailed("provider speaks protocol " + j.at("protocol").dump());
      }
      return j.at("props").get<std::vector<std::string>>();
    } catch (const json::exception&) {
      throw HandshakeFailed("malformed handshake: " + line);
    }
  }
};

SubprocessProvider::SubprocessProvider(std::string command, SubprocessOptions options)
    : command_(std::move(command)), options_(options) {
  ignore_sigpipe();
  if (options_.workers < 1 || options_.pipeline_depth < 1 || options_.max_attempts < 1) {
    throw std::invalid_argument("subprocess provider needs positive workers, depth and attempts");
  }
  for (int i = 0; i < options_.workers; ++i) {
    auto child = std::make_unique<Child>();
    child->start(command_);
    auto props = child->handshake(options_.handshake_timeout_seconds);
    if (i == 0) {
      supported_ = std::move(props);
    } else if (props != supported_) {
      throw HandshakeFailed("provider children advertise different properties");
    }
    children_.push_back(std::move(child));
  }
}

SubprocessProvider::~SubprocessProvider() = default;

int SubprocessProvider::restarts() const noexcept {
  std::lock_guard lock(stats_mutex_);
  return restarts_;
}

int SubprocessProvider::protocol_violations() const noexcept {
  std::lock_guard lock(stats_mutex_);
  return violations_;
}

double SubprocessProvider::timeout_for(const PropertyRequest& r) const {
  if (options_.timeout_seconds) return *options_.timeout_seconds;
  double t = 0.0;
  for (const auto& p : r.props) {
    const auto spec = find_property(p);
    t = std::max(t, spec ? spec->timeout_seconds : 600.0);
  }
  return t > 0.0 ? t : 600.0;
}

bool SubprocessProvider::restart(Child& child) {
  {
    std::lock_guard lock(stats_mutex_);
    if (restarts_ >= options_.max_restarts) {
      child.stop();
      return false;
    }
    ++restarts_;
  }
  child.stop();
  try {
    child.start(command_);
    (void)child.handshake(options_.handshake_timeout_seconds);
    return true;
  } catch (const HandshakeFailed&) {
    child.stop();
    return false;
  }
}

void SubprocessProvider::serve(Child& child, const std::vector<PropertyRequest>& batch,
                               std::vector<ProviderResponse>& out, std::vector<int>& attempts, std::size_t& next,
                               std::mutex& queue_mutex) {
  struct InFlight {
    std::size_t index;
    Clock::time_point sent;
    Clock::time_point deadline;
  };
  std::deque<InFlight> inflight;
  std::deque<std::size_t> retry;
  int consecutive_timeouts = 0;

  auto fail = [&](std::size_t i, Status s, std::string msg, double wall) {
    out[i].id = batch[i].id;
    out[i].status = s;
    out[i].error = std::move(msg);
    out[i].values.clear();
    out[i].wall_seconds = wall;
  };
  auto take = [&]() -> std::optional<std::size_t> {
    if (!retry.empty()) {
      const auto i = retry.front();
      retry.pop_front();
      return i;
    }
    std::lock_guard lock(queue_mutex);
    if (next >= batch.size()) return std::nullopt;
    return next++;
  };
  auto crashed = [&] {
    // Requests in flight on a dead child are retried on its replacement.
    for (const auto& f : inflight) {
      if (++attempts[f.index] < options_.max_attempts) {
        retry.push_back(f.index);
      } else {
        fail(f.index, Status::ProviderError, "provider crashed", seconds_between(f.sent, Clock::now()));
      }
    }
    inflight.clear();
    if (!restart(child)) {
      for (auto i : retry) fail(i, Status::ProviderError, "provider unavailable", 0.0);
      retry.clear();
      while (auto i = take()) fail(*i, Status::ProviderError, "provider unavailable", 0.0);
      return false;
    }
    return true;
  };

  for (;;) {
    while (child.alive && static_cast<int>(inflight.size()) < options_.pipeline_depth) {
      const auto i = take();
      if (!i) break;
      const auto now = Clock::now();
      const auto deadline = now + std::chrono::duration_cast<Clock::duration>(
                                      std::chrono::duration<double>(timeout_for(batch[*i])));
      inflight.push_back({*i, now, deadline});
      if (!child.write_line(encode_request(batch[*i]))) break;
    }
    if (inflight.empty()) {
      if (!child.alive && !crashed()) return;
      if (child.alive) return;
      continue;
    }
    if (!child.alive) {
      if (!crashed()) return;
      continue;
    }
    std::string line;
    const auto r = child.read_line(inflight.front().deadline, line);
    if (r == Child::Read::Closed) {
      if (!crashed()) return;
      continue;
    }
    if (r == Child::Read::Timeout) {
      const auto f = inflight.front();
      inflight.pop_front();
      fail(f.index, Status::Timeout, "no response within the timeout", seconds_between(f.sent, Clock::now()));
      // A child that stops answering altogether is replaced.
      if (++consecutive_timeouts >= 3) {
        consecutive_timeouts = 0;
        for (const auto& g : inflight) retry.push_back(g.index);
        inflight.clear();
        if (!restart(child)) {
          for (auto i : retry) fail(i, Status::ProviderError, "provider unavailable", 0.0);
          retry.clear();
          while (auto i = take()) fail(*i, Status::ProviderError, "provider unavailable", 0.0);
          return;
        }
      }
      continue;
    }
    ProviderResponse resp;
    try {
      resp = decode_response(line);
    } catch (const std::invalid_argument&) {
      std::lock_guard lock(stats_mutex_);
      ++violations_;
      continue;
    }
    auto it = inflight.begin();
    while (it != inflight.end() && batch[it->index].id != resp.id) ++it;
    // Late answers to requests that already timed out are dropped.
    if (it == inflight.end()) continue;
    consecutive_timeouts = 0;
    const auto f = *it;
    inflight.erase(it);
    resp.wall_seconds = std::max(seconds_between(f.sent, Clock::now()), 1e-9);
    if (resp.status == Status::Ok) {
      if (auto err = validate_response(batch[f.index], resp); !err.empty()) {
        resp.status = Status::ProviderError;
        resp.error = err;
        resp.values.clear();
      }
    }
    out[f.index] = std::move(resp);
  }
}

std::vector<ProviderResponse> SubprocessProvider::evaluate(const std::vector<PropertyRequest>& batch) {
  std::lock_guard guard(evaluate_mutex_);
  std::vector<ProviderResponse> out(batch.size());
  std::vector<int> attempts(batch.size(), 0);
  std::size_t next = 0;
  std::mutex queue_mutex;
  std::vector<Child*> usable;
  for (auto& c : children_) {
    if (c->alive || restart(*c)) usable.push_back(c.get());
  }
  if (usable.empty()) {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      out[i].id = batch[i].id;
      out[i].status = Status::ProviderError;
      out[i].error = "provider unavailable";
    }
    return out;
  }
  if (usable.size() == 1) {
    serve(*usable.front(), batch, out, attempts, next, queue_mutex);
  } else {
    std::vector<std::thread> threads;
    for (auto* c : usable) {
      threads.emplace_back([&, c] { serve(*c, batch, out, attempts, next, queue_mutex); });
    }
    for (auto& t : threads) t.join();
  }
  return out;
}

std::unique_ptr<Provider> provider_from_environment(const SubprocessOptions& options) {
  const char* cmd = std::getenv(kProviderCommandEnv);
  if (cmd == nullptr || *cmd == '\0') return nullptr;
  return std::make_unique<SubprocessProvider>(cmd, options);
}

}  // namespace tartarus::providers
