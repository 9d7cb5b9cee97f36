#include "slotshot/external_scorer.hpp"

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include <json.hpp>

#include "slotshot/error.hpp"

extern char** environ;

namespace slotshot {
namespace {

using Clock = std::chrono::steady_clock;

std::optional<int> try_connect(const std::string& host, int port, Clock::time_point deadline) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  if (getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &found) != 0) {
    return std::nullopt;
  }
  std::optional<int> result;
  for (addrinfo* ai = found; ai && !result; ai = ai->ai_next) {
    int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
    if (fd < 0) continue;
    const int flags = fcntl(fd, F_GETFL, 0);
    fcntl(fd, F_SETFL, flags | O_NONBLOCK);
    int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
    if (rc != 0 && errno == EINPROGRESS) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
      pollfd p{fd, POLLOUT, 0};
      if (left.count() > 0 && ::poll(&p, 1, static_cast<int>(left.count())) == 1) {
        int err = 0;
        socklen_t len = sizeof(err);
        getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
        rc = err == 0 ? 0 : -1;
      }
    }
    if (rc == 0) {
      fcntl(fd, F_SETFL, flags);
      result = fd;
    } else {
      ::close(fd);
    }
  }
  freeaddrinfo(found);
  return result;
}

}  // namespace

Endpoint parse_endpoint(std::string_view address) {
  Endpoint ep;
  if (address.substr(0, 4) == "cmd:") {
    ep.kind = Endpoint::Kind::kCommand;
    ep.command = std::string(address.substr(4));
    if (ep.command.empty()) throw DataError("empty scorer command");
    return ep;
  }
  if (address.substr(0, 6) == "tcp://") address.remove_prefix(6);
  const auto colon = address.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == address.size()) {
    throw DataError("scorer address must be host:port or cmd:<command>: " + std::string(address));
  }
  ep.kind = Endpoint::Kind::kTcp;
  ep.host = std::string(address.substr(0, colon));
  try {
    ep.port = std::stoi(std::string(address.substr(colon + 1)));
  } catch (const std::exception&) {
    throw DataError("bad scorer port in " + std::string(address));
  }
  if (ep.port <= 0 || ep.port > 65535) throw DataError("scorer port out of range");
  return ep;
}

ExternalScorer::ExternalScorer(Endpoint endpoint, std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {}

ExternalScorer::~ExternalScorer() {
  if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
  if (read_fd_ >= 0 && endpoint_.kind == Endpoint::Kind::kTcp) ::shutdown(read_fd_, SHUT_RDWR);
  if (child_pid_ > 0) {
    // The child sees EOF on stdin; give it a moment before forcing it down.
    const auto until = Clock::now() + std::chrono::milliseconds(500);
    int status = 0;
    while (::waitpid(child_pid_, &status, WNOHANG) == 0) {
      if (Clock::now() > until) {
        ::kill(child_pid_, SIGKILL);
        ::waitpid(child_pid_, &status, 0);
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
  }
  if (reader_.joinable()) reader_.join();
  if (read_fd_ >= 0) ::close(read_fd_);
}

void ExternalScorer::ensure_connected() {
  std::lock_guard lock(connect_mu_);
  if (connected_) return;
  if (endpoint_.kind == Endpoint::Kind::kTcp) {
    connect_tcp();
  } else {
    spawn_command();
  }
  connected_ = true;
  reader_ = std::thread([this] { read_loop(); });
}

void ExternalScorer::connect_tcp() {
  const auto deadline = Clock::now() + timeout_;
  for (;;) {
    if (auto fd = try_connect(endpoint_.host, endpoint_.port, deadline)) {
      read_fd_ = write_fd_ = *fd;
      return;
    }
    if (Clock::now() + std::chrono::milliseconds(50) >= deadline) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  throw ScorerTimeoutError("could not reach scorer at " + endpoint_.host + ":" +
                           std::to_string(endpoint_.port) + " within " +
                           std::to_string(timeout_.count()) + " ms");
}

void ExternalScorer::spawn_command() {
  // A dead child must surface as an error, not kill us with SIGPIPE.
  ::signal(SIGPIPE, SIG_IGN);
  int to_child[2];
  int from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0 || ::pipe2(from_child, O_CLOEXEC) != 0) {
    throw ScorerError(std::string("pipe: ") + std::strerror(errno));
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);
  const char* argv[] = {"/bin/sh", "-c", endpoint_.command.c_str(), nullptr};
  pid_t pid = -1;
  const int rc = posix_spawn(&pid, "/bin/sh", &actions, nullptr, const_cast<char* const*>(argv),
                             environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(to_child[0]);
  ::close(from_child[1]);
  if (rc != 0) {
    ::close(to_child[1]);
    ::close(from_child[0]);
    throw ScorerError("cannot start scorer command: " + std::string(std::strerror(rc)));
  }
  child_pid_ = pid;
  write_fd_ = to_child[1];
  read_fd_ = from_child[0];
}

void ExternalScorer::write_line(const std::string& line) {
  std::lock_guard lock(write_mu_);
  const char* p = line.data();
  std::size_t left = line.size();
  while (left > 0) {
    ssize_t n = endpoint_.kind == Endpoint::Kind::kTcp ? ::send(write_fd_, p, left, MSG_NOSIGNAL)
                                                       : ::write(write_fd_, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ScorerError(std::string("scorer write failed: ") + std::strerror(errno));
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
}

std::future<SpanScores> ExternalScorer::submit(std::span<const std::string> question,
                                               std::span<const std::string> sentence) {
  ensure_connected();
  const std::string id = "q" + std::to_string(next_id_.fetch_add(1));
  std::future<SpanScores> future;
  {
    std::lock_guard lock(pending_mu_);
    if (broken_) std::rethrow_exception(broken_);
    auto& slot = pending_[id];
    slot.tokens = sentence.size();
    future = slot.promise.get_future();
  }
  nlohmann::json request = {{"id", id},
                            {"question", std::vector<std::string>(question.begin(), question.end())},
                            {"sentence", std::vector<std::string>(sentence.begin(), sentence.end())}};
  try {
    write_line(request.dump() + "\n");
  } catch (...) {
    std::lock_guard lock(pending_mu_);
    pending_.erase(id);
    throw;
  }
  return future;
}

SpanScores ExternalScorer::await(std::future<SpanScores>& pending) {
  if (pending.wait_for(timeout_) != std::future_status::ready) {
    throw ScorerTimeoutError("scorer did not answer within " + std::to_string(timeout_.count()) +
                             " ms");
  }
  return pending.get();
}

SpanScores ExternalScorer::score(std::span<const std::string> question,
                                 std::span<const std::string> sentence) {
  auto future = submit(question, sentence);
  return await(future);
}

void ExternalScorer::read_loop() {
  std::string buffer;
  char chunk[65536];
  for (;;) {
    const ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t start = 0;
    for (auto nl = buffer.find('\n', start); nl != std::string::npos;
         nl = buffer.find('\n', start)) {
      handle_line(buffer.substr(start, nl - start));
      start = nl + 1;
    }
    buffer.erase(0, start);
  }
  fail_all(std::make_exception_ptr(ScorerError("scorer connection closed")));
}

void ExternalScorer::fail_all(const std::exception_ptr& error) {
  std::lock_guard lock(pending_mu_);
  if (!broken_) broken_ = error;
  for (auto& [id, slot] : pending_) slot.promise.set_exception(error);
  pending_.clear();
}

void ExternalScorer::handle_line(const std::string& line) {
  if (line.empty() || line == "\r") return;
  nlohmann::json response;
  try {
    response = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    response = nullptr;
  }
  if (!response.is_object() || !response.contains("id") || !response["id"].is_string()) {
    // Without an id the line cannot be attributed; every in-flight request is suspect.
    const auto error =
        std::make_exception_ptr(MalformedResponseError("unattributable scorer response: " +
                                                       line.substr(0, 200)));
    std::lock_guard lock(pending_mu_);
    for (auto& [id, slot] : pending_) slot.promise.set_exception(error);
    pending_.clear();
    return;
  }

  Pending slot;
  {
    std::lock_guard lock(pending_mu_);
    auto it = pending_.find(response["id"].get<std::string>());
    if (it == pending_.end()) return;  // late answer to an abandoned request
    slot = std::move(it->second);
    pending_.erase(it);
  }
  try {
    auto vec = [&](const char* key) {
      if (!response.contains(key) || !response[key].is_array()) {
        throw MalformedResponseError(std::string("response lacks array \"") + key + "\"");
      }
      std::vector<double> v;
      for (const auto& x : response[key]) {
        if (!x.is_number()) throw MalformedResponseError(std::string("non-numeric entry in ") + key);
        v.push_back(x.get<double>());
      }
      return v;
    };
    SpanScores scores{vec("z_start"), vec("z_end")};
    if (scores.z_start.size() != slot.tokens || scores.z_end.size() != slot.tokens) {
      throw ResponseLengthError("scorer returned " + std::to_string(scores.z_start.size()) + "/" +
                                std::to_string(scores.z_end.size()) + " scores for " +
                                std::to_string(slot.tokens) + " tokens");
    }
    slot.promise.set_value(std::move(scores));
  } catch (...) {
    slot.promise.set_exception(std::current_exception());
  }
}

}  // namespace slotshot
