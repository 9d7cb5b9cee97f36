#pragma once

// Client for out-of-process scorers speaking line-delimited JSON:
//   request  {"id": s, "question": [tokens], "sentence": [tokens]}
//   response {"id": s, "z_start": [N reals], "z_end": [N reals]}
// Requests are pipelined over one connection; responses may come back in
// any order and are matched by id.

#include <atomic>
#include <chrono>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>

#include "slotshot/scorers.hpp"

namespace slotshot {

struct Endpoint {
  enum class Kind { kTcp, kCommand };
  Kind kind = Kind::kTcp;
  std::string host;
  int port = 0;
  std::string command;  // run through /bin/sh -c, protocol on stdin/stdout
};

// "host:port", "tcp://host:port" or "cmd:<shell command>".
Endpoint parse_endpoint(std::string_view address);

class ExternalScorer : public Scorer {
 public:
  explicit ExternalScorer(Endpoint endpoint,
                          std::chrono::milliseconds timeout = std::chrono::seconds(30));
  ~ExternalScorer() override;

  ExternalScorer(const ExternalScorer&) = delete;
  ExternalScorer& operator=(const ExternalScorer&) = delete;

  SpanScores score(std::span<const std::string> question,
                   std::span<const std::string> sentence) override;

  // Sends one request without waiting; the future fails with the same error
  // types score() throws (except timeouts, which are the caller's to enforce).
  std::future<SpanScores> submit(std::span<const std::string> question,
                                 std::span<const std::string> sentence);

  // Waits for a submitted request, throwing ScorerTimeoutError past the deadline.
  SpanScores await(std::future<SpanScores>& pending);

  std::chrono::milliseconds timeout() const { return timeout_; }

 private:
  struct Pending {
    std::promise<SpanScores> promise;
    std::size_t tokens = 0;
  };

  void ensure_connected();
  void connect_tcp();
  void spawn_command();
  void read_loop();
  void handle_line(const std::string& line);
  void fail_all(const std::exception_ptr& error);
  void write_line(const std::string& line);

  Endpoint endpoint_;
  std::chrono::milliseconds timeout_;

  std::mutex connect_mu_;
  bool connected_ = false;
  int read_fd_ = -1;
  int write_fd_ = -1;
  int child_pid_ = -1;
  std::thread reader_;

  std::mutex write_mu_;
  std::mutex pending_mu_;
  std::map<std::string, Pending> pending_;
  std::exception_ptr broken_;
  std::atomic<std::uint64_t> next_id_{0};
};

}  // namespace slotshot
