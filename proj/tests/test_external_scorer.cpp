#include <doctest.h>

#include <unistd.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include "mock_scores.hpp"
#include "slotshot/error.hpp"
#include "slotshot/external_scorer.hpp"

using namespace slotshot;
using namespace std::chrono_literals;

namespace {

const std::string kMock = SLOTSHOT_MOCK_SCORER;

Endpoint command(const std::string& flags) { return parse_endpoint("cmd:" + kMock + " " + flags); }

std::vector<std::string> sentence_of(std::size_t n, std::size_t salt) {
  std::vector<std::string> s;
  for (std::size_t i = 0; i < n; ++i) s.push_back("t" + std::to_string(salt * 31 + i));
  return s;
}

}  // namespace

TEST_CASE("endpoint parsing") {
  auto tcp = parse_endpoint("localhost:9090");
  CHECK(tcp.kind == Endpoint::Kind::kTcp);
  CHECK(tcp.host == "localhost");
  CHECK(tcp.port == 9090);
  CHECK(parse_endpoint("tcp://127.0.0.1:1").port == 1);
  CHECK(parse_endpoint("cmd:python3 model.py").command == "python3 model.py");
  CHECK_THROWS_AS(parse_endpoint("nohost"), DataError);
  CHECK_THROWS_AS(parse_endpoint("host:notaport"), DataError);
}

TEST_CASE("round trip over a spawned process") {
  ExternalScorer scorer(command(""), 10s);
  const std::vector<std::string> q = {"Who", "?"};
  const auto s = sentence_of(7, 1);
  const auto got = scorer.score(q, s);
  const auto want = mock::scores_for(q, s);
  CHECK(got.z_start == want.z_start);
  CHECK(got.z_end == want.z_end);
}

TEST_CASE("pipelined out-of-order responses match by id") {
  ExternalScorer scorer(command("--shuffle 17"), 20s);
  const std::vector<std::string> q = {"When", "?"};
  std::vector<std::vector<std::string>> sentences;
  std::vector<std::future<SpanScores>> pending;
  for (std::size_t i = 0; i < 200; ++i) {
    sentences.push_back(sentence_of(1 + i % 9, i));
    pending.push_back(scorer.submit(q, sentences.back()));
  }
  for (std::size_t i = 0; i < pending.size(); ++i) {
    const auto got = scorer.await(pending[i]);
    CHECK(got.z_start == mock::scores_for(q, sentences[i]).z_start);
  }
}

TEST_CASE("concurrent callers share one connection") {
  ExternalScorer scorer(command("--shuffle 5"), 20s);
  std::atomic<int> mismatches{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (std::size_t i = 0; i < 50; ++i) {
        const std::vector<std::string> q = {"q" + std::to_string(t)};
        const auto s = sentence_of(3, i + 100 * static_cast<std::size_t>(t));
        if (scorer.score(q, s).z_end != mock::scores_for(q, s).z_end) ++mismatches;
      }
    });
  }
  for (auto& th : threads) th.join();
  CHECK(mismatches == 0);
}

TEST_CASE("protocol failures are distinct errors") {
  const std::vector<std::string> q = {"Who", "?"};
  const auto s = sentence_of(4, 2);
  {
    ExternalScorer scorer(command("--short"), 10s);
    CHECK_THROWS_AS(scorer.score(q, s), ResponseLengthError);
  }
  {
    ExternalScorer scorer(command("--garbage"), 10s);
    CHECK_THROWS_AS(scorer.score(q, s), MalformedResponseError);
  }
  {
    ExternalScorer scorer(command("--silent"), 300ms);
    CHECK_THROWS_AS(scorer.score(q, s), ScorerTimeoutError);
  }
  {
    // Nothing listens on the discard port of the loopback interface.
    ExternalScorer scorer(parse_endpoint("127.0.0.1:9"), 300ms);
    const auto start = std::chrono::steady_clock::now();
    CHECK_THROWS_AS(scorer.score(q, s), ScorerTimeoutError);
    CHECK(std::chrono::steady_clock::now() - start >= 250ms);
  }
  {
    ExternalScorer scorer(parse_endpoint("cmd:true"), 2s);
    CHECK_THROWS_AS(scorer.score(q, s), ScorerError);
  }
}

TEST_CASE("round trip over TCP") {
  const auto port_file =
      std::filesystem::temp_directory_path() / ("slotshot_mock_port_" + std::to_string(::getpid()));
  std::filesystem::remove(port_file);
  std::thread server([&] {
    const std::string cmd = kMock + " --shuffle 3 --port 0 --port-file " + port_file.string();
    CHECK(std::system(cmd.c_str()) == 0);
  });
  int port = 0;
  for (int i = 0; i < 200 && !port; ++i) {
    std::this_thread::sleep_for(10ms);
    std::ifstream in(port_file);
    in >> port;
  }
  REQUIRE(port > 0);
  {
    ExternalScorer scorer(parse_endpoint("127.0.0.1:" + std::to_string(port)), 10s);
    const std::vector<std::string> q = {"Where", "?"};
    std::vector<std::future<SpanScores>> pending;
    for (std::size_t i = 0; i < 20; ++i) pending.push_back(scorer.submit(q, sentence_of(5, i)));
    for (std::size_t i = 0; i < 20; ++i) {
      CHECK(scorer.await(pending[i]).z_start == mock::scores_for(q, sentence_of(5, i)).z_start);
    }
  }
  server.join();
  std::filesystem::remove(port_file);
}
