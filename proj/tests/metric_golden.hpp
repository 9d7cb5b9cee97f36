#pragma once

// Replays tests/data/metric_golden.json; returns one message per mismatch.

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "slotshot/evaluation.hpp"
#include "slotshot/serialization.hpp"

namespace golden {

inline slotshot::Outcome parse_outcome(const std::string& s) {
  using slotshot::Outcome;
  if (s == "TP") return Outcome::kTruePositive;
  if (s == "FP") return Outcome::kFalsePositive;
  if (s == "FN") return Outcome::kFalseNegative;
  return Outcome::kTrueNegative;
}

inline std::size_t case_count(const std::filesystem::path& path) {
  const auto doc = slotshot::read_json(path);
  return doc.at("judge").size() + doc.at("overlap").size() + doc.at("aggregate").size();
}

inline std::vector<std::string> check_metric_golden(const std::filesystem::path& path) {
  using namespace slotshot;
  std::vector<std::string> failures;
  const auto doc = read_json(path);
  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-9; };

  for (const auto& c : doc.at("judge")) {
    Prediction p;
    if (!c.at("predicted").is_null()) {
      p.answer = PredictedSpan{0, 0, c.at("predicted").get<std::string>()};
      p.probability = 0.9;
    }
    const auto gold = c.at("gold").get<std::vector<std::string>>();
    const auto got = judge_instance(p, std::span<const std::string>(gold)).outcome;
    if (got != parse_outcome(c.at("outcome").get<std::string>())) {
      failures.push_back(c.at("name").get<std::string>() + ": got " + std::string(to_string(got)));
    }
    // Gold order must not matter.
    auto reversed = gold;
    std::reverse(reversed.begin(), reversed.end());
    if (judge_instance(p, std::span<const std::string>(reversed)).outcome != got) {
      failures.push_back(c.at("name").get<std::string>() + ": depends on gold order");
    }
  }
  for (const auto& c : doc.at("overlap")) {
    const auto s = overlap_prf(normalize_answer_tokens(c.at("predicted").get<std::string>()),
                               normalize_answer_tokens(c.at("gold").get<std::string>()));
    if (!near(s.precision, c.at("precision")) || !near(s.recall, c.at("recall")) ||
        !near(s.f1, c.at("f1"))) {
      failures.push_back(c.at("name").get<std::string>() + ": got (" +
                         std::to_string(s.precision) + ", " + std::to_string(s.recall) + ", " +
                         std::to_string(s.f1) + ")");
    }
  }
  for (const auto& c : doc.at("aggregate")) {
    std::vector<InstanceJudgment> js;
    for (const auto& o : c.at("outcomes")) js.push_back({parse_outcome(o.get<std::string>()), {}, 0});
    const auto m = aggregate_metrics(js);
    if (!near(m.precision, c.at("precision")) || !near(m.recall, c.at("recall")) ||
        !near(m.f1, c.at("f1"))) {
      failures.push_back(c.at("name").get<std::string>() + ": got (" +
                         std::to_string(m.precision) + ", " + std::to_string(m.recall) + ", " +
                         std::to_string(m.f1) + ")");
    }
  }
  return failures;
}

}  // namespace golden
