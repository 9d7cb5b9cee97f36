#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slotshot/answer_engine.hpp"
#include "slotshot/corpus.hpp"

namespace slotshot {

// Sorted bag of normalized answer tokens.
using TokenBag = std::vector<std::string>;

// Lowercases, drops punctuation tokens and the words a/an/the/and; word
// order is discarded by sorting.
TokenBag normalize_answer_tokens(std::string_view text);

struct OverlapScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Multiset-intersection P/R/F1. Both empty -> (1,1,1); exactly one empty -> (0,0,0).
OverlapScore overlap_prf(const TokenBag& predicted, const TokenBag& gold);

// Best overlap F1 of `predicted` against any single gold answer or the union of all.
double best_overlap_f1(std::string_view predicted, std::span<const std::string> gold);

enum class Outcome { kTruePositive, kFalsePositive, kFalseNegative, kTrueNegative };

std::string_view to_string(Outcome outcome);

struct InstanceJudgment {
  Outcome outcome = Outcome::kTrueNegative;
  std::optional<std::string> predicted_text;
  double confidence = 0.0;
};

// A span is correct when its bag equals the bag of one gold answer or of
// all gold answers together.
bool answer_matches(std::string_view predicted, std::span<const std::string> gold);

InstanceJudgment judge_instance(const Prediction& prediction,
                                std::span<const std::string> gold_answers);
InstanceJudgment judge_instance(const Prediction& prediction,
                                std::span<const AnswerSpan> gold_answers);

struct Counts {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long tn = 0;

  friend bool operator==(const Counts&, const Counts&) = default;
};

struct MetricsReport {
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
  Counts counts;
};

MetricsReport report_from_counts(const Counts& counts);
MetricsReport aggregate_metrics(std::span<const InstanceJudgment> judgments);

struct JudgedPrediction {
  Prediction prediction;
  std::vector<std::string> gold;
};

struct CurvePoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

// With no thresholds given, every distinct span probability is used.
std::vector<CurvePoint> pr_curve(std::span<const JudgedPrediction> items,
                                 std::optional<std::vector<double>> thresholds = std::nullopt);

std::vector<std::string> answer_texts(std::span<const AnswerSpan> spans);

}  // namespace slotshot
