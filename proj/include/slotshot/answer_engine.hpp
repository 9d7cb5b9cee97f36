#pragma once

// Answerability math over scorer confidences: a bias logit is appended to
// the start and end score vectors, softmax gives distributions whose last
// entry is the no-answer mass, and decoding compares the best span's
// probability p_start[i] * p_end[j] against p_start[N] * p_end[N].

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slotshot/corpus.hpp"

namespace slotshot {

struct SpanScores {
  std::vector<double> z_start;
  std::vector<double> z_end;

  std::size_t size() const { return z_start.size(); }
};

// Throws InvalidScoresError on empty, unequal-length or non-finite vectors.
void validate(const SpanScores& scores);

struct NullAwareDistributions {
  std::vector<double> p_start;  // size N + 1, back() is the null mass
  std::vector<double> p_end;

  std::size_t tokens() const { return p_start.size() - 1; }
};

struct DecodeParams {
  double bias = 0.0;
  std::optional<double> p_min;
  std::size_t max_span_len = 10;
};

// Token indices, 0-based and inclusive.
struct SpanIndex {
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const SpanIndex&, const SpanIndex&) = default;
};

struct PredictedSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string text;

  friend bool operator==(const PredictedSpan&, const PredictedSpan&) = default;
};

struct Prediction {
  std::optional<PredictedSpan> answer;  // nullopt = no answer
  double probability = 0.0;       // confidence of whatever was returned
  double null_probability = 0.0;  // always P(no answer)

  bool is_null() const { return !answer.has_value(); }

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);

NullAwareDistributions augment_and_normalize(const SpanScores& scores, double bias);

// P(a = span) and P(a = no answer). Span indices are checked against N.
double span_probability(const NullAwareDistributions& dists, SpanIndex span);
double null_probability(const NullAwareDistributions& dists);
double probability(const NullAwareDistributions& dists, std::optional<SpanIndex> span);

// Highest-probability legal span (length <= max_span_len); earliest start,
// then earliest end, wins ties.
std::pair<SpanIndex, double> best_span(const NullAwareDistributions& dists,
                                       std::size_t max_span_len);

// Ties between the best span and null resolve to null.
Prediction decode(const SpanScores& scores, const Sentence& sentence, const DecodeParams& params);
Prediction decode(const SpanScores& scores, std::span<const Token> tokens,
                  const std::string& text, const DecodeParams& params);

// Converts a span prediction into null when its probability is below p_min.
Prediction apply_threshold(const Prediction& prediction, double p_min);

// Question ensemble: span predictions are grouped by their evaluation token bag
// and their probabilities summed; null predictions pool their null
// probabilities. The heaviest group wins (null first, then smallest text on
// ties) and its strongest member is returned.
Prediction ensemble(std::span<const std::pair<std::string, Prediction>> predictions);

}  // namespace slotshot
