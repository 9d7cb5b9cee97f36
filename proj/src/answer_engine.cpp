#include "slotshot/answer_engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "slotshot/error.hpp"
#include "slotshot/evaluation.hpp"

namespace slotshot {

void validate(const SpanScores& scores) {
  if (scores.z_start.empty()) throw InvalidScoresError("score vectors are empty");
  if (scores.z_start.size() != scores.z_end.size()) {
    throw InvalidScoresError("z_start and z_end differ in length");
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(scores.z_start.begin(), scores.z_start.end(), finite) ||
      !std::all_of(scores.z_end.begin(), scores.z_end.end(), finite)) {
    throw InvalidScoresError("score vectors contain non-finite values");
  }
}

std::vector<double> softmax(std::span<const double> logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

NullAwareDistributions augment_and_normalize(const SpanScores& scores, double bias) {
  validate(scores);
  if (!std::isfinite(bias)) throw InvalidScoresError("bias is not finite");
  auto augmented = [bias](const std::vector<double>& z) {
    std::vector<double> logits(z);
    logits.push_back(bias);
    return softmax(logits);
  };
  return {augmented(scores.z_start), augmented(scores.z_end)};
}

double span_probability(const NullAwareDistributions& dists, SpanIndex span) {
  const auto n = dists.tokens();
  if (span.start > span.end || span.end >= n) {
    throw std::out_of_range("span (" + std::to_string(span.start) + ", " +
                            std::to_string(span.end) + ") outside sentence of " +
                            std::to_string(n) + " tokens");
  }
  return dists.p_start[span.start] * dists.p_end[span.end];
}

double null_probability(const NullAwareDistributions& dists) {
  return dists.p_start.back() * dists.p_end.back();
}

double probability(const NullAwareDistributions& dists, std::optional<SpanIndex> span) {
  return span ? span_probability(dists, *span) : null_probability(dists);
}

std::pair<SpanIndex, double> best_span(const NullAwareDistributions& dists,
                                       std::size_t max_span_len) {
  const auto n = dists.tokens();
  SpanIndex best{0, 0};
  double best_p = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t last = std::min(n - 1, i + max_span_len - 1);
    for (std::size_t j = i; j <= last; ++j) {
      const double p = dists.p_start[i] * dists.p_end[j];
      if (p > best_p) {
        best_p = p;
        best = {i, j};
      }
    }
  }
  return {best, best_p};
}

Prediction decode(const SpanScores& scores, std::span<const Token> tokens,
                  const std::string& text, const DecodeParams& params) {
  if (params.max_span_len < 1) throw DataError("max_span_len must be >= 1");
  if (scores.z_start.size() != tokens.size() || scores.z_end.size() != tokens.size()) {
    throw LengthMismatchError("scores cover " + std::to_string(scores.z_start.size()) +
                              " tokens, sentence has " + std::to_string(tokens.size()));
  }
  const auto dists = augment_and_normalize(scores, params.bias);
  const auto [span, p_span] = best_span(dists, params.max_span_len);
  Prediction pred;
  pred.null_probability = null_probability(dists);
  const bool below_min = params.p_min && p_span < *params.p_min;
  if (pred.null_probability >= p_span || below_min) {
    pred.probability = pred.null_probability;
    return pred;
  }
  const auto begin = tokens[span.start].start;
  const auto end = tokens[span.end].end;
  pred.answer = PredictedSpan{span.start, span.end, text.substr(begin, end - begin)};
  pred.probability = p_span;
  return pred;
}

Prediction decode(const SpanScores& scores, const Sentence& sentence, const DecodeParams& params) {
  return decode(scores, sentence.tokens, sentence.text, params);
}

Prediction apply_threshold(const Prediction& prediction, double p_min) {
  if (prediction.is_null() || prediction.probability >= p_min) return prediction;
  Prediction out;
  out.null_probability = prediction.null_probability;
  out.probability = prediction.null_probability;
  return out;
}

Prediction ensemble(std::span<const std::pair<std::string, Prediction>> predictions) {
  if (predictions.empty()) throw DataError("ensemble of zero predictions");

  // Total order over members so the representative does not depend on input order.
  auto stronger = [](const Prediction& a, const Prediction& b) {
    auto key = [](const Prediction& p) {
      return std::make_tuple(-p.probability, p.answer ? p.answer->text : std::string(),
                             p.answer ? p.answer->start : 0, p.answer ? p.answer->end : 0,
                             -p.null_probability);
    };
    return key(a) < key(b);
  };

  struct Group {
    std::vector<double> mass;
    double total = 0.0;
    const Prediction* best = nullptr;
  };
  // Answers that evaluate as the same string vote together.
  auto group_key = [](const std::string& text) { return join(normalize_answer_tokens(text), " "); };
  Group null_group;
  std::map<std::string, Group> span_groups;
  for (const auto& [question_id, pred] : predictions) {
    Group& g = pred.is_null() ? null_group : span_groups[group_key(pred.answer->text)];
    g.mass.push_back(pred.is_null() ? pred.null_probability : pred.probability);
    if (!g.best || stronger(pred, *g.best)) g.best = &pred;
  }
  // Summing in sorted order makes the totals bit-identical under permutation.
  auto settle = [](Group& g) {
    std::sort(g.mass.begin(), g.mass.end());
    for (double m : g.mass) g.total += m;
  };
  settle(null_group);
  for (auto& [text, g] : span_groups) settle(g);

  const Group* winner = null_group.best ? &null_group : nullptr;
  // std::map iterates in ascending text order, so strict > keeps the
  // smallest text among equal sums.
  for (const auto& [text, g] : span_groups) {
    if (!winner || g.total > winner->total) winner = &g;
  }
  return *winner->best;
}

}  // namespace slotshot
