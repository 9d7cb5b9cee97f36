#include "slotshot/evaluation.hpp"

#include <algorithm>
#include <set>

namespace slotshot {
namespace {

bool is_ignored_word(std::string_view w) {
  return w == "a" || w == "an" || w == "the" || w == "and";
}

TokenBag union_bag(std::span<const std::string> gold) {
  TokenBag all;
  for (const auto& g : gold) {
    auto bag = normalize_answer_tokens(g);
    all.insert(all.end(), bag.begin(), bag.end());
  }
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

TokenBag normalize_answer_tokens(std::string_view text) {
  TokenBag bag;
  for (const auto& tok : tokenize(text)) {
    if (is_punctuation_token(tok.text)) continue;
    auto folded = to_lower(tok.text);
    if (is_ignored_word(folded)) continue;
    bag.push_back(std::move(folded));
  }
  std::sort(bag.begin(), bag.end());
  return bag;
}

OverlapScore overlap_prf(const TokenBag& predicted, const TokenBag& gold) {
  if (predicted.empty() && gold.empty()) return {1.0, 1.0, 1.0};
  if (predicted.empty() || gold.empty()) return {0.0, 0.0, 0.0};
  TokenBag common;
  std::set_intersection(predicted.begin(), predicted.end(), gold.begin(), gold.end(),
                        std::back_inserter(common));
  if (common.empty()) return {0.0, 0.0, 0.0};
  OverlapScore s;
  s.precision = static_cast<double>(common.size()) / static_cast<double>(predicted.size());
  s.recall = static_cast<double>(common.size()) / static_cast<double>(gold.size());
  s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

double best_overlap_f1(std::string_view predicted, std::span<const std::string> gold) {
  const auto bag = normalize_answer_tokens(predicted);
  double best = overlap_prf(bag, union_bag(gold)).f1;
  for (const auto& g : gold) best = std::max(best, overlap_prf(bag, normalize_answer_tokens(g)).f1);
  return best;
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::kTruePositive: return "TP";
    case Outcome::kFalsePositive: return "FP";
    case Outcome::kFalseNegative: return "FN";
    case Outcome::kTrueNegative: return "TN";
  }
  return "?";
}

bool answer_matches(std::string_view predicted, std::span<const std::string> gold) {
  if (gold.empty()) return false;
  const auto bag = normalize_answer_tokens(predicted);
  if (bag.empty()) return false;
  for (const auto& g : gold) {
    if (normalize_answer_tokens(g) == bag) return true;
  }
  return union_bag(gold) == bag;
}

InstanceJudgment judge_instance(const Prediction& prediction,
                                std::span<const std::string> gold_answers) {
  InstanceJudgment j;
  j.confidence = prediction.probability;
  if (prediction.is_null()) {
    j.outcome = gold_answers.empty() ? Outcome::kTrueNegative : Outcome::kFalseNegative;
    return j;
  }
  j.predicted_text = prediction.answer->text;
  j.outcome = answer_matches(prediction.answer->text, gold_answers) ? Outcome::kTruePositive
                                                                    : Outcome::kFalsePositive;
  return j;
}

InstanceJudgment judge_instance(const Prediction& prediction,
                                std::span<const AnswerSpan> gold_answers) {
  const auto texts = answer_texts(gold_answers);
  return judge_instance(prediction, std::span<const std::string>(texts));
}

MetricsReport report_from_counts(const Counts& c) {
  MetricsReport r;
  r.counts = c;
  r.precision = (c.tp + c.fp) == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  r.recall = (c.tp + c.fn) == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  r.f1 = (r.precision + r.recall) == 0.0 ? 0.0
                                         : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

MetricsReport aggregate_metrics(std::span<const InstanceJudgment> judgments) {
  Counts c;
  for (const auto& j : judgments) {
    switch (j.outcome) {
      case Outcome::kTruePositive: ++c.tp; break;
      case Outcome::kFalsePositive: ++c.fp; break;
      case Outcome::kFalseNegative: ++c.fn; break;
      case Outcome::kTrueNegative: ++c.tn; break;
    }
  }
  return report_from_counts(c);
}

std::vector<CurvePoint> pr_curve(std::span<const JudgedPrediction> items,
                                 std::optional<std::vector<double>> thresholds) {
  std::vector<double> ts;
  if (thresholds) {
    ts = *thresholds;
  } else {
    for (const auto& item : items) {
      if (!item.prediction.is_null()) ts.push_back(item.prediction.probability);
    }
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  // Thresholding only ever turns a span into null, so each item has two
  // possible judgments; compute both once.
  struct Judged {
    Outcome kept;
    Outcome suppressed;
    bool is_span;
    double probability;
  };
  std::vector<Judged> judged;
  judged.reserve(items.size());
  for (const auto& item : items) {
    const std::span<const std::string> gold(item.gold);
    const auto& p = item.prediction;
    judged.push_back({judge_instance(p, gold).outcome,
                      judge_instance(apply_threshold(p, 2.0), gold).outcome, !p.is_null(),
                      p.probability});
  }

  std::vector<CurvePoint> curve;
  curve.reserve(ts.size());
  for (double t : ts) {
    Counts c;
    for (const auto& j : judged) {
      const Outcome o = (j.is_span && j.probability < t) ? j.suppressed : j.kept;
      switch (o) {
        case Outcome::kTruePositive: ++c.tp; break;
        case Outcome::kFalsePositive: ++c.fp; break;
        case Outcome::kFalseNegative: ++c.fn; break;
        case Outcome::kTrueNegative: ++c.tn; break;
      }
    }
    const auto r = report_from_counts(c);
    curve.push_back({t, r.precision, r.recall});
  }
  return curve;
}

std::vector<std::string> answer_texts(std::span<const AnswerSpan> spans) {
  std::vector<std::string> out;
  out.reserve(spans.size());
  for (const auto& s : spans) out.push_back(s.text);
  return out;
}

}  // namespace slotshot
