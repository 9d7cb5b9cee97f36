// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Each check carries its own runtime budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fixture.hpp"
#include "metric_golden.hpp"
#include "mock_scores.hpp"
#include "slotshot/answer_engine.hpp"
#include "slotshot/evaluation.hpp"
#include "slotshot/experiments.hpp"
#include "slotshot/external_scorer.hpp"
#include "slotshot/pipeline.hpp"
#include "slotshot/random.hpp"
#include "slotshot/scorers.hpp"
#include "template_cases.hpp"

using namespace slotshot;
using Clock = std::chrono::steady_clock;

namespace {

struct Result {
  bool ok = true;
  std::string detail;
};

Result fail(std::string why) { return {false, std::move(why)}; }

int g_failures = 0;

void criterion(const char* name, double budget_s, const std::function<Result()>& body) {
  const auto t0 = Clock::now();
  Result r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r = fail(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (budget_s > 0 && secs >= budget_s) {
    r.ok = false;
    r.detail += (r.detail.empty() ? "" : "; ") + std::string("over time budget");
  }
  if (!r.ok) ++g_failures;
  std::printf("%s  %-28s %7.2fs  %s\n", r.ok ? "PASS" : "FAIL", name, secs, r.detail.c_str());
  std::fflush(stdout);
}

Sentence words(std::size_t n) {
  std::string text;
  for (std::size_t i = 0; i < n; ++i) text += (i ? " w" : "w") + std::to_string(i);
  return make_sentence("d", 0, text);
}

SpanScores random_scores(Rng& rng, std::size_t n, double spread) {
  SpanScores z;
  for (std::size_t k = 0; k < n; ++k) {
    z.z_start.push_back((rng.unit() * 2 - 1) * spread);
    z.z_end.push_back((rng.unit() * 2 - 1) * spread);
  }
  return z;
}

// Softmax over [z; b] straight from the definition.
std::vector<double> reference_dist(const std::vector<double>& z, double b) {
  double m = b;
  for (double v : z) m = std::max(m, v);
  std::vector<double> e;
  double sum = 0;
  for (double v : z) sum += e.emplace_back(std::exp(v - m));
  sum += e.emplace_back(std::exp(b - m));
  for (double& v : e) v /= sum;
  return e;
}

// ---- criteria --------------------------------------------------------------

Result decode_oracle() {
  Rng rng(1001);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.index(6);
    const auto z = random_scores(rng, n, 4);
    DecodeParams p;
    p.bias = rng.unit() * 8 - 4;
    p.max_span_len = 1 + rng.index(6);
    const auto ps = reference_dist(z.z_start, p.bias), pe = reference_dist(z.z_end, p.bias);
    const double null_p = ps[n] * pe[n];
    double best = -1;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n && j - i < p.max_span_len; ++j) {
        if (ps[i] * pe[j] > best) {
          best = ps[i] * pe[j];
          bi = i;
          bj = j;
        }
      }
    }
    const bool want_null = !(best > null_p);
    const auto got = decode(z, words(n), p);
    if (got.is_null() != want_null) return fail("null decision differs at trial " + std::to_string(trial));
    if (std::abs(got.null_probability - null_p) > 1e-9) return fail("null probability off");
    if (!want_null) {
      if (got.answer->start != bi || got.answer->end != bj) {
        return fail("argmax differs at trial " + std::to_string(trial));
      }
      if (std::abs(got.probability - best) > 1e-9) return fail("span probability off");
    } else if (std::abs(got.probability - null_p) > 1e-9) {
      return fail("null confidence off");
    }
    ++checked;
  }
  return {true, std::to_string(checked) + " random cases"};
}

Result softmax_augmentation() {
  Rng rng(2002);
  double worst_sum = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.index(40);
    const auto z = random_scores(rng, n, 30);
    const double b = rng.unit() * 60 - 30;
    const auto d = augment_and_normalize(z, b);
    double s1 = 0, s2 = 0;
    for (double v : d.p_start) s1 += v;
    for (double v : d.p_end) s2 += v;
    worst_sum = std::max({worst_sum, std::abs(s1 - 1), std::abs(s2 - 1)});

    const std::size_t m = 1 + rng.index(8);
    const auto w = random_scores(rng, m, 4);
    const double bias = rng.unit() * 8 - 4, c = rng.unit() * 200 - 100;
    SpanScores shifted = w;
    for (auto& v : shifted.z_start) v += c;
    for (auto& v : shifted.z_end) v += c;
    const auto a = decode(w, words(m), {bias, std::nullopt, 10});
    const auto s = decode(shifted, words(m), {bias + c, std::nullopt, 10});
    if (a.answer != s.answer) return fail("shift changed the answer at trial " + std::to_string(trial));
    if (std::abs(a.probability - s.probability) > 1e-9 ||
        std::abs(a.null_probability - s.null_probability) > 1e-9) {
      return fail("shift changed probabilities at trial " + std::to_string(trial));
    }
  }
  if (worst_sum > 1e-9) return fail("distribution sum off by " + std::to_string(worst_sum));
  char buf[64];
  std::snprintf(buf, sizeof(buf), "max |sum - 1| = %.1e", worst_sum);
  return {true, buf};
}

Result threshold_monotonicity() {
  Rng rng(3003);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<JudgedPrediction> items;
    const std::size_t n = 1 + rng.index(30);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> gold;
      if (rng.unit() < 0.6) gold.push_back("g" + std::to_string(rng.index(3)));
      Prediction p;
      p.null_probability = rng.unit();
      if (rng.unit() < 0.25) {
        p.probability = p.null_probability;
      } else {
        p.answer = PredictedSpan{0, 0, "g" + std::to_string(rng.index(3))};
        p.probability = rng.unit();
      }
      items.push_back({p, gold});
    }
    const auto curve = pr_curve(items);
    for (std::size_t i = 1; i < curve.size(); ++i) {
      if (curve[i].threshold <= curve[i - 1].threshold) return fail("thresholds not increasing");
      if (curve[i].recall > curve[i - 1].recall) {
        return fail("recall rose along the curve at trial " + std::to_string(trial));
      }
    }

    const std::size_t m = 1 + rng.index(6);
    const auto z = random_scores(rng, m, 3);
    const double bias = rng.unit() * 4 - 2;
    bool was_null = false;
    for (int step = 0; step <= 20; ++step) {
      DecodeParams p;
      p.bias = bias;
      p.p_min = step / 20.0;
      const bool null = decode(z, words(m), p).is_null();
      if (was_null && !null) return fail("raising p_min revived a span at trial " + std::to_string(trial));
      was_null = null;
    }
  }
  return {true, "1000 prediction sets"};
}

Result metric_oracle() {
  const std::string path = SLOTSHOT_TEST_DATA "/metric_golden.json";
  const auto n = golden::case_count(path);
  if (n != 20) return fail("golden file holds " + std::to_string(n) + " cases");
  const auto failures = golden::check_metric_golden(path);
  if (!failures.empty()) return fail(failures.front());
  return {true, "20 golden cases"};
}

const fixture::Dataset& desk_dataset() {
  static const auto d = fixture::make_dataset(1, 500, 30);
  return d;
}

std::vector<std::string> folded(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& t : tokenize(text)) out.push_back(to_lower(t.text));
  return out;
}

Result negative_safety() {
  const auto& d = desk_dataset();
  if (d.negatives.size() < 10000) {
    return fail("only " + std::to_string(d.negatives.size()) + " negatives generated");
  }
  // Every known value of (relation, entity), aligned or not.
  std::map<std::pair<std::string, std::string>, std::vector<std::vector<std::string>>> gold;
  for (const auto& f : d.corpus.facts) gold[{f.relation_id, f.subject_entity_id}].push_back(folded(f.object_text));
  for (const auto& inst : d.instances) {
    for (const auto& a : inst.answers) gold[{inst.relation_id, inst.entity.id}].push_back(folded(a.text));
  }
  std::size_t leaks = 0;
  for (const auto& e : d.negatives) {
    std::vector<std::string> toks;
    for (const auto& t : e.sentence.tokens) toks.push_back(to_lower(t.text));
    for (const auto& ans : gold[{e.relation_id, e.entity_id}]) {
      if (ans.empty() || ans.size() > toks.size()) continue;
      for (std::size_t i = 0; i + ans.size() <= toks.size(); ++i) {
        if (std::equal(ans.begin(), ans.end(), toks.begin() + i)) {
          ++leaks;
          break;
        }
      }
    }
  }
  if (leaks) return fail(std::to_string(leaks) + " negatives contain a gold answer");
  return {true, std::to_string(d.negatives.size()) + " negatives, 0 leaks"};
}

template <typename Key>
bool disjoint(const std::vector<RCExample>& a, const std::vector<RCExample>& b, Key key) {
  std::set<std::string> seen;
  for (const auto& x : a) seen.insert(key(x));
  return std::none_of(b.begin(), b.end(), [&](const RCExample& x) { return seen.count(key(x)); });
}

bool balanced(const std::vector<RCExample>& xs) {
  const auto pos = std::count_if(xs.begin(), xs.end(),
                                 [](const RCExample& e) { return e.polarity == Polarity::kPositive; });
  return 2 * static_cast<std::size_t>(pos) == xs.size();
}

Result split_disjointness() {
  const auto& d = desk_dataset();
  const auto entity = [](const RCExample& e) { return e.entity_id; };
  const auto tmpl = [](const RCExample& e) { return e.template_id; };
  const auto relation = [](const RCExample& e) { return e.relation_id; };
  std::size_t folds_checked = 0;
  for (auto kind : {SplitKind::kUnseenEntities, SplitKind::kUnseenTemplates, SplitKind::kUnseenRelations}) {
    auto spec = SplitSpec::desk_defaults(kind);
    spec.seed = 77;
    spec.fold_count = 10;
    std::vector<Split> folds;
    std::function<std::string(const RCExample&)> key;
    switch (kind) {
      case SplitKind::kUnseenEntities:
        folds = split_unseen_entities(d.all, spec);
        key = entity;
        break;
      case SplitKind::kUnseenTemplates:
        folds = split_unseen_templates(d.all, d.corpus.templates, spec);
        key = tmpl;
        break;
      case SplitKind::kUnseenRelations:
        folds = split_unseen_relations(d.all, spec);
        key = relation;
        break;
    }
    if (folds.size() != 10) return fail(to_string(kind) + ": expected 10 folds");
    for (std::size_t f = 0; f < folds.size(); ++f) {
      const auto& s = folds[f];
      const std::string where = to_string(kind) + " fold " + std::to_string(f);
      if (s.train.empty() || s.test.empty()) return fail(where + ": empty split");
      if (!disjoint(s.train, s.test, key) || !disjoint(s.train, s.dev, key) ||
          !disjoint(s.dev, s.test, key)) {
        return fail(where + ": train/dev/test overlap");
      }
      for (const auto* part : {&s.train, &s.dev, &s.test, &s.seen_test}) {
        if (!balanced(*part)) return fail(where + ": not 1:1");
      }
      ++folds_checked;
    }
  }
  return {true, std::to_string(folds_checked) + " folds"};
}

Result template_acceptance() {
  std::size_t n = 0;
  for (const auto& c : cases::acceptance_cases()) {
    const auto t = evaluate_template(cases::candidate(), cases::outcomes(c.responses));
    const bool verified = t.status == TemplateStatus::kVerified;
    if (verified != c.verified) return fail("wrong verdict: " + c.name);
    ++n;
  }
  if (n != 12) return fail("expected 12 cases");
  return {true, "12 boundary cases"};
}

Result end_to_end() {
  const auto& d = desk_dataset();
  auto spec = SplitSpec::desk_defaults(SplitKind::kUnseenEntities);
  spec.seed = 2024;
  const auto split = split_unseen_entities(d.all, spec).front();
  const auto gold = gold_index(split.test);
  auto f1_of = [&](const char* scorer_name) {
    auto scorer = make_scorer(scorer_name, 99);
    const auto preds = predict_examples(*scorer, split.test, DecodeParams{}, 2);
    const auto records = plain_records(split.test, preds);
    return score_records(records, gold).f1;
  };
  const double lexical = f1_of("lexical");
  const double random_ne = f1_of("random-ne");
  char buf[128];
  std::snprintf(buf, sizeof(buf), "lexical F1 %.3f, Random NE F1 %.3f on %zu test examples", lexical,
                random_ne, split.test.size());
  if (lexical < 0.60 || random_ne > 0.30) return fail(buf);
  return {true, buf};
}

Result ensemble_cases() {
  auto span = [](std::string text, double p, double null_p) {
    return Prediction{PredictedSpan{0, 0, std::move(text)}, p, null_p};
  };
  auto none = [](double null_p) { return Prediction{std::nullopt, null_p, null_p}; };
  using Set = std::vector<std::pair<std::string, Prediction>>;

  const std::vector<Set> agreeing = {
      {{"q1", span("Princeton", 0.6, 0.1)}, {"q2", span("Princeton", 0.5, 0.2)}, {"q3", none(0.9)}},
      {{"q1", span("1925", 0.45, 0.3)}, {"q2", none(0.85)}, {"q3", span("1925", 0.45, 0.3)}},
      {{"q1", none(0.95)}, {"q2", span("the carpenter", 0.5, 0.2)}, {"q3", span("carpenter", 0.5, 0.2)}},
  };
  for (auto set : agreeing) {
    const std::string want = normalize_surface(set[0].second.answer ? set[0].second.answer->text
                                                                    : set[1].second.answer->text);
    std::sort(set.begin(), set.end(), [](auto& a, auto& b) { return a.first < b.first; });
    do {
      const auto out = ensemble(set);
      if (out.is_null()) return fail("confident null outvoted two agreeing answers");
      const auto bag = normalize_answer_tokens(out.answer->text);
      if (bag != normalize_answer_tokens(want)) return fail("wrong agreed answer: " + out.answer->text);
    } while (std::next_permutation(set.begin(), set.end(),
                                   [](auto& a, auto& b) { return a.first < b.first; }));
  }
  const Set all_span = {{"a", span("Oslo", 0.7, 0.1)}, {"b", span("Oslo", 0.4, 0.3)}, {"c", span("Oslo", 0.9, 0.05)}};
  const auto u = ensemble(all_span);
  if (u.is_null() || u.answer->text != "Oslo") return fail("unanimous span lost");
  const Set all_null = {{"a", none(0.8)}, {"b", none(0.6)}, {"c", none(0.7)}};
  if (!ensemble(all_null).is_null()) return fail("unanimous null lost");
  return {true, "3 agreement and 2 unanimity cases"};
}

Result external_protocol() {
  using namespace std::chrono_literals;
  ExternalScorer scorer(parse_endpoint(std::string("cmd:") + SLOTSHOT_MOCK_SCORER + " --shuffle 23"), 30s);
  const std::vector<std::string> q = {"Where", "was", "he", "born", "?"};
  std::vector<std::vector<std::string>> sentences;
  std::vector<std::future<SpanScores>> pending;
  for (std::size_t i = 0; i < 1000; ++i) {
    std::vector<std::string> s;
    for (std::size_t k = 0; k < 1 + i % 13; ++k) s.push_back("t" + std::to_string(i * 17 + k));
    sentences.push_back(s);
    pending.push_back(scorer.submit(q, sentences.back()));
  }
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    const auto got = scorer.await(pending[i]);
    const auto want = mock::scores_for(q, sentences[i]);
    if (got.z_start != want.z_start || got.z_end != want.z_end) ++mismatches;
  }
  if (mismatches) return fail(std::to_string(mismatches) + " mismatched responses");
  return {true, "1000 pipelined requests, 0 mismatches"};
}

}  // namespace

int main() {
  criterion("decode-oracle", 10, decode_oracle);
  criterion("softmax-augmentation", 5, softmax_augmentation);
  criterion("threshold-monotonicity", 10, threshold_monotonicity);
  criterion("metric-oracle", 0, metric_oracle);
  criterion("negative-safety", 30, negative_safety);
  criterion("split-disjointness", 60, split_disjointness);
  criterion("template-acceptance", 0, template_acceptance);
  criterion("end-to-end-separation", 120, end_to_end);
  criterion("ensemble", 0, ensemble_cases);
  criterion("external-protocol", 0, external_protocol);
  std::printf("%d failure(s)\n", g_failures);
  return g_failures ? 1 : 0;
}
