#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "slotshot/answer_engine.hpp"
#include "slotshot/error.hpp"
#include "slotshot/random.hpp"

using namespace slotshot;

namespace {

Sentence words(std::size_t n) {
  std::string text;
  for (std::size_t i = 0; i < n; ++i) text += (i ? " w" : "w") + std::to_string(i);
  return make_sentence("d", 0, text);
}

// Exhaustive reference: every legal (i, j) plus null, straight from the
// definitions, without the engine's helpers.
struct Brute {
  bool null = true;
  std::size_t i = 0, j = 0;
  double best = 0.0;
  double null_p = 0.0;
};

Brute brute_force(const SpanScores& s, double b, std::size_t max_len) {
  const std::size_t n = s.size();
  auto dist = [&](const std::vector<double>& z) {
    std::vector<double> e(n + 1);
    double m = b;
    for (double v : z) m = std::max(m, v);
    double sum = 0;
    for (std::size_t k = 0; k < n; ++k) sum += e[k] = std::exp(z[k] - m);
    sum += e[n] = std::exp(b - m);
    for (double& v : e) v /= sum;
    return e;
  };
  const auto ps = dist(s.z_start), pe = dist(s.z_end);
  Brute out;
  out.null_p = ps[n] * pe[n];
  double best = -1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n && j - i + 1 <= max_len; ++j) {
      if (ps[i] * pe[j] > best) {
        best = ps[i] * pe[j];
        out.i = i;
        out.j = j;
      }
    }
  }
  out.best = best;
  out.null = !(best > out.null_p);
  return out;
}

}  // namespace

TEST_CASE("softmax of the augmented vector") {
  const auto d = augment_and_normalize({{2, 0}, {0, 2}}, 0.0);
  const double e2 = std::exp(2.0);
  CHECK(d.p_start[0] == doctest::Approx(e2 / (e2 + 2)).epsilon(1e-12));
  CHECK(d.p_start[0] == doctest::Approx(0.7870).epsilon(1e-4));
  CHECK(d.p_start[1] == doctest::Approx(0.1065).epsilon(1e-3));
  CHECK(d.p_start[2] == doctest::Approx(0.1065).epsilon(1e-3));
  CHECK(d.tokens() == 2);

  const auto half = augment_and_normalize({{0}, {0}}, 0.0);
  CHECK(half.p_start[0] == doctest::Approx(0.5));
  CHECK(half.p_start[1] == doctest::Approx(0.5));
}

TEST_CASE("span and null probabilities") {
  const auto d = augment_and_normalize({{2, 0}, {0, 2}}, 0.0);
  const double e2 = std::exp(2.0);
  const double hi = e2 / (e2 + 2), lo = 1 / (e2 + 2);
  CHECK(span_probability(d, {0, 1}) == doctest::Approx(hi * hi).epsilon(1e-12));
  CHECK(std::abs(span_probability(d, {0, 1}) - 0.6194) < 1e-3);
  CHECK(std::abs(null_probability(d) - 0.01134) < 1e-4);
  CHECK(probability(d, std::nullopt) == null_probability(d));
  CHECK(probability(d, SpanIndex{1, 1}) == doctest::Approx(lo * hi));
  CHECK_THROWS_AS(span_probability(d, {1, 0}), std::out_of_range);
  CHECK_THROWS_AS(span_probability(d, {0, 2}), std::out_of_range);

  const auto u = augment_and_normalize({{0}, {0}}, 0.0);
  CHECK(span_probability(u, {0, 0}) == doctest::Approx(0.25));
  CHECK(null_probability(u) == doctest::Approx(0.25));
}

TEST_CASE("decode examples") {
  const auto s = words(2);
  DecodeParams p;

  const auto low = decode({{-5, -5}, {-5, -5}}, s, p);
  CHECK(low.is_null());
  const double e = std::exp(-5.0);
  CHECK(low.null_probability == doctest::Approx(1 / ((1 + 2 * e) * (1 + 2 * e))).epsilon(1e-12));
  CHECK(low.probability == low.null_probability);

  const auto hit = decode({{2, 0}, {0, 2}}, s, p);
  REQUIRE_FALSE(hit.is_null());
  CHECK(hit.answer->start == 0);
  CHECK(hit.answer->end == 1);
  CHECK(hit.answer->text == "w0 w1");
  CHECK(std::abs(hit.probability - 0.6194) < 1e-3);

  p.p_min = 0.7;
  CHECK(decode({{2, 0}, {0, 2}}, s, p).is_null());
}

TEST_CASE("ties go to null") {
  // z == 0 everywhere on N = 1: span and null both 0.25.
  const auto pred = decode({{0}, {0}}, words(1), {});
  CHECK(pred.is_null());
  CHECK(pred.null_probability == doctest::Approx(0.25));
}

TEST_CASE("decode rejects bad input") {
  const auto s = words(3);
  CHECK_THROWS_AS(decode({{0, 0}, {0, 0}}, s, {}), LengthMismatchError);
  CHECK_THROWS_AS(decode({{0, NAN, 0}, {0, 0, 0}}, s, {}), InvalidScoresError);
  CHECK_THROWS_AS(augment_and_normalize({{}, {}}, 0.0), InvalidScoresError);
  CHECK_THROWS_AS(augment_and_normalize({{1}, {1, 2}}, 0.0), InvalidScoresError);
}

TEST_CASE("max_span_len bounds the search") {
  // Best unconstrained span is (0, 4); with L = 2 it is out of reach.
  SpanScores z{{5, -5, -5, -5, -5}, {-5, -5, -5, -5, 5}};
  DecodeParams p;
  p.bias = -10;
  CHECK(decode(z, words(5), p).answer->end == 4);
  p.max_span_len = 2;
  const auto short_pred = decode(z, words(5), p);
  REQUIRE_FALSE(short_pred.is_null());
  CHECK(short_pred.answer->end - short_pred.answer->start + 1 <= 2);
}

TEST_CASE("decode agrees with enumeration on random scores") {
  Rng rng(20240611);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.index(6);
    SpanScores z;
    for (std::size_t k = 0; k < n; ++k) {
      z.z_start.push_back(rng.unit() * 8 - 4);
      z.z_end.push_back(rng.unit() * 8 - 4);
    }
    DecodeParams p;
    p.bias = rng.unit() * 8 - 4;
    p.max_span_len = 1 + rng.index(6);
    const auto pred = decode(z, words(n), p);
    const auto ref = brute_force(z, p.bias, p.max_span_len);
    REQUIRE(pred.is_null() == ref.null);
    CHECK(std::abs(pred.null_probability - ref.null_p) < 1e-9);
    if (!ref.null) {
      CHECK(pred.answer->start == ref.i);
      CHECK(pred.answer->end == ref.j);
      CHECK(std::abs(pred.probability - ref.best) < 1e-9);
    }
  }
}

TEST_CASE("shift invariance") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.index(8);
    SpanScores z;
    for (std::size_t k = 0; k < n; ++k) {
      z.z_start.push_back(rng.unit() * 6 - 3);
      z.z_end.push_back(rng.unit() * 6 - 3);
    }
    const double b = rng.unit() * 6 - 3, c = rng.unit() * 200 - 100;
    SpanScores shifted = z;
    for (auto& v : shifted.z_start) v += c;
    for (auto& v : shifted.z_end) v += c;
    const auto a = decode(z, words(n), {b, std::nullopt, 10});
    const auto s = decode(shifted, words(n), {b + c, std::nullopt, 10});
    CHECK(a.answer == s.answer);
    CHECK(std::abs(a.probability - s.probability) < 1e-9);
    CHECK(std::abs(a.null_probability - s.null_probability) < 1e-9);
  }
}

TEST_CASE("raising p_min never revives a span") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.index(6);
    SpanScores z;
    for (std::size_t k = 0; k < n; ++k) {
      z.z_start.push_back(rng.unit() * 6 - 3);
      z.z_end.push_back(rng.unit() * 6 - 3);
    }
    bool was_null = false;
    for (double t = 0.0; t <= 1.0; t += 0.05) {
      DecodeParams p;
      p.p_min = t;
      const bool null = decode(z, words(n), p).is_null();
      CHECK_FALSE((was_null && !null));
      was_null = null;
    }
  }
}

TEST_CASE("apply_threshold") {
  Prediction span{PredictedSpan{0, 0, "x"}, 0.4, 0.1};
  CHECK(apply_threshold(span, 0.3) == span);
  const auto cut = apply_threshold(span, 0.5);
  CHECK(cut.is_null());
  CHECK(cut.null_probability == 0.1);
  CHECK(cut.probability == 0.1);
}

TEST_CASE("ensemble") {
  auto span = [](std::string text, double p, double null_p) {
    return Prediction{PredictedSpan{0, 0, std::move(text)}, p, null_p};
  };
  auto none = [](double null_p) { return Prediction{std::nullopt, null_p, null_p}; };

  SUBCASE("agreeing answers outweigh a confident null") {
    std::vector<std::pair<std::string, Prediction>> in = {
        {"q1", span("Princeton", 0.6, 0.1)}, {"q2", span("Princeton", 0.5, 0.2)}, {"q3", none(0.9)}};
    const auto out = ensemble(in);
    REQUIRE_FALSE(out.is_null());
    CHECK(out.answer->text == "Princeton");
  }
  SUBCASE("normalized text groups together") {
    std::vector<std::pair<std::string, Prediction>> in = {
        {"q1", span("the Princeton", 0.4, 0.1)}, {"q2", span("Princeton", 0.4, 0.2)},
        {"q3", span("Yale", 0.7, 0.1)}};
    CHECK(normalize_surface(ensemble(in).answer->text).find("princeton") != std::string::npos);
  }
  SUBCASE("null wins ties, then the smallest text") {
    std::vector<std::pair<std::string, Prediction>> tie = {{"q1", span("A", 0.5, 0.1)},
                                                           {"q2", none(0.5)}};
    CHECK(ensemble(tie).is_null());
    std::vector<std::pair<std::string, Prediction>> texts = {{"q1", span("b", 0.5, 0.1)},
                                                             {"q2", span("a", 0.5, 0.1)}};
    CHECK(ensemble(texts).answer->text == "a");
  }
  SUBCASE("singleton and unanimous null") {
    std::vector<std::pair<std::string, Prediction>> one = {{"q", span("x", 0.3, 0.2)}};
    CHECK(ensemble(one) == one[0].second);
    std::vector<std::pair<std::string, Prediction>> nulls = {
        {"a", none(0.8)}, {"b", none(0.6)}, {"c", none(0.7)}};
    CHECK(ensemble(nulls).is_null());
  }
  SUBCASE("order does not matter") {
    std::vector<std::pair<std::string, Prediction>> in = {
        {"q1", span("x", 0.3, 0.2)}, {"q2", span("y", 0.31, 0.2)}, {"q3", span("x", 0.02, 0.5)},
        {"q4", none(0.6)}};
    const auto ref = ensemble(in);
    std::sort(in.begin(), in.end(), [](auto& a, auto& b) { return a.first < b.first; });
    do {
      CHECK(ensemble(in) == ref);
    } while (std::next_permutation(in.begin(), in.end(),
                                   [](auto& a, auto& b) { return a.first < b.first; }));
  }
  SUBCASE("empty input") {
    std::vector<std::pair<std::string, Prediction>> empty;
    CHECK_THROWS(ensemble(empty));
  }
}
