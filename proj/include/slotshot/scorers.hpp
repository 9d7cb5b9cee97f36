#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slotshot/answer_engine.hpp"

namespace slotshot {

// Produces raw start/end confidences for every sentence token.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual SpanScores score(std::span<const std::string> question,
                           std::span<const std::string> sentence) = 0;

  // Whether one instance may serve concurrent callers.
  virtual bool shareable() const { return true; }
};

// Calls the scorer and enforces the contract: N finite entries per vector.
// Contract violations surface as ScorerError.
SpanScores checked_score(Scorer& scorer, std::span<const std::string> question,
                         std::span<const std::string> sentence);

struct NamedEntityCandidate {
  std::size_t token_start = 0;
  std::size_t token_end = 0;
  std::string text;

  friend bool operator==(const NamedEntityCandidate&, const NamedEntityCandidate&) = default;
};

// Maximal runs of capitalized tokens. A run consisting only of the
// sentence-initial token is skipped.
std::vector<NamedEntityCandidate> named_entity_candidates(std::span<const std::string> sentence);

// Saturation magnitude used to force a discrete decode outcome.
inline constexpr double kForceMagnitude = 20.0;

// Scores that decode (bias 0) to exactly [start, end], or to null when
// `span` is empty.
SpanScores forced_scores(std::size_t n, std::optional<std::pair<std::size_t, std::size_t>> span);

// Random NE baseline: a named entity of the sentence not appearing in the
// question, chosen uniformly under `seed`; null when none survives.
SpanScores random_ne_score(std::span<const std::string> question,
                           std::span<const std::string> sentence, std::uint64_t seed);

// Deterministic lexical stand-in for a trained reader: candidate runs of the
// answer type hinted by the wh-word are scored by their proximity to
// question content words.
SpanScores lexical_overlap_score(std::span<const std::string> question,
                                 std::span<const std::string> sentence);

class RandomNeScorer : public Scorer {
 public:
  explicit RandomNeScorer(std::uint64_t seed) : seed_(seed) {}
  SpanScores score(std::span<const std::string> question,
                   std::span<const std::string> sentence) override;

 private:
  std::uint64_t seed_;
};

class LexicalScorer : public Scorer {
 public:
  SpanScores score(std::span<const std::string> question,
                   std::span<const std::string> sentence) override {
    return lexical_overlap_score(question, sentence);
  }
};

// Parses "random-ne", "lexical" or "external:<address>".
std::unique_ptr<Scorer> make_scorer(std::string_view spec, std::uint64_t seed);

}  // namespace slotshot
