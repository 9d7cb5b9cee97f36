#include "slotshot/scorers.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "slotshot/error.hpp"
#include "slotshot/external_scorer.hpp"
#include "slotshot/random.hpp"
#include "slotshot/text.hpp"

namespace slotshot {

SpanScores checked_score(Scorer& scorer, std::span<const std::string> question,
                         std::span<const std::string> sentence) {
  auto scores = scorer.score(question, sentence);
  if (scores.z_start.size() != sentence.size() || scores.z_end.size() != sentence.size()) {
    throw ResponseLengthError("scorer returned " + std::to_string(scores.z_start.size()) + "/" +
                              std::to_string(scores.z_end.size()) + " scores for " +
                              std::to_string(sentence.size()) + " tokens");
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(scores.z_start.begin(), scores.z_start.end(), finite) ||
      !std::all_of(scores.z_end.begin(), scores.z_end.end(), finite)) {
    throw MalformedResponseError("scorer returned non-finite scores");
  }
  return scores;
}

std::vector<NamedEntityCandidate> named_entity_candidates(std::span<const std::string> sentence) {
  std::vector<NamedEntityCandidate> out;
  std::size_t i = 0;
  while (i < sentence.size()) {
    if (!is_capitalized(sentence[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < sentence.size() && is_capitalized(sentence[j + 1])) ++j;
    if (!(i == 0 && j == 0)) {
      std::vector<std::string> words(sentence.begin() + static_cast<std::ptrdiff_t>(i),
                                     sentence.begin() + static_cast<std::ptrdiff_t>(j) + 1);
      out.push_back({i, j, join(words, " ")});
    }
    i = j + 1;
  }
  return out;
}

SpanScores forced_scores(std::size_t n, std::optional<std::pair<std::size_t, std::size_t>> span) {
  SpanScores s{std::vector<double>(n, -kForceMagnitude), std::vector<double>(n, -kForceMagnitude)};
  if (span) {
    s.z_start.at(span->first) = kForceMagnitude;
    s.z_end.at(span->second) = kForceMagnitude;
  }
  return s;
}

SpanScores random_ne_score(std::span<const std::string> question,
                           std::span<const std::string> sentence, std::uint64_t seed) {
  std::vector<std::string> folded_question;
  for (const auto& q : question) folded_question.push_back(to_lower(q));

  std::vector<NamedEntityCandidate> survivors;
  for (auto& c : named_entity_candidates(sentence)) {
    std::vector<std::string> words;
    for (std::size_t k = c.token_start; k <= c.token_end; ++k) words.push_back(to_lower(sentence[k]));
    if (!find_sequence(folded_question, words)) survivors.push_back(std::move(c));
  }
  if (survivors.empty()) return forced_scores(sentence.size(), std::nullopt);
  Rng rng(mix_seed(seed, "random-ne"));
  const auto& pick = survivors[rng.index(survivors.size())];
  return forced_scores(sentence.size(), std::make_pair(pick.token_start, pick.token_end));
}

SpanScores RandomNeScorer::score(std::span<const std::string> question,
                                 std::span<const std::string> sentence) {
  const auto salt = join(question, " ") + "\n" + join(sentence, " ");
  return random_ne_score(question, sentence, mix_seed(seed_, salt));
}

namespace {

const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> words = {
      "who", "whom", "whose", "what", "when", "where", "which", "why", "how", "is", "was",
      "are", "were", "be", "been", "being", "did", "do", "does", "has", "have", "had",
      "a", "an", "the", "of", "in", "on", "at", "to", "for", "from", "by", "with", "as",
      "and", "or", "'s", "his", "her", "its", "their", "he", "she", "it", "they", "this",
      "that", "these", "those", "into", "about", "after", "before", "during", "under",
      "over", "than", "then", "also", "there", "which", "while", "can", "could", "would",
      "will", "not", "no", "any", "some", "many", "much", "name", "called"};
  return words;
}

bool is_stopword(const std::string& folded) { return stopwords().count(folded) > 0; }

// Loose morphological match: "graduate"/"graduated", "marry"/"married".
bool stem_match(const std::string& a, const std::string& b) {
  if (a == b) return true;
  const std::size_t shorter = std::min(a.size(), b.size());
  if (shorter < 3) return false;
  std::size_t common = 0;
  while (common < shorter && a[common] == b[common]) ++common;
  return common >= std::max<std::size_t>(4, shorter > 2 ? shorter - 2 : 0);
}

enum class AnswerType { kCapitalized, kNumeric, kNominal };

constexpr double kLowScore = -8.0;
constexpr double kScale = 6.0;
constexpr double kCueThreshold = 0.9;
constexpr double kEntityBonus = 0.2;
constexpr double kCueWeight = 1.5;
constexpr double kTrailingCuePenalty = 0.5;

// Head nouns after what/which that announce a proper-noun or numeric answer.
AnswerType head_noun_type(const std::string& head) {
  static const std::unordered_set<std::string> proper = {
      "university", "college", "school", "city", "town", "country", "company", "organization",
      "team", "club", "party", "publisher", "award", "prize", "branch", "religion", "faith",
      "language", "languages", "person", "house", "nation", "state"};
  static const std::unordered_set<std::string> numeric = {"year", "date", "decade", "age"};
  if (proper.count(head)) return AnswerType::kCapitalized;
  if (numeric.count(head)) return AnswerType::kNumeric;
  return AnswerType::kNominal;
}

AnswerType answer_type(const std::vector<std::string>& folded_question) {
  for (std::size_t i = 0; i < folded_question.size(); ++i) {
    const auto& w = folded_question[i];
    const std::string next = i + 1 < folded_question.size() ? folded_question[i + 1] : "";
    if (w == "who" || w == "whom" || w == "whose" || w == "where") return AnswerType::kCapitalized;
    if (w == "when") return AnswerType::kNumeric;
    if (w == "how") {
      if (next == "many" || next == "much" || next == "old" || next == "long") {
        return AnswerType::kNumeric;
      }
      return AnswerType::kNominal;
    }
    if (w == "what" || w == "which") {
      if (next == "is" || next == "was") {
        // "what is the name of ..." asks for a proper noun.
        for (std::size_t k = i + 2; k < folded_question.size(); ++k) {
          if (folded_question[k] == "name") return AnswerType::kCapitalized;
        }
      }
      return head_noun_type(next);
    }
  }
  return AnswerType::kNominal;
}

double type_weight(AnswerType t) {
  switch (t) {
    case AnswerType::kNumeric: return 0.8;
    case AnswerType::kCapitalized: return 0.3;
    case AnswerType::kNominal: return 0.2;
  }
  return 0.0;
}

}  // namespace

SpanScores lexical_overlap_score(std::span<const std::string> question,
                                 std::span<const std::string> sentence) {
  const std::size_t n = sentence.size();
  SpanScores out{std::vector<double>(n, kLowScore), std::vector<double>(n, kLowScore)};

  std::vector<std::string> fq;
  for (const auto& q : question) fq.push_back(to_lower(q));
  std::vector<std::string> fs;
  for (const auto& s : sentence) fs.push_back(to_lower(s));

  // Content words: lowercase relation cues vs. capitalized entity words.
  std::vector<std::string> relation_cues;
  std::set<std::string> entity_cues;
  for (std::size_t i = 0; i < question.size(); ++i) {
    const auto& w = fq[i];
    if (is_stopword(w) || is_punctuation_token(w)) continue;
    if (i > 0 && is_capitalized(question[i])) {
      entity_cues.insert(w);
    } else if (w.size() >= 3 && !has_digit(w)) {
      relation_cues.push_back(w);
    }
  }

  std::vector<char> cue_at(n, 0);
  std::vector<char> in_question(n, 0);
  bool entity_present = false;
  for (std::size_t k = 0; k < n; ++k) {
    if (entity_cues.count(fs[k])) {
      entity_present = true;
      in_question[k] = 1;
    }
    for (const auto& r : relation_cues) {
      if (stem_match(fs[k], r)) {
        cue_at[k] = 1;
        in_question[k] = 1;
      }
    }
    if (std::find(fq.begin(), fq.end(), fs[k]) != fq.end()) in_question[k] = 1;
  }
  const bool any_cue = std::any_of(cue_at.begin(), cue_at.end(), [](char c) { return c != 0; });
  if (!any_cue && !entity_present) return out;

  const AnswerType type = answer_type(fq);
  // A capitalized sentence word may echo a lowercase question word
  // ("which university" / "University of Coimbra") and still be an answer.
  auto echoed_name = [&](std::size_t k) {
    return type == AnswerType::kCapitalized && k > 0 && is_capitalized(sentence[k]) &&
           !entity_cues.count(fs[k]);
  };
  auto fits = [&](std::size_t k) {
    if (in_question[k] && !echoed_name(k)) return false;
    if (is_punctuation_token(fs[k]) || is_stopword(fs[k])) return false;
    switch (type) {
      case AnswerType::kCapitalized: return is_capitalized(sentence[k]);
      case AnswerType::kNumeric: return has_digit(sentence[k]);
      case AnswerType::kNominal:
        return !is_capitalized(sentence[k]) && !has_digit(sentence[k]);
    }
    return false;
  };

  // Candidate runs; capitalized runs may bridge a single "of".
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  for (std::size_t k = 0; k < n;) {
    if (!fits(k)) {
      ++k;
      continue;
    }
    std::size_t e = k;
    for (;;) {
      if (e + 1 < n && fits(e + 1)) {
        ++e;
      } else if (type == AnswerType::kCapitalized && e + 2 < n && fs[e + 1] == "of" &&
                 fits(e + 2)) {
        e += 2;
      } else {
        break;
      }
    }
    runs.emplace_back(k, e);
    k = e + 1;
  }

  // Distances count content tokens and clause commas, so "worked as a
  // carpenter" is adjacent but "Ortiz, born" is not.
  std::vector<std::size_t> content_rank(n + 1, 0);
  for (std::size_t k = 0; k < n; ++k) {
    const bool content = fs[k] == "," || (!is_stopword(fs[k]) && !is_punctuation_token(fs[k]));
    content_rank[k + 1] = content_rank[k] + (content ? 1 : 0);
  }
  auto distance = [&](std::size_t from, std::size_t to) {  // from < to
    return static_cast<double>(content_rank[to] - content_rank[from + 1] + 1);
  };

  for (const auto& [s, e] : runs) {
    double cue = type_weight(type) + (entity_present ? kEntityBonus : 0.0);
    for (std::size_t m = 0; m < n; ++m) {
      if (!cue_at[m] || (m >= s && m <= e)) continue;
      // Values usually follow their relation phrase ("born in", "worked as").
      cue += kCueWeight / (m < s ? distance(m, s) : distance(e, m) + kTrailingCuePenalty);
    }
    const double z = kScale * (cue - kCueThreshold);
    // Same value at both ends keeps the best pair inside one run.
    out.z_start[s] = std::max(out.z_start[s], z);
    out.z_end[e] = std::max(out.z_end[e], z);
  }
  return out;
}

std::unique_ptr<Scorer> make_scorer(std::string_view spec, std::uint64_t seed) {
  if (spec == "random-ne") return std::make_unique<RandomNeScorer>(seed);
  if (spec == "lexical") return std::make_unique<LexicalScorer>();
  constexpr std::string_view kExternal = "external:";
  if (spec.substr(0, kExternal.size()) == kExternal) {
    return std::make_unique<ExternalScorer>(parse_endpoint(spec.substr(kExternal.size())));
  }
  throw DataError("unknown scorer: " + std::string(spec));
}

}  // namespace slotshot
