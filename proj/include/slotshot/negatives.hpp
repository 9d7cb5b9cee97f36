#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "slotshot/corpus.hpp"
#include "slotshot/querification.hpp"

namespace slotshot {

// True iff any answer occurs in the sentence as a contiguous
// case-insensitive token sequence.
bool contains_answer(const Sentence& sentence, std::span<const std::string> answers);
bool contains_answer(const Sentence& sentence, std::span<const AnswerSpan> answers);

struct NegativeSample {
  std::vector<RCExample> examples;
  std::size_t requested = 0;
  std::size_t candidates = 0;  // size of the filtered candidate pool

  bool short_of_target() const { return examples.size() < requested; }
};

// Pairs questions of relation R1 about entity e with sentences of e's
// instances for other relations R2, keeping only sentences that contain
// none of e's known R1 answers. The target is floor(P / ratio) where P is
// the number of positives the same templates and instances would produce.
// Sampling is uniform without replacement and fixed by `seed`.
NegativeSample generate_negatives(const std::vector<SlotFillingInstance>& instances,
                                  const std::vector<QuestionTemplate>& templates,
                                  double ratio, std::uint64_t seed, std::size_t jobs = 1);

// Same, with an explicit count target.
NegativeSample generate_negatives_count(const std::vector<SlotFillingInstance>& instances,
                                        const std::vector<QuestionTemplate>& templates,
                                        std::size_t target, std::uint64_t seed,
                                        std::size_t jobs = 1);

RCExample make_negative(const QuestionTemplate& tmpl, const Entity& entity,
                        const Sentence& sentence);

}  // namespace slotshot
