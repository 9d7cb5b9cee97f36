#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slotshot/corpus.hpp"

namespace slotshot {

struct AlignedFact {
  std::string relation_id;
  Entity entity;
  Sentence sentence;
  AnswerSpan answer;
};

// Lowest-index sentence of `document` containing both a mention of the
// entity (name or alias) and the fact's object, matched as case-insensitive
// token sequences. The answer is the object's first occurrence.
std::optional<std::pair<Sentence, AnswerSpan>> align_fact(const Document& document,
                                                          const Entity& entity,
                                                          const Fact& fact);

// Merges aligned records sharing (relation, entity, sentence); answers are
// deduplicated by token range. Output is sorted and independent of input order.
std::vector<SlotFillingInstance> group_instances(const std::vector<AlignedFact>& aligned);

struct BuildReport {
  std::size_t facts_total = 0;
  std::size_t facts_aligned = 0;
  std::size_t dropped_no_document = 0;
  std::size_t dropped_no_match = 0;
  std::size_t instances = 0;
  std::map<std::string, std::size_t> dropped_by_relation;
};

struct BuildResult {
  std::vector<SlotFillingInstance> instances;
  BuildReport report;
};

// `documents` maps entity id to (document, entity). Alignment runs on up to
// `jobs` threads; results do not depend on the thread count.
BuildResult build_instances(const std::map<std::string, std::pair<Document, Entity>>& documents,
                            const std::vector<Fact>& facts, std::size_t jobs = 1);

}  // namespace slotshot
