#pragma once

#include <cstdint>
#include <vector>

#include "slotshot/corpus.hpp"
#include "slotshot/querification.hpp"

namespace slotshot {

// Desk-scale stand-in for an encyclopedia + knowledge base: person
// articles whose sentences state facts with lexical cues, distractor names,
// and a few facts that never surface in the text.
struct SyntheticOptions {
  std::uint64_t seed = 0;
  std::size_t relations = 30;  // at most the size of the built-in catalog
  std::size_t entities = 500;
  std::size_t min_relations_per_entity = 4;
  std::size_t max_relations_per_entity = 7;
  double distractor_rate = 0.9;
  double alias_rate = 0.25;
  double unaligned_fact_rate = 0.04;
};

struct SyntheticCorpus {
  std::vector<Relation> relations;
  std::vector<Entity> entities;
  std::vector<Document> documents;
  std::vector<Fact> facts;
  std::vector<QuestionTemplate> templates;  // verified, several per relation
};

std::size_t synthetic_catalog_size();

SyntheticCorpus generate_corpus(const SyntheticOptions& options);

}  // namespace slotshot
