#pragma once

#include <map>
#include <vector>

#include "slotshot/dataset_builder.hpp"
#include "slotshot/negatives.hpp"
#include "slotshot/querification.hpp"
#include "slotshot/synthetic.hpp"

namespace fixture {

struct Dataset {
  slotshot::SyntheticCorpus corpus;
  std::vector<slotshot::SlotFillingInstance> instances;
  std::vector<slotshot::RCExample> positives;
  std::vector<slotshot::RCExample> negatives;
  std::vector<slotshot::RCExample> all;  // positives then negatives
};

inline Dataset make_dataset(std::uint64_t seed, std::size_t entities = 500,
                            std::size_t relations = 30) {
  using namespace slotshot;
  Dataset d;
  SyntheticOptions opt;
  opt.seed = seed;
  opt.entities = entities;
  opt.relations = relations;
  d.corpus = generate_corpus(opt);
  std::map<std::string, std::pair<Document, Entity>> docs;
  for (std::size_t i = 0; i < d.corpus.entities.size(); ++i) {
    docs[d.corpus.entities[i].id] = {d.corpus.documents[i], d.corpus.entities[i]};
  }
  d.instances = build_instances(docs, d.corpus.facts).instances;
  d.positives = join_schema(d.corpus.templates, d.instances);
  d.negatives = generate_negatives(d.instances, d.corpus.templates, 1.0, seed).examples;
  d.all = d.positives;
  d.all.insert(d.all.end(), d.negatives.begin(), d.negatives.end());
  return d;
}

}  // namespace fixture
