#include "slotshot/negatives.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "slotshot/error.hpp"
#include "slotshot/parallel.hpp"
#include "slotshot/random.hpp"

namespace slotshot {

bool contains_answer(const Sentence& sentence, std::span<const std::string> answers) {
  const auto folded = folded_tokens(sentence.tokens);
  return std::any_of(answers.begin(), answers.end(), [&](const std::string& a) {
    return find_sequence(folded, folded_tokens(a)).has_value();
  });
}

bool contains_answer(const Sentence& sentence, std::span<const AnswerSpan> answers) {
  std::vector<std::string> texts;
  for (const auto& a : answers) texts.push_back(a.text);
  return contains_answer(sentence, std::span<const std::string>(texts));
}

RCExample make_negative(const QuestionTemplate& tmpl, const Entity& entity,
                        const Sentence& sentence) {
  RCExample ex;
  ex.relation_id = tmpl.relation_id;
  ex.entity_id = entity.id;
  ex.entity_name = entity.name;
  ex.template_id = tmpl.id;
  ex.question_text = instantiate(tmpl, entity);
  ex.question = token_texts(tokenize(ex.question_text));
  ex.sentence = sentence;
  ex.polarity = Polarity::kNegative;
  ex.id = "neg|" + ex.relation_id + "|" + ex.entity_id + "|" + sentence_key(sentence) + "|" +
          tmpl.id;
  return ex;
}

namespace {

struct Candidate {
  std::uint64_t key;
  std::string id;  // tiebreak and output ordering
  const QuestionTemplate* tmpl;
  const SlotFillingInstance* instance;
};

// All legal (template, foreign sentence) pairs for one entity, each with a
// random key drawn from the entity's sub-seed.
std::vector<Candidate> entity_candidates(
    const std::string& entity_id, const std::vector<const SlotFillingInstance*>& own,
    const std::map<std::string, std::vector<const QuestionTemplate*>>& templates_by_relation,
    std::uint64_t seed) {
  std::map<std::string, std::vector<std::string>> gold_by_relation;
  for (const auto* inst : own) {
    auto& gold = gold_by_relation[inst->relation_id];
    for (const auto& a : inst->answers) gold.push_back(a.text);
  }
  std::vector<Candidate> out;
  if (gold_by_relation.size() < 2) return out;

  // Distinct sentences per relation; one sentence may carry several relations.
  std::map<std::string, const SlotFillingInstance*> sentences;
  for (const auto* inst : own) {
    sentences.try_emplace(sentence_key(inst->sentence) + "|" + inst->relation_id, inst);
  }

  Rng rng(mix_seed(seed, entity_id));
  for (const auto& [r1, gold] : gold_by_relation) {
    auto tit = templates_by_relation.find(r1);
    if (tit == templates_by_relation.end()) continue;
    std::set<std::string> used_sentences;
    for (const auto& [skey, inst] : sentences) {
      if (inst->relation_id == r1) continue;
      const auto sk = sentence_key(inst->sentence);
      if (!used_sentences.insert(sk).second) continue;
      if (contains_answer(inst->sentence, std::span<const std::string>(gold))) continue;
      for (const auto* t : tit->second) {
        out.push_back(Candidate{rng.next(), "neg|" + r1 + "|" + entity_id + "|" + sk + "|" + t->id,
                                t, inst});
      }
    }
  }
  return out;
}

}  // namespace

NegativeSample generate_negatives_count(const std::vector<SlotFillingInstance>& instances,
                                        const std::vector<QuestionTemplate>& templates,
                                        std::size_t target, std::uint64_t seed,
                                        std::size_t jobs) {
  std::map<std::string, std::vector<const QuestionTemplate*>> templates_by_relation;
  for (const auto& t : templates) {
    if (t.status != TemplateStatus::kVerified) {
      throw DataError("negatives require verified templates; got " + t.id);
    }
    templates_by_relation[t.relation_id].push_back(&t);
  }
  for (auto& [r, list] : templates_by_relation) {
    std::sort(list.begin(), list.end(), [](auto* a, auto* b) { return a->id < b->id; });
  }

  std::map<std::string, std::vector<const SlotFillingInstance*>> by_entity;
  for (const auto& inst : instances) by_entity[inst.entity.id].push_back(&inst);
  std::vector<const std::pair<const std::string, std::vector<const SlotFillingInstance*>>*> entities;
  for (const auto& entry : by_entity) entities.push_back(&entry);

  std::vector<std::vector<Candidate>> per_entity(entities.size());
  parallel_for(entities.size(), jobs, [&](std::size_t i) {
    per_entity[i] = entity_candidates(entities[i]->first, entities[i]->second,
                                      templates_by_relation, seed);
  });

  std::vector<Candidate> pool;
  for (auto& list : per_entity) {
    for (auto& c : list) pool.push_back(std::move(c));
  }

  NegativeSample sample;
  sample.requested = target;
  sample.candidates = pool.size();
  // The `target` smallest random keys form a uniform sample without replacement.
  auto by_key = [](const Candidate& a, const Candidate& b) {
    return std::tie(a.key, a.id) < std::tie(b.key, b.id);
  };
  const std::size_t take = std::min(target, pool.size());
  std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take), pool.end(),
                    by_key);
  pool.resize(take);
  std::sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  sample.examples.reserve(take);
  for (const auto& c : pool) {
    sample.examples.push_back(make_negative(*c.tmpl, c.instance->entity, c.instance->sentence));
  }
  return sample;
}

NegativeSample generate_negatives(const std::vector<SlotFillingInstance>& instances,
                                  const std::vector<QuestionTemplate>& templates, double ratio,
                                  std::uint64_t seed, std::size_t jobs) {
  if (!(ratio > 0.0)) throw DataError("ratio must be > 0");
  std::map<std::string, std::size_t> templates_per_relation;
  for (const auto& t : templates) ++templates_per_relation[t.relation_id];
  std::size_t positives = 0;
  for (const auto& inst : instances) {
    auto it = templates_per_relation.find(inst.relation_id);
    if (it != templates_per_relation.end()) positives += it->second;
  }
  const auto target = static_cast<std::size_t>(static_cast<double>(positives) / ratio);
  return generate_negatives_count(instances, templates, target, seed, jobs);
}

}  // namespace slotshot
