#include "slotshot/dataset_builder.hpp"

#include <algorithm>
#include <tuple>

#include "slotshot/parallel.hpp"

namespace slotshot {

std::optional<std::pair<Sentence, AnswerSpan>> align_fact(const Document& document,
                                                          const Entity& entity,
                                                          const Fact& fact) {
  const auto object = folded_tokens(fact.object_text);
  if (object.empty()) return std::nullopt;
  std::vector<std::vector<std::string>> mentions;
  for (const auto& form : entity.surface_forms()) {
    auto folded = folded_tokens(form);
    if (!folded.empty()) mentions.push_back(std::move(folded));
  }

  for (const auto& sentence : document.sentences) {
    const auto folded = folded_tokens(sentence.tokens);
    const auto at = find_sequence(folded, object);
    if (!at) continue;
    const bool mentioned = std::any_of(mentions.begin(), mentions.end(), [&](const auto& m) {
      return find_sequence(folded, m).has_value();
    });
    if (!mentioned) continue;
    return std::make_pair(sentence, make_answer(sentence, *at, *at + object.size() - 1));
  }
  return std::nullopt;
}

std::vector<SlotFillingInstance> group_instances(const std::vector<AlignedFact>& aligned) {
  using Key = std::tuple<std::string, std::string, std::string, std::size_t>;
  std::map<Key, SlotFillingInstance> groups;
  for (const auto& a : aligned) {
    Key key{a.relation_id, a.entity.id, a.sentence.document_id, a.sentence.index};
    auto [it, inserted] = groups.try_emplace(key);
    auto& inst = it->second;
    if (inserted) {
      inst.relation_id = a.relation_id;
      inst.entity = a.entity;
      inst.sentence = a.sentence;
    }
    const bool seen = std::any_of(inst.answers.begin(), inst.answers.end(), [&](const auto& s) {
      return s.token_start == a.answer.token_start && s.token_end == a.answer.token_end;
    });
    if (!seen) inst.answers.push_back(a.answer);
  }

  std::vector<SlotFillingInstance> out;
  out.reserve(groups.size());
  for (auto& [key, inst] : groups) {
    std::sort(inst.answers.begin(), inst.answers.end(), [](const auto& x, const auto& y) {
      return std::tie(x.token_start, x.token_end) < std::tie(y.token_start, y.token_end);
    });
    out.push_back(std::move(inst));
  }
  return out;
}

BuildResult build_instances(const std::map<std::string, std::pair<Document, Entity>>& documents,
                            const std::vector<Fact>& facts, std::size_t jobs) {
  BuildResult result;
  result.report.facts_total = facts.size();

  std::vector<std::optional<AlignedFact>> aligned(facts.size());
  std::vector<char> has_document(facts.size(), 0);
  parallel_for(facts.size(), jobs, [&](std::size_t i) {
    const auto& fact = facts[i];
    auto it = documents.find(fact.subject_entity_id);
    if (it == documents.end()) return;
    has_document[i] = 1;
    const auto& [doc, entity] = it->second;
    if (auto hit = align_fact(doc, entity, fact)) {
      aligned[i] = AlignedFact{fact.relation_id, entity, std::move(hit->first),
                               std::move(hit->second)};
    }
  });

  std::vector<AlignedFact> kept;
  for (std::size_t i = 0; i < facts.size(); ++i) {
    if (aligned[i]) {
      kept.push_back(std::move(*aligned[i]));
      continue;
    }
    if (!has_document[i]) {
      ++result.report.dropped_no_document;
    } else {
      ++result.report.dropped_no_match;
    }
    ++result.report.dropped_by_relation[facts[i].relation_id];
  }
  result.report.facts_aligned = kept.size();
  result.instances = group_instances(kept);
  result.report.instances = result.instances.size();
  return result;
}

}  // namespace slotshot
