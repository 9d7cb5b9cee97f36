#include "slotshot/querification.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "slotshot/error.hpp"

namespace slotshot {

std::size_t count_placeholders(std::string_view text) {
  std::size_t n = 0;
  for (auto pos = text.find(kPlaceholder); pos != std::string_view::npos;
       pos = text.find(kPlaceholder, pos + kPlaceholder.size())) {
    ++n;
  }
  return n;
}

void check_placeholder(std::string_view text) {
  const auto n = count_placeholders(text);
  if (n != 1) {
    throw MalformedTemplateError("template must contain exactly one " +
                                 std::string(kPlaceholder) + ", found " +
                                 std::to_string(n) + ": " + std::string(text));
  }
}

void validate(const QuestionTemplate& tmpl) {
  check_placeholder(tmpl.text);
  const auto& v = tmpl.verification;
  if (v.n_correct < 0 || v.n_correct > v.n_trials) {
    throw DataError("template " + tmpl.id + ": n_correct outside [0, n_trials]");
  }
  if (!(v.mean_overlap_f1 >= 0.0 && v.mean_overlap_f1 <= 1.0)) {
    throw DataError("template " + tmpl.id + ": mean_overlap_f1 outside [0, 1]");
  }
}

std::string instantiate(std::string_view template_text, const Entity& entity) {
  check_placeholder(template_text);
  const auto pos = template_text.find(kPlaceholder);
  std::string out(template_text.substr(0, pos));
  out += entity.name;
  out += template_text.substr(pos + kPlaceholder.size());
  return out;
}

std::string instantiate(const QuestionTemplate& tmpl, const Entity& entity) {
  return instantiate(tmpl.text, entity);
}

RCExample make_example(const QuestionTemplate& tmpl, const SlotFillingInstance& instance) {
  RCExample ex;
  ex.relation_id = instance.relation_id;
  ex.entity_id = instance.entity.id;
  ex.entity_name = instance.entity.name;
  ex.template_id = tmpl.id;
  ex.question_text = instantiate(tmpl, instance.entity);
  ex.question = token_texts(tokenize(ex.question_text));
  ex.sentence = instance.sentence;
  ex.answers = instance.answers;
  ex.polarity = Polarity::kPositive;
  ex.id = ex.relation_id + "|" + ex.entity_id + "|" + sentence_key(ex.sentence) + "|" +
          tmpl.id;
  return ex;
}

std::vector<RCExample> join_schema(const std::vector<QuestionTemplate>& templates,
                                   const std::vector<SlotFillingInstance>& instances) {
  std::map<std::string, std::vector<const QuestionTemplate*>> by_relation;
  for (const auto& t : templates) {
    if (t.status != TemplateStatus::kVerified) {
      throw DataError("join_schema requires verified templates; got " + t.id);
    }
    check_placeholder(t.text);
    by_relation[t.relation_id].push_back(&t);
  }
  for (auto& [rel, list] : by_relation) {
    std::sort(list.begin(), list.end(),
              [](const auto* a, const auto* b) { return a->id < b->id; });
  }

  std::vector<const SlotFillingInstance*> ordered;
  ordered.reserve(instances.size());
  for (const auto& inst : instances) ordered.push_back(&inst);
  auto key = [](const SlotFillingInstance* i) {
    return std::tie(i->relation_id, i->entity.id, i->sentence.document_id, i->sentence.index);
  };
  std::sort(ordered.begin(), ordered.end(),
            [&](const auto* a, const auto* b) { return key(a) < key(b); });

  std::vector<RCExample> out;
  for (const auto* inst : ordered) {
    auto it = by_relation.find(inst->relation_id);
    if (it == by_relation.end()) continue;
    for (const auto* t : it->second) out.push_back(make_example(*t, *inst));
  }
  return out;
}

std::vector<QuestionTemplate> verified_only(const std::vector<QuestionTemplate>& templates) {
  std::vector<QuestionTemplate> out;
  std::copy_if(templates.begin(), templates.end(), std::back_inserter(out),
               [](const auto& t) { return t.status == TemplateStatus::kVerified; });
  return out;
}

}  // namespace slotshot
