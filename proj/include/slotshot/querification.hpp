#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "slotshot/corpus.hpp"

namespace slotshot {

inline constexpr std::string_view kPlaceholder = "{x}";

enum class TemplateSource { kShownName, kHiddenName, kManual };
enum class TemplateStatus { kCandidate, kVerified, kRejected };

struct VerificationStats {
  int n_trials = 0;
  int n_correct = 0;
  double mean_overlap_f1 = 0.0;

  friend bool operator==(const VerificationStats&, const VerificationStats&) = default;
};

struct QuestionTemplate {
  std::string id;
  std::string relation_id;
  std::string text;
  TemplateSource source = TemplateSource::kManual;
  TemplateStatus status = TemplateStatus::kCandidate;
  VerificationStats verification;

  friend bool operator==(const QuestionTemplate&, const QuestionTemplate&) = default;
};

std::size_t count_placeholders(std::string_view text);

// Throws MalformedTemplateError unless `text` holds exactly one placeholder.
void check_placeholder(std::string_view text);
void validate(const QuestionTemplate& tmpl);

std::string instantiate(std::string_view template_text, const Entity& entity);
std::string instantiate(const QuestionTemplate& tmpl, const Entity& entity);

RCExample make_example(const QuestionTemplate& tmpl, const SlotFillingInstance& instance);

// One positive example per (verified template, instance) pair sharing a
// relation, ordered by (relation_id, instance key, template id).
std::vector<RCExample> join_schema(const std::vector<QuestionTemplate>& templates,
                                   const std::vector<SlotFillingInstance>& instances);

std::vector<QuestionTemplate> verified_only(const std::vector<QuestionTemplate>& templates);

}  // namespace slotshot
