#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slotshot/corpus.hpp"
#include "slotshot/querification.hpp"

namespace slotshot {

enum class SplitKind { kUnseenEntities, kUnseenTemplates, kUnseenRelations };

std::string to_string(SplitKind kind);
SplitKind parse_split_kind(std::string_view s);  // entities | templates | relations

struct SizeTargets {
  std::size_t train = 0;
  std::size_t dev = 0;
  std::size_t test = 0;
};

struct SplitSpec {
  SplitKind kind = SplitKind::kUnseenEntities;
  std::uint64_t seed = 0;
  std::size_t fold_count = 1;
  // Totals per split (positives + negatives). For unseen templates these
  // are per-template positive counts instead.
  SizeTargets targets{20000, 500, 2000};
  // Relation partition for unseen relations; derived 70/10/20 when unset.
  std::optional<SizeTargets> relation_counts;
  double negative_ratio = 1.0;  // positives per negative

  static SplitSpec desk_defaults(SplitKind kind);
  static SplitSpec full_defaults(SplitKind kind);
};

struct Split {
  std::vector<RCExample> train;
  std::vector<RCExample> dev;
  std::vector<RCExample> test;
  std::vector<RCExample> seen_test;  // unseen-templates only

  // What each split was allowed to contain (entities, template ids or relations).
  std::vector<std::string> train_keys;
  std::vector<std::string> dev_keys;
  std::vector<std::string> test_keys;

  std::vector<std::string> notes;  // shortfalls and exclusions
};

// Positives are sampled to target / (1 + 1/ratio); negatives are balanced
// against them at `negative_ratio`. Each fold draws from seed mixed with its
// index, so folds are independent and reproducible.
std::vector<Split> split_unseen_entities(const std::vector<RCExample>& examples,
                                         const SplitSpec& spec);
std::vector<Split> split_unseen_templates(const std::vector<RCExample>& examples,
                                          const std::vector<QuestionTemplate>& templates,
                                          const SplitSpec& spec);
std::vector<Split> split_unseen_relations(const std::vector<RCExample>& examples,
                                          const SplitSpec& spec);

// Down-samples the larger side to reach `ratio` positives per negative and
// returns a seeded shuffle of the union.
std::vector<RCExample> balance(std::vector<RCExample> positives, std::vector<RCExample> negatives,
                               double ratio, std::uint64_t seed);

}  // namespace slotshot
