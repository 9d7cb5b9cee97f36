#include "slotshot/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "slotshot/error.hpp"
#include "slotshot/random.hpp"

namespace slotshot {
namespace {

enum Part { kTrain = 0, kDev = 1, kTest = 2 };
constexpr const char* kPartNames[] = {"train", "dev", "test"};

std::size_t target_of(const SizeTargets& t, int part) {
  return part == kTrain ? t.train : part == kDev ? t.dev : t.test;
}

std::vector<RCExample>& part_of(Split& s, int part) {
  return part == kTrain ? s.train : part == kDev ? s.dev : s.test;
}

std::vector<std::string>& keys_of(Split& s, int part) {
  return part == kTrain ? s.train_keys : part == kDev ? s.dev_keys : s.test_keys;
}

void sort_by_id(std::vector<RCExample>& v) {
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
}

// Uniform sample of at most `n` items, independent of input order.
std::vector<RCExample> sample(std::vector<RCExample> pool, std::size_t n, Rng& rng) {
  sort_by_id(pool);
  rng.shuffle(std::span<RCExample>(pool));
  if (pool.size() > n) pool.resize(n);
  return pool;
}

std::size_t positive_share(std::size_t total, double ratio) {
  return static_cast<std::size_t>(std::llround(static_cast<double>(total) / (1.0 + 1.0 / ratio)));
}

// Samples positives, then balances them with the available negatives.
std::vector<RCExample> assemble(std::vector<RCExample> positives, std::vector<RCExample> negatives,
                                std::size_t positive_target, double ratio, std::uint64_t seed,
                                const std::string& label, std::vector<std::string>& notes) {
  Rng rng(mix_seed(seed, label + "|positives"));
  if (positives.size() < positive_target) {
    notes.push_back(label + ": " + std::to_string(positives.size()) + " positives available, " +
                    std::to_string(positive_target) + " requested");
  }
  positives = sample(std::move(positives), positive_target, rng);
  if (positives.empty()) return {};
  if (negatives.empty()) {
    notes.push_back(label + ": no negatives available; split is positives only");
    return positives;
  }
  const std::size_t pos = positives.size();
  auto mixed = balance(std::move(positives), std::move(negatives), ratio, mix_seed(seed, label));
  if (std::count_if(mixed.begin(), mixed.end(),
                    [](const auto& e) { return e.polarity == Polarity::kPositive; }) <
      static_cast<long>(pos)) {
    notes.push_back(label + ": too few negatives; positives were down-sampled to keep the ratio");
  }
  return mixed;
}

}  // namespace

std::string to_string(SplitKind kind) {
  switch (kind) {
    case SplitKind::kUnseenEntities: return "unseen_entities";
    case SplitKind::kUnseenTemplates: return "unseen_templates";
    case SplitKind::kUnseenRelations: return "unseen_relations";
  }
  return "unseen_entities";
}

SplitKind parse_split_kind(std::string_view s) {
  if (s == "entities" || s == "unseen_entities") return SplitKind::kUnseenEntities;
  if (s == "templates" || s == "unseen_templates") return SplitKind::kUnseenTemplates;
  if (s == "relations" || s == "unseen_relations") return SplitKind::kUnseenRelations;
  throw DataError("unknown split kind: " + std::string(s));
}

SplitSpec SplitSpec::desk_defaults(SplitKind kind) {
  SplitSpec spec;
  spec.kind = kind;
  spec.targets = kind == SplitKind::kUnseenTemplates ? SizeTargets{100, 10, 50}
                                                      : SizeTargets{20000, 500, 2000};
  return spec;
}

SplitSpec SplitSpec::full_defaults(SplitKind kind) {
  SplitSpec spec;
  spec.kind = kind;
  switch (kind) {
    case SplitKind::kUnseenEntities: spec.targets = {1000000, 1000, 10000}; break;
    case SplitKind::kUnseenTemplates: spec.targets = {1000, 10, 50}; break;
    case SplitKind::kUnseenRelations: spec.targets = {840000, 600, 12000}; break;
  }
  return spec;
}

std::vector<RCExample> balance(std::vector<RCExample> positives, std::vector<RCExample> negatives,
                               double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0)) throw DataError("balance ratio must be > 0");
  if (positives.empty() || negatives.empty()) {
    throw DataError("balance needs at least one positive and one negative");
  }
  const double pos = static_cast<double>(positives.size());
  const double neg = static_cast<double>(negatives.size());
  std::size_t keep_pos = positives.size();
  std::size_t keep_neg = negatives.size();
  if (pos > ratio * neg) {
    keep_pos = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(ratio * neg + 1e-9)));
  } else {
    keep_neg = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(pos / ratio + 1e-9)));
  }
  Rng rng(seed);
  auto out = sample(std::move(positives), keep_pos, rng);
  auto negs = sample(std::move(negatives), keep_neg, rng);
  out.insert(out.end(), std::make_move_iterator(negs.begin()), std::make_move_iterator(negs.end()));
  rng.shuffle(std::span<RCExample>(out));
  return out;
}

std::vector<Split> split_unseen_entities(const std::vector<RCExample>& examples,
                                         const SplitSpec& spec) {
  std::set<std::string> entity_set;
  for (const auto& e : examples) entity_set.insert(e.entity_id);
  const std::vector<std::string> entities(entity_set.begin(), entity_set.end());
  const double total = static_cast<double>(spec.targets.train + spec.targets.dev + spec.targets.test);
  if (total <= 0) throw DataError("split size targets must be positive");

  std::vector<Split> folds;
  for (std::size_t fold = 0; fold < spec.fold_count; ++fold) {
    const auto fold_seed = mix_seed(spec.seed, "entities|" + std::to_string(fold));
    Rng rng(fold_seed);
    Split split;
    std::map<std::string, int> assignment;
    for (const auto& entity : entities) {
      const double u = rng.unit() * total;
      const int part = u < static_cast<double>(spec.targets.train) ? kTrain
                       : u < static_cast<double>(spec.targets.train + spec.targets.dev) ? kDev
                                                                                         : kTest;
      assignment[entity] = part;
      keys_of(split, part).push_back(entity);
    }
    std::vector<RCExample> pos[3], neg[3];
    for (const auto& e : examples) {
      const int part = assignment.at(e.entity_id);
      (e.polarity == Polarity::kPositive ? pos : neg)[part].push_back(e);
    }
    for (int part = 0; part < 3; ++part) {
      const auto target = target_of(spec.targets, part);
      part_of(split, part) = assemble(std::move(pos[part]), std::move(neg[part]),
                                      positive_share(target, spec.negative_ratio),
                                      spec.negative_ratio, fold_seed, kPartNames[part], split.notes);
    }
    folds.push_back(std::move(split));
  }
  return folds;
}

std::vector<Split> split_unseen_templates(const std::vector<RCExample>& examples,
                                          const std::vector<QuestionTemplate>& templates,
                                          const SplitSpec& spec) {
  std::map<std::string, std::vector<const QuestionTemplate*>> by_relation;
  for (const auto& t : templates) {
    if (t.status == TemplateStatus::kVerified) by_relation[t.relation_id].push_back(&t);
  }
  std::vector<std::string> excluded;
  for (auto it = by_relation.begin(); it != by_relation.end();) {
    if (it->second.size() < 3) {
      excluded.push_back(it->first);
      it = by_relation.erase(it);
      continue;
    }
    auto& list = it->second;
    std::sort(list.begin(), list.end(), [](auto* a, auto* b) { return a->id < b->id; });
    Rng rng(mix_seed(spec.seed, "templates|" + it->first));
    rng.shuffle(std::span<const QuestionTemplate*>(list));
    ++it;
  }

  std::vector<Split> folds;
  for (std::size_t fold = 0; fold < spec.fold_count; ++fold) {
    const auto fold_seed = mix_seed(spec.seed, "templates|fold|" + std::to_string(fold));
    Split split;
    for (const auto& r : excluded) {
      split.notes.push_back("relation " + r + " excluded: fewer than 3 verified templates");
    }
    std::map<std::string, int> assignment;
    std::map<std::string, std::vector<const QuestionTemplate*>> train_templates;
    for (const auto& [rel, list] : by_relation) {
      const std::size_t t = list.size();
      for (std::size_t i = 0; i < t; ++i) {
        const int part = i == fold % t ? kTest : i == (fold + 1) % t ? kDev : kTrain;
        assignment[list[i]->id] = part;
        keys_of(split, part).push_back(list[i]->id);
        if (part == kTrain) train_templates[rel].push_back(list[i]);
      }
    }
    for (int part = 0; part < 3; ++part) std::sort(keys_of(split, part).begin(), keys_of(split, part).end());

    // Stratified: a fixed number of positives per template.
    std::map<std::string, std::vector<RCExample>> pos_by_template;
    std::vector<RCExample> neg[3];
    for (const auto& e : examples) {
      auto it = assignment.find(e.template_id);
      if (it == assignment.end()) continue;
      if (e.polarity == Polarity::kPositive) {
        pos_by_template[e.template_id].push_back(e);
      } else {
        neg[it->second].push_back(e);
      }
    }
    for (int part = 0; part < 3; ++part) {
      const auto per_template = target_of(spec.targets, part);
      std::vector<RCExample> pos;
      for (auto& [tid, list] : pos_by_template) {
        if (assignment.at(tid) != part) continue;
        Rng rng(mix_seed(fold_seed, "stratum|" + tid));
        if (list.size() < per_template) {
          split.notes.push_back(std::string(kPartNames[part]) + ": template " + tid + " has " +
                                std::to_string(list.size()) + " positives, " +
                                std::to_string(per_template) + " requested");
        }
        auto chosen = sample(std::move(list), per_template, rng);
        pos.insert(pos.end(), std::make_move_iterator(chosen.begin()),
                   std::make_move_iterator(chosen.end()));
      }
      const auto n = pos.size();
      part_of(split, part) = assemble(std::move(pos), std::move(neg[part]), n, spec.negative_ratio,
                                      fold_seed, kPartNames[part], split.notes);
    }

    // Seen variant: the same test instances asked with a training template.
    Rng rng(mix_seed(fold_seed, "seen"));
    for (const auto& e : split.test) {
      const auto& options = train_templates.at(e.relation_id);
      const auto* t = options[rng.index(options.size())];
      RCExample seen = e;
      seen.template_id = t->id;
      seen.question_text = instantiate(t->text, Entity{e.entity_id, e.entity_name, {}});
      seen.question = token_texts(tokenize(seen.question_text));
      seen.id = e.id.substr(0, e.id.rfind('|') + 1) + t->id;
      split.seen_test.push_back(std::move(seen));
    }
    folds.push_back(std::move(split));
  }
  return folds;
}

std::vector<Split> split_unseen_relations(const std::vector<RCExample>& examples,
                                          const SplitSpec& spec) {
  std::map<std::string, std::size_t> mass;
  for (const auto& e : examples) {
    auto& m = mass[e.relation_id];
    if (e.polarity == Polarity::kPositive) ++m;
  }
  const std::size_t inventory = mass.size();
  SizeTargets counts;
  if (spec.relation_counts) {
    counts = *spec.relation_counts;
    if (counts.train + counts.dev + counts.test != inventory) {
      throw DataError("relation counts " + std::to_string(counts.train) + "/" +
                      std::to_string(counts.dev) + "/" + std::to_string(counts.test) +
                      " do not sum to the inventory of " + std::to_string(inventory));
    }
  } else {
    counts.test = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(inventory)));
    counts.dev = static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(inventory)));
    counts.train = inventory >= counts.test + counts.dev ? inventory - counts.test - counts.dev : 0;
  }
  if (inventory < 3 || counts.train == 0 || counts.dev == 0 || counts.test == 0) {
    throw DataError("unseen-relations split needs at least 3 relations with a non-empty partition; have " +
                    std::to_string(inventory));
  }

  std::vector<Split> folds;
  for (std::size_t fold = 0; fold < spec.fold_count; ++fold) {
    const auto fold_seed = mix_seed(spec.seed, "relations|" + std::to_string(fold));
    Rng rng(fold_seed);
    std::vector<std::string> order;
    for (const auto& [rel, m] : mass) order.push_back(rel);
    rng.shuffle(std::span<std::string>(order));
    std::stable_sort(order.begin(), order.end(),
                     [&](const auto& a, const auto& b) { return mass.at(a) > mass.at(b); });

    // Each relation goes to the split that is least full relative to its quota.
    Split split;
    std::map<std::string, int> assignment;
    std::size_t filled[3] = {0, 0, 0};
    for (const auto& rel : order) {
      int pick = -1;
      double best = 2.0;
      for (int part = 0; part < 3; ++part) {
        const auto quota = target_of(counts, part);
        if (filled[part] >= quota) continue;
        const double frac = static_cast<double>(filled[part]) / static_cast<double>(quota);
        if (frac < best) {
          best = frac;
          pick = part;
        }
      }
      ++filled[pick];
      assignment[rel] = pick;
      keys_of(split, pick).push_back(rel);
    }
    for (int part = 0; part < 3; ++part) std::sort(keys_of(split, part).begin(), keys_of(split, part).end());

    std::vector<RCExample> pos[3], neg[3];
    for (const auto& e : examples) {
      const int part = assignment.at(e.relation_id);
      (e.polarity == Polarity::kPositive ? pos : neg)[part].push_back(e);
    }
    for (int part = 0; part < 3; ++part) {
      const auto target = target_of(spec.targets, part);
      part_of(split, part) = assemble(std::move(pos[part]), std::move(neg[part]),
                                      positive_share(target, spec.negative_ratio),
                                      spec.negative_ratio, fold_seed, kPartNames[part], split.notes);
    }
    folds.push_back(std::move(split));
  }
  return folds;
}

}  // namespace slotshot
