#include "slotshot/pipeline.hpp"

#include <algorithm>

#include "slotshot/error.hpp"
#include "slotshot/parallel.hpp"
#include "slotshot/random.hpp"

namespace slotshot {

std::vector<Prediction> predict_examples(Scorer& scorer, std::span<const RCExample> examples,
                                         const DecodeParams& params, std::size_t jobs) {
  std::vector<Prediction> out(examples.size());
  parallel_for(examples.size(), scorer.shareable() ? jobs : 1, [&](std::size_t i) {
    const auto& ex = examples[i];
    const auto sentence = token_texts(ex.sentence.tokens);
    const auto scores = checked_score(scorer, ex.question, sentence);
    out[i] = decode(scores, ex.sentence, params);
  });
  return out;
}

std::vector<QuestionGroup> sample_question_groups(std::span<const RCExample> examples,
                                                  std::size_t k, std::uint64_t seed) {
  if (k == 0) throw DataError("ensemble size must be positive");
  std::map<std::string, std::vector<std::size_t>> by_key;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    by_key[examples[i].instance_key()].push_back(i);
  }
  std::vector<QuestionGroup> groups;
  groups.reserve(by_key.size());
  for (auto& [key, members] : by_key) {
    if (members.size() > k) {
      Rng rng(mix_seed(seed, key));
      rng.shuffle(std::span<std::size_t>(members));
      members.resize(k);
      std::sort(members.begin(), members.end());
    }
    groups.push_back({key, std::move(members)});
  }
  return groups;
}

std::vector<PredictionRecord> ensemble_records(std::span<const RCExample> examples,
                                               std::span<const Prediction> predictions,
                                               std::span<const QuestionGroup> groups) {
  if (examples.size() != predictions.size()) {
    throw DataError("prediction count does not match example count");
  }
  std::vector<PredictionRecord> out;
  out.reserve(groups.size());
  for (const auto& group : groups) {
    std::vector<std::pair<std::string, Prediction>> members;
    PredictionRecord record;
    record.example_id = group.instance_key;
    for (std::size_t i : group.members) {
      members.emplace_back(examples[i].id, predictions[i]);
      record.questions.push_back(examples[i].id);
    }
    record.prediction = ensemble(members);
    out.push_back(std::move(record));
  }
  return out;
}

std::vector<PredictionRecord> plain_records(std::span<const RCExample> examples,
                                            std::span<const Prediction> predictions) {
  if (examples.size() != predictions.size()) {
    throw DataError("prediction count does not match example count");
  }
  std::vector<PredictionRecord> out;
  out.reserve(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    out.push_back({examples[i].id, predictions[i], {}});
  }
  return out;
}

std::map<std::string, std::vector<std::string>> gold_index(std::span<const RCExample> examples) {
  std::map<std::string, std::vector<std::string>> gold;
  for (const auto& ex : examples) {
    auto texts = answer_texts(ex.answers);
    gold[ex.instance_key()] = texts;
    gold[ex.id] = std::move(texts);
  }
  return gold;
}

std::vector<JudgedPrediction> attach_gold(
    std::span<const PredictionRecord> records,
    const std::map<std::string, std::vector<std::string>>& gold) {
  std::vector<JudgedPrediction> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    auto it = gold.find(r.example_id);
    if (it == gold.end()) throw DataError("no gold example for prediction " + r.example_id);
    out.push_back({r.prediction, it->second});
  }
  return out;
}

MetricsReport score_records(std::span<const PredictionRecord> records,
                            const std::map<std::string, std::vector<std::string>>& gold) {
  std::vector<InstanceJudgment> judgments;
  judgments.reserve(records.size());
  for (const auto& item : attach_gold(records, gold)) {
    judgments.push_back(judge_instance(item.prediction, item.gold));
  }
  return aggregate_metrics(judgments);
}

}  // namespace slotshot
