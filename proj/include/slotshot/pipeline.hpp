#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "slotshot/answer_engine.hpp"
#include "slotshot/corpus.hpp"
#include "slotshot/evaluation.hpp"
#include "slotshot/scorers.hpp"
#include "slotshot/serialization.hpp"

namespace slotshot {

// Scores and decodes every example; output order follows input order. A
// scorer that is not shareable is driven from one thread.
std::vector<Prediction> predict_examples(Scorer& scorer, std::span<const RCExample> examples,
                                         const DecodeParams& params, std::size_t jobs = 1);

struct QuestionGroup {
  std::string instance_key;
  std::vector<std::size_t> members;  // indices into the example list
};

// Groups examples by instance key and keeps up to k members of each,
// sampled under `seed`. Groups come back sorted by key, members by index.
std::vector<QuestionGroup> sample_question_groups(std::span<const RCExample> examples,
                                                  std::size_t k, std::uint64_t seed);

// One record per group: the ensemble of its members' predictions.
std::vector<PredictionRecord> ensemble_records(std::span<const RCExample> examples,
                                               std::span<const Prediction> predictions,
                                               std::span<const QuestionGroup> groups);

std::vector<PredictionRecord> plain_records(std::span<const RCExample> examples,
                                            std::span<const Prediction> predictions);

// Gold answer texts keyed by example id and by instance key, so both plain
// and ensembled prediction files can be judged.
std::map<std::string, std::vector<std::string>> gold_index(std::span<const RCExample> examples);

// Throws DataError when a record has no gold entry.
std::vector<JudgedPrediction> attach_gold(
    std::span<const PredictionRecord> records,
    const std::map<std::string, std::vector<std::string>>& gold);

MetricsReport score_records(std::span<const PredictionRecord> records,
                            const std::map<std::string, std::vector<std::string>>& gold);

}  // namespace slotshot
