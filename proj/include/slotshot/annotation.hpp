#pragma once

// Two-phase template crowdsourcing: annotators write templates from masked
// example sentences (collection), then other annotators answer instantiated
// questions (verification); templates answered correctly often enough are
// accepted.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "slotshot/corpus.hpp"
#include "slotshot/querification.hpp"
#include "slotshot/serialization.hpp"

namespace slotshot {

inline constexpr std::size_t kExamplesPerTask = 4;
inline constexpr std::size_t kExampleSets = 3;
inline constexpr std::size_t kAnnotatorsPerSet = 3;
inline constexpr std::size_t kTemplatesPerResponse = 3;
inline constexpr int kDefaultVerificationTrials = 10;
inline constexpr double kMajorityFraction = 0.6;
inline constexpr double kMinMeanOverlapF1 = 0.75;

// Character offsets into the masked text.
struct Underline {
  std::size_t start = 0;
  std::size_t end = 0;
};

struct MaskedExample {
  std::string text;  // entity mention replaced by the placeholder
  std::vector<Underline> answers;
};

// Masks the first entity mention (name or alias) and locates the answers.
MaskedExample mask_example(const SlotFillingInstance& instance);

struct CollectionTask {
  std::string id;
  std::string relation_id;
  std::string relation_name;  // empty when the name is hidden
  bool show_relation_name = false;
  std::size_t example_set = 0;
  std::size_t slot = 0;
  std::vector<MaskedExample> example_sentences;
  std::vector<std::string> instance_keys;  // server-side only
};

struct VerificationTask {
  std::string id;
  std::string template_id;
  std::string question;
  Sentence sentence;
  std::vector<AnswerSpan> gold;  // never sent to annotators
};

struct CollectionPayload {
  std::vector<std::string> templates;
};

struct VerificationPayload {
  std::optional<std::pair<std::size_t, std::size_t>> span;  // nullopt = unanswerable
};

struct AnnotatorResponse {
  std::string task_id;
  std::string annotator_id;
  std::variant<CollectionPayload, VerificationPayload> payload;
  std::string timestamp;
};

// 3 example sets x 3 annotator slots x {name shown, name hidden}. Requires at
// least 4 distinct instances.
std::vector<CollectionTask> create_collection_tasks(const Relation& relation,
                                                    const std::vector<SlotFillingInstance>& instances,
                                                    std::uint64_t seed);

// Throws MalformedTemplateError naming the offending template.
void validate_collection_payload(const CollectionPayload& payload);

// Dedup key: lowercased, whitespace collapsed.
std::string template_key(std::string_view text);

struct VerificationBatch {
  std::vector<VerificationTask> tasks;
  std::size_t requested = 0;
};

// Samples up to n_trials instances whose keys are not in `used`.
VerificationBatch create_verification_tasks(const QuestionTemplate& tmpl,
                                            const std::vector<SlotFillingInstance>& instances,
                                            const std::set<std::string>& used, int n_trials,
                                            std::uint64_t seed);

struct VerificationOutcome {
  VerificationTask task;
  VerificationPayload response;
};

// Correct responses are judged like predictions (TP, or TN on empty gold).
// Verified iff correct >= ceil(0.6 n) and the mean overlap F1 of answered
// responses is >= 0.75. No responses leaves the template a candidate.
QuestionTemplate evaluate_template(QuestionTemplate tmpl,
                                   const std::vector<VerificationOutcome>& responses);

std::string instance_key(const SlotFillingInstance& instance);

// Thread-safe service state over an append-only event log in `data_dir`.
class AnnotationService {
 public:
  struct Options {
    std::uint64_t seed = 0;
    int n_trials = kDefaultVerificationTrials;
    std::size_t snapshot_every = 50;
  };

  // Reads instances.jsonl (and relations.jsonl if present) from data_dir and
  // replays events.jsonl.
  AnnotationService(std::filesystem::path data_dir, Options options);
  // In-memory inputs; events still persist under data_dir.
  AnnotationService(std::filesystem::path data_dir, std::vector<Relation> relations,
                    std::vector<SlotFillingInstance> instances, Options options);

  std::optional<CollectionTask> next_collection_task(const std::string& annotator);
  std::optional<VerificationTask> next_verification_task(const std::string& annotator);

  // Returns ids of the (possibly pre-existing) templates the submission maps to.
  std::vector<std::string> submit_collection(const AnnotatorResponse& response);
  void submit_verification(const AnnotatorResponse& response);

  std::vector<QuestionTemplate> templates(const std::optional<std::string>& relation,
                                          const std::optional<TemplateStatus>& status) const;
  QuestionTemplate evaluate(const std::string& template_id);

  std::size_t collection_task_count() const;
  std::size_t verification_task_count(const std::string& template_id) const;
  std::vector<std::string> shortfalls() const;

 private:
  void init();
  void replay();
  void append_event(const Json& event);
  void write_snapshot();
  std::vector<std::string> apply_collection(const AnnotatorResponse& response);
  void apply_verification(const AnnotatorResponse& response);
  QuestionTemplate apply_evaluate(const std::string& template_id);

  std::filesystem::path dir_;
  Options options_;
  std::map<std::string, Relation> relations_;
  std::map<std::string, std::vector<SlotFillingInstance>> instances_;

  mutable std::shared_mutex mu_;
  std::vector<CollectionTask> collection_tasks_;
  std::map<std::string, std::size_t> collection_index_;
  std::set<std::string> collection_done_;
  std::map<std::string, std::string> collection_lease_;
  std::map<std::string, std::set<std::string>> annotator_groups_;  // groups worked per annotator
  std::map<std::string, std::set<std::string>> used_instances_;  // per relation

  std::map<std::string, QuestionTemplate> templates_;
  std::map<std::string, std::map<std::string, std::string>> template_keys_;  // relation -> key -> id
  std::map<std::string, std::size_t> template_counter_;
  std::map<std::string, VerificationTask> verification_tasks_;
  std::vector<std::string> verification_order_;
  std::map<std::string, std::string> verification_lease_;
  std::map<std::string, VerificationPayload> verification_responses_;
  std::vector<std::string> shortfalls_;
  std::size_t events_ = 0;
};

Json task_json(const CollectionTask& task);
Json task_json(const VerificationTask& task);  // without gold answers
AnnotatorResponse parse_collection_response(const Json& body);
AnnotatorResponse parse_verification_response(const Json& body);

}  // namespace slotshot
