#include "slotshot/annotation.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <mutex>

#include "slotshot/error.hpp"
#include "slotshot/evaluation.hpp"
#include "slotshot/random.hpp"

namespace slotshot {

std::string instance_key(const SlotFillingInstance& instance) {
  return instance.relation_id + "|" + instance.entity.id + "|" + sentence_key(instance.sentence);
}

MaskedExample mask_example(const SlotFillingInstance& instance) {
  const auto& sentence = instance.sentence;
  const auto folded = folded_tokens(sentence.tokens);
  std::optional<std::pair<std::size_t, std::size_t>> mention;  // token range
  for (const auto& form : instance.entity.surface_forms()) {
    const auto needle = folded_tokens(form);
    if (auto at = find_sequence(folded, needle)) {
      if (!mention || *at < mention->first) mention = std::make_pair(*at, *at + needle.size() - 1);
    }
  }
  MaskedExample out;
  if (!mention) {
    out.text = sentence.text;
    for (const auto& a : instance.answers) {
      out.answers.push_back({sentence.tokens[a.token_start].start, sentence.tokens[a.token_end].end});
    }
    return out;
  }
  const std::size_t cut_begin = sentence.tokens[mention->first].start;
  const std::size_t cut_end = sentence.tokens[mention->second].end;
  out.text = sentence.text.substr(0, cut_begin) + std::string(kPlaceholder) +
             sentence.text.substr(cut_end);
  const auto shift = [&](std::size_t offset) {
    return offset >= cut_end ? offset - (cut_end - cut_begin) + kPlaceholder.size() : offset;
  };
  for (const auto& a : instance.answers) {
    const std::size_t s = sentence.tokens[a.token_start].start;
    const std::size_t e = sentence.tokens[a.token_end].end;
    if (s < cut_end && e > cut_begin) continue;  // answer overlaps the masked mention
    out.answers.push_back({shift(s), shift(e)});
  }
  return out;
}

std::vector<CollectionTask> create_collection_tasks(const Relation& relation,
                                                    const std::vector<SlotFillingInstance>& instances,
                                                    std::uint64_t seed) {
  std::map<std::string, const SlotFillingInstance*> distinct;
  for (const auto& inst : instances) {
    if (inst.relation_id == relation.id && !inst.answers.empty()) {
      distinct.try_emplace(instance_key(inst), &inst);
    }
  }
  if (distinct.size() < kExamplesPerTask) {
    throw DataError("relation " + relation.id + " has " + std::to_string(distinct.size()) +
                    " usable instances; collection needs " + std::to_string(kExamplesPerTask));
  }
  std::vector<const SlotFillingInstance*> pool;
  for (const auto& [key, inst] : distinct) pool.push_back(inst);
  Rng rng(mix_seed(seed, "collection|" + relation.id));
  rng.shuffle(std::span<const SlotFillingInstance*>(pool));

  std::vector<CollectionTask> tasks;
  for (bool shown : {true, false}) {
    for (std::size_t set = 0; set < kExampleSets; ++set) {
      std::vector<MaskedExample> examples;
      std::vector<std::string> keys;
      for (std::size_t i = 0; i < kExamplesPerTask; ++i) {
        const auto* inst = pool[(set * kExamplesPerTask + i) % pool.size()];
        examples.push_back(mask_example(*inst));
        keys.push_back(instance_key(*inst));
      }
      for (std::size_t slot = 0; slot < kAnnotatorsPerSet; ++slot) {
        CollectionTask t;
        t.id = "col|" + relation.id + "|s" + std::to_string(set) + "|a" + std::to_string(slot) +
               (shown ? "|shown" : "|hidden");
        t.relation_id = relation.id;
        t.show_relation_name = shown;
        if (shown) t.relation_name = relation.name;
        t.example_set = set;
        t.slot = slot;
        t.example_sentences = examples;
        t.instance_keys = keys;
        tasks.push_back(std::move(t));
      }
    }
  }
  return tasks;
}

void validate_collection_payload(const CollectionPayload& payload) {
  if (payload.templates.size() != kTemplatesPerResponse) {
    throw MalformedTemplateError("expected " + std::to_string(kTemplatesPerResponse) +
                                 " templates, got " + std::to_string(payload.templates.size()));
  }
  for (const auto& t : payload.templates) check_placeholder(t);
}

std::string template_key(std::string_view text) {
  std::string out;
  bool space = false;
  for (char c : to_lower(text)) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

VerificationBatch create_verification_tasks(const QuestionTemplate& tmpl,
                                            const std::vector<SlotFillingInstance>& instances,
                                            const std::set<std::string>& used, int n_trials,
                                            std::uint64_t seed) {
  VerificationBatch batch;
  batch.requested = static_cast<std::size_t>(std::max(0, n_trials));
  std::map<std::string, const SlotFillingInstance*> fresh;
  for (const auto& inst : instances) {
    if (inst.relation_id != tmpl.relation_id) continue;
    auto key = instance_key(inst);
    if (!used.count(key)) fresh.try_emplace(std::move(key), &inst);
  }
  std::vector<const SlotFillingInstance*> pool;
  for (const auto& [k, inst] : fresh) pool.push_back(inst);
  Rng rng(mix_seed(seed, "verification|" + tmpl.id));
  rng.shuffle(std::span<const SlotFillingInstance*>(pool));
  pool.resize(std::min(pool.size(), batch.requested));
  for (std::size_t i = 0; i < pool.size(); ++i) {
    VerificationTask t;
    t.id = "ver|" + tmpl.id + "|" + std::to_string(i);
    t.template_id = tmpl.id;
    t.question = instantiate(tmpl, pool[i]->entity);
    t.sentence = pool[i]->sentence;
    t.gold = pool[i]->answers;
    batch.tasks.push_back(std::move(t));
  }
  return batch;
}

QuestionTemplate evaluate_template(QuestionTemplate tmpl,
                                   const std::vector<VerificationOutcome>& responses) {
  if (responses.empty()) return tmpl;
  int correct = 0;
  int answered = 0;
  double f1_sum = 0.0;
  for (const auto& r : responses) {
    const auto gold = answer_texts(r.task.gold);
    Prediction p;
    if (r.response.span) {
      const auto [s, e] = *r.response.span;
      p.answer = PredictedSpan{s, e, span_text(r.task.sentence, s, e)};
      p.probability = 1.0;
      ++answered;
      f1_sum += gold.empty() ? 0.0 : best_overlap_f1(p.answer->text, gold);
    }
    const auto outcome = judge_instance(p, std::span<const std::string>(gold)).outcome;
    if (outcome == Outcome::kTruePositive || outcome == Outcome::kTrueNegative) ++correct;
  }
  const int n = static_cast<int>(responses.size());
  const int needed = (6 * n + 9) / 10;  // ceil(0.6 n) in integers
  const double mean_f1 = answered ? f1_sum / answered : 0.0;
  tmpl.verification = {n, correct, mean_f1};
  const bool majority = correct >= needed;
  const bool overlap_ok = mean_f1 >= kMinMeanOverlapF1 - 1e-12;
  tmpl.status = (majority && overlap_ok) ? TemplateStatus::kVerified : TemplateStatus::kRejected;
  return tmpl;
}

// ---------------------------------------------------------------------------

AnnotationService::AnnotationService(std::filesystem::path data_dir, Options options)
    : dir_(std::move(data_dir)), options_(options) {
  const auto rel_path = dir_ / "relations.jsonl";
  if (std::filesystem::exists(rel_path)) {
    for (auto& r : read_jsonl<Relation>(rel_path)) relations_[r.id] = std::move(r);
  }
  for (auto& inst : read_jsonl<SlotFillingInstance>(dir_ / "instances.jsonl")) {
    instances_[inst.relation_id].push_back(std::move(inst));
  }
  init();
}

AnnotationService::AnnotationService(std::filesystem::path data_dir,
                                     std::vector<Relation> relations,
                                     std::vector<SlotFillingInstance> instances, Options options)
    : dir_(std::move(data_dir)), options_(options) {
  for (auto& r : relations) relations_[r.id] = std::move(r);
  for (auto& inst : instances) instances_[inst.relation_id].push_back(std::move(inst));
  init();
}

void AnnotationService::init() {
  std::filesystem::create_directories(dir_);
  for (const auto& [rel_id, list] : instances_) {
    Relation rel{rel_id, rel_id};
    if (auto it = relations_.find(rel_id); it != relations_.end()) rel = it->second;
    try {
      for (auto& t : create_collection_tasks(rel, list, options_.seed)) {
        for (const auto& k : t.instance_keys) used_instances_[rel_id].insert(k);
        collection_index_[t.id] = collection_tasks_.size();
        collection_tasks_.push_back(std::move(t));
      }
    } catch (const DataError& e) {
      shortfalls_.push_back(e.what());
    }
  }
  replay();
}

void AnnotationService::replay() {
  const auto path = dir_ / "events.jsonl";
  if (!std::filesystem::exists(path)) return;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto event = Json::parse(line);
    const auto type = event.at("type").get<std::string>();
    if (type == "collection") {
      apply_collection(parse_collection_response(event));
    } else if (type == "verification") {
      apply_verification(parse_verification_response(event));
    } else if (type == "evaluate") {
      apply_evaluate(event.at("template_id").get<std::string>());
    }
    ++events_;
  }
}

void AnnotationService::append_event(const Json& event) {
  std::ofstream out(dir_ / "events.jsonl", std::ios::app | std::ios::binary);
  out << event.dump() << '\n';
  out.flush();
  if (!out) throw DataError("cannot append to event log in " + dir_.string());
  ++events_;
  if (options_.snapshot_every && events_ % options_.snapshot_every == 0) write_snapshot();
}

void AnnotationService::write_snapshot() {
  Json templates = Json::array();
  for (const auto& [id, t] : templates_) templates.push_back(t);
  const auto tmp = dir_ / "snapshot.json.tmp";
  write_json(tmp, Json{{"events", events_}, {"templates", templates}});
  std::filesystem::rename(tmp, dir_ / "snapshot.json");
}

namespace {

std::string now_iso8601() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string group_of(const CollectionTask& t) {
  return t.relation_id + "|" + std::to_string(t.example_set) + "|" +
         (t.show_relation_name ? "shown" : "hidden");
}

}  // namespace

std::optional<CollectionTask> AnnotationService::next_collection_task(const std::string& annotator) {
  std::unique_lock lock(mu_);
  for (const auto& [task_id, holder] : collection_lease_) {
    if (holder == annotator && !collection_done_.count(task_id)) {
      return collection_tasks_[collection_index_.at(task_id)];
    }
  }
  auto& groups = annotator_groups_[annotator];
  for (const auto& t : collection_tasks_) {
    if (collection_done_.count(t.id) || collection_lease_.count(t.id)) continue;
    if (groups.count(group_of(t))) continue;
    collection_lease_[t.id] = annotator;
    groups.insert(group_of(t));
    return t;
  }
  return std::nullopt;
}

std::vector<std::string> AnnotationService::submit_collection(const AnnotatorResponse& response) {
  const auto& payload = std::get<CollectionPayload>(response.payload);
  std::unique_lock lock(mu_);
  auto it = collection_index_.find(response.task_id);
  if (it == collection_index_.end()) throw DataError("unknown collection task " + response.task_id);
  if (collection_done_.count(response.task_id)) {
    throw DataError("collection task already completed: " + response.task_id);
  }
  if (auto lease = collection_lease_.find(response.task_id);
      lease != collection_lease_.end() && lease->second != response.annotator_id) {
    throw DataError("collection task " + response.task_id + " is assigned to another annotator");
  }
  validate_collection_payload(payload);
  Json event = {{"type", "collection"},
                {"task_id", response.task_id},
                {"annotator_id", response.annotator_id},
                {"templates", payload.templates},
                {"timestamp", response.timestamp.empty() ? now_iso8601() : response.timestamp}};
  append_event(event);
  return apply_collection(response);
}

std::vector<std::string> AnnotationService::apply_collection(const AnnotatorResponse& response) {
  const auto& payload = std::get<CollectionPayload>(response.payload);
  const auto& task = collection_tasks_.at(collection_index_.at(response.task_id));
  collection_done_.insert(task.id);
  annotator_groups_[response.annotator_id].insert(group_of(task));
  std::vector<std::string> ids;
  auto& keys = template_keys_[task.relation_id];
  for (const auto& text : payload.templates) {
    const auto key = template_key(text);
    if (auto found = keys.find(key); found != keys.end()) {
      ids.push_back(found->second);
      continue;
    }
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "-t%04zu", ++template_counter_[task.relation_id]);
    QuestionTemplate tmpl;
    tmpl.id = task.relation_id + suffix;
    tmpl.relation_id = task.relation_id;
    tmpl.text = text;
    tmpl.source = task.show_relation_name ? TemplateSource::kShownName : TemplateSource::kHiddenName;
    tmpl.status = TemplateStatus::kCandidate;
    keys[key] = tmpl.id;
    ids.push_back(tmpl.id);

    auto batch = create_verification_tasks(tmpl, instances_[task.relation_id],
                                           used_instances_[task.relation_id], options_.n_trials,
                                           options_.seed);
    if (batch.tasks.size() < batch.requested) {
      shortfalls_.push_back(tmpl.id + ": " + std::to_string(batch.tasks.size()) + " of " +
                            std::to_string(batch.requested) + " verification trials available");
    }
    for (auto& v : batch.tasks) {
      verification_order_.push_back(v.id);
      verification_tasks_[v.id] = std::move(v);
    }
    templates_[tmpl.id] = std::move(tmpl);
  }
  return ids;
}

std::optional<VerificationTask> AnnotationService::next_verification_task(
    const std::string& annotator) {
  std::unique_lock lock(mu_);
  auto open = [&](const VerificationTask& t) {
    return !verification_responses_.count(t.id) &&
           templates_.at(t.template_id).status == TemplateStatus::kCandidate;
  };
  for (const auto& [task_id, holder] : verification_lease_) {
    if (holder == annotator && open(verification_tasks_.at(task_id))) {
      return verification_tasks_.at(task_id);
    }
  }
  for (const auto& id : verification_order_) {
    const auto& t = verification_tasks_.at(id);
    if (!open(t) || verification_lease_.count(id)) continue;
    verification_lease_[id] = annotator;
    return t;
  }
  return std::nullopt;
}

void AnnotationService::submit_verification(const AnnotatorResponse& response) {
  const auto& payload = std::get<VerificationPayload>(response.payload);
  std::unique_lock lock(mu_);
  auto it = verification_tasks_.find(response.task_id);
  if (it == verification_tasks_.end()) {
    throw DataError("unknown verification task " + response.task_id);
  }
  if (verification_responses_.count(response.task_id)) {
    throw DataError("verification task already answered: " + response.task_id);
  }
  if (auto lease = verification_lease_.find(response.task_id);
      lease != verification_lease_.end() && lease->second != response.annotator_id) {
    throw DataError("verification task " + response.task_id + " is assigned to another annotator");
  }
  if (payload.span) {
    const auto [s, e] = *payload.span;
    if (s > e || e >= it->second.sentence.tokens.size()) {
      throw DataError("selected span outside the sentence");
    }
  }
  Json event = {{"type", "verification"},
                {"task_id", response.task_id},
                {"annotator_id", response.annotator_id},
                {"timestamp", response.timestamp.empty() ? now_iso8601() : response.timestamp}};
  if (payload.span) {
    event["span"] = {{"token_start", payload.span->first}, {"token_end", payload.span->second}};
  } else {
    event["unanswerable"] = true;
  }
  append_event(event);
  apply_verification(response);
}

void AnnotationService::apply_verification(const AnnotatorResponse& response) {
  verification_responses_[response.task_id] = std::get<VerificationPayload>(response.payload);
}

QuestionTemplate AnnotationService::evaluate(const std::string& template_id) {
  std::unique_lock lock(mu_);
  if (!templates_.count(template_id)) throw DataError("unknown template " + template_id);
  append_event(Json{{"type", "evaluate"}, {"template_id", template_id}});
  auto result = apply_evaluate(template_id);
  write_snapshot();
  return result;
}

QuestionTemplate AnnotationService::apply_evaluate(const std::string& template_id) {
  auto& tmpl = templates_.at(template_id);
  std::vector<VerificationOutcome> outcomes;
  for (const auto& [task_id, payload] : verification_responses_) {
    const auto& task = verification_tasks_.at(task_id);
    if (task.template_id == template_id) outcomes.push_back({task, payload});
  }
  tmpl = evaluate_template(tmpl, outcomes);
  return tmpl;
}

std::vector<QuestionTemplate> AnnotationService::templates(
    const std::optional<std::string>& relation, const std::optional<TemplateStatus>& status) const {
  std::shared_lock lock(mu_);
  std::vector<QuestionTemplate> out;
  for (const auto& [id, t] : templates_) {
    if (relation && t.relation_id != *relation) continue;
    if (status && t.status != *status) continue;
    out.push_back(t);
  }
  return out;
}

std::size_t AnnotationService::collection_task_count() const {
  std::shared_lock lock(mu_);
  return collection_tasks_.size();
}

std::size_t AnnotationService::verification_task_count(const std::string& template_id) const {
  std::shared_lock lock(mu_);
  return static_cast<std::size_t>(
      std::count_if(verification_tasks_.begin(), verification_tasks_.end(),
                    [&](const auto& kv) { return kv.second.template_id == template_id; }));
}

std::vector<std::string> AnnotationService::shortfalls() const {
  std::shared_lock lock(mu_);
  return shortfalls_;
}

Json task_json(const CollectionTask& task) {
  Json sentences = Json::array();
  for (const auto& ex : task.example_sentences) {
    Json underlines = Json::array();
    for (const auto& u : ex.answers) underlines.push_back({{"start", u.start}, {"end", u.end}});
    sentences.push_back({{"text", ex.text}, {"answers", underlines}});
  }
  Json j = {{"id", task.id},
            {"relation_id", task.relation_id},
            {"show_relation_name", task.show_relation_name},
            {"example_sentences", sentences},
            {"placeholder", kPlaceholder},
            {"templates_required", kTemplatesPerResponse}};
  if (task.show_relation_name) j["relation_name"] = task.relation_name;
  return j;
}

Json task_json(const VerificationTask& task) {
  return {{"id", task.id},
          {"template_id", task.template_id},
          {"question", task.question},
          {"sentence", {{"text", task.sentence.text}, {"tokens", token_texts(task.sentence.tokens)}}}};
}

AnnotatorResponse parse_collection_response(const Json& body) {
  AnnotatorResponse r;
  try {
    r.task_id = body.at("task_id").get<std::string>();
    r.annotator_id = body.at("annotator_id").get<std::string>();
    r.payload = CollectionPayload{body.at("templates").get<std::vector<std::string>>()};
    r.timestamp = body.value("timestamp", std::string());
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed collection response: ") + e.what());
  }
  return r;
}

AnnotatorResponse parse_verification_response(const Json& body) {
  AnnotatorResponse r;
  try {
    r.task_id = body.at("task_id").get<std::string>();
    r.annotator_id = body.at("annotator_id").get<std::string>();
    r.timestamp = body.value("timestamp", std::string());
    VerificationPayload p;
    const bool unanswerable = body.value("unanswerable", false);
    if (body.contains("span") && !body["span"].is_null()) {
      if (unanswerable) throw DataError("response both selects a span and marks it unanswerable");
      p.span = std::make_pair(body["span"].at("token_start").get<std::size_t>(),
                              body["span"].at("token_end").get<std::size_t>());
    } else if (!unanswerable) {
      throw DataError("verification response needs a span or \"unanswerable\": true");
    }
    r.payload = p;
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed verification response: ") + e.what());
  }
  return r;
}

}  // namespace slotshot
