#include "slotshot/serialization.hpp"

#include <algorithm>

namespace slotshot {
namespace {

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw DataError(std::string("missing field \"") + key + "\"");
  return j.at(key).get<T>();
}

}  // namespace

void to_json(Json& j, const Relation& r) { j = {{"id", r.id}, {"name", r.name}}; }

void from_json(const Json& j, Relation& r) {
  r.id = field<std::string>(j, "id");
  r.name = field<std::string>(j, "name");
  if (r.id.empty() || r.name.empty()) throw DataError("relation id and name must be non-empty");
}

void to_json(Json& j, const Entity& e) {
  j = {{"id", e.id}, {"name", e.name}, {"aliases", e.aliases}};
}

void from_json(const Json& j, Entity& e) {
  e.id = field<std::string>(j, "id");
  e.name = field<std::string>(j, "name");
  e.aliases = j.value("aliases", std::vector<std::string>{});
  if (e.id.empty() || e.name.empty()) throw DataError("entity id and name must be non-empty");
  auto sorted = e.aliases;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DataError("entity " + e.id + " has duplicate aliases");
  }
}

void to_json(Json& j, const Fact& f) {
  j = {{"relation_id", f.relation_id},
       {"subject_entity_id", f.subject_entity_id},
       {"object_text", f.object_text}};
}

void from_json(const Json& j, Fact& f) {
  f.relation_id = field<std::string>(j, "relation_id");
  f.subject_entity_id = field<std::string>(j, "subject_entity_id");
  f.object_text = field<std::string>(j, "object_text");
}

void to_json(Json& j, const Sentence& s) {
  j = {{"document_id", s.document_id}, {"index", s.index}, {"text", s.text}};
}

void from_json(const Json& j, Sentence& s) {
  s = make_sentence(field<std::string>(j, "document_id"), field<std::size_t>(j, "index"),
                    field<std::string>(j, "text"));
}

void to_json(Json& j, const AnswerSpan& a) {
  j = {{"document_id", a.sentence_ref.document_id},
       {"sentence_index", a.sentence_ref.sentence_index},
       {"token_start", a.token_start},
       {"token_end", a.token_end},
       {"text", a.text}};
}

void from_json(const Json& j, AnswerSpan& a) {
  a.sentence_ref.document_id = field<std::string>(j, "document_id");
  a.sentence_ref.sentence_index = field<std::size_t>(j, "sentence_index");
  a.token_start = field<std::size_t>(j, "token_start");
  a.token_end = field<std::size_t>(j, "token_end");
  a.text = field<std::string>(j, "text");
}

void to_json(Json& j, const SlotFillingInstance& i) {
  j = {{"relation_id", i.relation_id},
       {"entity", i.entity},
       {"sentence", i.sentence},
       {"answers", i.answers}};
}

void from_json(const Json& j, SlotFillingInstance& i) {
  i.relation_id = field<std::string>(j, "relation_id");
  i.entity = field<Entity>(j, "entity");
  i.sentence = field<Sentence>(j, "sentence");
  i.answers = field<std::vector<AnswerSpan>>(j, "answers");
  validate(i);
}

void to_json(Json& j, const RCExample& e) {
  j = {{"id", e.id},
       {"relation_id", e.relation_id},
       {"entity_id", e.entity_id},
       {"entity_name", e.entity_name},
       {"template_id", e.template_id},
       {"question_text", e.question_text},
       {"question", e.question},
       {"sentence", e.sentence},
       {"answers", e.answers},
       {"polarity", e.polarity == Polarity::kPositive ? "positive" : "negative"}};
}

void from_json(const Json& j, RCExample& e) {
  e.id = field<std::string>(j, "id");
  e.relation_id = field<std::string>(j, "relation_id");
  e.entity_id = field<std::string>(j, "entity_id");
  e.entity_name = j.value("entity_name", std::string());
  e.template_id = j.value("template_id", std::string());
  e.question_text = j.value("question_text", std::string());
  e.question = field<std::vector<std::string>>(j, "question");
  e.sentence = field<Sentence>(j, "sentence");
  e.answers = field<std::vector<AnswerSpan>>(j, "answers");
  const auto polarity = field<std::string>(j, "polarity");
  if (polarity == "positive") {
    e.polarity = Polarity::kPositive;
  } else if (polarity == "negative") {
    e.polarity = Polarity::kNegative;
  } else {
    throw DataError("unknown polarity: " + polarity);
  }
  validate(e);
}

std::string to_string(TemplateSource s) {
  switch (s) {
    case TemplateSource::kShownName: return "shown_name";
    case TemplateSource::kHiddenName: return "hidden_name";
    case TemplateSource::kManual: return "manual";
  }
  return "manual";
}

std::string to_string(TemplateStatus s) {
  switch (s) {
    case TemplateStatus::kCandidate: return "candidate";
    case TemplateStatus::kVerified: return "verified";
    case TemplateStatus::kRejected: return "rejected";
  }
  return "candidate";
}

TemplateSource parse_template_source(std::string_view s) {
  if (s == "shown_name") return TemplateSource::kShownName;
  if (s == "hidden_name") return TemplateSource::kHiddenName;
  if (s == "manual") return TemplateSource::kManual;
  throw DataError("unknown template source: " + std::string(s));
}

TemplateStatus parse_template_status(std::string_view s) {
  if (s == "candidate") return TemplateStatus::kCandidate;
  if (s == "verified") return TemplateStatus::kVerified;
  if (s == "rejected") return TemplateStatus::kRejected;
  throw DataError("unknown template status: " + std::string(s));
}

void to_json(Json& j, const QuestionTemplate& t) {
  j = {{"id", t.id},
       {"relation_id", t.relation_id},
       {"text", t.text},
       {"source", to_string(t.source)},
       {"status", to_string(t.status)},
       {"verification",
        {{"n_trials", t.verification.n_trials},
         {"n_correct", t.verification.n_correct},
         {"mean_overlap_f1", t.verification.mean_overlap_f1}}}};
}

void from_json(const Json& j, QuestionTemplate& t) {
  t.id = field<std::string>(j, "id");
  t.relation_id = field<std::string>(j, "relation_id");
  t.text = field<std::string>(j, "text");
  t.source = parse_template_source(j.value("source", std::string("manual")));
  t.status = parse_template_status(j.value("status", std::string("candidate")));
  t.verification = {};
  if (j.contains("verification")) {
    const auto& v = j.at("verification");
    t.verification.n_trials = v.value("n_trials", 0);
    t.verification.n_correct = v.value("n_correct", 0);
    t.verification.mean_overlap_f1 = v.value("mean_overlap_f1", 0.0);
  }
  validate(t);
}

void from_json(const Json& j, DocumentRecord& d) {
  auto entity_id = field<std::string>(j, "entity_id");
  if (j.contains("sentences")) {
    d.document = make_document(entity_id, j.at("sentences").get<std::vector<std::string>>());
  } else {
    d.document = make_document(entity_id, field<std::string>(j, "text"));
  }
  d.entity.reset();
  if (j.contains("entity_name")) {
    Entity e;
    e.id = entity_id;
    e.name = j.at("entity_name").get<std::string>();
    e.aliases = j.value("aliases", std::vector<std::string>{});
    d.entity = std::move(e);
  }
}

Json document_json(const Document& doc, const Entity* entity) {
  Json sentences = Json::array();
  for (const auto& s : doc.sentences) sentences.push_back(s.text);
  Json j = {{"entity_id", doc.entity_id}, {"sentences", sentences}};
  if (entity) {
    j["entity_name"] = entity->name;
    j["aliases"] = entity->aliases;
  }
  return j;
}

void to_json(Json& j, const PredictionRecord& p) {
  j = {{"example_id", p.example_id},
       {"probability", p.prediction.probability},
       {"null_probability", p.prediction.null_probability}};
  if (p.prediction.answer) {
    j["answer_text"] = p.prediction.answer->text;
    j["token_start"] = p.prediction.answer->start;
    j["token_end"] = p.prediction.answer->end;
  } else {
    j["answer_text"] = nullptr;
  }
  if (!p.questions.empty()) j["questions"] = p.questions;
}

void from_json(const Json& j, PredictionRecord& p) {
  p.example_id = field<std::string>(j, "example_id");
  p.prediction = {};
  p.prediction.probability = field<double>(j, "probability");
  p.prediction.null_probability = field<double>(j, "null_probability");
  const auto& answer = j.at("answer_text");
  if (!answer.is_null()) {
    p.prediction.answer = PredictedSpan{j.value("token_start", std::size_t{0}),
                                        j.value("token_end", std::size_t{0}),
                                        answer.get<std::string>()};
  }
  p.questions = j.value("questions", std::vector<std::string>{});
}

void write_json(const std::filesystem::path& path, const Json& value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << value.dump(2) << '\n';
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace slotshot
