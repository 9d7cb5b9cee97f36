#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "slotshot/answer_engine.hpp"
#include "slotshot/corpus.hpp"
#include "slotshot/error.hpp"
#include "slotshot/querification.hpp"

namespace slotshot {

using Json = nlohmann::json;

void to_json(Json& j, const Relation& r);
void from_json(const Json& j, Relation& r);
void to_json(Json& j, const Entity& e);
void from_json(const Json& j, Entity& e);
void to_json(Json& j, const Fact& f);
void from_json(const Json& j, Fact& f);
// Sentences store text only; tokens are rebuilt by the tokenizer on read.
void to_json(Json& j, const Sentence& s);
void from_json(const Json& j, Sentence& s);
void to_json(Json& j, const AnswerSpan& a);
void from_json(const Json& j, AnswerSpan& a);
void to_json(Json& j, const SlotFillingInstance& i);
void from_json(const Json& j, SlotFillingInstance& i);
void to_json(Json& j, const RCExample& e);
void from_json(const Json& j, RCExample& e);
void to_json(Json& j, const QuestionTemplate& t);
void from_json(const Json& j, QuestionTemplate& t);

std::string to_string(TemplateSource s);
std::string to_string(TemplateStatus s);
TemplateSource parse_template_source(std::string_view s);
TemplateStatus parse_template_status(std::string_view s);

// documents.jsonl record: {"entity_id", "text" | "sentences", optional
// "entity_name", "aliases"}.
struct DocumentRecord {
  Document document;
  std::optional<Entity> entity;
};
void from_json(const Json& j, DocumentRecord& d);
Json document_json(const Document& doc, const Entity* entity = nullptr);

struct PredictionRecord {
  std::string example_id;
  Prediction prediction;
  std::vector<std::string> questions;  // example ids pooled by an ensemble
};
void to_json(Json& j, const PredictionRecord& p);
void from_json(const Json& j, PredictionRecord& p);

template <typename T>
std::vector<T> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<T> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(Json::parse(line).get<T>());
    } catch (const std::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

template <typename Range>
void write_jsonl(const std::filesystem::path& path, const Range& items) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& item : items) out << Json(item).dump() << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

void write_json(const std::filesystem::path& path, const Json& value);
Json read_json(const std::filesystem::path& path);

}  // namespace slotshot
