#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "slotshot/text.hpp"

namespace slotshot {

struct Relation {
  std::string id;
  std::string name;

  friend bool operator==(const Relation&, const Relation&) = default;
};

struct Entity {
  std::string id;
  std::string name;
  std::vector<std::string> aliases;

  // Name first, then aliases.
  std::vector<std::string> surface_forms() const;

  friend bool operator==(const Entity&, const Entity&) = default;
};

struct Sentence {
  std::string document_id;
  std::size_t index = 0;
  std::string text;
  std::vector<Token> tokens;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

Sentence make_sentence(std::string document_id, std::size_t index, std::string text);

struct Document {
  std::string entity_id;
  std::vector<Sentence> sentences;

  const std::string& id() const { return entity_id; }
};

// Builds a document from raw text (split into sentences) or pre-split text.
Document make_document(std::string entity_id, std::string_view raw_text);
Document make_document(std::string entity_id, const std::vector<std::string>& sentences);

struct SentenceRef {
  std::string document_id;
  std::size_t sentence_index = 0;

  friend auto operator<=>(const SentenceRef&, const SentenceRef&) = default;
};

// Token indices are inclusive on both ends.
struct AnswerSpan {
  SentenceRef sentence_ref;
  std::size_t token_start = 0;
  std::size_t token_end = 0;
  std::string text;

  friend bool operator==(const AnswerSpan&, const AnswerSpan&) = default;
};

// Source slice covering tokens [first, last].
std::string span_text(const Sentence& sentence, std::size_t first, std::size_t last);
AnswerSpan make_answer(const Sentence& sentence, std::size_t first, std::size_t last);

struct Fact {
  std::string relation_id;
  std::string subject_entity_id;
  std::string object_text;

  friend bool operator==(const Fact&, const Fact&) = default;
};

struct SlotFillingInstance {
  std::string relation_id;
  Entity entity;
  Sentence sentence;
  std::vector<AnswerSpan> answers;

  SentenceRef sentence_ref() const { return {sentence.document_id, sentence.index}; }

  friend bool operator==(const SlotFillingInstance&, const SlotFillingInstance&) = default;
};

enum class Polarity { kPositive, kNegative };

struct RCExample {
  std::string id;
  std::string relation_id;  // metadata; never shown to a scorer
  std::string entity_id;
  std::string entity_name;
  std::string template_id;
  std::string question_text;
  std::vector<std::string> question;
  Sentence sentence;
  std::vector<AnswerSpan> answers;
  Polarity polarity = Polarity::kPositive;

  // (relation, entity, sentence, polarity): examples sharing a key differ
  // only in the question asked.
  std::string instance_key() const;

  friend bool operator==(const RCExample&, const RCExample&) = default;
};

std::string sentence_key(const Sentence& sentence);
std::vector<std::string> token_texts(std::span<const Token> tokens);

// Invariant checks; throw DataError describing the first violation.
void validate(const Token& token, std::string_view source);
void validate(const Sentence& sentence);
void validate(const Document& document);
void validate(const AnswerSpan& span, const Sentence& sentence);
void validate(const SlotFillingInstance& instance);
void validate(const RCExample& example);

}  // namespace slotshot
