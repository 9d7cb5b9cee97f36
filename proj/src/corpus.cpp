#include "slotshot/corpus.hpp"

#include <algorithm>
#include <set>

#include "slotshot/error.hpp"

namespace slotshot {

std::vector<std::string> Entity::surface_forms() const {
  std::vector<std::string> forms{name};
  forms.insert(forms.end(), aliases.begin(), aliases.end());
  return forms;
}

Sentence make_sentence(std::string document_id, std::size_t index, std::string text) {
  Sentence s;
  s.document_id = std::move(document_id);
  s.index = index;
  s.tokens = tokenize(text);
  s.text = std::move(text);
  return s;
}

Document make_document(std::string entity_id, std::string_view raw_text) {
  return make_document(std::move(entity_id), split_sentences(raw_text));
}

Document make_document(std::string entity_id, const std::vector<std::string>& sentences) {
  Document doc;
  doc.entity_id = std::move(entity_id);
  doc.sentences.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    doc.sentences.push_back(make_sentence(doc.entity_id, i, sentences[i]));
  }
  return doc;
}

std::string span_text(const Sentence& sentence, std::size_t first, std::size_t last) {
  if (first > last || last >= sentence.tokens.size()) {
    throw DataError("token range [" + std::to_string(first) + ", " + std::to_string(last) +
                    "] outside a sentence of " + std::to_string(sentence.tokens.size()) +
                    " tokens");
  }
  const auto begin = sentence.tokens.at(first).start;
  const auto end = sentence.tokens.at(last).end;
  return sentence.text.substr(begin, end - begin);
}

AnswerSpan make_answer(const Sentence& sentence, std::size_t first, std::size_t last) {
  return AnswerSpan{{sentence.document_id, sentence.index}, first, last,
                    span_text(sentence, first, last)};
}

std::string sentence_key(const Sentence& sentence) {
  return sentence.document_id + "#" + std::to_string(sentence.index);
}

std::string RCExample::instance_key() const {
  return relation_id + "|" + entity_id + "|" + sentence_key(sentence) + "|" +
         (polarity == Polarity::kPositive ? "pos" : "neg");
}

std::vector<std::string> token_texts(std::span<const Token> tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

void validate(const Token& token, std::string_view source) {
  if (token.start >= token.end) throw DataError("token has empty offset range");
  if (token.end > source.size()) throw DataError("token offset past end of text");
  if (source.substr(token.start, token.end - token.start) != token.text) {
    throw DataError("token text does not match source slice: " + token.text);
  }
}

void validate(const Sentence& sentence) {
  std::size_t prev_end = 0;
  for (const auto& t : sentence.tokens) {
    validate(t, sentence.text);
    if (t.start < prev_end) throw DataError("overlapping tokens in sentence");
    prev_end = t.end;
  }
}

void validate(const Document& document) {
  for (std::size_t i = 0; i < document.sentences.size(); ++i) {
    if (document.sentences[i].index != i) throw DataError("sentence indices out of order");
    validate(document.sentences[i]);
  }
}

void validate(const AnswerSpan& span, const Sentence& sentence) {
  if (span.token_start > span.token_end || span.token_end >= sentence.tokens.size()) {
    throw DataError("answer span out of sentence bounds");
  }
  if (span.sentence_ref != SentenceRef{sentence.document_id, sentence.index}) {
    throw DataError("answer span refers to a different sentence");
  }
  if (span.text != span_text(sentence, span.token_start, span.token_end)) {
    throw DataError("answer text does not match its tokens: " + span.text);
  }
}

void validate(const SlotFillingInstance& instance) {
  if (instance.relation_id.empty()) throw DataError("instance without relation id");
  if (instance.entity.id.empty()) throw DataError("instance without entity id");
  if (instance.answers.empty()) throw DataError("instance without answers");
  validate(instance.sentence);
  for (const auto& a : instance.answers) validate(a, instance.sentence);
  const auto folded = folded_tokens(instance.sentence.tokens);
  bool mentioned = false;
  for (const auto& form : instance.entity.surface_forms()) {
    if (find_sequence(folded, folded_tokens(form))) {
      mentioned = true;
      break;
    }
  }
  if (!mentioned) throw DataError("entity not mentioned in sentence: " + instance.entity.name);
}

void validate(const RCExample& example) {
  validate(example.sentence);
  for (const auto& a : example.answers) validate(a, example.sentence);
  if ((example.polarity == Polarity::kNegative) != example.answers.empty()) {
    throw DataError("polarity must be negative exactly when answers are empty");
  }
}

}  // namespace slotshot
