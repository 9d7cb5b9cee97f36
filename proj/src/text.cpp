#include "slotshot/text.hpp"

#include <algorithm>
#include <cctype>

namespace slotshot {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_ascii_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

void emit(std::string_view text, std::size_t start, std::size_t end,
          std::vector<Token>& out) {
  out.push_back(Token{std::string(text.substr(start, end - start)), start, end});
}

// Tokenizes one whitespace-free chunk [start, end) of `text`.
void split_chunk(std::string_view text, std::size_t start, std::size_t end,
                 std::vector<Token>& out) {
  std::size_t lo = start;
  while (lo < end && is_ascii_punct(text[lo])) {
    emit(text, lo, lo + 1, out);
    ++lo;
  }
  std::size_t hi = end;
  std::vector<Token> tail;
  for (;;) {
    if (hi > lo && is_ascii_punct(text[hi - 1])) {
      tail.push_back(Token{std::string(1, text[hi - 1]), hi - 1, hi});
      --hi;
      continue;
    }
    // Possessive marker peels as one token.
    if (hi - lo >= 3 && (text[hi - 1] == 's' || text[hi - 1] == 'S') &&
        text[hi - 2] == '\'') {
      tail.push_back(Token{std::string(text.substr(hi - 2, 2)), hi - 2, hi});
      hi -= 2;
      continue;
    }
    break;
  }
  if (hi > lo) emit(text, lo, hi, out);
  out.insert(out.end(), tail.rbegin(), tail.rend());
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) split_chunk(text, start, i, tokens);
  }
  return tokens;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> sentences;
  auto push = [&](std::size_t from, std::size_t to) {
    while (from < to && is_space(text[from])) ++from;
    while (to > from && is_space(text[to - 1])) --to;
    if (to > from) sentences.emplace_back(text.substr(from, to - from));
  };
  std::size_t begin = 0;
  for (std::size_t i = 0; i + 2 < text.size(); ++i) {
    char c = text[i];
    if ((c == '.' || c == '!' || c == '?') && text[i + 1] == ' ' &&
        std::isupper(static_cast<unsigned char>(text[i + 2]))) {
      push(begin, i + 1);
      begin = i + 2;
    }
  }
  push(begin, text.size());
  return sentences;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_punctuation_token(std::string_view token) {
  return !token.empty() && std::all_of(token.begin(), token.end(), is_ascii_punct);
}

bool is_capitalized(std::string_view token) {
  return !token.empty() && std::isupper(static_cast<unsigned char>(token[0]));
}

bool has_digit(std::string_view token) {
  return std::any_of(token.begin(), token.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  });
}

std::vector<std::string> folded_tokens(std::span<const Token> tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(to_lower(t.text));
  return out;
}

std::vector<std::string> folded_tokens(std::string_view text) {
  auto tokens = tokenize(text);
  return folded_tokens(tokens);
}

std::optional<std::size_t> find_sequence(std::span<const std::string> haystack,
                                         std::span<const std::string> needle,
                                         std::size_t from) {
  if (needle.empty() || needle.size() > haystack.size()) return std::nullopt;
  for (std::size_t i = from; i + needle.size() <= haystack.size(); ++i) {
    if (std::equal(needle.begin(), needle.end(), haystack.begin() + i)) return i;
  }
  return std::nullopt;
}

std::string normalize_surface(std::string_view text) {
  auto folded = folded_tokens(text);
  return join(folded, " ");
}

std::string join(std::span<const std::string> parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace slotshot
