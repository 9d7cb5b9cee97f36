#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace slotshot {

// Offsets are UTF-8 byte offsets into the source text; [start, end).
struct Token {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

// Whitespace split, then leading/trailing ASCII punctuation and a trailing
// possessive 's are peeled off as separate tokens. Pure and deterministic.
std::vector<Token> tokenize(std::string_view text);

// Splits raw article text after ". ", "! " or "? " when the next character
// is an uppercase ASCII letter. Returned pieces are trimmed.
std::vector<std::string> split_sentences(std::string_view text);

std::string to_lower(std::string_view s);
bool is_punctuation_token(std::string_view token);
bool is_capitalized(std::string_view token);
bool has_digit(std::string_view token);

// Lowercased token texts; the normalization used for surface matching.
std::vector<std::string> folded_tokens(std::span<const Token> tokens);
std::vector<std::string> folded_tokens(std::string_view text);

// First index at which `needle` occurs contiguously in `haystack`.
// An empty needle never matches.
std::optional<std::size_t> find_sequence(std::span<const std::string> haystack,
                                         std::span<const std::string> needle,
                                         std::size_t from = 0);

// Lowercased tokens joined by single spaces.
std::string normalize_surface(std::string_view text);

std::string join(std::span<const std::string> parts, std::string_view sep);

}  // namespace slotshot
