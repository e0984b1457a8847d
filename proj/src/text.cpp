#include "ontoq/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace ontoq {

namespace {

constexpr std::array<std::string_view, 46> kStopwords = {
    "a",    "all",  "an",    "and",   "any",    "are",   "as",     "at",     "be",   "been", "display", "do",
    "does", "find", "for",   "from",  "get",    "give",  "had",    "has",    "have", "i",    "in",      "into",
    "is",   "it",   "its",   "list",  "me",     "of",    "on",     "please", "show", "that", "the",     "there",
    "these", "this", "those", "to",   "was",    "were",  "what",   "which",  "who",  "with"};

bool is_token_char(unsigned char c) { return std::isalnum(c) || c == '.' || c == '_' || c == '-'; }
bool is_trim_char(char c) { return c == '.' || c == '_' || c == '-'; }

}  // namespace

bool is_stopword(std::string_view token) {
  return std::binary_search(kStopwords.begin(), kStopwords.end(), token);
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_token_char(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_token_char(static_cast<unsigned char>(text[j]))) ++j;
    std::size_t b = i, e = j;
    while (b < e && is_trim_char(text[b])) ++b;
    while (e > b && is_trim_char(text[e - 1])) --e;
    if (b < e) {
      Token t;
      t.original = std::string(text.substr(b, e - b));
      t.text = t.original;
      for (auto& c : t.text) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      t.offset = b;
      t.stopword = is_stopword(t.text);
      out.push_back(std::move(t));
    }
    i = j;
  }
  return out;
}

std::vector<std::string> content_terms(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : tokenize(text)) {
    if (!t.stopword) out.push_back(std::move(t.text));
  }
  return out;
}

std::string split_camel_case(std::string_view kind) {
  std::string out;
  for (std::size_t i = 0; i < kind.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(kind[i]);
    const bool boundary = i > 0 && std::isupper(c) && std::islower(static_cast<unsigned char>(kind[i - 1]));
    if (boundary) out += ' ';
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

}  // namespace ontoq
