#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ontoq {

struct Token {
  std::string text;      // lowercased
  std::string original;  // as written in the input
  std::size_t offset = 0;
  bool stopword = false;
};

/// Lowercases and splits into maximal runs of [a-z0-9._-]. Leading and
/// trailing '.', '-' and '_' are trimmed so sentence punctuation does not
/// stick to words while identifiers like "ins-cloud-host-1427" survive.
/// Stopwords are kept and flagged.
std::vector<Token> tokenize(std::string_view text);

bool is_stopword(std::string_view token);

/// Lowercased non-stopword tokens.
std::vector<std::string> content_terms(std::string_view text);

/// "ComputeInstance" -> "compute instance", "NLB" -> "nlb".
std::string split_camel_case(std::string_view kind);

}  // namespace ontoq
