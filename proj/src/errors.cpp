#include "ontoq/errors.hpp"

namespace ontoq {

namespace {

std::string describe_parse_error(std::size_t line, std::size_t column, const std::vector<std::string>& expected,
                                 const std::string& found) {
  std::string msg = "parse error at " + std::to_string(line) + ":" + std::to_string(column) + ": expected ";
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i > 0) msg += i + 1 == expected.size() ? " or " : ", ";
    msg += expected[i];
  }
  msg += ", found " + found;
  return msg;
}

std::string describe_residual(const std::vector<std::string>& residual) {
  std::string msg = "could not identify a resource kind in the query";
  if (!residual.empty()) {
    msg += "; unrecognized terms:";
    for (const auto& t : residual) msg += " " + t;
  }
  return msg;
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, std::vector<std::string> expected, std::string found)
    : Error(ErrorCode::ParseError, describe_parse_error(line, column, expected, found)),
      line_(line),
      column_(column),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

UncompilableIntent::UncompilableIntent(std::vector<std::string> residual)
    : Error(ErrorCode::UncompilableIntent, describe_residual(residual)), residual_(std::move(residual)) {}

}  // namespace ontoq
