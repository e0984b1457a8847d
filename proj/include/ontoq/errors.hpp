#pragma once

// Exception hierarchy shared by all ontoq modules. Every error carries a
// stable code so the CLI can map it to an exit status.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ontoq {

enum class ErrorCode {
  InvalidNode,
  DanglingEndpoint,
  InvalidQuery,
  ParseError,
  UnknownLabel,
  UnknownRelType,
  SizeCapExceeded,
  NoConvergence,
  Io,
  MalformedLine,
  OutOfOrder,
  MalformedEvent,
  InvalidLexicon,
  InvalidConfig,
  EmptyQuery,
  UncompilableIntent,
  EmptyGold,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidNode : public Error {
 public:
  explicit InvalidNode(const std::string& what) : Error(ErrorCode::InvalidNode, what) {}
};

class DanglingEndpoint : public Error {
 public:
  explicit DanglingEndpoint(std::string id)
      : Error(ErrorCode::DanglingEndpoint, "edge endpoint does not exist: " + id), id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class InvalidQuery : public Error {
 public:
  explicit InvalidQuery(const std::string& what) : Error(ErrorCode::InvalidQuery, what) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, std::vector<std::string> expected, std::string found);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }
  const std::string& found() const noexcept { return found_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::vector<std::string> expected_;
  std::string found_;
};

class UnknownLabel : public Error {
 public:
  explicit UnknownLabel(const std::string& label) : Error(ErrorCode::UnknownLabel, "unknown node label: " + label) {}
};

class UnknownRelType : public Error {
 public:
  explicit UnknownRelType(const std::string& rel)
      : Error(ErrorCode::UnknownRelType, "unknown relationship type: " + rel) {}
};

class SizeCapExceeded : public Error {
 public:
  explicit SizeCapExceeded(const std::string& what) : Error(ErrorCode::SizeCapExceeded, what) {}
};

class NoConvergence : public Error {
 public:
  explicit NoConvergence(const std::string& what) : Error(ErrorCode::NoConvergence, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::Io, what) {}
};

class OutOfOrder : public Error {
 public:
  OutOfOrder(std::uint64_t previous, std::uint64_t current)
      : Error(ErrorCode::OutOfOrder, "event out of order: seq " + std::to_string(current) + " after " +
                                         std::to_string(previous)),
        previous_(previous),
        current_(current) {}
  std::uint64_t previous() const noexcept { return previous_; }
  std::uint64_t current() const noexcept { return current_; }

 private:
  std::uint64_t previous_;
  std::uint64_t current_;
};

class MalformedEvent : public Error {
 public:
  MalformedEvent(std::size_t line, const std::string& why)
      : Error(ErrorCode::MalformedEvent, "malformed event on line " + std::to_string(line) + ": " + why),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class InvalidLexicon : public Error {
 public:
  explicit InvalidLexicon(const std::string& what) : Error(ErrorCode::InvalidLexicon, what) {}
};

class InvalidConfig : public Error {
 public:
  explicit InvalidConfig(const std::string& what) : Error(ErrorCode::InvalidConfig, what) {}
};

class EmptyQuery : public Error {
 public:
  EmptyQuery() : Error(ErrorCode::EmptyQuery, "query text is empty") {}
};

class UncompilableIntent : public Error {
 public:
  explicit UncompilableIntent(std::vector<std::string> residual);
  const std::vector<std::string>& residual_terms() const noexcept { return residual_; }

 private:
  std::vector<std::string> residual_;
};

class EmptyGold : public Error {
 public:
  explicit EmptyGold(const std::string& what) : Error(ErrorCode::EmptyGold, what) {}
};

}  // namespace ontoq
