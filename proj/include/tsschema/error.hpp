#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tss {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Syntax error in a statement; position is a byte offset into the text.
class ParseError : public Error {
public:
  ParseError(const std::string& message, std::size_t position);
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

/// Input document or AST violates a model invariant. The path locates the
/// offending element, e.g. "entities[1].attributes[0].cardinality".
class ValidationError : public Error {
public:
  ValidationError(const std::string& path, const std::string& message);
  const std::string& path() const { return path_; }

private:
  std::string path_;
};

} // namespace tss
