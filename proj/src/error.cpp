#include "tsschema/error.hpp"

namespace tss {

ParseError::ParseError(const std::string& message, std::size_t position)
    : Error("parse error at offset " + std::to_string(position) + ": " + message), position_(position) {}

ValidationError::ValidationError(const std::string& path, const std::string& message)
    : Error(path.empty() ? message : path + ": " + message), path_(path) {}

} // namespace tss
