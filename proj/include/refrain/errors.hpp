#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace refrain {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Structurally invalid score, marker layout, or JSON document.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Malformed binary input. Carries the byte offset where parsing failed.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " (byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// Recognized but unsupported input (e.g. SMF format 2).
class UnsupportedFormatError : public Error {
public:
    using Error::Error;
};

// Empty performance or score where the operation needs at least one element.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

// Filesystem-level failure: unreadable or unwritable path.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace refrain
