#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scami {

// I/O failure while reading or writing files.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or unsupported file contents.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (missing key, incomplete table).
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

// The color normalization vanished: the pixels lie on (or too close to) a
// plane in RGB space and the invariant ratios are undefined.
struct ColorDegenerateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Core-spec DSL syntax error; position is a byte offset into the input.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t pos)
      : std::runtime_error(what), position(pos) {}
  std::size_t position = 0;
};

}  // namespace scami
