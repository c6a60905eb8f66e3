#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace reach {

// A state is a fixed-length vector of value indices, one per variable.
// Index j is always < |domain_j|; the mapping between indices and actual
// values lives in the Domain of each variable.
using StateVector = std::vector<uint32_t>;

struct SourcePos {
  int line = 0;
  int col = 0;
};

inline std::string to_string(const SourcePos& p) {
  return std::to_string(p.line) + ":" + std::to_string(p.col);
}

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Syntax / name errors with a source position.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, SourcePos pos)
      : Error(to_string(pos) + ": " + msg), pos_(pos) {}
  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

// Elaboration, typing and runtime model errors (bad constant, empty domain,
// out-of-domain assignment, enumeration blow-up, ...).
class ModelError : public Error {
 public:
  using Error::Error;
};

// Wire protocol and transport errors.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace reach
