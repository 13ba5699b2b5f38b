#pragma once

#include <stdexcept>
#include <string>

namespace freeprob {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ground-set size out of range (k = 0, k above the enumeration cap, ...).
class SizeError : public Error {
 public:
  using Error::Error;
};

// Malformed input object (bad partition, non-hermitian table, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Argument outside the domain of an operation (foreign letter, index range,
// mismatched sizes).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Möbius requested on a pair that is not ordered.
class OrderError : public Error {
 public:
  using Error::Error;
};

// Degree or table-size cap exceeded.
class CapError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace freeprob
