#pragma once

#include <stdexcept>
#include <string>

namespace qprim {

// Error categories surface 1:1 as qp_status codes through the C API.
enum class ErrorKind {
  InvalidArgument,
  InvalidExponent,
  RefinementCap,
  DoublingCap,
  IterationCap,
  Divergence,
  Parse,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace qprim
