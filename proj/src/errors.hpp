#pragma once

#include <stdexcept>
#include <string>

namespace optscale {

// Error taxonomy shared by the whole library; the C API maps each category
// to one status code.
enum class ErrorKind {
  domain,      // argument outside the mathematical domain
  data,        // malformed or out-of-range observed data
  param,       // invalid configuration / policy / prior
  state,       // operation illegal in the current controller phase
  degenerate,  // distribution normalizer underflowed
  io,          // file read/write failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace optscale
