#pragma once

#include <stdexcept>
#include <string>

namespace grs {

// Bad input: malformed documents, violated preconditions. CLI exit status 1.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A computed result failed its own postcondition. Always a bug; CLI exit status 2.
class InvariantError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

inline void ensure(bool ok, const std::string& what) {
  if (!ok) throw InvariantError(what);
}

}  // namespace grs
