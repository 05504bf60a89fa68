#pragma once

#include <stdexcept>
#include <string>

namespace poik {

enum class errc {
  invalid_argument,
  domain_error,     // input outside the range where the operation is defined
  guard_exceeded,   // outside the numeric envelope of a reference path
  allocation_bound, // table size beyond the configured cap
  out_of_range,     // index past the end of a table
  bracket_failure,  // root bracketing never found a sign change
  singular_system,  // rank-deficient least-squares design matrix
};

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) { throw Error(code, what); }

} // namespace poik
