#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pdasim {

// One error type for the whole library; `code` tells callers (and the CLI
// exit-status mapping) what went wrong without parsing the message.
enum class Errc {
  parse_error,
  undeclared,
  missing_decl,
  reserved_name,
  no_rule,
  no_follow_rule,
  head_out_of_bounds,
  precondition,
  capacity,
  engine_mismatch,
  accept_invalid,
  budget_guard,
  unknown_name,
  empty_grammar,
  useless_grammar,
  io_error,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string msg)
      : std::runtime_error(std::move(msg)), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace pdasim
