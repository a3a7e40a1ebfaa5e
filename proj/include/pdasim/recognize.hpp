#pragma once

#include <string>
#include <vector>

#include "pdasim/engine.hpp"
#include "pdasim/grammar.hpp"

namespace pdasim {

struct RecognizeResult {
  bool accepted = false;
  Outcome outcome;
};

// Context-free recognition through the nondeterministic engines.  Empty
// input is answered from the grammar's nullability; everything else goes
// through left-recursion elimination (unless disabled, to demonstrate how
// the termination check cuts left recursion short), compilation to a 1NPDA,
// and a run.
inline RecognizeResult recognize(const Grammar& g, const std::vector<std::string>& tokens,
                                 RunOptions opts = {.engine = EngineKind::sim_n},
                                 bool eliminate = true) {
  if (engine_is_deterministic(opts.engine))
    fail(Errc::engine_mismatch, "recognize needs a nondeterministic engine (intn/simn)");
  RecognizeResult res;
  if (tokens.empty()) {
    res.accepted = generates_empty(g);
    res.outcome.verdict = res.accepted ? Verdict::accepted : Verdict::rejected;
    res.outcome.reject_reason = RejectReason::exhausted;
    return res;
  }
  Grammar gg = eliminate ? eliminate_left_recursion(g) : g;
  CompiledNpda compiled = compile_to_npda(gg);
  res.outcome = run(compiled.automaton, tokens, opts);
  res.accepted = res.outcome.accepted();
  return res;
}

}  // namespace pdasim
