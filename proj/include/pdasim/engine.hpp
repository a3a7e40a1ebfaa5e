#pragma once

#include <algorithm>
#include <chrono>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "pdasim/automaton.hpp"
#include "pdasim/confset.hpp"
#include "pdasim/error.hpp"
#include "pdasim/metrics.hpp"

namespace pdasim {

// The four execution engines.  Int runs the automaton by plain recursion;
// Sim adds memoization of terminators, which turns exponential native runs
// into linear (deterministic) or cubic (nondeterministic) simulations.  The
// recursion is encoded as an explicit frame stack, so frame depth is bounded
// by the configuration count instead of the native call stack.

enum class EngineKind { int_d, sim_d, int_n, sim_n };

inline const char* engine_name(EngineKind e) {
  switch (e) {
    case EngineKind::int_d: return "intd";
    case EngineKind::sim_d: return "simd";
    case EngineKind::int_n: return "intn";
    case EngineKind::sim_n: return "simn";
  }
  return "?";
}

inline std::optional<EngineKind> engine_from_name(std::string_view s) {
  if (s == "intd") return EngineKind::int_d;
  if (s == "simd") return EngineKind::sim_d;
  if (s == "intn") return EngineKind::int_n;
  if (s == "simn") return EngineKind::sim_n;
  return std::nullopt;
}

inline bool engine_is_deterministic(EngineKind e) {
  return e == EngineKind::int_d || e == EngineKind::sim_d;
}

// Trace record stream: one line per event,
//   seq depth event state heads top [cardinality-on-return]
class TraceSink {
 public:
  explicit TraceSink(std::ostream& out) : out_(&out) {}

  void emit(const Automaton& aut, size_t depth, std::string_view event, const Conf& c,
            std::optional<uint64_t> card = std::nullopt) {
    (*out_) << seq_++ << ' ' << depth << ' ' << event << ' ' << aut.states.name(c.state)
            << ' ';
    for (int j = 0; j < aut.k(); ++j) {
      if (j) (*out_) << ',';
      (*out_) << c.heads[static_cast<size_t>(j)];
    }
    (*out_) << ' ' << aut.stack_syms.name(c.top);
    if (card) (*out_) << ' ' << *card;
    (*out_) << '\n';
  }

 private:
  std::ostream* out_;
  uint64_t seq_ = 0;
};

struct RunOptions {
  EngineKind engine = EngineKind::sim_d;
  uint64_t max_steps = 100'000'000;        // engine calls
  std::optional<uint64_t> max_depth;       // default n_conf + 1
  bool faithful = false;                   // IntD/SimD: no loop detection
  bool strict_accept = false;              // verify empty stack + heads on '>'
  TraceSink* trace = nullptr;
  std::optional<uint64_t> shuffle_seed;    // test mode: shuffle set iteration order
};

enum class Verdict : uint8_t { accepted, rejected, non_terminating, budget_exceeded };
enum class RejectReason : uint8_t { halted, exhausted, popped_bottom };
enum class BudgetKind : uint8_t { steps, depth };

struct Outcome {
  Verdict verdict = Verdict::rejected;
  RejectReason reject_reason = RejectReason::halted;
  BudgetKind budget_kind = BudgetKind::steps;
  std::optional<Conf> witness;  // accept conf, terminator, or repeated conf
  Metrics metrics;

  bool accepted() const { return verdict == Verdict::accepted; }
};

inline std::string outcome_kind_string(const Outcome& o) {
  switch (o.verdict) {
    case Verdict::accepted: return "Accepted";
    case Verdict::rejected: return "Rejected";
    case Verdict::non_terminating: return "NonTerminating";
    case Verdict::budget_exceeded: return "BudgetExceeded";
  }
  return "?";
}

inline std::string outcome_detail_string(const Outcome& o) {
  switch (o.verdict) {
    case Verdict::accepted: return "Accepted";
    case Verdict::rejected:
      switch (o.reject_reason) {
        case RejectReason::halted: return "Rejected(halt)";
        case RejectReason::exhausted: return "Rejected(exhausted)";
        case RejectReason::popped_bottom: return "Rejected(popped_bottom)";
      }
      return "Rejected";
    case Verdict::non_terminating: return "NonTerminating";
    case Verdict::budget_exceeded:
      return o.budget_kind == BudgetKind::steps ? "BudgetExceeded(steps)"
                                                : "BudgetExceeded(depth)";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Deterministic engines (Int and Sim over single terminators)

struct DetResult {
  enum class Kind : uint8_t { terminator, accepted, halted, non_terminating, budget };
  Kind kind = Kind::terminator;
  Conf conf{};  // terminator / accepting conf / halting conf / repeated conf
  BudgetKind budget = BudgetKind::steps;
};

namespace detail {

struct DetFrame {
  Conf c;
  uint32_t idx;
  uint8_t stage;  // 0 fresh, 1 push-inner returned next, 2 child result is ours
};

// Shared body of int_d (memo == nullptr) and sim_d.
inline DetResult det_engine(const Automaton& aut, const Tape& tape, const Conf& c0,
                            ConfTable* memo, const RunOptions& opts, Metrics& m) {
  const uint32_t n_conf = conf_count(aut, tape);
  const uint64_t max_depth = opts.max_depth.value_or(static_cast<uint64_t>(n_conf) + 1);
  const bool detect = !opts.faithful;

  std::vector<uint8_t> active;
  if (!memo && detect) active.assign(n_conf, 0);

  std::vector<DetFrame> st;
  st.push_back({c0, conf_index(aut, tape, c0), 0});
  Conf ret{};

  auto trace = [&](std::string_view ev, const Conf& c, std::optional<uint64_t> card = {}) {
    if (opts.trace) opts.trace->emit(aut, st.size(), ev, c, card);
  };
  auto finish = [&](DetFrame& f, const Conf& d) {
    if (memo)
      memo->set_memo_conf(f.idx, conf_index(aut, tape, d));
    else if (detect)
      active[f.idx] = 0;
    trace("return", f.c, 1);
    ret = d;
    st.pop_back();
  };

  while (!st.empty()) {
    DetFrame& f = st.back();
    switch (f.stage) {
      case 0: {
        ++m.engine_calls;
        if (m.engine_calls > opts.max_steps)
          return {DetResult::Kind::budget, f.c, BudgetKind::steps};
        m.note_depth(st.size());
        if (st.size() > max_depth)
          return {DetResult::Kind::budget, f.c, BudgetKind::depth};
        trace("call", f.c);
        if (memo) {
          CellKind k = memo->kind(f.idx);
          if (k == CellKind::memo_d) {
            ++m.memo_hits;
            trace("memo_hit", f.c);
            ret = conf_at(aut, tape, memo->memo_conf(f.idx));
            st.pop_back();
            continue;
          }
          if (detect) {
            if (k == CellKind::visited)
              return {DetResult::Kind::non_terminating, f.c, BudgetKind::steps};
            memo->set_visited(f.idx);
          }
        } else if (detect) {
          if (active[f.idx])
            return {DetResult::Kind::non_terminating, f.c, BudgetKind::steps};
          active[f.idx] = 1;
        }
        ++m.cond_execs;
        const Action a = lookup_action(aut, tape, f.c);
        switch (a.kind) {
          case ActionKind::push: {
            Conf nc = apply_branch(aut, tape, f.c, a.first);
            f.stage = 1;
            st.push_back({nc, conf_index(aut, tape, nc), 0});
            break;
          }
          case ActionKind::op: {
            Conf nc = apply_branch(aut, tape, f.c, a.first);
            f.stage = 2;
            st.push_back({nc, conf_index(aut, tape, nc), 0});
            break;
          }
          case ActionKind::pop:
            finish(f, f.c);
            break;
          case ActionKind::halt:
            trace("halt", f.c);
            return {DetResult::Kind::halted, f.c, BudgetKind::steps};
          case ActionKind::accept:
            trace("accept", f.c);
            return {DetResult::Kind::accepted, f.c, BudgetKind::steps};
          case ActionKind::choose:
            fail(Errc::engine_mismatch,
                 "deterministic engine reached a choose action at " + aut.conf_to_string(f.c));
        }
        break;
      }
      case 1: {
        Conf fc = follow(aut, tape, f.c, ret);
        f.stage = 2;
        st.push_back({fc, conf_index(aut, tape, fc), 0});
        break;
      }
      default:
        finish(f, ret);
        break;
    }
  }
  return {DetResult::Kind::terminator, ret, BudgetKind::steps};
}

}  // namespace detail

// Recursive interpreter for deterministic PDA: no storage besides the frame
// stack; may take time exponential in the configuration count.
inline DetResult int_d(const Automaton& aut, const Tape& tape, const Conf& c0,
                       const RunOptions& opts, Metrics& m) {
  return detail::det_engine(aut, tape, c0, nullptr, opts, m);
}

// Memoizing simulator: each configuration's cond body runs at most once, so
// engine calls are bounded by twice the configuration count.
inline DetResult sim_d(const Automaton& aut, const Tape& tape, const Conf& c0,
                       ConfTable& table, const RunOptions& opts, Metrics& m) {
  return detail::det_engine(aut, tape, c0, &table, opts, m);
}

// ---------------------------------------------------------------------------
// Nondeterministic engines (terminator sets, Visited cuts)

struct NondetResult {
  enum class Kind : uint8_t { terminators, accepted, budget };
  Kind kind = Kind::terminators;
  ConfSet* set = nullptr;  // pool-owned terminator set of the start conf
  Conf conf{};             // accepting conf
  BudgetKind budget = BudgetKind::steps;
};

namespace detail {

struct NFrame {
  Conf c;
  uint32_t idx;
  uint8_t stage;  // 0 fresh, 1 inner set, 2 outer loop, 3 op, 4 choose-1, 5 choose-2
  ConfSet* acc = nullptr;
  ConfSet* inner = nullptr;
  std::vector<uint32_t> snap;
  size_t pos = 0;
};

// Shared body of int_n (memoize=false, marks are cleared on return) and
// sim_n (memoize=true, marks are overwritten by the memoized set).
inline NondetResult nondet_engine(const Automaton& aut, const Tape& tape, const Conf& c0,
                                  ConfTable& table, ConfSetPool& pool, bool memoize,
                                  const RunOptions& opts, Metrics& m) {
  const uint32_t n_conf = conf_count(aut, tape);
  if (table.size() != n_conf || pool.capacity() != n_conf)
    fail(Errc::capacity, "table/pool sized for a different configuration space");
  const uint64_t max_depth = opts.max_depth.value_or(static_cast<uint64_t>(n_conf) + 1);

  ConfSet* shared_empty = nullptr;  // sim_n: immutable {} for visited hits

  std::vector<NFrame> st;
  st.push_back({c0, conf_index(aut, tape, c0), 0});
  ConfSet* ret = nullptr;

  auto trace = [&](std::string_view ev, const Conf& c, std::optional<uint64_t> card = {}) {
    if (opts.trace) opts.trace->emit(aut, st.size(), ev, c, card);
  };
  auto spawn = [&](const Conf& c) { st.push_back({c, conf_index(aut, tape, c), 0}); };
  auto finish = [&](NFrame& f, ConfSet* d) {
    if (memoize)
      table.set_memo_set(f.idx, d);
    else
      table.set_undef(f.idx);
    trace("return", f.c, d->size());
    ret = d;
    st.pop_back();
  };

  while (!st.empty()) {
    NFrame& f = st.back();
    switch (f.stage) {
      case 0: {
        ++m.engine_calls;
        if (m.engine_calls > opts.max_steps)
          return {NondetResult::Kind::budget, nullptr, f.c, BudgetKind::steps};
        m.note_depth(st.size());
        if (st.size() > max_depth)
          return {NondetResult::Kind::budget, nullptr, f.c, BudgetKind::depth};
        trace("call", f.c);
        CellKind k = table.kind(f.idx);
        if (memoize && k == CellKind::memo_n) {
          ++m.memo_hits;
          trace("memo_hit", f.c, table.memo_set(f.idx)->size());
          ret = table.memo_set(f.idx);
          st.pop_back();
          continue;
        }
        if (k == CellKind::visited) {
          ++m.visited_hits;
          trace("visited_hit", f.c);
          if (memoize) {
            if (!shared_empty) shared_empty = pool.acquire();
            ret = shared_empty;
          } else {
            ret = pool.acquire();
          }
          st.pop_back();
          continue;
        }
        table.set_visited(f.idx);
        ++m.cond_execs;
        const Action a = lookup_action(aut, tape, f.c);
        switch (a.kind) {
          case ActionKind::push: {
            Conf nc = apply_branch(aut, tape, f.c, a.first);
            f.stage = 1;
            spawn(nc);
            break;
          }
          case ActionKind::op: {
            Conf nc = apply_branch(aut, tape, f.c, a.first);
            f.stage = 3;
            spawn(nc);
            break;
          }
          case ActionKind::choose: {
            Conf nc = apply_branch(aut, tape, f.c, a.first);
            f.stage = 4;
            spawn(nc);
            break;
          }
          case ActionKind::pop: {
            ConfSet* d = pool.acquire();
            d->insert(f.idx);
            m.note_card(1);
            finish(f, d);
            break;
          }
          case ActionKind::halt: {
            ++m.halts_seen;
            trace("halt", f.c);
            finish(f, pool.acquire());
            break;
          }
          case ActionKind::accept:
            trace("accept", f.c);
            return {NondetResult::Kind::accepted, nullptr, f.c, BudgetKind::steps};
        }
        break;
      }
      case 1: {
        // Inner call of the push arm returned; iterate a snapshot of it.
        f.inner = ret;
        f.snap = ret->items();
        if (opts.shuffle_seed) {
          std::mt19937_64 g(*opts.shuffle_seed * 0x9e3779b97f4a7c15ULL + f.idx);
          std::shuffle(f.snap.begin(), f.snap.end(), g);
        }
        if (!memoize) {
          pool.release(f.inner);  // snapshot taken; int_n owns the inner set
          f.inner = nullptr;
        }
        f.acc = memoize ? pool.acquire() : nullptr;
        f.pos = 0;
        if (f.snap.empty()) {
          finish(f, f.acc ? f.acc : pool.acquire());
        } else {
          Conf e = conf_at(aut, tape, f.snap[0]);
          Conf fc = follow(aut, tape, f.c, e);
          f.stage = 2;
          spawn(fc);
        }
        break;
      }
      case 2: {
        if (!memoize && f.acc == nullptr) {
          f.acc = ret;  // adopt the first outer result
        } else {
          union_into(*f.acc, *ret, m);
          if (!memoize) pool.release(ret);
        }
        ++f.pos;
        if (f.pos < f.snap.size()) {
          Conf e = conf_at(aut, tape, f.snap[f.pos]);
          Conf fc = follow(aut, tape, f.c, e);
          spawn(fc);
        } else {
          finish(f, f.acc);
        }
        break;
      }
      case 3:
        finish(f, ret);
        break;
      case 4: {
        if (memoize) {
          f.acc = pool.acquire();
          union_into(*f.acc, *ret, m);
        } else {
          f.acc = ret;
        }
        Conf nc = next2(aut, tape, f.c);
        f.stage = 5;
        spawn(nc);
        break;
      }
      default: {
        union_into(*f.acc, *ret, m);
        if (!memoize) pool.release(ret);
        finish(f, f.acc);
        break;
      }
    }
  }
  return {NondetResult::Kind::terminators, ret, Conf{}, BudgetKind::steps};
}

}  // namespace detail

// Recursive interpreter for nondeterministic PDA.  Marks configurations
// Visited while their call is active and clears the mark on return, so an
// infinite branch is cut with an empty terminator set.
inline NondetResult int_n(const Automaton& aut, const Tape& tape, const Conf& c0,
                          ConfTable& table, ConfSetPool& pool, const RunOptions& opts,
                          Metrics& m) {
  return detail::nondet_engine(aut, tape, c0, table, pool, false, opts, m);
}

// Memoizing simulator for nondeterministic PDA; the Visited mark is
// overwritten by the memoized terminator set instead of being reset.
inline NondetResult sim_n(const Automaton& aut, const Tape& tape, const Conf& c0,
                          ConfTable& table, ConfSetPool& pool, const RunOptions& opts,
                          Metrics& m) {
  return detail::nondet_engine(aut, tape, c0, table, pool, true, opts, m);
}

// ---------------------------------------------------------------------------
// Top-level wrapper

inline Outcome run_on_tape(const Automaton& aut, const Tape& tape,
                           const RunOptions& opts = {}) {
  if (opts.max_steps == 0 || (opts.max_depth && *opts.max_depth == 0))
    fail(Errc::precondition, "budgets must be positive");
  if (engine_is_deterministic(opts.engine) && !aut.deterministic())
    fail(Errc::engine_mismatch, "automaton '" + aut.name +
                                    "' is nondeterministic; use intn or simn");

  Outcome out;
  const uint32_t n_conf = conf_count(aut, tape);
  Conf c0 = initial_conf(aut, tape);

  auto check_strict = [&](const Conf& c) {
    if (!opts.strict_accept) return;
    bool ok = c.top == aut.bottom();
    for (int j = 0; j < aut.k(); ++j)
      ok = ok && c.heads[static_cast<size_t>(j)] == tape.length() - 1;
    if (!ok)
      fail(Errc::accept_invalid,
           "accept with non-empty stack or head away from '>' at " + aut.conf_to_string(c));
  };

  auto t0 = std::chrono::steady_clock::now();
  if (engine_is_deterministic(opts.engine)) {
    DetResult r;
    if (opts.engine == EngineKind::int_d) {
      r = int_d(aut, tape, c0, opts, out.metrics);
    } else {
      ConfTable table(n_conf);
      r = sim_d(aut, tape, c0, table, opts, out.metrics);
    }
    out.witness = r.conf;
    switch (r.kind) {
      case DetResult::Kind::accepted:
        check_strict(r.conf);
        out.verdict = Verdict::accepted;
        break;
      case DetResult::Kind::halted:
        out.verdict = Verdict::rejected;
        out.reject_reason = RejectReason::halted;
        break;
      case DetResult::Kind::terminator:
        out.verdict = Verdict::rejected;
        out.reject_reason = RejectReason::popped_bottom;
        break;
      case DetResult::Kind::non_terminating:
        out.verdict = Verdict::non_terminating;
        break;
      case DetResult::Kind::budget:
        out.verdict = Verdict::budget_exceeded;
        out.budget_kind = r.budget;
        break;
    }
  } else {
    ConfTable table(n_conf);
    ConfSetPool pool(n_conf);
    NondetResult r = opts.engine == EngineKind::int_n
                         ? int_n(aut, tape, c0, table, pool, opts, out.metrics)
                         : sim_n(aut, tape, c0, table, pool, opts, out.metrics);
    switch (r.kind) {
      case NondetResult::Kind::accepted:
        check_strict(r.conf);
        out.verdict = Verdict::accepted;
        out.witness = r.conf;
        break;
      case NondetResult::Kind::terminators:
        out.verdict = Verdict::rejected;
        out.reject_reason = RejectReason::exhausted;
        break;
      case NondetResult::Kind::budget:
        out.verdict = Verdict::budget_exceeded;
        out.budget_kind = r.budget;
        out.witness = r.conf;
        break;
    }
  }
  out.metrics.wall_time = std::chrono::steady_clock::now() - t0;
  return out;
}

inline Outcome run(const Automaton& aut, const std::vector<std::string>& tokens,
                   const RunOptions& opts = {}) {
  return run_on_tape(aut, make_tape(aut, tokens), opts);
}

}  // namespace pdasim
