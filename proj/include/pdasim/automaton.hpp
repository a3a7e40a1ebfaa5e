#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pdasim/error.hpp"

namespace pdasim {

// Two-way pushdown automata over token alphabets.  A machine reads a tape
// `< w >` with k independent heads and manipulates a stack through push/op/
// pop/choose/halt/accept actions selected by first-match rules on the
// surface configuration (state, head positions, stack top).

inline constexpr int kMaxHeads = 4;

// Reserved tape symbol ids.
inline constexpr int32_t kLeftEnd = 0;
inline constexpr int32_t kRightEnd = 1;

// Wildcard marker in rule patterns.
inline constexpr int32_t kAnySym = -1;

class SymbolTable {
 public:
  int32_t intern(std::string name) {
    auto it = ids_.find(name);
    if (it != ids_.end()) return it->second;
    int32_t id = static_cast<int32_t>(names_.size());
    ids_.emplace(name, id);
    names_.push_back(std::move(name));
    return id;
  }

  int32_t id_of(std::string_view name) const {
    auto it = ids_.find(std::string(name));
    return it == ids_.end() ? -1 : it->second;
  }

  bool contains(std::string_view name) const { return id_of(name) >= 0; }

  const std::string& name(int32_t id) const { return names_.at(static_cast<size_t>(id)); }

  int32_t size() const { return static_cast<int32_t>(names_.size()); }

  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int32_t> ids_;
};

struct Tape {
  std::vector<int32_t> cells;  // cells[0] = '<', cells[len-1] = '>'

  int32_t length() const { return static_cast<int32_t>(cells.size()); }
};

// Surface configuration (p, i_1..i_k, A).  Unused head slots stay zero so
// default equality works regardless of k.
struct Conf {
  int32_t state = 0;
  std::array<int32_t, kMaxHeads> heads{};
  int32_t top = 0;

  friend bool operator==(const Conf&, const Conf&) = default;
};

enum class Move : int8_t { left = -1, stay = 0, right = 1 };

using Moves = std::array<Move, kMaxHeads>;

enum class ActionKind : uint8_t { push, op, pop, choose, halt, accept };

// State/move/top triple used by push, op and each choose branch.
struct Branch {
  int32_t state = 0;
  Moves moves{};
  int32_t sym = 0;  // pushed symbol (push) or new top (op/choose)
};

struct Action {
  ActionKind kind = ActionKind::halt;
  Branch first;   // push/op/choose branch 1
  Branch second;  // choose branch 2
};

struct Rule {
  int32_t state = kAnySym;  // kAnySym = wildcard
  std::array<int32_t, kMaxHeads> tape{};
  int32_t top = kAnySym;
  Action action;
  int line = 0;
};

enum class TopExprKind : uint8_t { lit, under, top, min, max };

// Result stack top of a follow rule: a literal symbol, the suspended
// frame's symbol (UNDER), the terminator's symbol (TOP), or the min/max of
// the two in stack-symbol declaration order.
struct TopExpr {
  TopExprKind kind = TopExprKind::under;
  int32_t sym = 0;  // for lit
};

struct FollowRule {
  int32_t c_state = kAnySym;
  int32_t d_state = kAnySym;
  int32_t c_sym = kAnySym;
  int32_t d_sym = kAnySym;
  int32_t state = 0;
  Moves moves{};
  TopExpr top;
  int line = 0;
};

// Hard cap on the dense dispatch table and on per-run configuration space.
inline constexpr uint64_t kMaxDispatchSize = uint64_t{1} << 26;
inline constexpr uint64_t kMaxConfSpace = uint64_t{1} << 27;

struct ValidationReport {
  struct Overlap {
    int earlier_rule = 0;  // index into rules
    int later_rule = 0;    // shadowed rule (never first match, action differs)
    std::string example;   // a concrete triple both rules match
  };
  struct FollowGap {
    int32_t c_state, c_sym, d_state, d_sym;
  };
  bool deterministic = true;
  std::vector<Overlap> overlaps;
  std::vector<int32_t> states_without_rules;
  std::vector<FollowGap> follow_gaps;

  bool clean() const { return overlaps.empty() && states_without_rules.empty(); }
};

class Automaton {
 public:
  std::string name;
  int heads = 1;
  SymbolTable tape_syms;   // ids 0,1 are '<' and '>'
  SymbolTable stack_syms;  // id 0 is the bottom symbol
  SymbolTable states;
  int32_t start_state = 0;
  std::vector<Rule> rules;
  std::vector<FollowRule> follows;

  int k() const { return heads; }
  bool deterministic() const { return deterministic_; }
  int32_t bottom() const { return 0; }

  // Builds the dense rule/follow dispatch tables; must run once after the
  // declarative fields are filled (parse_automaton does this).
  void build() {
    deterministic_ = true;
    for (const Rule& r : rules)
      if (r.action.kind == ActionKind::choose) deterministic_ = false;

    const uint64_t nq = static_cast<uint64_t>(states.size());
    const uint64_t nt = static_cast<uint64_t>(tape_syms.size());
    const uint64_t ng = static_cast<uint64_t>(stack_syms.size());
    uint64_t size = nq * ng;
    for (int j = 0; j < heads; ++j) {
      size *= nt;
      if (size > kMaxDispatchSize)
        fail(Errc::capacity, "automaton '" + name + "': rule dispatch table too large");
    }
    rule_dispatch_.assign(static_cast<size_t>(size), -1);

    std::array<int32_t, kMaxHeads> syms{};
    for (int32_t q = 0; q < states.size(); ++q) {
      for (int32_t top = 0; top < stack_syms.size(); ++top) {
        syms.fill(0);
        while (true) {
          int32_t rid = scan_rules(q, syms, top);
          if (rid >= 0) rule_dispatch_[dispatch_slot(q, syms, top)] = rid;
          int j = 0;
          for (; j < heads; ++j) {
            if (++syms[static_cast<size_t>(j)] < tape_syms.size()) break;
            syms[static_cast<size_t>(j)] = 0;
          }
          if (j == heads) break;
        }
      }
    }

    follow_dispatch_.assign(static_cast<size_t>(nq * nq * ng * ng), -1);
    for (int32_t cs = 0; cs < states.size(); ++cs)
      for (int32_t ds = 0; ds < states.size(); ++ds)
        for (int32_t ca = 0; ca < stack_syms.size(); ++ca)
          for (int32_t da = 0; da < stack_syms.size(); ++da) {
            for (size_t i = 0; i < follows.size(); ++i) {
              if (follow_matches(follows[i], cs, ds, ca, da)) {
                follow_dispatch_[follow_slot(cs, ds, ca, da)] = static_cast<int32_t>(i);
                break;
              }
            }
          }
  }

  // First-match rule id for a concrete triple, or -1.  O(1) via the table.
  int32_t rule_id_for(int32_t state, const std::array<int32_t, kMaxHeads>& syms,
                      int32_t top) const {
    return rule_dispatch_[dispatch_slot(state, syms, top)];
  }

  int32_t follow_rule_id(int32_t c_state, int32_t d_state, int32_t c_sym,
                         int32_t d_sym) const {
    return follow_dispatch_[follow_slot(c_state, d_state, c_sym, d_sym)];
  }

  // Counts slow-path pattern probes; stays flat after build() so tests can
  // confirm lookups never rescan the rule list.
  uint64_t match_scan_count() const { return match_scan_count_; }

  bool rule_matches(const Rule& r, int32_t state,
                    const std::array<int32_t, kMaxHeads>& syms, int32_t top) const {
    ++match_scan_count_;
    if (r.state != kAnySym && r.state != state) return false;
    if (r.top != kAnySym && r.top != top) return false;
    for (int j = 0; j < heads; ++j) {
      int32_t pat = r.tape[static_cast<size_t>(j)];
      if (pat != kAnySym && pat != syms[static_cast<size_t>(j)]) return false;
    }
    return true;
  }

  std::string conf_to_string(const Conf& c) const {
    std::ostringstream os;
    os << '(' << states.name(c.state) << ",[";
    for (int j = 0; j < heads; ++j) {
      if (j) os << ',';
      os << c.heads[static_cast<size_t>(j)];
    }
    os << "]," << stack_syms.name(c.top) << ')';
    return os.str();
  }

 private:
  size_t dispatch_slot(int32_t state, const std::array<int32_t, kMaxHeads>& syms,
                       int32_t top) const {
    uint64_t slot = static_cast<uint64_t>(state);
    for (int j = 0; j < heads; ++j)
      slot = slot * static_cast<uint64_t>(tape_syms.size()) +
             static_cast<uint64_t>(syms[static_cast<size_t>(j)]);
    return static_cast<size_t>(slot * static_cast<uint64_t>(stack_syms.size()) +
                               static_cast<uint64_t>(top));
  }

  size_t follow_slot(int32_t cs, int32_t ds, int32_t ca, int32_t da) const {
    uint64_t nq = static_cast<uint64_t>(states.size());
    uint64_t ng = static_cast<uint64_t>(stack_syms.size());
    return static_cast<size_t>(((static_cast<uint64_t>(cs) * nq +
                                 static_cast<uint64_t>(ds)) *
                                    ng +
                                static_cast<uint64_t>(ca)) *
                                   ng +
                               static_cast<uint64_t>(da));
  }

  int32_t scan_rules(int32_t state, const std::array<int32_t, kMaxHeads>& syms,
                     int32_t top) const {
    for (size_t i = 0; i < rules.size(); ++i)
      if (rule_matches(rules[i], state, syms, top)) return static_cast<int32_t>(i);
    return -1;
  }

  static bool pat_ok(int32_t pat, int32_t v) { return pat == kAnySym || pat == v; }

  bool follow_matches(const FollowRule& f, int32_t cs, int32_t ds, int32_t ca,
                      int32_t da) const {
    ++match_scan_count_;
    return pat_ok(f.c_state, cs) && pat_ok(f.d_state, ds) && pat_ok(f.c_sym, ca) &&
           pat_ok(f.d_sym, da);
  }

  std::vector<int32_t> rule_dispatch_;
  std::vector<int32_t> follow_dispatch_;
  bool deterministic_ = true;
  // Instrumentation only; mutated by build()/validate()/tests, never by the
  // per-step lookups engines perform.
  mutable uint64_t match_scan_count_ = 0;
};

// ---------------------------------------------------------------------------
// Tape and configuration helpers

inline Tape make_tape(const Automaton& aut, const std::vector<std::string>& tokens) {
  Tape t;
  t.cells.reserve(tokens.size() + 2);
  t.cells.push_back(kLeftEnd);
  for (const std::string& tok : tokens) {
    int32_t id = aut.tape_syms.id_of(tok);
    if (id == kLeftEnd || id == kRightEnd)
      fail(Errc::reserved_name, "input token '" + tok + "' is a reserved endmarker");
    if (id < 0) fail(Errc::undeclared, "input token '" + tok + "' not in tape alphabet");
    t.cells.push_back(id);
  }
  t.cells.push_back(kRightEnd);
  return t;
}

inline std::vector<std::string> split_tokens(std::string_view text, bool chars) {
  std::vector<std::string> out;
  if (chars) {
    for (char c : text) out.emplace_back(1, c);
    return out;
  }
  std::string cur;
  for (char c : text) {
    if (c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline Conf initial_conf(const Automaton& aut, const Tape&) {
  Conf c;
  c.state = aut.start_state;
  c.heads.fill(0);
  c.top = aut.bottom();
  return c;
}

// Number of surface configurations |Q| * T^k * |Gamma| for this tape.
inline uint32_t conf_count(const Automaton& aut, const Tape& tape) {
  uint64_t n = static_cast<uint64_t>(aut.states.size());
  for (int j = 0; j < aut.k(); ++j) n *= static_cast<uint64_t>(tape.length());
  n *= static_cast<uint64_t>(aut.stack_syms.size());
  if (n == 0 || n > kMaxConfSpace)
    fail(Errc::capacity, "configuration space of " + std::to_string(n) + " is out of range");
  return static_cast<uint32_t>(n);
}

// Dense bijective index: ((state*T^k + sum head_j*T^(k-1-j)) * |Gamma|) + top.
inline uint32_t conf_index(const Automaton& aut, const Tape& tape, const Conf& c) {
  uint64_t t = static_cast<uint64_t>(tape.length());
  uint64_t v = static_cast<uint64_t>(c.state);
  for (int j = 0; j < aut.k(); ++j)
    v = v * t + static_cast<uint64_t>(c.heads[static_cast<size_t>(j)]);
  v = v * static_cast<uint64_t>(aut.stack_syms.size()) + static_cast<uint64_t>(c.top);
  return static_cast<uint32_t>(v);
}

inline Conf conf_at(const Automaton& aut, const Tape& tape, uint32_t index) {
  Conf c;
  uint64_t v = index;
  c.top = static_cast<int32_t>(v % static_cast<uint64_t>(aut.stack_syms.size()));
  v /= static_cast<uint64_t>(aut.stack_syms.size());
  uint64_t t = static_cast<uint64_t>(tape.length());
  for (int j = aut.k() - 1; j >= 0; --j) {
    c.heads[static_cast<size_t>(j)] = static_cast<int32_t>(v % t);
    v /= t;
  }
  c.state = static_cast<int32_t>(v);
  return c;
}

// ---------------------------------------------------------------------------
// Transition semantics

inline const Rule& rule_for(const Automaton& aut, const Tape& tape, const Conf& c) {
  std::array<int32_t, kMaxHeads> syms{};
  for (int j = 0; j < aut.k(); ++j)
    syms[static_cast<size_t>(j)] = tape.cells[static_cast<size_t>(c.heads[static_cast<size_t>(j)])];
  int32_t rid = aut.rule_id_for(c.state, syms, c.top);
  if (rid < 0)
    fail(Errc::no_rule, "no rule matches configuration " + aut.conf_to_string(c));
  return aut.rules[static_cast<size_t>(rid)];
}

inline const Action& lookup_action(const Automaton& aut, const Tape& tape, const Conf& c) {
  return rule_for(aut, tape, c).action;
}

inline Conf apply_branch(const Automaton& aut, const Tape& tape, const Conf& c,
                         const Branch& b) {
  Conf n;
  n.state = b.state;
  n.heads.fill(0);
  for (int j = 0; j < aut.k(); ++j) {
    int32_t pos = c.heads[static_cast<size_t>(j)] +
                  static_cast<int32_t>(b.moves[static_cast<size_t>(j)]);
    if (pos < 0 || pos >= tape.length())
      fail(Errc::head_out_of_bounds,
           "head " + std::to_string(j) + " moved off the tape at " + aut.conf_to_string(c));
    n.heads[static_cast<size_t>(j)] = pos;
  }
  n.top = b.sym;
  return n;
}

// Successor for push/op configurations.  For push the caller keeps c as the
// suspended frame; this only yields the configuration on top of it.
inline Conf next(const Automaton& aut, const Tape& tape, const Conf& c) {
  const Action& a = lookup_action(aut, tape, c);
  if (a.kind != ActionKind::push && a.kind != ActionKind::op)
    fail(Errc::precondition, "next() applied to a non-push/op configuration " +
                                 aut.conf_to_string(c));
  return apply_branch(aut, tape, c, a.first);
}

inline Conf next1(const Automaton& aut, const Tape& tape, const Conf& c) {
  const Action& a = lookup_action(aut, tape, c);
  if (a.kind != ActionKind::choose)
    fail(Errc::precondition,
         "next1() applied to a non-choose configuration " + aut.conf_to_string(c));
  return apply_branch(aut, tape, c, a.first);
}

inline Conf next2(const Automaton& aut, const Tape& tape, const Conf& c) {
  const Action& a = lookup_action(aut, tape, c);
  if (a.kind != ActionKind::choose)
    fail(Errc::precondition,
         "next2() applied to a non-choose configuration " + aut.conf_to_string(c));
  return apply_branch(aut, tape, c, a.second);
}

// Resumes the suspended frame c once terminator d pops.  Heads continue from
// d (c's heads are stale); the new top combines sym(c) and sym(d).
inline Conf follow(const Automaton& aut, const Tape& tape, const Conf& c, const Conf& d) {
  int32_t fid = aut.follow_rule_id(c.state, d.state, c.top, d.top);
  if (fid < 0)
    fail(Errc::no_follow_rule, "no follow rule for suspended " + aut.conf_to_string(c) +
                                   " and terminator " + aut.conf_to_string(d));
  const FollowRule& f = aut.follows[static_cast<size_t>(fid)];
  Conf n;
  n.state = f.state;
  n.heads.fill(0);
  for (int j = 0; j < aut.k(); ++j) {
    int32_t pos = d.heads[static_cast<size_t>(j)] +
                  static_cast<int32_t>(f.moves[static_cast<size_t>(j)]);
    if (pos < 0 || pos >= tape.length())
      fail(Errc::head_out_of_bounds,
           "head " + std::to_string(j) + " moved off the tape by follow at " +
               aut.conf_to_string(d));
    n.heads[static_cast<size_t>(j)] = pos;
  }
  switch (f.top.kind) {
    case TopExprKind::lit: n.top = f.top.sym; break;
    case TopExprKind::under: n.top = c.top; break;
    case TopExprKind::top: n.top = d.top; break;
    case TopExprKind::min: n.top = c.top < d.top ? c.top : d.top; break;
    case TopExprKind::max: n.top = c.top > d.top ? c.top : d.top; break;
  }
  return n;
}

// ---------------------------------------------------------------------------
// Validation

inline ValidationReport validate(const Automaton& aut) {
  ValidationReport rep;
  rep.deterministic = aut.deterministic();

  std::vector<char> reachable(aut.rules.size(), 0);
  std::vector<char> state_has_rule(static_cast<size_t>(aut.states.size()), 0);

  std::array<int32_t, kMaxHeads> syms{};
  for (int32_t q = 0; q < aut.states.size(); ++q) {
    for (int32_t top = 0; top < aut.stack_syms.size(); ++top) {
      syms.fill(0);
      while (true) {
        int32_t rid = aut.rule_id_for(q, syms, top);
        if (rid >= 0) {
          reachable[static_cast<size_t>(rid)] = 1;
          state_has_rule[static_cast<size_t>(q)] = 1;
        }
        int j = 0;
        for (; j < aut.k(); ++j) {
          if (++syms[static_cast<size_t>(j)] < aut.tape_syms.size()) break;
          syms[static_cast<size_t>(j)] = 0;
        }
        if (j == aut.k()) break;
      }
    }
  }

  auto same_action = [](const Action& a, const Action& b) {
    if (a.kind != b.kind) return false;
    auto same_branch = [](const Branch& x, const Branch& y) {
      return x.state == y.state && x.moves == y.moves && x.sym == y.sym;
    };
    switch (a.kind) {
      case ActionKind::push:
      case ActionKind::op: return same_branch(a.first, b.first);
      case ActionKind::choose:
        return same_branch(a.first, b.first) && same_branch(a.second, b.second);
      default: return true;
    }
  };

  // A rule that is never the first match is shadowed; warn when the rule that
  // wins some triple it matches has a different action.
  for (size_t r = 0; r < aut.rules.size(); ++r) {
    if (reachable[r]) continue;
    const Rule& later = aut.rules[r];
    bool reported = false;
    for (int32_t q = 0; q < aut.states.size() && !reported; ++q) {
      for (int32_t top = 0; top < aut.stack_syms.size() && !reported; ++top) {
        syms.fill(0);
        while (true) {
          if (aut.rule_matches(later, q, syms, top)) {
            int32_t winner = aut.rule_id_for(q, syms, top);
            if (winner >= 0 && winner != static_cast<int32_t>(r) &&
                !same_action(aut.rules[static_cast<size_t>(winner)].action, later.action)) {
              std::ostringstream os;
              os << '(' << aut.states.name(q) << ',';
              for (int j = 0; j < aut.k(); ++j) {
                if (j) os << ' ';
                os << aut.tape_syms.name(syms[static_cast<size_t>(j)]);
              }
              os << ',' << aut.stack_syms.name(top) << ')';
              rep.overlaps.push_back({winner, static_cast<int>(r), os.str()});
              reported = true;
              break;
            }
          }
          int j = 0;
          for (; j < aut.k(); ++j) {
            if (++syms[static_cast<size_t>(j)] < aut.tape_syms.size()) break;
            syms[static_cast<size_t>(j)] = 0;
          }
          if (j == aut.k()) break;
        }
      }
    }
  }

  for (int32_t q = 0; q < aut.states.size(); ++q)
    if (!state_has_rule[static_cast<size_t>(q)]) rep.states_without_rules.push_back(q);

  // Follow coverage: every (pushing state/top) x (popping state/top) pair of
  // first-match triples should be matched by some follow rule.
  std::vector<std::pair<int32_t, int32_t>> pushers, poppers;
  auto note_pair = [](std::vector<std::pair<int32_t, int32_t>>& v, int32_t s, int32_t a) {
    for (auto& p : v)
      if (p.first == s && p.second == a) return;
    v.emplace_back(s, a);
  };
  for (int32_t q = 0; q < aut.states.size(); ++q) {
    for (int32_t top = 0; top < aut.stack_syms.size(); ++top) {
      syms.fill(0);
      while (true) {
        int32_t rid = aut.rule_id_for(q, syms, top);
        if (rid >= 0) {
          ActionKind k = aut.rules[static_cast<size_t>(rid)].action.kind;
          if (k == ActionKind::push) note_pair(pushers, q, top);
          if (k == ActionKind::pop) note_pair(poppers, q, top);
        }
        int j = 0;
        for (; j < aut.k(); ++j) {
          if (++syms[static_cast<size_t>(j)] < aut.tape_syms.size()) break;
          syms[static_cast<size_t>(j)] = 0;
        }
        if (j == aut.k()) break;
      }
    }
  }
  for (auto [cs, ca] : pushers)
    for (auto [ds, da] : poppers)
      if (aut.follow_rule_id(cs, ds, ca, da) < 0)
        rep.follow_gaps.push_back({cs, ca, ds, da});

  return rep;
}

inline std::string report_to_string(const Automaton& aut, const ValidationReport& rep) {
  std::ostringstream os;
  os << "automaton " << aut.name << ": "
     << (rep.deterministic ? "deterministic" : "nondeterministic") << "\n";
  for (const auto& ov : rep.overlaps)
    os << "overlap: rule at line " << aut.rules[static_cast<size_t>(ov.later_rule)].line
       << " is shadowed by rule at line "
       << aut.rules[static_cast<size_t>(ov.earlier_rule)].line << " with a different action, e.g. "
       << ov.example << "\n";
  for (int32_t q : rep.states_without_rules)
    os << "state without rules: " << aut.states.name(q) << "\n";
  for (const auto& g : rep.follow_gaps)
    os << "follow gap: push (" << aut.states.name(g.c_state) << ','
       << aut.stack_syms.name(g.c_sym) << ") x pop (" << aut.states.name(g.d_state) << ','
       << aut.stack_syms.name(g.d_sym) << ") has no follow rule\n";
  if (rep.overlaps.empty() && rep.states_without_rules.empty() && rep.follow_gaps.empty())
    os << "no findings\n";
  return os.str();
}

}  // namespace pdasim
