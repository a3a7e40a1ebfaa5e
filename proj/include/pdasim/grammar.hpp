#pragma once

#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pdasim/automaton.hpp"
#include "pdasim/error.hpp"

namespace pdasim {

// Context-free grammars and their compilation to one-way nondeterministic
// PDA.  Grammar format: one rule per line, `NT -> rhs ( | rhs )*`, tokens
// whitespace-separated, `;` for an empty rhs, `#` comments, first lhs is the
// start symbol.  Tokens appearing as an lhs are nonterminals; an
// uppercase-initial rhs token without productions is an undeclared
// nonterminal (anything else is a terminal).

struct GSym {
  bool is_nt = false;
  int32_t id = 0;

  friend bool operator==(const GSym&, const GSym&) = default;
  friend auto operator<=>(const GSym&, const GSym&) = default;
};

struct Prod {
  int32_t lhs = 0;
  std::vector<GSym> rhs;
};

struct Grammar {
  std::vector<std::string> nonterminals;  // [0] is the start symbol
  std::vector<std::string> terminals;
  std::vector<Prod> prods;
  int32_t start = 0;
  bool accepts_empty = false;  // epsilon membership, kept by the transforms

  int32_t nt_id(std::string_view name) const {
    for (size_t i = 0; i < nonterminals.size(); ++i)
      if (nonterminals[i] == name) return static_cast<int32_t>(i);
    return -1;
  }
  int32_t term_id(std::string_view name) const {
    for (size_t i = 0; i < terminals.size(); ++i)
      if (terminals[i] == name) return static_cast<int32_t>(i);
    return -1;
  }
  const std::string& sym_name(GSym s) const {
    return s.is_nt ? nonterminals[static_cast<size_t>(s.id)]
                   : terminals[static_cast<size_t>(s.id)];
  }

  std::string to_string() const {
    std::ostringstream os;
    for (size_t n = 0; n < nonterminals.size(); ++n) {
      bool any = false;
      for (const Prod& p : prods) {
        if (p.lhs != static_cast<int32_t>(n)) continue;
        if (!any)
          os << nonterminals[n] << " ->";
        else
          os << " |";
        any = true;
        if (p.rhs.empty()) {
          os << " ;";
        } else {
          for (GSym s : p.rhs) os << ' ' << sym_name(s);
        }
      }
      if (any) os << '\n';
    }
    return os.str();
  }
};

inline Grammar parse_grammar(const std::string& text) {
  Grammar g;
  std::vector<std::pair<int, std::vector<std::string>>> lines;  // lineno, tokens
  {
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
      ++lineno;
      if (auto pos = raw.find('#'); pos != std::string::npos) raw.erase(pos);
      std::vector<std::string> toks = split_tokens(raw, false);
      if (!toks.empty()) lines.emplace_back(lineno, std::move(toks));
    }
  }
  if (lines.empty()) fail(Errc::empty_grammar, "grammar has no rules");

  auto syntax = [](int line, const std::string& msg) {
    fail(Errc::parse_error, std::to_string(line) + ": " + msg);
  };

  std::unordered_map<std::string, int32_t> nts;
  for (auto& [lineno, toks] : lines) {
    if (toks.size() < 2 || toks[1] != "->")
      syntax(lineno, "expected '<nonterminal> -> ...'");
    if (toks[0] == "->" || toks[0] == "|" || toks[0] == ";")
      syntax(lineno, "invalid nonterminal name '" + toks[0] + "'");
    if (!nts.count(toks[0])) {
      nts.emplace(toks[0], static_cast<int32_t>(g.nonterminals.size()));
      g.nonterminals.push_back(toks[0]);
    }
  }

  std::unordered_map<std::string, int32_t> terms;
  for (auto& [lineno, toks] : lines) {
    int32_t lhs = nts.at(toks[0]);
    std::vector<std::vector<std::string>> alts(1);
    for (size_t i = 2; i < toks.size(); ++i) {
      if (toks[i] == "|")
        alts.emplace_back();
      else
        alts.back().push_back(toks[i]);
    }
    for (auto& alt : alts) {
      if (alt.empty()) syntax(lineno, "empty alternative (write ';' for epsilon)");
      Prod p;
      p.lhs = lhs;
      if (alt.size() == 1 && alt[0] == ";") {
        g.prods.push_back(std::move(p));
        continue;
      }
      for (const std::string& tok : alt) {
        if (tok == ";" || tok == "->")
          syntax(lineno, "'" + tok + "' cannot appear inside an alternative");
        auto it = nts.find(tok);
        if (it != nts.end()) {
          p.rhs.push_back({true, it->second});
        } else if (std::isupper(static_cast<unsigned char>(tok[0]))) {
          fail(Errc::undeclared, std::to_string(lineno) + ": undeclared nonterminal '" +
                                     tok + "' (uppercase-initial tokens need productions)");
        } else {
          auto [tit, fresh] = terms.emplace(tok, static_cast<int32_t>(g.terminals.size()));
          if (fresh) g.terminals.push_back(tok);
          p.rhs.push_back({false, tit->second});
        }
      }
      g.prods.push_back(std::move(p));
    }
  }
  g.start = 0;
  return g;
}

// ---------------------------------------------------------------------------
// Grammar analyses and transforms

inline std::vector<bool> nullable_nts(const Grammar& g) {
  std::vector<bool> nullable(g.nonterminals.size(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Prod& p : g.prods) {
      if (nullable[static_cast<size_t>(p.lhs)]) continue;
      bool all = true;
      for (GSym s : p.rhs)
        if (!s.is_nt || !nullable[static_cast<size_t>(s.id)]) {
          all = false;
          break;
        }
      if (all) {
        nullable[static_cast<size_t>(p.lhs)] = true;
        changed = true;
      }
    }
  }
  return nullable;
}

inline std::vector<bool> generating_nts(const Grammar& g) {
  std::vector<bool> gen(g.nonterminals.size(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Prod& p : g.prods) {
      if (gen[static_cast<size_t>(p.lhs)]) continue;
      bool all = true;
      for (GSym s : p.rhs)
        if (s.is_nt && !gen[static_cast<size_t>(s.id)]) {
          all = false;
          break;
        }
      if (all) {
        gen[static_cast<size_t>(p.lhs)] = true;
        changed = true;
      }
    }
  }
  return gen;
}

inline bool generates_empty(const Grammar& g) {
  return g.accepts_empty || nullable_nts(g)[static_cast<size_t>(g.start)];
}

namespace detail {

inline std::string prod_key(const Prod& p) {
  std::string k = std::to_string(p.lhs) + ":";
  for (GSym s : p.rhs) k += (s.is_nt ? "N" : "T") + std::to_string(s.id) + ",";
  return k;
}

// Drops productions that use non-generating symbols or unreachable lhs.
inline Grammar grammar_cleanup(const Grammar& g, bool allow_empty_language) {
  std::vector<bool> gen = generating_nts(g);
  if (!gen[static_cast<size_t>(g.start)]) {
    if (allow_empty_language && g.accepts_empty) {
      Grammar r = g;
      r.prods.clear();
      return r;
    }
    fail(Errc::useless_grammar,
         "grammar generates nothing (start symbol derives no terminal string)");
  }
  std::vector<bool> reach(g.nonterminals.size(), false);
  reach[static_cast<size_t>(g.start)] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Prod& p : g.prods) {
      if (!reach[static_cast<size_t>(p.lhs)]) continue;
      bool keep = true;
      for (GSym s : p.rhs)
        if (s.is_nt && !gen[static_cast<size_t>(s.id)]) keep = false;
      if (!keep) continue;
      for (GSym s : p.rhs)
        if (s.is_nt && !reach[static_cast<size_t>(s.id)]) {
          reach[static_cast<size_t>(s.id)] = true;
          changed = true;
        }
    }
  }
  Grammar r = g;
  r.prods.clear();
  for (const Prod& p : g.prods) {
    if (!reach[static_cast<size_t>(p.lhs)]) continue;
    bool keep = true;
    for (GSym s : p.rhs)
      if (s.is_nt && !gen[static_cast<size_t>(s.id)]) keep = false;
    if (keep) r.prods.push_back(p);
  }
  return r;
}

inline Grammar remove_epsilons(const Grammar& g) {
  std::vector<bool> nullable = nullable_nts(g);
  Grammar r = g;
  r.accepts_empty = g.accepts_empty || nullable[static_cast<size_t>(g.start)];
  r.prods.clear();
  std::unordered_set<std::string> seen;
  for (const Prod& p : g.prods) {
    std::vector<size_t> opt;  // positions of nullable nonterminals
    for (size_t i = 0; i < p.rhs.size(); ++i)
      if (p.rhs[i].is_nt && nullable[static_cast<size_t>(p.rhs[i].id)]) opt.push_back(i);
    if (opt.size() > 20)
      fail(Errc::capacity, "too many nullable symbols in one production");
    for (uint32_t mask = 0; mask < (uint32_t{1} << opt.size()); ++mask) {
      Prod q;
      q.lhs = p.lhs;
      size_t oi = 0;
      for (size_t i = 0; i < p.rhs.size(); ++i) {
        if (oi < opt.size() && opt[oi] == i) {
          if (mask & (uint32_t{1} << oi)) q.rhs.push_back(p.rhs[i]);
          ++oi;
        } else {
          q.rhs.push_back(p.rhs[i]);
        }
      }
      if (q.rhs.empty()) continue;
      if (seen.insert(prod_key(q)).second) r.prods.push_back(std::move(q));
    }
  }
  return r;
}

inline Grammar remove_units(const Grammar& g) {
  size_t n = g.nonterminals.size();
  // closure[a] = set of b with a =>* b through unit productions
  std::vector<std::vector<bool>> closure(n, std::vector<bool>(n, false));
  for (size_t a = 0; a < n; ++a) closure[a][a] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Prod& p : g.prods) {
      if (p.rhs.size() != 1 || !p.rhs[0].is_nt) continue;
      size_t b = static_cast<size_t>(p.rhs[0].id);
      for (size_t a = 0; a < n; ++a)
        if (closure[a][static_cast<size_t>(p.lhs)] && !closure[a][b]) {
          closure[a][b] = true;
          changed = true;
        }
    }
  }
  Grammar r = g;
  r.prods.clear();
  std::unordered_set<std::string> seen;
  for (size_t a = 0; a < n; ++a) {
    for (const Prod& p : g.prods) {
      if (!closure[a][static_cast<size_t>(p.lhs)]) continue;
      if (p.rhs.size() == 1 && p.rhs[0].is_nt) continue;  // drop units
      Prod q;
      q.lhs = static_cast<int32_t>(a);
      q.rhs = p.rhs;
      if (seen.insert(prod_key(q)).second) r.prods.push_back(std::move(q));
    }
  }
  return r;
}

inline std::string fresh_nt_name(const Grammar& g, std::string base) {
  while (g.nt_id(base) >= 0 || g.term_id(base) >= 0) base += "'";
  return base;
}

// Paull's ordering scheme over the declaration order; expects an epsilon- and
// unit-free grammar.
inline Grammar paull_transform(Grammar g) {
  size_t original = g.nonterminals.size();
  std::vector<std::vector<std::vector<GSym>>> alts(original);
  for (const Prod& p : g.prods) alts[static_cast<size_t>(p.lhs)].push_back(p.rhs);

  for (size_t i = 0; i < original; ++i) {
    // Substitute leading earlier nonterminals until heads settle.
    for (int guard = 0;; ++guard) {
      if (guard > 100000)
        fail(Errc::capacity, "left-recursion elimination did not converge");
      bool changed = false;
      std::vector<std::vector<GSym>> out;
      for (auto& rhs : alts[i]) {
        if (!rhs.empty() && rhs[0].is_nt && static_cast<size_t>(rhs[0].id) < i) {
          size_t j = static_cast<size_t>(rhs[0].id);
          for (auto& delta : alts[j]) {
            std::vector<GSym> merged = delta;
            merged.insert(merged.end(), rhs.begin() + 1, rhs.end());
            out.push_back(std::move(merged));
          }
          changed = true;
        } else {
          out.push_back(rhs);
        }
      }
      alts[i] = std::move(out);
      if (!changed) break;
    }

    std::vector<std::vector<GSym>> rec, base;
    for (auto& rhs : alts[i]) {
      if (!rhs.empty() && rhs[0].is_nt && static_cast<size_t>(rhs[0].id) == i) {
        std::vector<GSym> alpha(rhs.begin() + 1, rhs.end());
        if (!alpha.empty()) rec.push_back(std::move(alpha));  // drop A -> A cycles
      } else {
        base.push_back(rhs);
      }
    }
    if (rec.empty()) {
      alts[i] = std::move(base);
      continue;
    }
    if (base.empty())
      fail(Errc::useless_grammar, "left-recursive nonterminal '" +
                                      g.nonterminals[i] + "' has no base alternative");
    int32_t prime = static_cast<int32_t>(g.nonterminals.size());
    g.nonterminals.push_back(fresh_nt_name(g, g.nonterminals[i] + "'"));
    std::vector<std::vector<GSym>> mine, tail;
    for (auto& beta : base) {
      std::vector<GSym> with = beta;
      with.push_back({true, prime});
      mine.push_back(std::move(with));
      mine.push_back(beta);
    }
    for (auto& alpha : rec) {
      std::vector<GSym> with = alpha;
      with.push_back({true, prime});
      tail.push_back(std::move(with));
      tail.push_back(alpha);
    }
    alts[i] = std::move(mine);
    alts.push_back(std::move(tail));
  }

  g.prods.clear();
  for (size_t a = 0; a < alts.size(); ++a)
    for (auto& rhs : alts[a]) g.prods.push_back({static_cast<int32_t>(a), rhs});
  return g;
}

}  // namespace detail

// Structural check: compute the left-corner relation (through nullable
// prefixes) and look for a nonterminal reachable from itself.
inline bool has_left_recursion(const Grammar& g) {
  std::vector<bool> nullable = nullable_nts(g);
  size_t n = g.nonterminals.size();
  std::vector<std::vector<bool>> corner(n, std::vector<bool>(n, false));
  for (const Prod& p : g.prods) {
    for (GSym s : p.rhs) {
      if (!s.is_nt) break;
      corner[static_cast<size_t>(p.lhs)][static_cast<size_t>(s.id)] = true;
      if (!nullable[static_cast<size_t>(s.id)]) break;
    }
  }
  // transitive closure
  for (size_t k = 0; k < n; ++k)
    for (size_t a = 0; a < n; ++a)
      if (corner[a][k])
        for (size_t b = 0; b < n; ++b)
          if (corner[k][b]) corner[a][b] = true;
  for (size_t a = 0; a < n; ++a)
    if (corner[a][a]) return true;
  return false;
}

// Epsilon removal, unit removal, then Paull substitution with immediate
// left-recursion elimination.  The result grammar is epsilon-free and has no
// A =>+ A alpha; epsilon membership survives in accepts_empty.
inline Grammar eliminate_left_recursion(const Grammar& g) {
  Grammar a = detail::grammar_cleanup(g, false);
  Grammar b = detail::remove_epsilons(a);
  Grammar c = detail::grammar_cleanup(b, true);
  Grammar d = detail::remove_units(c);
  Grammar e = detail::grammar_cleanup(d, true);
  return detail::paull_transform(std::move(e));
}

// ---------------------------------------------------------------------------
// Compilation to a one-way nondeterministic PDA

struct CompiledNpda {
  Automaton automaton;
  std::unordered_map<int32_t, std::string> provenance;  // state -> grammar item
};

// Top-down recognizer: the stack holds the pending sentential form.  A
// nonterminal on top is expanded through a binary choose tree (rewriting the
// cell to the last body symbol and pushing the rest right-to-left); a
// terminal on top must match the tape and is popped; the uniform follow rule
// resumes scanning the suspended cell's own symbol at the terminator's head
// position.
inline CompiledNpda compile_to_npda(const Grammar& g) {
  CompiledNpda out;
  Automaton& a = out.automaton;
  a.name = "cfg";
  a.heads = 1;
  a.tape_syms.intern("<");
  a.tape_syms.intern(">");
  for (const std::string& t : g.terminals) a.tape_syms.intern(t);

  std::string bottom = "_bot";
  while (g.nt_id(bottom) >= 0 || g.term_id(bottom) >= 0) bottom.insert(0, "_");
  a.stack_syms.intern(bottom);
  for (const std::string& n : g.nonterminals) a.stack_syms.intern(n);
  for (const std::string& t : g.terminals) a.stack_syms.intern(t);

  auto stack_of = [&](GSym s) { return a.stack_syms.id_of(g.sym_name(s)); };
  auto tape_of = [&](int32_t term) { return a.tape_syms.id_of(g.terminals[static_cast<size_t>(term)]); };

  int32_t s_init = a.states.intern("init");
  int32_t s_scan = a.states.intern("scan");
  int32_t s_popme = a.states.intern("popme");
  int32_t s_check = a.states.intern("check");
  out.provenance[s_init] = "initial state";
  out.provenance[s_scan] = "scan stack top";
  out.provenance[s_popme] = "pop finished symbol";
  out.provenance[s_check] = "check right endmarker";
  a.start_state = s_init;

  auto stay = [](int32_t state, int32_t sym) {
    Branch b;
    b.state = state;
    b.moves.fill(Move::stay);
    b.sym = sym;
    return b;
  };
  auto add_rule = [&](int32_t state, int32_t tape, int32_t top, Action act) {
    Rule r;
    r.state = state;
    r.tape.fill(0);
    r.tape[0] = tape;
    r.top = top;
    r.action = act;
    a.rules.push_back(r);
  };
  auto op_action = [&](Branch b) {
    Action act;
    act.kind = ActionKind::op;
    act.first = b;
    return act;
  };
  auto push_action = [&](Branch b) {
    Action act;
    act.kind = ActionKind::push;
    act.first = b;
    return act;
  };

  // init: move onto the input and push the start symbol over the bottom.
  {
    Branch b = stay(s_scan, a.stack_syms.id_of(g.nonterminals[static_cast<size_t>(g.start)]));
    b.moves[0] = Move::right;
    add_rule(s_init, kLeftEnd, a.stack_syms.id_of(bottom), push_action(b));
  }

  // Terminal on top: match-and-advance or halt.
  for (int32_t t = 0; t < static_cast<int32_t>(g.terminals.size()); ++t) {
    int32_t cell = a.stack_syms.id_of(g.terminals[static_cast<size_t>(t)]);
    Branch b = stay(s_popme, cell);
    b.moves[0] = Move::right;
    add_rule(s_scan, tape_of(t), cell, op_action(b));
  }
  for (int32_t t = 0; t < static_cast<int32_t>(g.terminals.size()); ++t) {
    int32_t cell = a.stack_syms.id_of(g.terminals[static_cast<size_t>(t)]);
    add_rule(s_scan, kAnySym, cell, Action{ActionKind::halt, {}, {}});
  }
  add_rule(s_scan, kAnySym, a.stack_syms.id_of(bottom), Action{ActionKind::halt, {}, {}});

  // Expansion states per production.
  std::vector<int32_t> entry(g.prods.size());
  int choose_counter = 0;
  for (size_t pi = 0; pi < g.prods.size(); ++pi) {
    const Prod& p = g.prods[pi];
    std::string label = g.nonterminals[static_cast<size_t>(p.lhs)] + " ->";
    if (p.rhs.empty()) label += " ;";
    for (GSym s : p.rhs) label += " " + g.sym_name(s);

    int32_t e = a.states.intern("p" + std::to_string(pi));
    out.provenance[e] = label;
    entry[pi] = e;
    int32_t cell = a.stack_syms.id_of(g.nonterminals[static_cast<size_t>(p.lhs)]);
    size_t m = p.rhs.size();
    if (m == 0) {
      add_rule(e, kAnySym, cell, op_action(stay(s_popme, cell)));
    } else if (m == 1) {
      add_rule(e, kAnySym, cell, op_action(stay(s_scan, stack_of(p.rhs[0]))));
    } else {
      int32_t cur = a.states.intern("p" + std::to_string(pi) + "_1");
      out.provenance[cur] = label;
      add_rule(e, kAnySym, cell, op_action(stay(cur, stack_of(p.rhs[m - 1]))));
      for (size_t s = 1; s < m; ++s) {
        int32_t nxt = s + 1 < m ? a.states.intern("p" + std::to_string(pi) + "_" +
                                                  std::to_string(s + 1))
                                : s_scan;
        if (s + 1 < m) out.provenance[nxt] = label;
        add_rule(cur, kAnySym, stack_of(p.rhs[m - s]),
                 push_action(stay(nxt, stack_of(p.rhs[m - s - 1]))));
        cur = nxt;
      }
    }
  }

  // Choose tree per nonterminal.
  for (int32_t nt = 0; nt < static_cast<int32_t>(g.nonterminals.size()); ++nt) {
    std::vector<size_t> alts;
    for (size_t pi = 0; pi < g.prods.size(); ++pi)
      if (g.prods[pi].lhs == nt) alts.push_back(pi);
    int32_t cell = a.stack_syms.id_of(g.nonterminals[static_cast<size_t>(nt)]);
    if (alts.empty()) {
      add_rule(s_scan, kAnySym, cell, Action{ActionKind::halt, {}, {}});
      continue;
    }
    if (alts.size() == 1) {
      add_rule(s_scan, kAnySym, cell, op_action(stay(entry[alts[0]], cell)));
      continue;
    }
    // build(lo, hi) returns the state handling alternatives [lo, hi)
    auto build = [&](auto&& self, size_t lo, size_t hi) -> int32_t {
      if (hi - lo == 1) return entry[alts[lo]];
      int32_t node = a.states.intern("ch" + std::to_string(choose_counter++));
      out.provenance[node] = "choose " + g.nonterminals[static_cast<size_t>(nt)];
      size_t mid = lo + (hi - lo + 1) / 2;
      Action act;
      act.kind = ActionKind::choose;
      act.first = stay(self(self, lo, mid), cell);
      act.second = stay(self(self, mid, hi), cell);
      add_rule(node, kAnySym, cell, act);
      return node;
    };
    size_t mid = (alts.size() + 1) / 2;
    Action act;
    act.kind = ActionKind::choose;
    act.first = stay(build(build, 0, mid), cell);
    act.second = stay(build(build, mid, alts.size()), cell);
    add_rule(s_scan, kAnySym, cell, act);
  }

  add_rule(s_popme, kAnySym, kAnySym, Action{ActionKind::pop, {}, {}});
  add_rule(s_check, kRightEnd, a.stack_syms.id_of(bottom), Action{ActionKind::accept, {}, {}});
  add_rule(s_check, kAnySym, a.stack_syms.id_of(bottom), Action{ActionKind::halt, {}, {}});

  FollowRule to_check;
  to_check.c_state = s_init;
  to_check.d_state = s_popme;
  to_check.state = s_check;
  to_check.moves.fill(Move::stay);
  to_check.top = {TopExprKind::under, 0};
  a.follows.push_back(to_check);

  FollowRule resume;
  resume.d_state = s_popme;
  resume.state = s_scan;
  resume.moves.fill(Move::stay);
  resume.top = {TopExprKind::under, 0};
  a.follows.push_back(resume);

  a.build();
  return out;
}

}  // namespace pdasim
