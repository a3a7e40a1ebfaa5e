#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pdasim/automaton.hpp"
#include "pdasim/error.hpp"

namespace pdasim {

// Line-based automaton source format:
//
//   pda <name>
//   heads <k>
//   tapesyms <tok> ...            # excluding reserved < and >
//   stacksyms <tok> ...           # first token is the bottom symbol
//   states <tok> ...
//   start <state>
//   rule <state|*> <tapesym|*>{k} <stacksym|*> => push <state> <L|S|R>{k} <stacksym>
//   rule ...                      => op <state> <L|S|R>{k} <stacksym>
//   rule ...                      => pop | halt | accept
//   rule ...                      => choose <state> <moves> <sym> | <state> <moves> <sym>
//   follow <state|*> <state|*> <stacksym|*> <stacksym|*> => <state> <moves> <sym|UNDER|TOP|MIN|MAX>
//
// '#' starts a comment.  Declarations must precede the rules that use them.

namespace detail {

struct SrcTok {
  std::string text;
  int col;
};

inline std::vector<SrcTok> tokenize_line(const std::string& line) {
  std::vector<SrcTok> toks;
  std::string cur;
  int start = 0;
  for (int i = 0; i <= static_cast<int>(line.size()); ++i) {
    char c = i < static_cast<int>(line.size()) ? line[static_cast<size_t>(i)] : ' ';
    if (c == '#') {
      if (!cur.empty()) toks.push_back({cur, start + 1});
      return toks;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      if (!cur.empty()) {
        toks.push_back({cur, start + 1});
        cur.clear();
      }
    } else {
      if (cur.empty()) start = i;
      cur.push_back(c);
    }
  }
  if (!cur.empty()) toks.push_back({cur, start + 1});
  return toks;
}

[[noreturn]] inline void parse_fail(int line, int col, const std::string& msg) {
  fail(Errc::parse_error, std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
}

inline bool is_reserved_word(const std::string& s) {
  return s == "*" || s == "=>" || s == "|" || s == "UNDER" || s == "TOP" || s == "MIN" ||
         s == "MAX";
}

}  // namespace detail

inline Automaton parse_automaton(const std::string& text) {
  using detail::parse_fail;
  Automaton a;
  a.tape_syms.intern("<");
  a.tape_syms.intern(">");

  bool saw_name = false, saw_heads = false, saw_tapesyms = false, saw_stacksyms = false,
       saw_states = false, saw_start = false;

  auto declare = [&](SymbolTable& table, const detail::SrcTok& t, int line, bool allow_dup) {
    if (detail::is_reserved_word(t.text) || t.text == "<" || t.text == ">")
      parse_fail(line, t.col, "'" + t.text + "' is reserved");
    if (!allow_dup && table.contains(t.text))
      parse_fail(line, t.col, "duplicate declaration of '" + t.text + "'");
    table.intern(t.text);
  };

  auto want_state = [&](const detail::SrcTok& t, int line, bool wildcard) -> int32_t {
    if (wildcard && t.text == "*") return kAnySym;
    int32_t id = a.states.id_of(t.text);
    if (id < 0) parse_fail(line, t.col, "undeclared state '" + t.text + "'");
    return id;
  };
  auto want_stack = [&](const detail::SrcTok& t, int line, bool wildcard) -> int32_t {
    if (wildcard && t.text == "*") return kAnySym;
    int32_t id = a.stack_syms.id_of(t.text);
    if (id < 0) parse_fail(line, t.col, "undeclared stack symbol '" + t.text + "'");
    return id;
  };
  auto want_tape = [&](const detail::SrcTok& t, int line, bool wildcard) -> int32_t {
    if (wildcard && t.text == "*") return kAnySym;
    int32_t id = a.tape_syms.id_of(t.text);
    if (id < 0) parse_fail(line, t.col, "undeclared tape symbol '" + t.text + "'");
    return id;
  };
  auto want_moves = [&](const std::vector<detail::SrcTok>& toks, size_t at, int line) {
    Moves m{};
    for (int j = 0; j < a.heads; ++j) {
      const detail::SrcTok& t = toks.at(at + static_cast<size_t>(j));
      if (t.text == "L")
        m[static_cast<size_t>(j)] = Move::left;
      else if (t.text == "S")
        m[static_cast<size_t>(j)] = Move::stay;
      else if (t.text == "R")
        m[static_cast<size_t>(j)] = Move::right;
      else
        parse_fail(line, t.col, "expected move L, S or R, got '" + t.text + "'");
    }
    return m;
  };

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::vector<detail::SrcTok> toks = detail::tokenize_line(raw);
    if (toks.empty()) continue;
    const std::string& head = toks[0].text;

    auto need = [&](size_t n, const std::string& what) {
      if (toks.size() != n)
        parse_fail(lineno, toks.back().col, "malformed " + what + " line");
    };

    if (head == "pda") {
      need(2, "pda");
      a.name = toks[1].text;
      saw_name = true;
    } else if (head == "heads") {
      need(2, "heads");
      int k = 0;
      try {
        k = std::stoi(toks[1].text);
      } catch (...) {
        parse_fail(lineno, toks[1].col, "heads expects a number");
      }
      if (k < 1 || k > kMaxHeads)
        parse_fail(lineno, toks[1].col,
                   "heads must be between 1 and " + std::to_string(kMaxHeads));
      a.heads = k;
      saw_heads = true;
    } else if (head == "tapesyms") {
      for (size_t i = 1; i < toks.size(); ++i) declare(a.tape_syms, toks[i], lineno, false);
      saw_tapesyms = true;
    } else if (head == "stacksyms") {
      if (toks.size() < 2) parse_fail(lineno, toks[0].col, "stacksyms needs at least the bottom symbol");
      for (size_t i = 1; i < toks.size(); ++i) declare(a.stack_syms, toks[i], lineno, false);
      saw_stacksyms = true;
    } else if (head == "states") {
      for (size_t i = 1; i < toks.size(); ++i) declare(a.states, toks[i], lineno, false);
      saw_states = true;
    } else if (head == "start") {
      need(2, "start");
      a.start_state = want_state(toks[1], lineno, false);
      saw_start = true;
    } else if (head == "rule") {
      if (!saw_heads) parse_fail(lineno, toks[0].col, "rule before heads declaration");
      size_t pat_len = 1 + static_cast<size_t>(a.heads) + 1;
      if (toks.size() < 1 + pat_len + 2)
        parse_fail(lineno, toks.back().col, "truncated rule");
      Rule r;
      r.line = lineno;
      size_t at = 1;
      r.state = want_state(toks[at++], lineno, true);
      r.tape.fill(0);
      for (int j = 0; j < a.heads; ++j)
        r.tape[static_cast<size_t>(j)] = want_tape(toks[at++], lineno, true);
      r.top = want_stack(toks[at++], lineno, true);
      if (toks[at].text != "=>") parse_fail(lineno, toks[at].col, "expected '=>'");
      ++at;
      const std::string& verb = toks[at].text;
      int verb_col = toks[at].col;
      ++at;
      auto parse_branch = [&]() {
        Branch b;
        if (at + static_cast<size_t>(a.heads) + 1 >= toks.size() + 1) {
          parse_fail(lineno, toks.back().col, "truncated action");
        }
        b.state = want_state(toks.at(at++), lineno, false);
        b.moves = want_moves(toks, at, lineno);
        at += static_cast<size_t>(a.heads);
        b.sym = want_stack(toks.at(at++), lineno, false);
        return b;
      };
      if (verb == "push" || verb == "op") {
        r.action.kind = verb == "push" ? ActionKind::push : ActionKind::op;
        r.action.first = parse_branch();
      } else if (verb == "choose") {
        r.action.kind = ActionKind::choose;
        r.action.first = parse_branch();
        if (at >= toks.size() || toks[at].text != "|")
          parse_fail(lineno, at < toks.size() ? toks[at].col : toks.back().col,
                     "choose expects '|' between branches");
        ++at;
        r.action.second = parse_branch();
      } else if (verb == "pop") {
        r.action.kind = ActionKind::pop;
      } else if (verb == "halt") {
        r.action.kind = ActionKind::halt;
      } else if (verb == "accept") {
        r.action.kind = ActionKind::accept;
      } else {
        parse_fail(lineno, verb_col, "unknown action '" + verb + "'");
      }
      if (at != toks.size()) parse_fail(lineno, toks[at].col, "trailing tokens after action");
      a.rules.push_back(r);
    } else if (head == "follow") {
      if (!saw_heads) parse_fail(lineno, toks[0].col, "follow before heads declaration");
      size_t expected = 1 + 4 + 1 + 1 + static_cast<size_t>(a.heads) + 1;
      if (toks.size() != expected) parse_fail(lineno, toks.back().col, "malformed follow rule");
      FollowRule f;
      f.line = lineno;
      size_t at = 1;
      f.c_state = want_state(toks[at++], lineno, true);
      f.d_state = want_state(toks[at++], lineno, true);
      f.c_sym = want_stack(toks[at++], lineno, true);
      f.d_sym = want_stack(toks[at++], lineno, true);
      if (toks[at].text != "=>") parse_fail(lineno, toks[at].col, "expected '=>'");
      ++at;
      f.state = want_state(toks[at++], lineno, false);
      f.moves = want_moves(toks, at, lineno);
      at += static_cast<size_t>(a.heads);
      const detail::SrcTok& tt = toks[at];
      if (tt.text == "UNDER")
        f.top = {TopExprKind::under, 0};
      else if (tt.text == "TOP")
        f.top = {TopExprKind::top, 0};
      else if (tt.text == "MIN")
        f.top = {TopExprKind::min, 0};
      else if (tt.text == "MAX")
        f.top = {TopExprKind::max, 0};
      else
        f.top = {TopExprKind::lit, want_stack(tt, lineno, false)};
      a.follows.push_back(f);
    } else {
      parse_fail(lineno, toks[0].col, "unknown directive '" + head + "'");
    }
  }

  if (!saw_name) fail(Errc::missing_decl, "missing 'pda <name>' declaration");
  if (!saw_heads) fail(Errc::missing_decl, "missing 'heads' declaration");
  if (!saw_tapesyms) fail(Errc::missing_decl, "missing 'tapesyms' declaration");
  if (!saw_stacksyms || a.stack_syms.size() == 0)
    fail(Errc::missing_decl, "missing 'stacksyms' (bottom-of-stack) declaration");
  if (!saw_states || a.states.size() == 0) fail(Errc::missing_decl, "missing 'states' declaration");
  if (!saw_start) fail(Errc::missing_decl, "missing 'start' declaration");

  a.build();
  return a;
}

// Canonical source text; parse(to_source(a)) behaves like a.
inline std::string to_source(const Automaton& a) {
  std::ostringstream os;
  os << "pda " << a.name << "\n";
  os << "heads " << a.heads << "\n";
  os << "tapesyms";
  for (int32_t i = 2; i < a.tape_syms.size(); ++i) os << ' ' << a.tape_syms.name(i);
  os << "\nstacksyms";
  for (int32_t i = 0; i < a.stack_syms.size(); ++i) os << ' ' << a.stack_syms.name(i);
  os << "\nstates";
  for (int32_t i = 0; i < a.states.size(); ++i) os << ' ' << a.states.name(i);
  os << "\nstart " << a.states.name(a.start_state) << "\n";

  auto sym = [](const SymbolTable& t, int32_t id) {
    return id == kAnySym ? std::string("*") : t.name(id);
  };
  auto moves = [&](const Moves& m) {
    std::string s;
    for (int j = 0; j < a.heads; ++j) {
      s += ' ';
      s += m[static_cast<size_t>(j)] == Move::left    ? 'L'
           : m[static_cast<size_t>(j)] == Move::stay ? 'S'
                                                     : 'R';
    }
    return s;
  };
  auto branch = [&](const Branch& b) {
    return ' ' + a.states.name(b.state) + moves(b.moves) + ' ' + a.stack_syms.name(b.sym);
  };

  for (const Rule& r : a.rules) {
    os << "rule " << sym(a.states, r.state);
    for (int j = 0; j < a.heads; ++j) os << ' ' << sym(a.tape_syms, r.tape[static_cast<size_t>(j)]);
    os << ' ' << sym(a.stack_syms, r.top) << " =>";
    switch (r.action.kind) {
      case ActionKind::push: os << " push" << branch(r.action.first); break;
      case ActionKind::op: os << " op" << branch(r.action.first); break;
      case ActionKind::choose:
        os << " choose" << branch(r.action.first) << " |" << branch(r.action.second);
        break;
      case ActionKind::pop: os << " pop"; break;
      case ActionKind::halt: os << " halt"; break;
      case ActionKind::accept: os << " accept"; break;
    }
    os << "\n";
  }
  for (const FollowRule& f : a.follows) {
    os << "follow " << sym(a.states, f.c_state) << ' ' << sym(a.states, f.d_state) << ' '
       << sym(a.stack_syms, f.c_sym) << ' ' << sym(a.stack_syms, f.d_sym) << " => "
       << a.states.name(f.state) << moves(f.moves);
    switch (f.top.kind) {
      case TopExprKind::lit: os << ' ' << a.stack_syms.name(f.top.sym); break;
      case TopExprKind::under: os << " UNDER"; break;
      case TopExprKind::top: os << " TOP"; break;
      case TopExprKind::min: os << " MIN"; break;
      case TopExprKind::max: os << " MAX"; break;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace pdasim
