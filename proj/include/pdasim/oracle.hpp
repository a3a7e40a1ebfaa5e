#pragma once

#include <cstdint>
#include <deque>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "pdasim/automaton.hpp"
#include "pdasim/grammar.hpp"

namespace pdasim {

// Independent ground truth for the engines: direct breadth-first execution
// over instantaneous descriptions, a CYK recognizer, and bounded language
// enumeration.  This header deliberately does not include the engines.

enum class OracleVerdict { accept, reject, unknown };

// A configuration plus the stack below its top.  Each pushed cell remembers
// the suspended frame's state and symbol, which is what follow() consumes.
struct InstantaneousDescription {
  Conf conf;
  std::vector<std::pair<int32_t, int32_t>> stack_rest;  // (state, symbol), outermost last
};

// Breadth-first search over instantaneous descriptions with duplicate
// suppression.  Reject is only reported when the reachable space was
// exhausted untainted; stacks pruned at max_stack taint the answer.
inline OracleVerdict brute_force_accepts(const Automaton& aut,
                                         const std::vector<std::string>& input,
                                         size_t max_stack = 64,
                                         uint64_t max_steps = 1u << 20) {
  if (max_stack == 0 || max_steps == 0)
    fail(Errc::precondition, "oracle budgets must be positive");
  Tape tape = make_tape(aut, input);

  auto encode = [&](const InstantaneousDescription& id) {
    std::string key;
    uint32_t ci = conf_index(aut, tape, id.conf);
    key.append(reinterpret_cast<const char*>(&ci), sizeof ci);
    for (auto [st, sym] : id.stack_rest) {
      key.append(reinterpret_cast<const char*>(&st), sizeof st);
      key.append(reinterpret_cast<const char*>(&sym), sizeof sym);
    }
    return key;
  };

  std::deque<InstantaneousDescription> queue;
  std::unordered_set<std::string> seen;
  bool tainted = false;
  queue.push_back({initial_conf(aut, tape), {}});
  seen.insert(encode(queue.front()));

  uint64_t steps = 0;
  auto enqueue = [&](InstantaneousDescription id) {
    if (id.stack_rest.size() > max_stack) {
      tainted = true;
      return;
    }
    if (seen.insert(encode(id)).second) queue.push_back(std::move(id));
  };

  while (!queue.empty()) {
    if (++steps > max_steps) return OracleVerdict::unknown;
    InstantaneousDescription id = std::move(queue.front());
    queue.pop_front();
    const Action& act = lookup_action(aut, tape, id.conf);
    switch (act.kind) {
      case ActionKind::accept:
        return OracleVerdict::accept;
      case ActionKind::halt:
        break;
      case ActionKind::push: {
        InstantaneousDescription succ;
        succ.conf = apply_branch(aut, tape, id.conf, act.first);
        succ.stack_rest = id.stack_rest;
        succ.stack_rest.emplace_back(id.conf.state, id.conf.top);
        enqueue(std::move(succ));
        break;
      }
      case ActionKind::op: {
        InstantaneousDescription succ;
        succ.conf = apply_branch(aut, tape, id.conf, act.first);
        succ.stack_rest = id.stack_rest;
        enqueue(std::move(succ));
        break;
      }
      case ActionKind::choose: {
        for (const Branch* b : {&act.first, &act.second}) {
          InstantaneousDescription succ;
          succ.conf = apply_branch(aut, tape, id.conf, *b);
          succ.stack_rest = id.stack_rest;
          enqueue(std::move(succ));
        }
        break;
      }
      case ActionKind::pop: {
        if (id.stack_rest.empty()) break;  // popped the bottom: dead branch
        auto [cs, csym] = id.stack_rest.back();
        Conf suspended;
        suspended.state = cs;
        suspended.heads = id.conf.heads;  // follow ignores the suspended heads
        suspended.top = csym;
        InstantaneousDescription succ;
        succ.conf = follow(aut, tape, suspended, id.conf);
        succ.stack_rest = id.stack_rest;
        succ.stack_rest.pop_back();
        enqueue(std::move(succ));
        break;
      }
    }
  }
  return tainted ? OracleVerdict::unknown : OracleVerdict::reject;
}

// ---------------------------------------------------------------------------
// Chomsky normal form and CYK

namespace detail {

inline std::string fresh_cnf_name(const Grammar& g, const std::string& base) {
  std::string name = base;
  while (g.nt_id(name) >= 0 || g.term_id(name) >= 0) name += "'";
  return name;
}

}  // namespace detail

inline Grammar to_cnf(const Grammar& g) {
  Grammar a = detail::grammar_cleanup(g, false);
  Grammar b = detail::remove_epsilons(a);
  Grammar c = detail::grammar_cleanup(b, true);
  Grammar d = detail::remove_units(c);
  Grammar e = detail::grammar_cleanup(d, true);

  Grammar r = e;
  r.prods.clear();
  std::vector<int32_t> proxy(e.terminals.size(), -1);
  auto proxy_for = [&](int32_t term) {
    if (proxy[static_cast<size_t>(term)] >= 0) return proxy[static_cast<size_t>(term)];
    int32_t id = static_cast<int32_t>(r.nonterminals.size());
    r.nonterminals.push_back(
        detail::fresh_cnf_name(r, "T_" + r.terminals[static_cast<size_t>(term)]));
    r.prods.push_back({id, {{false, term}}});
    proxy[static_cast<size_t>(term)] = id;
    return id;
  };

  int chain_counter = 0;
  for (const Prod& p : e.prods) {
    if (p.rhs.size() == 1) {
      r.prods.push_back(p);  // unit-free, so this is A -> terminal
      continue;
    }
    std::vector<int32_t> nts;
    for (GSym s : p.rhs) nts.push_back(s.is_nt ? s.id : proxy_for(s.id));
    int32_t lhs = p.lhs;
    while (nts.size() > 2) {
      int32_t fresh = static_cast<int32_t>(r.nonterminals.size());
      r.nonterminals.push_back(
          detail::fresh_cnf_name(r, "B" + std::to_string(chain_counter++)));
      r.prods.push_back({lhs, {{true, nts[0]}, {true, fresh}}});
      nts.erase(nts.begin());
      lhs = fresh;
    }
    r.prods.push_back({lhs, {{true, nts[0]}, {true, nts[1]}}});
  }
  return r;
}

// Standard cubic table recognition.  Tokens outside the terminal alphabet
// make the answer false by convention.
inline bool cyk_recognize(const Grammar& g, const std::vector<std::string>& tokens) {
  if (!generating_nts(g)[static_cast<size_t>(g.start)])
    return tokens.empty() && generates_empty(g);
  Grammar cnf = to_cnf(g);
  if (tokens.empty()) return cnf.accepts_empty;

  size_t n = tokens.size();
  std::vector<int32_t> ids(n);
  for (size_t i = 0; i < n; ++i) {
    ids[i] = cnf.term_id(tokens[i]);
    if (ids[i] < 0) return false;
  }

  size_t nn = cnf.nonterminals.size();
  std::vector<std::vector<std::vector<char>>> dp(
      n, std::vector<std::vector<char>>(n, std::vector<char>(nn, 0)));
  for (size_t i = 0; i < n; ++i)
    for (const Prod& p : cnf.prods)
      if (p.rhs.size() == 1 && !p.rhs[0].is_nt && p.rhs[0].id == ids[i])
        dp[i][i][static_cast<size_t>(p.lhs)] = 1;
  for (size_t len = 2; len <= n; ++len) {
    for (size_t i = 0; i + len <= n; ++i) {
      size_t j = i + len - 1;
      for (size_t mid = i; mid < j; ++mid) {
        for (const Prod& p : cnf.prods) {
          if (p.rhs.size() != 2) continue;
          if (dp[i][mid][static_cast<size_t>(p.rhs[0].id)] &&
              dp[mid + 1][j][static_cast<size_t>(p.rhs[1].id)])
            dp[i][j][static_cast<size_t>(p.lhs)] = 1;
        }
      }
    }
  }
  return dp[0][n - 1][static_cast<size_t>(cnf.start)] != 0;
}

// ---------------------------------------------------------------------------
// Bounded language enumeration

// Exact {w : |w| <= max_len, S =>* w} by leftmost derivation closure over the
// epsilon- and unit-free form, pruned by minimal yields.
inline std::set<std::vector<std::string>> enumerate_language(const Grammar& g,
                                                             size_t max_len) {
  if (max_len > 12)
    fail(Errc::budget_guard, "enumerate_language capped at length 12");
  std::set<std::vector<std::string>> out;
  bool eps = generates_empty(g);
  if (eps) out.insert({});
  if (!generating_nts(g)[static_cast<size_t>(g.start)]) return out;

  Grammar b = detail::remove_epsilons(detail::grammar_cleanup(g, false));
  Grammar c = detail::remove_units(detail::grammar_cleanup(b, true));
  Grammar e = detail::grammar_cleanup(c, true);

  // minimal terminal yield per nonterminal (everything is >= 1 now)
  const size_t inf = static_cast<size_t>(-1) / 4;
  std::vector<size_t> min_yield(e.nonterminals.size(), inf);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Prod& p : e.prods) {
      size_t total = 0;
      for (GSym s : p.rhs)
        total += s.is_nt ? min_yield[static_cast<size_t>(s.id)] : 1;
      if (total < min_yield[static_cast<size_t>(p.lhs)]) {
        min_yield[static_cast<size_t>(p.lhs)] = total;
        changed = true;
      }
    }
  }

  auto form_min = [&](const std::vector<GSym>& form) {
    size_t total = 0;
    for (GSym s : form) total += s.is_nt ? min_yield[static_cast<size_t>(s.id)] : 1;
    return total;
  };
  auto encode = [](const std::vector<GSym>& form) {
    std::string k;
    for (GSym s : form) {
      k.push_back(s.is_nt ? 'N' : 'T');
      k.append(reinterpret_cast<const char*>(&s.id), sizeof s.id);
    }
    return k;
  };

  std::deque<std::vector<GSym>> queue;
  std::unordered_set<std::string> seen;
  std::vector<GSym> start{{true, e.start}};
  if (!e.prods.empty()) {
    queue.push_back(start);
    seen.insert(encode(start));
  }
  while (!queue.empty()) {
    if (seen.size() > 2'000'000)
      fail(Errc::budget_guard, "enumeration exploded; grammar too ambiguous for this bound");
    std::vector<GSym> form = std::move(queue.front());
    queue.pop_front();
    size_t leftmost = form.size();
    for (size_t i = 0; i < form.size(); ++i)
      if (form[i].is_nt) {
        leftmost = i;
        break;
      }
    if (leftmost == form.size()) {
      std::vector<std::string> word;
      for (GSym s : form) word.push_back(e.terminals[static_cast<size_t>(s.id)]);
      out.insert(std::move(word));
      continue;
    }
    for (const Prod& p : e.prods) {
      if (p.lhs != form[leftmost].id) continue;
      std::vector<GSym> succ;
      succ.reserve(form.size() + p.rhs.size());
      succ.insert(succ.end(), form.begin(), form.begin() + static_cast<long>(leftmost));
      succ.insert(succ.end(), p.rhs.begin(), p.rhs.end());
      succ.insert(succ.end(), form.begin() + static_cast<long>(leftmost) + 1, form.end());
      if (form_min(succ) > max_len) continue;
      if (seen.insert(encode(succ)).second) queue.push_back(std::move(succ));
    }
  }
  return out;
}

}  // namespace pdasim
