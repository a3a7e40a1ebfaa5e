#pragma once

#include <string>
#include <vector>

#include "pdasim/error.hpp"
#include "pdasim/grammar.hpp"
#include "pdasim/parse.hpp"

namespace pdasim {

// Builtin automata and grammars with certified behavior.  The test suite
// checks every sample outcome against the brute-force oracle and the
// complexity tags against measured step counters.

struct ZooEntry {
  enum class Kind { automaton, grammar };
  std::string name;
  Kind kind;
  std::string source;
  bool deterministic = true;                          // automata only
  std::vector<std::pair<std::string, bool>> samples;  // input (--chars) -> accepted
  std::string complexity;                             // informal class tag
};

inline const std::vector<ZooEntry>& zoo_entries() {
  static const std::vector<ZooEntry> entries = {
      {"accept-empty", ZooEntry::Kind::automaton,
       "pda accept-empty\n"
       "heads 1\n"
       "tapesyms a\n"
       "stacksyms Z\n"
       "states s0 s1\n"
       "start s0\n"
       "rule s0 < Z => op s1 R Z\n"
       "rule s1 > Z => accept\n"
       "rule s1 * Z => halt\n",
       true,
       {{"", true}, {"a", false}, {"aa", false}},
       "constant work"},

      {"anbncn", ZooEntry::Kind::automaton,
       // Phase 1 pushes per a and pops per b; then the head walks back to
       // the first b and phase 2 pushes per b and pops per c.  Uses two-way
       // head motion, so this goes beyond one-way PDA languages.
       "pda anbncn\n"
       "heads 1\n"
       "tapesyms a b c\n"
       "stacksyms Z A B\n"
       "states start p1 back p2\n"
       "start start\n"
       "rule start < Z => op p1 R Z\n"
       "rule p1 a * => push p1 R A\n"
       "rule p1 b A => pop\n"
       "rule p1 c Z => op back L Z\n"
       "rule p1 * * => halt\n"
       "rule back b Z => op back L Z\n"
       "rule back a Z => op p2 R Z\n"
       "rule back * * => halt\n"
       "rule p2 b * => push p2 R B\n"
       "rule p2 c B => pop\n"
       "rule p2 > Z => accept\n"
       "rule p2 * * => halt\n"
       "follow * p1 * A => p1 R UNDER\n"
       "follow * p2 * B => p2 R UNDER\n",
       true,
       {{"abc", true},
        {"aabbcc", true},
        {"aaabbbccc", true},
        {"", false},
        {"aabbc", false},
        {"aabcc", false},
        {"abbcc", false},
        {"aabbccc", false},
        {"cba", false}},
       "linear configurations, linear native time"},

      {"expo-counter", ZooEntry::Kind::automaton,
       // Depth-first enumeration of all binary stacks of height n: each
       // frame recurses with B0 pushed, on resume recurses with B1, then
       // pops.  Native time is Theta(2^n) while the configuration count is
       // linear in n.
       "pda expo-counter\n"
       "heads 1\n"
       "tapesyms 1\n"
       "stacksyms Z B0 B1\n"
       "states start walk push1 popnow\n"
       "start start\n"
       "rule start < Z => op walk R Z\n"
       "rule walk > Z => accept\n"
       "rule walk 1 * => push walk R B0\n"
       "rule walk > * => pop\n"
       "rule popnow * Z => accept\n"
       "rule popnow * * => pop\n"
       "rule push1 * * => push walk R B1\n"
       "follow * * * B0 => push1 L UNDER\n"
       "follow * * * B1 => popnow L UNDER\n",
       true,
       {{"", true}, {"1", true}, {"1111", true}},
       "exponential native time, linear configurations"},

      {"self-loop", ZooEntry::Kind::automaton,
       // The same configuration repeats at the same stack height, the
       // simplest infinite loop.
       "pda self-loop\n"
       "heads 1\n"
       "tapesyms a\n"
       "stacksyms Z\n"
       "states s0\n"
       "start s0\n"
       "rule s0 < Z => op s0 S Z\n",
       true,
       {{"", false}, {"a", false}},
       "non-terminating"},

      {"pushall", ZooEntry::Kind::automaton,
       // Pushes one symbol per input cell and then unwinds; drives the frame
       // stack to a depth linear in the input.
       "pda pushall\n"
       "heads 1\n"
       "tapesyms 1\n"
       "stacksyms Z A\n"
       "states s p q\n"
       "start s\n"
       "rule s < Z => op p R Z\n"
       "rule p 1 * => push p R A\n"
       "rule p > * => pop\n"
       "rule q * Z => accept\n"
       "rule q * * => pop\n"
       "follow * * * * => q S UNDER\n",
       true,
       {{"", false}, {"1", true}, {"11111", true}},
       "linear depth"},

      {"dyck", ZooEntry::Kind::grammar,
       "# balanced parentheses\n"
       "S -> ( S ) S | ;\n",
       false,
       {{"", true},
        {"()", true},
        {"(())", true},
        {"()()", true},
        {"(()())", true},
        {")(", false},
        {"(()", false},
        {"())", false}},
       "bounded nondeterminism on nested inputs"},

      {"ambiguous", ZooEntry::Kind::grammar,
       "S -> a S b S | b S a S | ;\n",
       false,
       {{"", true},
        {"ab", true},
        {"ba", true},
        {"abab", true},
        {"aabb", true},
        {"a", false},
        {"b", false},
        {"aab", false}},
       "highly ambiguous; cubic worst case"},

      {"leftrec", ZooEntry::Kind::grammar,
       "# a+ written left-recursively\n"
       "S -> S a | a\n",
       false,
       {{"a", true}, {"aa", true}, {"aaaa", true}, {"", false}, {"b", false}},
       "left-recursive source form"},

      {"palindrome", ZooEntry::Kind::grammar,
       "S -> a S a | b S b | a | b | ;\n",
       false,
       {{"", true},
        {"a", true},
        {"aba", true},
        {"abba", true},
        {"ab", false},
        {"aab", false}},
       "palindromes over {a,b}"},
  };
  return entries;
}

inline std::vector<std::string> zoo_list() {
  std::vector<std::string> names;
  for (const ZooEntry& e : zoo_entries()) names.push_back(e.name);
  return names;
}

inline const ZooEntry& zoo_get(const std::string& name) {
  for (const ZooEntry& e : zoo_entries())
    if (e.name == name) return e;
  fail(Errc::unknown_name, "no zoo entry named '" + name + "'");
}

inline Automaton zoo_automaton(const std::string& name) {
  const ZooEntry& e = zoo_get(name);
  if (e.kind != ZooEntry::Kind::automaton)
    fail(Errc::unknown_name, "zoo entry '" + name + "' is a grammar, not an automaton");
  return parse_automaton(e.source);
}

inline Grammar zoo_grammar(const std::string& name) {
  const ZooEntry& e = zoo_get(name);
  if (e.kind != ZooEntry::Kind::grammar)
    fail(Errc::unknown_name, "zoo entry '" + name + "' is an automaton, not a grammar");
  return parse_grammar(e.source);
}

}  // namespace pdasim
