#pragma once

#include <chrono>
#include <cstdint>

namespace pdasim {

// Step counters backing the complexity assertions.  Everything is counted in
// abstract operations so the bounds hold regardless of wall-clock noise.
struct Metrics {
  uint64_t engine_calls = 0;    // invocations of the engine procedure
  uint64_t cond_execs = 0;      // cond bodies entered (at most once per conf in Sim)
  uint64_t memo_hits = 0;       // shortcut returns from the table
  uint64_t visited_hits = 0;    // infinite-branch cuts
  uint64_t union_elem_ops = 0;  // one probe per element of the unioned-in set
  uint64_t halts_seen = 0;      // halt arms taken by the nondeterministic engines
  uint64_t max_frame_depth = 0;
  uint64_t max_set_card = 0;    // largest terminator set constructed
  std::chrono::nanoseconds wall_time{0};

  void note_depth(uint64_t d) {
    if (d > max_frame_depth) max_frame_depth = d;
  }
  void note_card(uint64_t c) {
    if (c > max_set_card) max_set_card = c;
  }
};

}  // namespace pdasim
