#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "pdasim/error.hpp"
#include "pdasim/metrics.hpp"

namespace pdasim {

// Terminator set: a membership bitmap over the configuration space plus an
// unsorted list of members.  Membership is O(1); union costs one probe per
// element of the right-hand side.
class ConfSet {
 public:
  explicit ConfSet(uint32_t capacity)
      : capacity_(capacity), bits_((capacity + 63) / 64, 0) {}

  uint32_t capacity() const { return capacity_; }
  uint32_t size() const { return static_cast<uint32_t>(items_.size()); }
  bool empty() const { return items_.empty(); }

  bool contains(uint32_t i) const {
    check(i);
    return (bits_[i >> 6] >> (i & 63)) & 1u;
  }

  // Returns true when i was newly inserted.
  bool insert(uint32_t i) {
    check(i);
    uint64_t mask = uint64_t{1} << (i & 63);
    if (bits_[i >> 6] & mask) return false;
    bits_[i >> 6] |= mask;
    items_.push_back(i);
    return true;
  }

  // Members in insertion order.  Index-based iteration stays valid across
  // appends; engines nevertheless iterate over snapshots.
  const std::vector<uint32_t>& items() const { return items_; }

  void clear() {
    for (uint32_t i : items_) bits_[i >> 6] &= ~(uint64_t{1} << (i & 63));
    items_.clear();
  }

 private:
  void check(uint32_t i) const {
    if (i >= capacity_)
      fail(Errc::capacity, "configuration index " + std::to_string(i) +
                               " out of range for set capacity " + std::to_string(capacity_));
  }

  uint32_t capacity_;
  std::vector<uint64_t> bits_;
  std::vector<uint32_t> items_;
};

inline ConfSet make_set(uint32_t capacity) { return ConfSet(capacity); }

inline ConfSet make_set(uint32_t capacity, uint32_t member) {
  ConfSet s(capacity);
  s.insert(member);
  return s;
}

// acc := acc  other, charging exactly |other| element probes.
inline void union_into(ConfSet& acc, const ConfSet& other, Metrics& m) {
  if (acc.capacity() != other.capacity())
    fail(Errc::capacity, "union of sets with different capacities");
  for (uint32_t i : other.items()) {
    ++m.union_elem_ops;
    acc.insert(i);
  }
  m.note_card(acc.size());
}

// Hands out cleared sets in O(1) amortized: released sets are wiped via
// their item lists and reused, so the zeroed bitmap is paid for once.
class ConfSetPool {
 public:
  explicit ConfSetPool(uint32_t capacity) : capacity_(capacity) {}

  uint32_t capacity() const { return capacity_; }

  ConfSet* acquire() {
    if (!free_.empty()) {
      ConfSet* s = free_.back();
      free_.pop_back();
      return s;
    }
    storage_.emplace_back(capacity_);
    return &storage_.back();
  }

  void release(ConfSet* s) {
    s->clear();
    free_.push_back(s);
  }

  size_t created() const { return storage_.size(); }

 private:
  uint32_t capacity_;
  std::deque<ConfSet> storage_;
  std::vector<ConfSet*> free_;
};

// The memo table T, one cell per configuration index.  Deterministic engines
// store a single terminator per cell, nondeterministic ones a terminator set;
// Visited marks in-progress configurations.
enum class CellKind : uint8_t { undef, visited, memo_d, memo_n };

class ConfTable {
 public:
  using TransitionHook = std::function<void(uint32_t, CellKind, CellKind)>;

  explicit ConfTable(uint32_t n_conf) : cells_(n_conf) {}

  uint32_t size() const { return static_cast<uint32_t>(cells_.size()); }

  CellKind kind(uint32_t i) const { return cells_[i].kind; }

  uint32_t memo_conf(uint32_t i) const { return cells_[i].conf; }

  ConfSet* memo_set(uint32_t i) const { return cells_[i].set; }

  void set_visited(uint32_t i) { transition(i, CellKind::visited); }

  void set_memo_conf(uint32_t i, uint32_t d) {
    transition(i, CellKind::memo_d);
    cells_[i].conf = d;
  }

  void set_memo_set(uint32_t i, ConfSet* s) {
    transition(i, CellKind::memo_n);
    cells_[i].set = s;
  }

  void set_undef(uint32_t i) { transition(i, CellKind::undef); }

  void set_transition_hook(TransitionHook h) { hook_ = std::move(h); }

  bool all_undef() const {
    for (const Cell& c : cells_)
      if (c.kind != CellKind::undef) return false;
    return true;
  }

 private:
  struct Cell {
    CellKind kind = CellKind::undef;
    uint32_t conf = 0;
    ConfSet* set = nullptr;
  };

  void transition(uint32_t i, CellKind to) {
    if (hook_) hook_(i, cells_[i].kind, to);
    cells_[i].kind = to;
  }

  std::vector<Cell> cells_;
  TransitionHook hook_;
};

}  // namespace pdasim
