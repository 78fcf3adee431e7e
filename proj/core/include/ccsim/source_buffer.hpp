#ifndef CCSIM_SOURCE_BUFFER_HPP
#define CCSIM_SOURCE_BUFFER_HPP

#include <cstdint>
#include <vector>

#include "ccsim/line.hpp"

namespace ccsim {

struct SourceBufferEntry {
  bool valid = false;
  uint64_t line = 0;
  Line data;        // preserved source copy of the line
  uint64_t order = 0;  // insertion order, used by the merge walk
};

// Fully associative per-core buffer holding the pre-update copy of every
// line the core has privatized. At most one valid entry per line address.
class SourceBuffer {
 public:
  explicit SourceBuffer(uint32_t entries) : entries_(entries) {}

  SourceBufferEntry* find(uint64_t line) {
    for (auto& e : entries_)
      if (e.valid && e.line == line) return &e;
    return nullptr;
  }
  SourceBufferEntry* free_entry() {
    for (auto& e : entries_)
      if (!e.valid) return &e;
    return nullptr;
  }
  SourceBufferEntry& insert(uint64_t line, const Line& data) {
    SourceBufferEntry* e = free_entry();
    e->valid = true;
    e->line = line;
    e->data = data;
    e->order = ++next_order_;
    return *e;
  }
  void invalidate(SourceBufferEntry& e) { e.valid = false; }

  uint32_t capacity() const { return static_cast<uint32_t>(entries_.size()); }
  uint32_t valid_count() const {
    uint32_t n = 0;
    for (const auto& e : entries_)
      if (e.valid) ++n;
    return n;
  }

  // Valid entries ordered by insertion time.
  std::vector<SourceBufferEntry*> in_insertion_order();

  std::vector<SourceBufferEntry>& entries() { return entries_; }
  const std::vector<SourceBufferEntry>& entries() const { return entries_; }

 private:
  std::vector<SourceBufferEntry> entries_;
  uint64_t next_order_ = 0;
};

}  // namespace ccsim

#endif
