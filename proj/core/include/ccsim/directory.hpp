#ifndef CCSIM_DIRECTORY_HPP
#define CCSIM_DIRECTORY_HPP

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "ccsim/errors.hpp"

namespace ccsim {

enum class DirState : uint8_t { Uncached, Shared, Exclusive };

// Full-map entry tracking which cores hold a coherent line in their private
// caches. Exclusive covers both E and M at the owner.
struct DirectoryEntry {
  DirState state = DirState::Uncached;
  uint64_t sharers = 0;  // bitmask over cores
  int owner = -1;

  bool has(uint32_t core) const { return sharers >> core & 1; }
  void add(uint32_t core) { sharers |= uint64_t(1) << core; }
  void remove(uint32_t core) { sharers &= ~(uint64_t(1) << core); }
  uint32_t count() const { return static_cast<uint32_t>(__builtin_popcountll(sharers)); }
};

// The directory is a standalone map keyed by line address: it tracks private
// copies regardless of LLC residency, so correctness does not depend on
// inclusion.
class Directory {
 public:
  DirectoryEntry* find(uint64_t line) {
    auto it = map_.find(line);
    return it == map_.end() ? nullptr : &it->second;
  }
  const DirectoryEntry* find(uint64_t line) const {
    auto it = map_.find(line);
    return it == map_.end() ? nullptr : &it->second;
  }
  DirectoryEntry& get(uint64_t line) { return map_[line]; }
  void drop(uint64_t line) { map_.erase(line); }

  // Sorted snapshot for invariant sweeps (deterministic iteration).
  std::vector<std::pair<uint64_t, DirectoryEntry>> snapshot() const;

 private:
  std::unordered_map<uint64_t, DirectoryEntry> map_;
};

// Per-line LLC locks taken around a merge so concurrent merges of one line
// serialize. At most one holder per line.
class LlcLockTable {
 public:
  bool try_lock(uint64_t line, uint32_t core) {
    auto [it, inserted] = holder_.try_emplace(line, core);
    return inserted || it->second == core;
  }
  void unlock(uint64_t line, uint32_t core) {
    auto it = holder_.find(line);
    if (it == holder_.end() || it->second != core)
      raise(ErrorCode::UnlockWithoutLock,
            "core " + std::to_string(core) + " does not hold line " + std::to_string(line));
    holder_.erase(it);
  }
  bool locked(uint64_t line) const { return holder_.count(line) != 0; }
  int holder(uint64_t line) const {
    auto it = holder_.find(line);
    return it == holder_.end() ? -1 : static_cast<int>(it->second);
  }
  bool locked_by_other(uint64_t line, uint32_t core) const {
    auto it = holder_.find(line);
    return it != holder_.end() && it->second != core;
  }

 private:
  std::unordered_map<uint64_t, uint32_t> holder_;
};

}  // namespace ccsim

#endif
