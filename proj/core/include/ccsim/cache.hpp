#ifndef CCSIM_CACHE_HPP
#define CCSIM_CACHE_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ccsim/config.hpp"
#include "ccsim/line.hpp"

namespace ccsim {

// One way of a set. Coherent lines carry a MESI state; privatized lines set
// `ccache` and their MESI state is never consulted. `mergeable` marks a
// privatized line whose merge has been deferred to eviction time.
struct CacheWay {
  bool valid = false;
  uint64_t line = 0;  // line address (byte address / 64)
  MesiState mesi = MesiState::Invalid;
  bool dirty = false;
  bool ccache = false;
  bool mergeable = false;
  uint8_t merge_type = 0;
  uint64_t lru = 0;  // larger = more recently used
  Line data;
};

// Set-associative cache with strict LRU. Victim selection is policy-free:
// the caller supplies the evictability predicate (pinned privatized lines,
// locked LLC lines).
class SetAssocCache {
 public:
  SetAssocCache(std::string name, const LevelConfig& cfg);

  const std::string& name() const { return name_; }
  uint64_t num_sets() const { return sets_; }
  uint32_t ways() const { return ways_; }

  uint64_t set_of(uint64_t line) const { return line & (sets_ - 1); }

  CacheWay* find(uint64_t line);
  const CacheWay* find(uint64_t line) const;
  void touch(CacheWay& w) { w.lru = ++tick_; }

  std::span<CacheWay> set_ways(uint64_t set) {
    return {&slots_[set * ways_], ways_};
  }
  std::span<const CacheWay> set_ways(uint64_t set) const {
    return {&slots_[set * ways_], ways_};
  }

  // Invalid way in the line's set, or nullptr if the set is full.
  CacheWay* free_way(uint64_t line);

  // LRU way among those satisfying `evictable`; nullptr if none qualifies.
  CacheWay* select_victim(uint64_t line, const std::function<bool(const CacheWay&)>& evictable);

  // All valid ways (for invariant sweeps).
  std::span<CacheWay> all_ways() { return slots_; }
  std::span<const CacheWay> all_ways() const { return slots_; }

 private:
  std::string name_;
  uint64_t sets_;
  uint32_t ways_;
  uint64_t tick_ = 0;
  std::vector<CacheWay> slots_;
};

}  // namespace ccsim

#endif
