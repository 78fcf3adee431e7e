#ifndef CCSIM_COUNTERS_HPP
#define CCSIM_COUNTERS_HPP

#include <cstdint>

namespace ccsim {

// Global run statistics. All fields are monotone during a run; normalized
// rates are derived at report time only.
struct Counters {
  struct Level {
    uint64_t hits = 0;
    uint64_t misses = 0;
    uint64_t accesses() const { return hits + misses; }
  };
  Level l1, l2, llc;
  uint64_t memory_accesses = 0;  // demand fetches + writebacks reaching memory

  uint64_t coherent_loads = 0;
  uint64_t coherent_stores = 0;
  uint64_t cops = 0;  // c_read + c_write

  uint64_t directory_messages = 0;
  uint64_t invalidation_messages = 0;

  // Message counts attributable to lines inside declared CData regions.
  // The privatized path never touches the directory, so these stay zero.
  uint64_t cdata_directory_messages = 0;
  uint64_t cdata_invalidation_messages = 0;

  uint64_t merges_executed = 0;
  uint64_t merges_skipped_clean = 0;
  uint64_t source_buffer_evictions = 0;
  uint64_t lock_conflicts = 0;
};

}  // namespace ccsim

#endif
