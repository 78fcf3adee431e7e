#ifndef CCSIM_CONFIG_HPP
#define CCSIM_CONFIG_HPP

#include <cstdint>
#include <string>

#include "ccsim/line.hpp"

namespace ccsim {

struct LevelConfig {
  uint32_t ways = 8;
  uint64_t capacity_bytes = 32 * 1024;
  uint32_t line_bytes = kLineBytes;
  uint32_t hit_latency_cycles = 4;

  uint64_t num_lines() const { return capacity_bytes / line_bytes; }
  uint64_t num_sets() const { return num_lines() / ways; }
};

// Cache hierarchy parameters. The defaults model an 8-core machine with
// per-core L1/L2 and a shared 16-way LLC; see desk_scale() for the small
// configuration the test suites use.
struct CacheConfig {
  uint32_t core_count = 8;
  LevelConfig l1{8, 32 * 1024, kLineBytes, 4};
  LevelConfig l2{8, 512 * 1024, kLineBytes, 10};
  LevelConfig llc{16, 4 * 1024 * 1024, kLineBytes, 70};
  uint32_t memory_latency_cycles = 300;

  // per-core source buffer
  uint32_t sb_entries = 8;
  uint32_t sb_hit_latency_cycles = 3;

  // merge procedure cost model
  uint32_t merge_fixed_overhead_cycles = 170;  // per merged line, incl. LLC round-trip
  uint32_t mreg_access_cycles = 1;             // per rd_mreg / wr_mreg

  void validate() const;

  // Shrunk configuration used by the test suites: 4 cores, 8KB L1, 64KB L2,
  // 256KB LLC, same latencies and associativities as the default machine.
  static CacheConfig desk_scale(uint32_t cores = 4);
};

// Parses "key = value" lines ('#' starts a comment). Unknown keys are
// rejected. Returns cfg with any mentioned fields overridden.
CacheConfig parse_cache_config(const std::string& text, CacheConfig cfg = {});
CacheConfig load_cache_config(const std::string& path, CacheConfig cfg = {});

}  // namespace ccsim

#endif
