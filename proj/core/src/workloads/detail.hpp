#ifndef CCSIM_WORKLOADS_DETAIL_HPP
#define CCSIM_WORKLOADS_DETAIL_HPP

#include <cmath>
#include <cstdint>
#include <unordered_set>

#include "ccsim/sched.hpp"
#include "ccsim/system.hpp"
#include "ccsim/workloads.hpp"

namespace ccsim::detail {

// Decides when a privatizing program must run its cadence merge. Two
// triggers: the configured COp budget, and the hard safety bound of
// min(source-buffer entries, L1 ways - 1) distinct lines touched since the
// last merge point. The second keeps one L1 way free for coherent data in
// the worst case where every touched line maps to one set, so a correctly
// written program can never pin a whole set or overflow the buffer.
class Cadence {
 public:
  Cadence(uint32_t cop_budget, const CacheConfig& cc)
      : budget_(cop_budget), line_cap_(std::min(cc.sb_entries, cc.l1.ways - 1)) {}

  bool due(uint64_t next_line) const {
    if (cops_ >= budget_) return true;
    return lines_.size() >= line_cap_ && !lines_.count(next_line);
  }
  void note(uint64_t line, uint32_t cops) {
    lines_.insert(line);
    cops_ += cops;
  }
  void reset() {
    lines_.clear();
    cops_ = 0;
  }

 private:
  uint32_t budget_;
  uint32_t line_cap_;
  uint64_t cops_ = 0;
  std::unordered_set<uint64_t> lines_;
};

// Per-core slice [begin, end) of n items.
inline std::pair<uint64_t, uint64_t> slice(uint64_t n, uint32_t core, uint32_t cores) {
  return {n * core / cores, n * (core + 1) / cores};
}

inline bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

struct RunParts {
  SystemOptions options(const WorkloadConfig& wc) const {
    return SystemOptions{.dirty_merge = wc.dirty_merge, .check_data_values = true};
  }
};

inline SimReport report_skeleton(const WorkloadConfig& wc, const CacheConfig& cc) {
  SimReport r;
  r.workload = to_string(wc.workload);
  r.variant = to_string(wc.variant);
  r.ws_fraction = wc.ws_fraction;
  r.seed = wc.seed;
  r.cores = cc.core_count;
  r.llc_bytes = cc.llc.capacity_bytes;
  r.sb_entries = cc.sb_entries;
  r.merge_cadence = wc.effective_cadence(cc);
  r.merge_on_evict = wc.merge_on_evict;
  r.dirty_merge = wc.dirty_merge;
  return r;
}

inline void finish_report(SimReport& r, const System& sys) {
  r.cycles_per_core.clear();
  for (uint32_t c = 0; c < sys.config().core_count; ++c)
    r.cycles_per_core.push_back(sys.core_cycles(c));
  r.max_cycles = sys.max_cycles();
  r.c = sys.counters();
  r.peak_bytes = sys.peak_footprint_bytes();
}

SimReport run_kv(const WorkloadConfig& wc, const CacheConfig& cc);
SimReport run_kmeans(const WorkloadConfig& wc, const CacheConfig& cc);
SimReport run_pagerank(const WorkloadConfig& wc, const CacheConfig& cc);
SimReport run_bfs(const WorkloadConfig& wc, const CacheConfig& cc);

Graph workload_graph(const WorkloadConfig& wc, const CacheConfig& cc, uint32_t* scale_out);

}  // namespace ccsim::detail

#endif
