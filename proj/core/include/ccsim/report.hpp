#ifndef CCSIM_REPORT_HPP
#define CCSIM_REPORT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ccsim/counters.hpp"

namespace ccsim {

// Everything one run reports: configuration echo, per-core cycle clocks and
// the raw counters. Normalized per-kilocycle rates are computed at emit
// time, never accumulated during the run.
struct SimReport {
  // configuration echo
  std::string workload;
  std::string variant;
  std::string merge_fn;
  std::string graph;  // kind:scale:edge_factor, or empty
  double ws_fraction = 0;
  uint64_t seed = 0;
  uint32_t cores = 0;
  uint64_t llc_bytes = 0;
  uint32_t sb_entries = 0;
  uint32_t merge_cadence = 0;
  bool merge_on_evict = true;
  bool dirty_merge = true;

  // results
  std::vector<uint64_t> cycles_per_core;
  uint64_t max_cycles = 0;
  Counters c;
  uint64_t peak_bytes = 0;
  double quality = 0;  // workload-specific figure (kmeans: mean sq. distance to centers)
  bool oracle_pass = false;
  std::string error;

  static std::string csv_header();
  std::string csv_row() const;
};

// rate = counter * 1000 / total_cycles
double normalize_per_kilocycle(uint64_t counter, uint64_t total_cycles);

// baseline.max_cycles / candidate.max_cycles; both runs must describe the
// same workload at the same size and seed.
double speedup(const SimReport& baseline, const SimReport& candidate);

void emit_csv(const std::vector<SimReport>& reports, std::ostream& out);
std::string csv_string(const std::vector<SimReport>& reports);
void write_csv(const std::vector<SimReport>& reports, const std::string& path);

}  // namespace ccsim

#endif
