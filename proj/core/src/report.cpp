#include "ccsim/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ccsim/errors.hpp"

namespace ccsim {

namespace {

// Fixed-precision text for doubles so identical runs emit identical bytes.
std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

double normalize_per_kilocycle(uint64_t counter, uint64_t total_cycles) {
  if (total_cycles == 0) raise(ErrorCode::ZeroCycleRun, "cannot normalize over zero cycles");
  return static_cast<double>(counter) * 1000.0 / static_cast<double>(total_cycles);
}

double speedup(const SimReport& baseline, const SimReport& candidate) {
  if (baseline.workload != candidate.workload || baseline.ws_fraction != candidate.ws_fraction ||
      baseline.seed != candidate.seed || baseline.cores != candidate.cores)
    raise(ErrorCode::BadConfig, "speedup over mismatched runs: " + baseline.workload + " vs " +
                                    candidate.workload);
  if (candidate.max_cycles == 0) raise(ErrorCode::ZeroCycleRun, "candidate ran for zero cycles");
  return static_cast<double>(baseline.max_cycles) / static_cast<double>(candidate.max_cycles);
}

std::string SimReport::csv_header() {
  return "workload,variant,merge_fn,graph,ws_fraction,seed,cores,llc_bytes,sb_entries,"
         "merge_cadence,merge_on_evict,dirty_merge,max_cycles,cycles_per_core,"
         "l1_hits,l1_misses,l2_hits,l2_misses,llc_hits,llc_misses,memory_accesses,"
         "coherent_loads,coherent_stores,cops,directory_messages,invalidation_messages,"
         "cdata_directory_messages,cdata_invalidation_messages,merges_executed,"
         "merges_skipped_clean,source_buffer_evictions,lock_conflicts,peak_bytes,quality,"
         "dirmsg_per_kcycle,llcmiss_per_kcycle,inval_per_kcycle,oracle_pass,error";
}

std::string SimReport::csv_row() const {
  std::ostringstream o;
  o << workload << ',' << variant << ',' << merge_fn << ',' << graph << ',' << fmt(ws_fraction)
    << ',' << seed << ',' << cores << ',' << llc_bytes << ',' << sb_entries << ','
    << merge_cadence << ',' << (merge_on_evict ? 1 : 0) << ',' << (dirty_merge ? 1 : 0) << ','
    << max_cycles << ',';
  for (size_t i = 0; i < cycles_per_core.size(); ++i)
    o << (i ? "|" : "") << cycles_per_core[i];
  o << ',' << c.l1.hits << ',' << c.l1.misses << ',' << c.l2.hits << ',' << c.l2.misses << ','
    << c.llc.hits << ',' << c.llc.misses << ',' << c.memory_accesses << ',' << c.coherent_loads
    << ',' << c.coherent_stores << ',' << c.cops << ',' << c.directory_messages << ','
    << c.invalidation_messages << ',' << c.cdata_directory_messages << ','
    << c.cdata_invalidation_messages << ',' << c.merges_executed << ','
    << c.merges_skipped_clean << ',' << c.source_buffer_evictions << ',' << c.lock_conflicts
    << ',' << peak_bytes << ',' << fmt(quality) << ',';
  if (max_cycles == 0) {
    o << "0,0,0";
  } else {
    o << fmt(normalize_per_kilocycle(c.directory_messages, max_cycles)) << ','
      << fmt(normalize_per_kilocycle(c.llc.misses, max_cycles)) << ','
      << fmt(normalize_per_kilocycle(c.invalidation_messages, max_cycles));
  }
  o << ',' << (oracle_pass ? 1 : 0) << ',' << error;
  return o.str();
}

void emit_csv(const std::vector<SimReport>& reports, std::ostream& out) {
  out << SimReport::csv_header() << '\n';
  for (const auto& r : reports) out << r.csv_row() << '\n';
}

std::string csv_string(const std::vector<SimReport>& reports) {
  std::ostringstream o;
  emit_csv(reports, o);
  return o.str();
}

void write_csv(const std::vector<SimReport>& reports, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) raise(ErrorCode::Io, "cannot open for write: " + path);
  emit_csv(reports, f);
  if (!f) raise(ErrorCode::Io, "write failed: " + path);
}

}  // namespace ccsim
