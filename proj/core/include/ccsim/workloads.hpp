#ifndef CCSIM_WORKLOADS_HPP
#define CCSIM_WORKLOADS_HPP

#include <cstdint>
#include <string>

#include "ccsim/config.hpp"
#include "ccsim/graph.hpp"
#include "ccsim/report.hpp"

namespace ccsim {

enum class Workload : uint8_t { Kv, Kmeans, Pagerank, Bfs };
enum class Variant : uint8_t { Fgl, Dup, CCache };

const char* to_string(Workload w);
const char* to_string(Variant v);
Workload workload_from_string(const std::string& s);
Variant variant_from_string(const std::string& s);

// One benchmark run: which program, which synchronization strategy, how the
// shared data is sized relative to the LLC, and the privatization knobs.
struct WorkloadConfig {
  Workload workload = Workload::Kv;
  Variant variant = Variant::CCache;
  double ws_fraction = 0.25;  // shared-data footprint as a fraction of LLC capacity
  uint64_t seed = 1;

  // kv: random-key increments, 16x the key count
  uint64_t kv_keys = 0;                  // 0: derive from ws_fraction
  std::string kv_merge_fn = "add_diff";  // add_diff | saturating_add[:t] | complex_mul

  // kmeans
  bool kmeans_float = false;
  uint32_t kmeans_clusters = 8;
  uint32_t kmeans_dims = 8;  // multiple of 8 keeps one cluster per line
  uint32_t kmeans_iters = 3;
  uint64_t kmeans_points = 0;  // 0: derive
  double approx_drop_p = 0;    // wrap the accumulator merge in approx_drop

  // graph workloads
  GraphKind graph_kind = GraphKind::Uniform;
  uint32_t graph_scale = 0;  // 0: derive
  uint32_t edge_factor = 16;
  std::string graph_file;  // load CSR instead of generating
  uint32_t pagerank_iters = 10;
  uint64_t bfs_source = 0;

  // privatization behavior
  uint32_t merge_cadence = 0;   // COps between cadence merges; 0: 2x sb entries
  bool merge_on_evict = true;   // false: cadence points run hard merges
  bool dirty_merge = true;

  uint32_t effective_cadence(const CacheConfig& cc) const {
    return merge_cadence ? merge_cadence : 2 * cc.sb_entries;
  }
};

// Executes the run and verifies the final shared state against the serial
// oracle. Simulator errors abort the run and land in report.error.
SimReport run_workload(const WorkloadConfig& wc, const CacheConfig& cc);

}  // namespace ccsim

#endif
