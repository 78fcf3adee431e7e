#include <algorithm>
#include <cmath>

#include "ccsim/workloads.hpp"
#include "detail.hpp"

namespace ccsim {

const char* to_string(Workload w) {
  switch (w) {
    case Workload::Kv: return "kv";
    case Workload::Kmeans: return "kmeans";
    case Workload::Pagerank: return "pagerank";
    case Workload::Bfs: return "bfs";
  }
  return "?";
}

const char* to_string(Variant v) {
  switch (v) {
    case Variant::Fgl: return "fgl";
    case Variant::Dup: return "dup";
    case Variant::CCache: return "ccache";
  }
  return "?";
}

Workload workload_from_string(const std::string& s) {
  if (s == "kv") return Workload::Kv;
  if (s == "kmeans") return Workload::Kmeans;
  if (s == "pagerank") return Workload::Pagerank;
  if (s == "bfs") return Workload::Bfs;
  raise(ErrorCode::BadConfig, "unknown workload: " + s);
}

Variant variant_from_string(const std::string& s) {
  if (s == "fgl") return Variant::Fgl;
  if (s == "dup") return Variant::Dup;
  if (s == "ccache") return Variant::CCache;
  raise(ErrorCode::BadConfig, "unknown variant: " + s);
}

SimReport run_workload(const WorkloadConfig& wc, const CacheConfig& cc) {
  cc.validate();
  switch (wc.workload) {
    case Workload::Kv: return detail::run_kv(wc, cc);
    case Workload::Kmeans: return detail::run_kmeans(wc, cc);
    case Workload::Pagerank: return detail::run_pagerank(wc, cc);
    case Workload::Bfs: return detail::run_bfs(wc, cc);
  }
  raise(ErrorCode::BadConfig, "unknown workload");
}

namespace detail {

// Graph workloads size the input so CSR plus per-vertex state tracks the
// requested fraction of LLC capacity.
Graph workload_graph(const WorkloadConfig& wc, const CacheConfig& cc, uint32_t* scale_out) {
  if (!wc.graph_file.empty()) {
    if (scale_out) *scale_out = 0;
    return load_graph(wc.graph_file);
  }
  uint32_t scale = wc.graph_scale;
  if (scale == 0) {
    double per_vertex = 8.0 * (wc.edge_factor + 1) +
                        (wc.workload == Workload::Pagerank ? 16.0 : 8.0);
    double target_n = wc.ws_fraction * static_cast<double>(cc.llc.capacity_bytes) / per_vertex;
    scale = static_cast<uint32_t>(
        std::clamp(std::lround(std::log2(std::max(target_n, 64.0))), 6L, 24L));
  }
  if (scale_out) *scale_out = scale;
  return gen_graph(wc.graph_kind, scale, wc.edge_factor, wc.seed);
}

}  // namespace detail

}  // namespace ccsim
