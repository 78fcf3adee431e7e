#ifndef CCSIM_GRAPH_HPP
#define CCSIM_GRAPH_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace ccsim {

enum class GraphKind : uint8_t { Uniform, Rmat, Ssca, Kronecker };

const char* to_string(GraphKind k);
GraphKind graph_kind_from_string(const std::string& s);

// Directed graph in compressed sparse row form.
struct Graph {
  uint64_t n = 0;
  std::vector<uint64_t> offsets;  // n + 1
  std::vector<uint64_t> targets;  // edge endpoints, grouped by source

  uint64_t edges() const { return targets.size(); }
  uint64_t degree(uint64_t v) const { return offsets[v + 1] - offsets[v]; }
  Graph transpose() const;
};

// Deterministic synthetic graphs with 2^scale vertices and
// edge_factor * 2^scale directed edges. Generator output is used as-is;
// duplicate edges and self loops survive. Kronecker and RMAT share the
// recursive-partition sampler with the usual 0.57/0.19/0.19/0.05 split.
Graph gen_graph(GraphKind kind, uint32_t scale, uint32_t edge_factor, uint64_t seed);

// Flat little-endian binary: magic, n, m, offsets[n+1], targets[m],
// every field a 64-bit word.
void save_graph(const Graph& g, const std::string& path);
Graph load_graph(const std::string& path);

}  // namespace ccsim

#endif
