#include "ccsim/graph.hpp"

#include <fstream>
#include <random>

#include "ccsim/errors.hpp"
#include "ccsim/rng.hpp"

namespace ccsim {

namespace {

constexpr uint64_t kGraphMagic = 0x3147525343535243ULL;  // "CRSCSRG1"

// One recursive-partition edge: descend `scale` levels, biasing the choice
// of quadrant by (a, b, c, d).
std::pair<uint64_t, uint64_t> rmat_edge(std::mt19937_64& rng, uint32_t scale, double a, double b,
                                        double c) {
  uint64_t src = 0, dst = 0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (uint32_t lvl = 0; lvl < scale; ++lvl) {
    double r = unit(rng);
    uint64_t bit = uint64_t(1) << (scale - 1 - lvl);
    if (r < a) {
      // top-left: no bits set
    } else if (r < a + b) {
      dst |= bit;
    } else if (r < a + b + c) {
      src |= bit;
    } else {
      src |= bit;
      dst |= bit;
    }
  }
  return {src, dst};
}

Graph from_edge_list(uint64_t n, std::vector<std::pair<uint64_t, uint64_t>>& edges) {
  Graph g;
  g.n = n;
  g.offsets.assign(n + 1, 0);
  for (const auto& [s, d] : edges) ++g.offsets[s + 1];
  for (uint64_t v = 0; v < n; ++v) g.offsets[v + 1] += g.offsets[v];
  g.targets.resize(edges.size());
  std::vector<uint64_t> cursor(g.offsets.begin(), g.offsets.end() - 1);
  for (const auto& [s, d] : edges) g.targets[cursor[s]++] = d;
  return g;
}

}  // namespace

const char* to_string(GraphKind k) {
  switch (k) {
    case GraphKind::Uniform: return "uniform";
    case GraphKind::Rmat: return "rmat";
    case GraphKind::Ssca: return "ssca";
    case GraphKind::Kronecker: return "kronecker";
  }
  return "?";
}

GraphKind graph_kind_from_string(const std::string& s) {
  if (s == "uniform") return GraphKind::Uniform;
  if (s == "rmat") return GraphKind::Rmat;
  if (s == "ssca") return GraphKind::Ssca;
  if (s == "kronecker") return GraphKind::Kronecker;
  raise(ErrorCode::BadConfig, "unknown graph kind: " + s);
}

Graph Graph::transpose() const {
  Graph t;
  t.n = n;
  t.offsets.assign(n + 1, 0);
  for (uint64_t d : targets) ++t.offsets[d + 1];
  for (uint64_t v = 0; v < n; ++v) t.offsets[v + 1] += t.offsets[v];
  t.targets.resize(targets.size());
  std::vector<uint64_t> cursor(t.offsets.begin(), t.offsets.end() - 1);
  for (uint64_t s = 0; s < n; ++s)
    for (uint64_t i = offsets[s]; i < offsets[s + 1]; ++i) t.targets[cursor[targets[i]]++] = s;
  return t;
}

Graph gen_graph(GraphKind kind, uint32_t scale, uint32_t edge_factor, uint64_t seed) {
  if (scale < 1 || scale > 30) raise(ErrorCode::BadConfig, "graph scale out of range");
  const uint64_t n = uint64_t(1) << scale;
  const uint64_t m = uint64_t(edge_factor) * n;
  auto rng = make_rng(seed, scale, static_cast<uint64_t>(kind));
  std::vector<std::pair<uint64_t, uint64_t>> edges;
  edges.reserve(m);
  switch (kind) {
    case GraphKind::Uniform: {
      std::uniform_int_distribution<uint64_t> pick(0, n - 1);
      for (uint64_t i = 0; i < m; ++i) edges.emplace_back(pick(rng), pick(rng));
      break;
    }
    case GraphKind::Rmat:
    case GraphKind::Kronecker: {
      for (uint64_t i = 0; i < m; ++i) edges.push_back(rmat_edge(rng, scale, 0.57, 0.19, 0.19));
      break;
    }
    case GraphKind::Ssca: {
      // clustered: dense cliquish edges inside ~32-vertex groups plus a
      // sparse tail of long-range edges
      const uint64_t cluster = std::min<uint64_t>(n, 32);
      std::uniform_int_distribution<uint64_t> pick(0, n - 1);
      std::uniform_int_distribution<uint64_t> local(0, cluster - 1);
      for (uint64_t i = 0; i < m; ++i) {
        uint64_t s = pick(rng);
        if (i % 4 != 0) {
          uint64_t base = s - (s % cluster);
          edges.emplace_back(s, base + local(rng));
        } else {
          edges.emplace_back(s, pick(rng));
        }
      }
      break;
    }
  }
  return from_edge_list(n, edges);
}

void save_graph(const Graph& g, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) raise(ErrorCode::Io, "cannot open for write: " + path);
  auto put = [&](uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    f.write(reinterpret_cast<const char*>(b), 8);
  };
  put(kGraphMagic);
  put(g.n);
  put(g.edges());
  for (uint64_t v : g.offsets) put(v);
  for (uint64_t v : g.targets) put(v);
  if (!f) raise(ErrorCode::Io, "write failed: " + path);
}

Graph load_graph(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) raise(ErrorCode::Io, "cannot open for read: " + path);
  auto get = [&]() -> uint64_t {
    unsigned char b[8];
    f.read(reinterpret_cast<char*>(b), 8);
    if (!f) raise(ErrorCode::Io, "truncated graph file: " + path);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(b[i]) << (8 * i);
    return v;
  };
  if (get() != kGraphMagic) raise(ErrorCode::Io, "bad graph file magic: " + path);
  Graph g;
  g.n = get();
  uint64_t m = get();
  g.offsets.resize(g.n + 1);
  for (auto& v : g.offsets) v = get();
  g.targets.resize(m);
  for (auto& v : g.targets) v = get();
  if (g.offsets.front() != 0 || g.offsets.back() != m)
    raise(ErrorCode::Io, "inconsistent CSR offsets: " + path);
  return g;
}

}  // namespace ccsim
