#include <bit>

#include "detail.hpp"

namespace ccsim::detail {

namespace {

constexpr double kDamping = 0.85;

// FGL pushes contributions to successors under per-line locks. DUP and the
// privatizing variant gather over in-edges and write only their own vertex
// partition, reading the previous iteration's array; the two rank arrays
// swap roles every iteration.
struct PrShared {
  WorkloadConfig wc;
  uint64_t n = 0;
  uint64_t off_base = 0, tgt_base = 0;  // traversal CSR (out for fgl, in otherwise)
  uint64_t outdeg_base = 0;
  uint64_t rank_base[2] = {0, 0};
  uint64_t locks_base = 0;
  uint32_t iters = 0;
  uint32_t cadence = 0;
  bool moe = true;
};

uint64_t rank_addr(const PrShared& s, int which, uint64_t v) {
  return s.rank_base[which] + v * kWordBytes;
}

double as_f(uint64_t w) { return std::bit_cast<double>(w); }
uint64_t f_as_w(double v) { return std::bit_cast<uint64_t>(v); }

CoreProgram pagerank_core(CoreContext ctx, PrShared* sh) {
  const uint32_t core = ctx.core();
  const auto& cc = ctx.config();
  const Variant variant = sh->wc.variant;
  auto [vb, ve] = slice(sh->n, core, cc.core_count);
  Cadence cad(sh->cadence, cc);
  if (variant == Variant::CCache) co_await ctx.merge_init("add_diff", 0);

  int prev = 0, next = 1;
  for (uint32_t iter = 0; iter < sh->iters; ++iter) {
    if (variant == Variant::Fgl) {
      // reset this iteration's accumulation targets (partitioned)
      for (uint64_t u = vb; u < ve; ++u)
        co_await ctx.store(rank_addr(*sh, next, u), f_as_w(1.0 - kDamping));
      co_await ctx.barrier();
      for (uint64_t u = vb; u < ve; ++u) {
        uint64_t deg = co_await ctx.load(sh->outdeg_base + u * kWordBytes);
        if (deg == 0) continue;
        uint64_t pr = co_await ctx.load(rank_addr(*sh, prev, u));
        co_await ctx.tick(2);
        double contrib = kDamping * as_f(pr) / static_cast<double>(deg);
        uint64_t o1 = co_await ctx.load(sh->off_base + u * kWordBytes);
        uint64_t o2 = co_await ctx.load(sh->off_base + (u + 1) * kWordBytes);
        for (uint64_t i = o1; i < o2; ++i) {
          uint64_t w = co_await ctx.load(sh->tgt_base + i * kWordBytes);
          uint64_t ra = rank_addr(*sh, next, w);
          uint64_t la = sh->locks_base + line_of(ra - sh->rank_base[next]) * kLineBytes;
          while (!co_await ctx.try_lock(la)) {
          }
          uint64_t v = co_await ctx.load(ra);
          co_await ctx.tick(1);
          co_await ctx.store(ra, f_as_w(as_f(v) + contrib));
          co_await ctx.unlock(la);
        }
      }
    } else {
      for (uint64_t u = vb; u < ve; ++u) {
        uint64_t o1 = co_await ctx.load(sh->off_base + u * kWordBytes);
        uint64_t o2 = co_await ctx.load(sh->off_base + (u + 1) * kWordBytes);
        double acc = 0;
        for (uint64_t i = o1; i < o2; ++i) {
          uint64_t v = co_await ctx.load(sh->tgt_base + i * kWordBytes);
          uint64_t pa = rank_addr(*sh, prev, v);
          uint64_t pr;
          if (variant == Variant::CCache) {
            uint64_t ln = line_of(pa);
            if (cad.due(ln)) {
              if (sh->moe)
                co_await ctx.soft_merge();
              else
                co_await ctx.merge();
              cad.reset();
            }
            pr = co_await ctx.c_read(pa, 0);
            cad.note(ln, 1);
          } else {
            pr = co_await ctx.load(pa);
          }
          uint64_t deg = co_await ctx.load(sh->outdeg_base + v * kWordBytes);
          co_await ctx.tick(2);
          acc += as_f(pr) / static_cast<double>(deg);  // deg >= 1 for any edge source
        }
        co_await ctx.tick(2);
        uint64_t na = rank_addr(*sh, next, u);
        uint64_t result = f_as_w((1.0 - kDamping) + kDamping * acc);
        if (variant == Variant::CCache) {
          uint64_t ln = line_of(na);
          if (cad.due(ln)) {
            if (sh->moe)
              co_await ctx.soft_merge();
            else
              co_await ctx.merge();
            cad.reset();
          }
          co_await ctx.c_write(na, result, 0);
          cad.note(ln, 1);
        } else {
          co_await ctx.store(na, result);
        }
      }
    }
    // merge boundary between iterations
    if (variant == Variant::CCache) {
      co_await ctx.merge();
      cad.reset();
    }
    co_await ctx.barrier();
    std::swap(prev, next);
  }
}

}  // namespace

SimReport run_pagerank(const WorkloadConfig& wc, const CacheConfig& cc) {
  SimReport r = report_skeleton(wc, cc);
  r.merge_fn = "add_diff";

  uint32_t scale = 0;
  Graph g = workload_graph(wc, cc, &scale);
  r.graph = std::string(to_string(wc.graph_kind)) + ":" + std::to_string(scale) + ":" +
            std::to_string(wc.edge_factor);

  PrShared sh;
  sh.wc = wc;
  sh.n = g.n;
  sh.iters = wc.pagerank_iters;
  sh.cadence = wc.effective_cadence(cc);
  sh.moe = wc.merge_on_evict;

  // serial oracle: pull-form power iteration in vertex order
  Graph in = g.transpose();
  std::vector<double> o_prev(g.n, 1.0), o_next(g.n, 1.0);
  for (uint32_t iter = 0; iter < sh.iters; ++iter) {
    for (uint64_t u = 0; u < g.n; ++u) {
      double acc = 0;
      for (uint64_t i = in.offsets[u]; i < in.offsets[u + 1]; ++i) {
        uint64_t v = in.targets[i];
        acc += o_prev[v] / static_cast<double>(g.degree(v));
      }
      o_next[u] = (1.0 - kDamping) + kDamping * acc;
    }
    std::swap(o_prev, o_next);
  }
  const std::vector<double>& expect = o_prev;

  try {
    System sys(cc, RunParts{}.options(wc));
    const Graph& traversal = wc.variant == Variant::Fgl ? g : in;
    sh.off_base = sys.alloc((traversal.n + 1) * kWordBytes, /*counted=*/false);
    sh.tgt_base = sys.alloc(std::max<uint64_t>(traversal.edges(), 1) * kWordBytes, false);
    sh.outdeg_base = sys.alloc(g.n * kWordBytes, false);
    for (uint64_t i = 0; i <= traversal.n; ++i)
      sys.poke(sh.off_base + i * kWordBytes, traversal.offsets[i]);
    for (uint64_t i = 0; i < traversal.edges(); ++i)
      sys.poke(sh.tgt_base + i * kWordBytes, traversal.targets[i]);
    for (uint64_t v = 0; v < g.n; ++v)
      sys.poke(sh.outdeg_base + v * kWordBytes, g.degree(v));

    const uint64_t rank_bytes = g.n * kWordBytes;
    for (int a = 0; a < 2; ++a) {
      sh.rank_base[a] = sys.alloc(rank_bytes);
      for (uint64_t v = 0; v < g.n; ++v)
        sys.poke(rank_addr(sh, a, v), f_as_w(1.0));
    }
    if (wc.variant == Variant::Fgl) {
      uint64_t rank_lines = (rank_bytes + kLineBytes - 1) / kLineBytes;
      sh.locks_base = sys.alloc(rank_lines * kLineBytes);
    }
    if (wc.variant == Variant::CCache) {
      // both arrays take turns holding CData; the pair is one padded region
      for (int a = 0; a < 2; ++a)
        sys.declare_cdata(sh.rank_base[a], (rank_bytes + kLineBytes - 1) / kLineBytes * kLineBytes);
    }

    Scheduler sched(sys);
    for (uint32_t c = 0; c < cc.core_count; ++c)
      sched.spawn(pagerank_core(CoreContext(sched, c), &sh));
    sched.run();
    sys.check_coherence_invariants();
    sys.check_privatization_invariants();

    int final_arr = sh.iters % 2;  // arrays swap each iteration
    bool ok = true;
    for (uint64_t v = 0; v < g.n && ok; ++v) {
      double got = as_f(sys.peek(rank_addr(sh, final_arr, v)));
      ok = std::abs(got - expect[v]) <= 1e-6 * std::max(1.0, std::abs(expect[v]));
    }
    r.oracle_pass = ok;
    finish_report(r, sys);
  } catch (const SimError& e) {
    r.error = e.what();
    r.oracle_pass = false;
  }
  return r;
}

}  // namespace ccsim::detail
