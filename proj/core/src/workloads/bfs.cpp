#include <deque>

#include "detail.hpp"

namespace ccsim::detail {

namespace {

// Level-synchronous BFS over the successor bitmap. FGL sets bits under
// per-line locks, DUP queues updates in thread-local lists and applies them
// with atomic ORs after a barrier, the privatizing variant sets bits with
// COps and merges at each level boundary.
struct BfsShared {
  WorkloadConfig wc;
  uint64_t n = 0;
  uint64_t source = 0;
  uint64_t off_base = 0, tgt_base = 0;
  uint64_t bitmap_base = 0, levels_base = 0;
  uint64_t locks_base = 0;
  uint64_t found_base = 0;                // one padded word per core
  std::vector<uint64_t> list_base;        // dup: per-core update lists
  uint32_t cadence = 0;
  bool moe = true;
};

uint64_t bitmap_addr(const BfsShared& s, uint64_t v) {
  return s.bitmap_base + (v >> 6) * kWordBytes;
}
uint64_t bit_of(uint64_t v) { return uint64_t(1) << (v & 63); }
uint64_t level_addr(const BfsShared& s, uint64_t v) { return s.levels_base + v * kWordBytes; }

CoreProgram bfs_core(CoreContext ctx, BfsShared* sh) {
  const uint32_t core = ctx.core();
  const auto& cc = ctx.config();
  const Variant variant = sh->wc.variant;
  auto [vb, ve] = slice(sh->n, core, cc.core_count);
  Cadence cad(sh->cadence, cc);
  if (variant == Variant::CCache) co_await ctx.merge_init("or_merge", 0);

  bool done = false;
  for (int64_t level = 0; !done && level < static_cast<int64_t>(sh->n) + 1; ++level) {
    uint64_t list_len = 0;
    // expand: examine edges out of this level's frontier
    for (uint64_t v = vb; v < ve; ++v) {
      auto lv = static_cast<int64_t>(co_await ctx.load(level_addr(*sh, v)));
      if (lv != level) continue;
      uint64_t o1 = co_await ctx.load(sh->off_base + v * kWordBytes);
      uint64_t o2 = co_await ctx.load(sh->off_base + (v + 1) * kWordBytes);
      for (uint64_t i = o1; i < o2; ++i) {
        uint64_t w = co_await ctx.load(sh->tgt_base + i * kWordBytes);
        uint64_t ba = bitmap_addr(*sh, w);
        uint64_t bit = bit_of(w);
        if (variant == Variant::Fgl) {
          uint64_t la = sh->locks_base + line_of(ba - sh->bitmap_base) * kLineBytes;
          while (!co_await ctx.try_lock(la)) {
          }
          uint64_t x = co_await ctx.load(ba);
          if (!(x & bit)) co_await ctx.store(ba, x | bit);
          co_await ctx.unlock(la);
        } else if (variant == Variant::Dup) {
          uint64_t x = co_await ctx.load(ba);  // stale reads are fine: OR is idempotent
          if (!(x & bit)) {
            co_await ctx.store(sh->list_base[core] + list_len * kWordBytes, w);
            ctx.sys().add_dynamic_bytes(kWordBytes);
            ++list_len;
          }
        } else {
          uint64_t ln = line_of(ba);
          if (cad.due(ln)) {
            if (sh->moe)
              co_await ctx.soft_merge();
            else
              co_await ctx.merge();
            cad.reset();
          }
          uint64_t x = co_await ctx.c_read(ba, 0);
          if (!(x & bit)) co_await ctx.c_write(ba, x | bit, 0);
          cad.note(ln, 2);
        }
      }
    }
    if (variant == Variant::Dup) {
      // publish this level's updates atomically after everyone queued theirs
      co_await ctx.barrier();
      for (uint64_t i = 0; i < list_len; ++i) {
        uint64_t w = co_await ctx.load(sh->list_base[core] + i * kWordBytes);
        co_await ctx.amo_or(bitmap_addr(*sh, w), bit_of(w));
      }
      ctx.sys().add_dynamic_bytes(-static_cast<int64_t>(list_len * kWordBytes));
    }
    if (variant == Variant::CCache) {
      co_await ctx.merge();
      cad.reset();
    }
    co_await ctx.barrier();

    // scan: vertices whose bit appeared this level join the next frontier
    uint64_t found = 0;
    for (uint64_t v = vb; v < ve; ++v) {
      auto lv = static_cast<int64_t>(co_await ctx.load(level_addr(*sh, v)));
      if (lv != -1) continue;
      uint64_t ba = bitmap_addr(*sh, v);
      uint64_t x;
      if (variant == Variant::CCache) {
        uint64_t ln = line_of(ba);
        if (cad.due(ln)) {
          if (sh->moe)
            co_await ctx.soft_merge();
          else
            co_await ctx.merge();
          cad.reset();
        }
        x = co_await ctx.c_read(ba, 0);
        cad.note(ln, 1);
      } else {
        x = co_await ctx.load(ba);
      }
      if (x & bit_of(v)) {
        co_await ctx.store(level_addr(*sh, v), static_cast<uint64_t>(level + 1));
        ++found;
      }
    }
    co_await ctx.store(sh->found_base + core * kLineBytes, found);
    co_await ctx.barrier();
    uint64_t total = 0;
    for (uint32_t c = 0; c < cc.core_count; ++c)
      total += co_await ctx.load(sh->found_base + c * kLineBytes);
    done = total == 0;
    co_await ctx.barrier();  // nobody resets found slots while others still read
  }
  if (variant == Variant::CCache) {
    co_await ctx.merge();  // flush scan-phase privatized lines
    cad.reset();
  }
  co_await ctx.barrier();
}

}  // namespace

SimReport run_bfs(const WorkloadConfig& wc, const CacheConfig& cc) {
  SimReport r = report_skeleton(wc, cc);
  r.merge_fn = "or_merge";

  uint32_t scale = 0;
  Graph g = workload_graph(wc, cc, &scale);
  r.graph = std::string(to_string(wc.graph_kind)) + ":" + std::to_string(scale) + ":" +
            std::to_string(wc.edge_factor);

  BfsShared sh;
  sh.wc = wc;
  sh.n = g.n;
  sh.source = wc.bfs_source % g.n;
  sh.cadence = wc.effective_cadence(cc);
  sh.moe = wc.merge_on_evict;

  // serial oracle
  std::vector<int64_t> o_levels(g.n, -1);
  std::vector<uint64_t> o_bitmap((g.n + 63) / 64, 0);
  {
    o_levels[sh.source] = 0;
    o_bitmap[sh.source >> 6] |= bit_of(sh.source);
    std::deque<uint64_t> q{sh.source};
    while (!q.empty()) {
      uint64_t v = q.front();
      q.pop_front();
      for (uint64_t i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
        uint64_t w = g.targets[i];
        o_bitmap[w >> 6] |= bit_of(w);
        if (o_levels[w] == -1) {
          o_levels[w] = o_levels[v] + 1;
          q.push_back(w);
        }
      }
    }
  }

  try {
    System sys(cc, RunParts{}.options(wc));
    sh.off_base = sys.alloc((g.n + 1) * kWordBytes, /*counted=*/false);
    sh.tgt_base = sys.alloc(std::max<uint64_t>(g.edges(), 1) * kWordBytes, false);
    for (uint64_t i = 0; i <= g.n; ++i) sys.poke(sh.off_base + i * kWordBytes, g.offsets[i]);
    for (uint64_t i = 0; i < g.edges(); ++i) sys.poke(sh.tgt_base + i * kWordBytes, g.targets[i]);

    const uint64_t bitmap_words = (g.n + 63) / 64;
    const uint64_t bitmap_bytes = (bitmap_words * kWordBytes + kLineBytes - 1) / kLineBytes * kLineBytes;
    sh.bitmap_base = sys.alloc(bitmap_bytes);
    sh.levels_base = sys.alloc(g.n * kWordBytes);
    sh.found_base = sys.alloc(cc.core_count * kLineBytes);
    for (uint64_t v = 0; v < g.n; ++v)
      sys.poke(level_addr(sh, v), static_cast<uint64_t>(int64_t{-1}));
    sys.poke(level_addr(sh, sh.source), 0);
    sys.poke(bitmap_addr(sh, sh.source), bit_of(sh.source));

    if (wc.variant == Variant::Fgl)
      sh.locks_base = sys.alloc(bitmap_bytes);  // one padded lock line per bitmap line
    if (wc.variant == Variant::Dup) {
      for (uint32_t c = 0; c < cc.core_count; ++c)
        sh.list_base.push_back(sys.alloc(std::max<uint64_t>(g.edges(), 1) * kWordBytes, false));
    }
    if (wc.variant == Variant::CCache) sys.declare_cdata(sh.bitmap_base, bitmap_bytes);

    Scheduler sched(sys);
    for (uint32_t c = 0; c < cc.core_count; ++c)
      sched.spawn(bfs_core(CoreContext(sched, c), &sh));
    sched.run();
    sys.check_coherence_invariants();
    sys.check_privatization_invariants();

    bool ok = true;
    for (uint64_t w = 0; w < bitmap_words && ok; ++w)
      ok = sys.peek(sh.bitmap_base + w * kWordBytes) == o_bitmap[w];
    for (uint64_t v = 0; v < g.n && ok; ++v)
      ok = static_cast<int64_t>(sys.peek(level_addr(sh, v))) == o_levels[v];
    r.oracle_pass = ok;
    finish_report(r, sys);
  } catch (const SimError& e) {
    r.error = e.what();
    r.oracle_pass = false;
  }
  return r;
}

}  // namespace ccsim::detail
