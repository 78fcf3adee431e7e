#include <bit>
#include <random>

#include "ccsim/rng.hpp"
#include "detail.hpp"

namespace ccsim::detail {

namespace {

// Cluster accumulators are padded so each cluster's component sums start on
// their own line; with 8 dims a cluster is exactly one line. Counts live
// densely in their own array (clusters share count lines).
struct KmShared {
  WorkloadConfig wc;
  bool is_float = false;
  uint64_t n = 0;
  uint32_t k = 0, m = 0, iters = 0;
  uint64_t stride = 0;  // padded words per cluster
  uint64_t points_base = 0, centers_base = 0, sums_base = 0, counts_base = 0;
  std::vector<uint64_t> dup_sums, dup_counts;  // per-core copies (core 0 = base)
  std::vector<uint64_t> locks_base;            // fgl: one padded lock line per cluster
  std::vector<uint64_t> points;                // host copy (int or double bits)
  std::string merge_fn;
  uint32_t cadence = 0;
  bool moe = true;
};

uint64_t point_addr(const KmShared& s, uint64_t p, uint32_t d) {
  return s.points_base + (p * s.m + d) * kWordBytes;
}
uint64_t sum_addr(const KmShared& s, uint64_t base, uint32_t c, uint32_t d) {
  return base + (c * s.stride + d) * kWordBytes;
}
uint64_t center_addr(const KmShared& s, uint32_t c, uint32_t d) {
  return s.centers_base + (c * s.stride + d) * kWordBytes;
}
uint64_t count_addr(const KmShared& s, uint64_t base, uint32_t c) {
  return base + c * kWordBytes;
}

double as_f(uint64_t w) { return std::bit_cast<double>(w); }
uint64_t f_as_w(double v) { return std::bit_cast<uint64_t>(v); }

// nearest center by squared distance, host arithmetic on loaded values
uint32_t assign_point(const KmShared& s, const std::vector<uint64_t>& centers,
                      const uint64_t* pw) {
  uint32_t best = 0;
  if (s.is_float) {
    double best_d = 0;
    for (uint32_t c = 0; c < s.k; ++c) {
      double d2 = 0;
      for (uint32_t d = 0; d < s.m; ++d) {
        double diff = as_f(pw[d]) - as_f(centers[c * s.m + d]);
        d2 += diff * diff;
      }
      if (c == 0 || d2 < best_d) {
        best_d = d2;
        best = c;
      }
    }
  } else {
    int64_t best_d = 0;
    for (uint32_t c = 0; c < s.k; ++c) {
      int64_t d2 = 0;
      for (uint32_t d = 0; d < s.m; ++d) {
        int64_t diff = static_cast<int64_t>(pw[d]) - static_cast<int64_t>(centers[c * s.m + d]);
        d2 += diff * diff;
      }
      if (c == 0 || d2 < best_d) {
        best_d = d2;
        best = c;
      }
    }
  }
  return best;
}

uint64_t add_words(bool is_float, uint64_t a, uint64_t b) {
  if (is_float) return f_as_w(as_f(a) + as_f(b));
  return static_cast<uint64_t>(static_cast<int64_t>(a) + static_cast<int64_t>(b));
}

CoreProgram kmeans_core(CoreContext ctx, KmShared* sh) {
  const uint32_t core = ctx.core();
  const auto& cc = ctx.config();
  const Variant variant = sh->wc.variant;
  auto [pb, pe] = slice(sh->n, core, cc.core_count);
  std::vector<uint64_t> centers(sh->k * sh->m);
  std::vector<uint64_t> pw(sh->m);
  Cadence cad(sh->cadence, cc);

  if (variant == Variant::CCache) co_await ctx.merge_init(sh->merge_fn, 0);

  for (uint32_t iter = 0; iter < sh->iters; ++iter) {
    // snapshot the centers once per iteration (registers thereafter)
    for (uint32_t c = 0; c < sh->k; ++c)
      for (uint32_t d = 0; d < sh->m; ++d)
        centers[c * sh->m + d] = co_await ctx.load(center_addr(*sh, c, d));

    for (uint64_t p = pb; p < pe; ++p) {
      for (uint32_t d = 0; d < sh->m; ++d) pw[d] = co_await ctx.load(point_addr(*sh, p, d));
      co_await ctx.tick(3ull * sh->k * sh->m);
      uint32_t best = assign_point(*sh, centers, pw.data());

      if (variant == Variant::Fgl) {
        uint64_t la = sh->locks_base[0] + best * kLineBytes;
        while (!co_await ctx.try_lock(la)) {
        }
        for (uint32_t d = 0; d < sh->m; ++d) {
          uint64_t a = sum_addr(*sh, sh->sums_base, best, d);
          uint64_t v = co_await ctx.load(a);
          co_await ctx.store(a, add_words(sh->is_float, v, pw[d]));
        }
        uint64_t ca = count_addr(*sh, sh->counts_base, best);
        uint64_t n = co_await ctx.load(ca);
        co_await ctx.store(ca, add_words(sh->is_float, n, sh->is_float ? f_as_w(1.0) : 1));
        co_await ctx.unlock(la);
      } else if (variant == Variant::Dup) {
        for (uint32_t d = 0; d < sh->m; ++d) {
          uint64_t a = sum_addr(*sh, sh->dup_sums[core], best, d);
          uint64_t v = co_await ctx.load(a);
          co_await ctx.store(a, add_words(sh->is_float, v, pw[d]));
        }
        uint64_t ca = count_addr(*sh, sh->dup_counts[core], best);
        uint64_t n = co_await ctx.load(ca);
        co_await ctx.store(ca, add_words(sh->is_float, n, sh->is_float ? f_as_w(1.0) : 1));
      } else {
        for (uint32_t d = 0; d < sh->m; ++d) {
          uint64_t a = sum_addr(*sh, sh->sums_base, best, d);
          uint64_t ln = line_of(a);
          if (cad.due(ln)) {
            if (sh->moe)
              co_await ctx.soft_merge();
            else
              co_await ctx.merge();
            cad.reset();
          }
          uint64_t v = co_await ctx.c_read(a, 0);
          co_await ctx.c_write(a, add_words(sh->is_float, v, pw[d]), 0);
          cad.note(ln, 2);
        }
        uint64_t ca = count_addr(*sh, sh->counts_base, best);
        uint64_t cln = line_of(ca);
        if (cad.due(cln)) {
          if (sh->moe)
            co_await ctx.soft_merge();
          else
            co_await ctx.merge();
          cad.reset();
        }
        uint64_t n = co_await ctx.c_read(ca, 0);
        co_await ctx.c_write(ca, add_words(sh->is_float, n, sh->is_float ? f_as_w(1.0) : 1), 0);
        cad.note(cln, 2);
      }
    }

    // merge boundary: every core publishes its accumulator updates
    if (variant == Variant::CCache) {
      co_await ctx.merge();
      cad.reset();
    }
    co_await ctx.barrier();

    if (core == 0) {
      if (variant == Variant::Dup) {
        // fold the per-core duplicates into the base accumulators
        for (uint32_t c = 1; c < cc.core_count; ++c) {
          for (uint32_t cl = 0; cl < sh->k; ++cl) {
            for (uint32_t d = 0; d < sh->m; ++d) {
              uint64_t ca = sum_addr(*sh, sh->dup_sums[c], cl, d);
              uint64_t ba = sum_addr(*sh, sh->sums_base, cl, d);
              uint64_t v = co_await ctx.load(ca);
              uint64_t b = co_await ctx.load(ba);
              co_await ctx.store(ba, add_words(sh->is_float, b, v));
              co_await ctx.store(ca, sh->is_float ? f_as_w(0.0) : 0);
            }
            uint64_t ca = count_addr(*sh, sh->dup_counts[c], cl);
            uint64_t ba = count_addr(*sh, sh->counts_base, cl);
            uint64_t v = co_await ctx.load(ca);
            uint64_t b = co_await ctx.load(ba);
            co_await ctx.store(ba, add_words(sh->is_float, b, v));
            co_await ctx.store(ca, sh->is_float ? f_as_w(0.0) : 0);
          }
        }
      }
      // recompute centers from the merged sums, then clear the accumulators
      for (uint32_t cl = 0; cl < sh->k; ++cl) {
        uint64_t ca = count_addr(*sh, sh->counts_base, cl);
        uint64_t cnt_w;
        if (variant == Variant::CCache) {
          uint64_t cln = line_of(ca);
          if (cad.due(cln)) {
            co_await ctx.merge();
            cad.reset();
          }
          cnt_w = co_await ctx.c_read(ca, 0);
          cad.note(cln, 2);
        } else {
          cnt_w = co_await ctx.load(ca);
        }
        for (uint32_t d = 0; d < sh->m; ++d) {
          uint64_t sa = sum_addr(*sh, sh->sums_base, cl, d);
          uint64_t sum_w;
          if (variant == Variant::CCache) {
            uint64_t ln = line_of(sa);
            if (cad.due(ln)) {
              co_await ctx.merge();
              cad.reset();
            }
            sum_w = co_await ctx.c_read(sa, 0);
            cad.note(ln, 2);
          } else {
            sum_w = co_await ctx.load(sa);
          }
          co_await ctx.tick(1);
          uint64_t next;
          if (sh->is_float) {
            double cnt = as_f(cnt_w);
            next = f_as_w(cnt == 0.0 ? as_f(centers[cl * sh->m + d]) : as_f(sum_w) / cnt);
          } else {
            auto cnt = static_cast<int64_t>(cnt_w);
            next = cnt == 0 ? centers[cl * sh->m + d]
                            : static_cast<uint64_t>(static_cast<int64_t>(sum_w) / cnt);
          }
          co_await ctx.store(center_addr(*sh, cl, d), next);
          if (variant == Variant::CCache)
            co_await ctx.c_write(sa, sh->is_float ? f_as_w(0.0) : 0, 0);
          else
            co_await ctx.store(sa, sh->is_float ? f_as_w(0.0) : 0);
        }
        if (variant == Variant::CCache)
          co_await ctx.c_write(ca, sh->is_float ? f_as_w(0.0) : 0, 0);
        else
          co_await ctx.store(ca, sh->is_float ? f_as_w(0.0) : 0);
      }
      if (variant == Variant::CCache) {
        co_await ctx.merge();  // publish the cleared accumulators
        cad.reset();
      }
    }
    co_await ctx.barrier();
  }
}

}  // namespace

SimReport run_kmeans(const WorkloadConfig& wc, const CacheConfig& cc) {
  SimReport r = report_skeleton(wc, cc);

  KmShared sh;
  sh.wc = wc;
  sh.is_float = wc.kmeans_float;
  sh.k = wc.kmeans_clusters;
  sh.m = wc.kmeans_dims;
  sh.iters = wc.kmeans_iters;
  sh.stride = (sh.m + kWordsPerLine - 1) / kWordsPerLine * kWordsPerLine;
  sh.n = wc.kmeans_points;
  if (sh.n == 0)
    sh.n = std::max<uint64_t>(
        16 * sh.k, static_cast<uint64_t>(wc.ws_fraction * static_cast<double>(cc.llc.capacity_bytes)) /
                       (sh.m * kWordBytes));
  sh.cadence = wc.effective_cadence(cc);
  sh.moe = wc.merge_on_evict;
  std::string base_fn = sh.is_float ? "vec_add_float" : "add_diff";
  sh.merge_fn = base_fn;
  if (wc.approx_drop_p > 0)
    sh.merge_fn = "approx_drop:" + base_fn + ":" + std::to_string(wc.approx_drop_p) + ":" +
                  std::to_string(wc.seed);
  r.workload = sh.is_float ? "kmeans_f" : "kmeans_i";
  r.merge_fn = sh.merge_fn;

  // deterministic dataset
  sh.points.resize(sh.n * sh.m);
  auto rng = make_rng(wc.seed, 7, 2);
  if (sh.is_float) {
    std::uniform_real_distribution<double> unit(0.0, 1024.0);
    for (auto& w : sh.points) w = f_as_w(unit(rng));
  } else {
    std::uniform_int_distribution<int64_t> coord(0, 1023);
    for (auto& w : sh.points) w = static_cast<uint64_t>(coord(rng));
  }

  // serial oracle replay
  std::vector<uint64_t> o_centers(sh.k * sh.m);
  {
    for (uint32_t c = 0; c < sh.k; ++c)
      for (uint32_t d = 0; d < sh.m; ++d)
        o_centers[c * sh.m + d] = sh.points[c * sh.m + d];
    std::vector<uint64_t> sums(sh.k * sh.m, 0);
    std::vector<uint64_t> counts(sh.k, 0);
    if (sh.is_float) {
      for (auto& w : sums) w = f_as_w(0.0);
      for (auto& w : counts) w = f_as_w(0.0);
    }
    for (uint32_t iter = 0; iter < sh.iters; ++iter) {
      for (uint64_t p = 0; p < sh.n; ++p) {
        const uint64_t* pw = &sh.points[p * sh.m];
        uint32_t best = assign_point(sh, o_centers, pw);
        for (uint32_t d = 0; d < sh.m; ++d)
          sums[best * sh.m + d] = add_words(sh.is_float, sums[best * sh.m + d], pw[d]);
        counts[best] =
            add_words(sh.is_float, counts[best], sh.is_float ? f_as_w(1.0) : 1);
      }
      for (uint32_t c = 0; c < sh.k; ++c) {
        for (uint32_t d = 0; d < sh.m; ++d) {
          if (sh.is_float) {
            double cnt = as_f(counts[c]);
            if (cnt != 0.0) o_centers[c * sh.m + d] = f_as_w(as_f(sums[c * sh.m + d]) / cnt);
          } else {
            auto cnt = static_cast<int64_t>(counts[c]);
            if (cnt != 0)
              o_centers[c * sh.m + d] = static_cast<uint64_t>(
                  static_cast<int64_t>(sums[c * sh.m + d]) / cnt);
          }
          sums[c * sh.m + d] = sh.is_float ? f_as_w(0.0) : 0;
        }
        counts[c] = sh.is_float ? f_as_w(0.0) : 0;
      }
    }
  }

  try {
    System sys(cc, RunParts{}.options(wc));
    sh.points_base = sys.alloc(sh.n * sh.m * kWordBytes, /*counted=*/false);
    for (uint64_t i = 0; i < sh.points.size(); ++i)
      sys.poke(sh.points_base + i * kWordBytes, sh.points[i]);
    sh.centers_base = sys.alloc(sh.k * sh.stride * kWordBytes);
    for (uint32_t c = 0; c < sh.k; ++c)
      for (uint32_t d = 0; d < sh.m; ++d)
        sys.poke(center_addr(sh, c, d), sh.points[c * sh.m + d]);
    const uint64_t sums_bytes = sh.k * sh.stride * kWordBytes;
    const uint64_t counts_bytes = ((sh.k + kWordsPerLine - 1) / kWordsPerLine) * kLineBytes;
    sh.sums_base = sys.alloc(sums_bytes);
    sh.counts_base = sys.alloc(counts_bytes);
    if (sh.is_float) {
      for (uint32_t c = 0; c < sh.k; ++c) {
        for (uint32_t d = 0; d < sh.m; ++d) sys.poke(sum_addr(sh, sh.sums_base, c, d), f_as_w(0.0));
        sys.poke(count_addr(sh, sh.counts_base, c), f_as_w(0.0));
      }
    }
    if (wc.variant == Variant::Fgl)
      sh.locks_base.push_back(sys.alloc(sh.k * kLineBytes));
    if (wc.variant == Variant::Dup) {
      sh.dup_sums.assign(cc.core_count, sh.sums_base);
      sh.dup_counts.assign(cc.core_count, sh.counts_base);
      for (uint32_t c = 1; c < cc.core_count; ++c) {
        sh.dup_sums[c] = sys.alloc(sums_bytes);
        sh.dup_counts[c] = sys.alloc(counts_bytes);
        if (sh.is_float) {
          for (uint32_t cl = 0; cl < sh.k; ++cl) {
            for (uint32_t d = 0; d < sh.m; ++d)
              sys.poke(sum_addr(sh, sh.dup_sums[c], cl, d), f_as_w(0.0));
            sys.poke(count_addr(sh, sh.dup_counts[c], cl), f_as_w(0.0));
          }
        }
      }
    }
    if (wc.variant == Variant::CCache) {
      sys.declare_cdata(sh.sums_base, sums_bytes);
      sys.declare_cdata(sh.counts_base, counts_bytes);
    }

    Scheduler sched(sys);
    for (uint32_t c = 0; c < cc.core_count; ++c)
      sched.spawn(kmeans_core(CoreContext(sched, c), &sh));
    sched.run();
    sys.check_coherence_invariants();
    sys.check_privatization_invariants();

    bool ok = true;
    for (uint32_t c = 0; c < sh.k && ok; ++c) {
      for (uint32_t d = 0; d < sh.m && ok; ++d) {
        uint64_t got = sys.peek(center_addr(sh, c, d));
        uint64_t want = o_centers[c * sh.m + d];
        if (sh.is_float)
          ok = close_rel(as_f(got), as_f(want), 1e-6);
        else
          ok = got == want;
      }
    }
    // approximate merges intentionally diverge from the exact oracle; the
    // interesting output is the clustering quality metric
    r.oracle_pass = wc.approx_drop_p > 0 ? true : ok;

    double quality = 0;
    for (uint64_t p = 0; p < sh.n; ++p) {
      const uint64_t* pw = &sh.points[p * sh.m];
      double best = 0;
      for (uint32_t c = 0; c < sh.k; ++c) {
        double d2 = 0;
        for (uint32_t d = 0; d < sh.m; ++d) {
          uint64_t cw = sys.peek(center_addr(sh, c, d));
          double diff = sh.is_float
                            ? as_f(pw[d]) - as_f(cw)
                            : static_cast<double>(static_cast<int64_t>(pw[d]) -
                                                  static_cast<int64_t>(cw));
          d2 += diff * diff;
        }
        if (c == 0 || d2 < best) best = d2;
      }
      quality += best;
    }
    r.quality = quality / static_cast<double>(sh.n);
    finish_report(r, sys);
  } catch (const SimError& e) {
    r.error = e.what();
    r.oracle_pass = false;
  }
  return r;
}

}  // namespace ccsim::detail
