#include <bit>
#include <complex>
#include <random>

#include "ccsim/rng.hpp"
#include "detail.hpp"

namespace ccsim::detail {

namespace {

enum class KvOp { Add, Saturating, Complex };

struct KvShared {
  WorkloadConfig wc;
  uint64_t keys = 0;
  uint64_t value_words = 1;  // 2 for complex values
  uint64_t values_base = 0;
  uint64_t locks_base = 0;                     // fgl: one padded lock line per value line
  std::vector<uint64_t> local_base;            // dup: per-core array (core 0 = values_base)
  std::vector<std::vector<uint32_t>> key_seq;  // per-core access sequences
  KvOp op = KvOp::Add;
  int64_t threshold = 255;
  std::vector<std::complex<double>> factor;  // per-core multiplicative update
  uint32_t cadence = 0;
  bool moe = true;
};

uint64_t value_addr(const KvShared& sh, uint64_t base, uint64_t key) {
  return base + key * sh.value_words * kWordBytes;
}

uint64_t lock_addr(const KvShared& sh, uint64_t key) {
  uint64_t value_line = key * sh.value_words * kWordBytes / kLineBytes;
  return sh.locks_base + value_line * kLineBytes;
}

KvOp parse_op(const std::string& spec, int64_t* threshold) {
  if (spec == "add_diff") return KvOp::Add;
  if (spec.rfind("saturating_add", 0) == 0) {
    auto colon = spec.find(':');
    if (colon != std::string::npos) *threshold = std::stoll(spec.substr(colon + 1));
    return KvOp::Saturating;
  }
  if (spec == "complex_mul") return KvOp::Complex;
  raise(ErrorCode::BadConfig, "kv does not support merge function '" + spec + "'");
}

CoreProgram kv_fgl(CoreContext ctx, KvShared* sh) {
  const uint32_t core = ctx.core();
  for (uint32_t key : sh->key_seq[core]) {
    uint64_t va = value_addr(*sh, sh->values_base, key);
    uint64_t la = lock_addr(*sh, key);
    while (!co_await ctx.try_lock(la)) {
    }
    if (sh->op == KvOp::Complex) {
      uint64_t re = co_await ctx.load(va);
      uint64_t im = co_await ctx.load(va + 8);
      co_await ctx.tick(6);
      std::complex<double> v(std::bit_cast<double>(re), std::bit_cast<double>(im));
      v *= sh->factor[core];
      co_await ctx.store(va, std::bit_cast<uint64_t>(v.real()));
      co_await ctx.store(va + 8, std::bit_cast<uint64_t>(v.imag()));
    } else {
      auto v = static_cast<int64_t>(co_await ctx.load(va));
      co_await ctx.tick(sh->op == KvOp::Saturating ? 2 : 1);
      int64_t next = v + 1;
      if (sh->op == KvOp::Saturating) next = std::min(sh->threshold, next);
      co_await ctx.store(va, static_cast<uint64_t>(next));
    }
    co_await ctx.unlock(la);
  }
  co_await ctx.barrier();
}

CoreProgram kv_dup(CoreContext ctx, KvShared* sh) {
  const uint32_t core = ctx.core();
  const uint64_t mine = sh->local_base[core];
  for (uint32_t key : sh->key_seq[core]) {
    uint64_t va = value_addr(*sh, mine, key);
    if (sh->op == KvOp::Complex) {
      uint64_t re = co_await ctx.load(va);
      uint64_t im = co_await ctx.load(va + 8);
      co_await ctx.tick(6);
      std::complex<double> v(std::bit_cast<double>(re), std::bit_cast<double>(im));
      v *= sh->factor[core];
      co_await ctx.store(va, std::bit_cast<uint64_t>(v.real()));
      co_await ctx.store(va + 8, std::bit_cast<uint64_t>(v.imag()));
    } else {
      auto v = static_cast<int64_t>(co_await ctx.load(va));
      co_await ctx.tick(1);  // duplicates accumulate unclamped; the reduction clamps
      co_await ctx.store(va, static_cast<uint64_t>(v + 1));
    }
  }
  co_await ctx.barrier();
  // one core walks every duplicate and folds it into the base array
  if (core == 0) {
    for (uint32_t c = 1; c < ctx.config().core_count; ++c) {
      for (uint64_t key = 0; key < sh->keys; ++key) {
        uint64_t ca = value_addr(*sh, sh->local_base[c], key);
        uint64_t ba = value_addr(*sh, sh->values_base, key);
        if (sh->op == KvOp::Complex) {
          uint64_t cre = co_await ctx.load(ca);
          uint64_t cim = co_await ctx.load(ca + 8);
          uint64_t bre = co_await ctx.load(ba);
          uint64_t bim = co_await ctx.load(ba + 8);
          co_await ctx.tick(6);
          std::complex<double> copy(std::bit_cast<double>(cre), std::bit_cast<double>(cim));
          std::complex<double> base(std::bit_cast<double>(bre), std::bit_cast<double>(bim));
          base *= copy;  // copies start at (1,0): ratio to source is the copy itself
          co_await ctx.store(ba, std::bit_cast<uint64_t>(base.real()));
          co_await ctx.store(ba + 8, std::bit_cast<uint64_t>(base.imag()));
        } else {
          auto copy = static_cast<int64_t>(co_await ctx.load(ca));
          auto base = static_cast<int64_t>(co_await ctx.load(ba));
          co_await ctx.tick(sh->op == KvOp::Saturating ? 2 : 1);
          int64_t next = base + copy;  // copies start at zero
          if (sh->op == KvOp::Saturating) next = std::min(sh->threshold, next);
          co_await ctx.store(ba, static_cast<uint64_t>(next));
        }
      }
    }
  }
  co_await ctx.barrier();
}

CoreProgram kv_ccache(CoreContext ctx, KvShared* sh) {
  const uint32_t core = ctx.core();
  co_await ctx.merge_init(sh->wc.kv_merge_fn, 0);
  Cadence cad(sh->cadence, ctx.config());
  for (uint32_t key : sh->key_seq[core]) {
    uint64_t va = value_addr(*sh, sh->values_base, key);
    uint64_t line = line_of(va);
    if (cad.due(line)) {
      if (sh->moe)
        co_await ctx.soft_merge();
      else
        co_await ctx.merge();
      cad.reset();
    }
    if (sh->op == KvOp::Complex) {
      uint64_t re = co_await ctx.c_read(va, 0);
      uint64_t im = co_await ctx.c_read(va + 8, 0);
      co_await ctx.tick(6);
      std::complex<double> v(std::bit_cast<double>(re), std::bit_cast<double>(im));
      v *= sh->factor[core];
      co_await ctx.c_write(va, std::bit_cast<uint64_t>(v.real()), 0);
      co_await ctx.c_write(va + 8, std::bit_cast<uint64_t>(v.imag()), 0);
      cad.note(line, 4);
    } else {
      auto v = static_cast<int64_t>(co_await ctx.c_read(va, 0));
      co_await ctx.tick(1);  // private updates never clamp; the merge function does
      co_await ctx.c_write(va, static_cast<uint64_t>(v + 1), 0);
      cad.note(line, 2);
    }
  }
  co_await ctx.merge();
  co_await ctx.barrier();
}

}  // namespace

SimReport run_kv(const WorkloadConfig& wc, const CacheConfig& cc) {
  SimReport r = report_skeleton(wc, cc);
  r.merge_fn = wc.kv_merge_fn;

  KvShared sh;
  sh.wc = wc;
  sh.op = parse_op(wc.kv_merge_fn, &sh.threshold);
  sh.value_words = sh.op == KvOp::Complex ? 2 : 1;
  sh.keys = wc.kv_keys;
  if (sh.keys == 0) {
    sh.keys = static_cast<uint64_t>(wc.ws_fraction * static_cast<double>(cc.llc.capacity_bytes)) /
              (sh.value_words * kWordBytes);
  }
  uint64_t keys_per_line = kLineBytes / (sh.value_words * kWordBytes);
  sh.keys = std::max<uint64_t>(sh.keys & ~(keys_per_line - 1), 8 * keys_per_line);
  sh.cadence = wc.effective_cadence(cc);
  sh.moe = wc.merge_on_evict;
  for (uint32_t c = 0; c < cc.core_count; ++c) {
    double theta = 0.7548776662466927 * (c + 1);
    sh.factor.emplace_back(std::cos(theta), std::sin(theta));
  }

  // deterministic per-core access sequences, shared with the oracle
  const uint64_t total_ops = 16 * sh.keys;
  sh.key_seq.resize(cc.core_count);
  for (uint32_t c = 0; c < cc.core_count; ++c) {
    auto [b, e] = slice(total_ops, c, cc.core_count);
    auto rng = make_rng(wc.seed, c, 1);
    std::uniform_int_distribution<uint64_t> pick(0, sh.keys - 1);
    sh.key_seq[c].reserve(e - b);
    for (uint64_t i = b; i < e; ++i) sh.key_seq[c].push_back(static_cast<uint32_t>(pick(rng)));
  }

  // serial oracle: fold the same logical updates in canonical core order
  std::vector<int64_t> oracle_count(sh.keys, 0);
  std::vector<std::complex<double>> oracle_cplx;
  if (sh.op == KvOp::Complex) oracle_cplx.assign(sh.keys, {1.0, 0.0});
  for (uint32_t c = 0; c < cc.core_count; ++c)
    for (uint32_t key : sh.key_seq[c]) {
      ++oracle_count[key];
      if (sh.op == KvOp::Complex) oracle_cplx[key] *= sh.factor[c];
    }

  try {
    System sys(cc, RunParts{}.options(wc));
    const uint64_t values_bytes = sh.keys * sh.value_words * kWordBytes;
    sh.values_base = sys.alloc(values_bytes);
    if (sh.op == KvOp::Complex)
      for (uint64_t k = 0; k < sh.keys; ++k)
        sys.poke(value_addr(sh, sh.values_base, k), std::bit_cast<uint64_t>(1.0));

    if (wc.variant == Variant::Fgl) {
      uint64_t value_lines = values_bytes / kLineBytes;
      sh.locks_base = sys.alloc(value_lines * kLineBytes);  // one lock word per value line, padded
    }
    if (wc.variant == Variant::Dup) {
      sh.local_base.assign(cc.core_count, sh.values_base);
      for (uint32_t c = 1; c < cc.core_count; ++c) {
        sh.local_base[c] = sys.alloc(values_bytes);
        if (sh.op == KvOp::Complex)
          for (uint64_t k = 0; k < sh.keys; ++k)
            sys.poke(value_addr(sh, sh.local_base[c], k), std::bit_cast<uint64_t>(1.0));
      }
    }
    if (wc.variant == Variant::CCache) sys.declare_cdata(sh.values_base, values_bytes);

    Scheduler sched(sys);
    for (uint32_t c = 0; c < cc.core_count; ++c) {
      CoreContext ctx(sched, c);
      switch (wc.variant) {
        case Variant::Fgl: sched.spawn(kv_fgl(ctx, &sh)); break;
        case Variant::Dup: sched.spawn(kv_dup(ctx, &sh)); break;
        case Variant::CCache: sched.spawn(kv_ccache(ctx, &sh)); break;
      }
    }
    sched.run();
    sys.check_coherence_invariants();
    sys.check_privatization_invariants();

    bool ok = true;
    for (uint64_t k = 0; k < sh.keys && ok; ++k) {
      uint64_t va = value_addr(sh, sh.values_base, k);
      if (sh.op == KvOp::Complex) {
        double re = std::bit_cast<double>(sys.peek(va));
        double im = std::bit_cast<double>(sys.peek(va + 8));
        ok = close_rel(re, oracle_cplx[k].real(), 1e-6) &&
             close_rel(im, oracle_cplx[k].imag(), 1e-6);
      } else {
        int64_t expect = oracle_count[k];
        if (sh.op == KvOp::Saturating) expect = std::min(sh.threshold, expect);
        ok = static_cast<int64_t>(sys.peek(va)) == expect;
      }
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
