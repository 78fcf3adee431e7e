#include "ccsim/merge.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "ccsim/errors.hpp"
#include "ccsim/rng.hpp"

namespace ccsim {

namespace {

// mem'[i] = mem[i] + (upd[i] - src[i]), per 64-bit word.
class AddDiff : public MergeFunction {
 public:
  AddDiff() : MergeFunction("add_diff", ElementKind::Int64) {}
  void apply(MergeContext& ctx) override {
    for (unsigned i = 0; i < kWordsPerLine; ++i) {
      uint64_t delta = ctx.rd(MergeReg::Upd, i) - ctx.rd(MergeReg::Src, i);
      ctx.alu(1);
      ctx.wr(i, ctx.rd(MergeReg::Mem, i) + delta);
      ctx.alu(1);
    }
  }
};

// Same shape as add_diff over float64 words.
class VecAddFloat : public MergeFunction {
 public:
  VecAddFloat() : MergeFunction("vec_add_float", ElementKind::Float64) {}
  void apply(MergeContext& ctx) override {
    for (unsigned i = 0; i < kWordsPerLine; ++i) {
      double delta = ctx.rdf(MergeReg::Upd, i) - ctx.rdf(MergeReg::Src, i);
      ctx.alu(1);
      ctx.wrf(i, ctx.rdf(MergeReg::Mem, i) + delta);
      ctx.alu(1);
    }
  }
};

// mem' = mem | upd. Bits are only ever set, so the source copy is unused.
class OrMerge : public MergeFunction {
 public:
  OrMerge() : MergeFunction("or_merge", ElementKind::Bit) {}
  void apply(MergeContext& ctx) override {
    for (unsigned i = 0; i < kWordsPerLine; ++i) {
      uint64_t v = ctx.rd(MergeReg::Mem, i) | ctx.rd(MergeReg::Upd, i);
      ctx.alu(1);
      ctx.wr(i, v);
    }
  }
};

// mem'[i] = min(mem[i], upd[i]) over signed words.
class MinMerge : public MergeFunction {
 public:
  MinMerge() : MergeFunction("min_merge", ElementKind::Int64) {}
  void apply(MergeContext& ctx) override {
    for (unsigned i = 0; i < kWordsPerLine; ++i) {
      auto m = static_cast<int64_t>(ctx.rd(MergeReg::Mem, i));
      auto u = static_cast<int64_t>(ctx.rd(MergeReg::Upd, i));
      ctx.alu(1);
      ctx.wr(i, static_cast<uint64_t>(std::min(m, u)));
    }
  }
};

// mem'[i] = min(threshold, mem[i] + (upd[i] - src[i])). The clamp observes
// the in-memory value, not the core's private copy, so concurrent cores
// cannot overshoot the threshold.
class SaturatingAdd : public MergeFunction {
 public:
  explicit SaturatingAdd(int64_t threshold, std::string id)
      : MergeFunction(std::move(id), ElementKind::Int64), threshold_(threshold) {}
  void apply(MergeContext& ctx) override {
    for (unsigned i = 0; i < kWordsPerLine; ++i) {
      auto delta = static_cast<int64_t>(ctx.rd(MergeReg::Upd, i) - ctx.rd(MergeReg::Src, i));
      auto applied = static_cast<int64_t>(ctx.rd(MergeReg::Mem, i)) + delta;
      ctx.alu(3);
      ctx.wr(i, static_cast<uint64_t>(std::min(threshold_, applied)));
    }
  }

 private:
  int64_t threshold_;
};

// Word pairs are complex float64 values. The private update is encoded as
// the ratio upd/src and applied multiplicatively: mem' = mem * (upd / src).
class ComplexMul : public MergeFunction {
 public:
  ComplexMul() : MergeFunction("complex_mul", ElementKind::ComplexPair) {}
  void apply(MergeContext& ctx) override {
    for (unsigned p = 0; p < kWordsPerLine / 2; ++p) {
      unsigned re = 2 * p, im = 2 * p + 1;
      std::complex<double> src(ctx.rdf(MergeReg::Src, re), ctx.rdf(MergeReg::Src, im));
      std::complex<double> upd(ctx.rdf(MergeReg::Upd, re), ctx.rdf(MergeReg::Upd, im));
      std::complex<double> mem(ctx.rdf(MergeReg::Mem, re), ctx.rdf(MergeReg::Mem, im));
      if (std::abs(src) == 0.0)
        raise(ErrorCode::ZeroSourceFactor, "complex_mul: source factor is zero");
      std::complex<double> out = mem * (upd / src);
      ctx.alu(17);
      ctx.wrf(re, out.real());
      ctx.wrf(im, out.imag());
    }
  }
};

// Wrapper that drops a whole line merge with probability p, leaving mem
// untouched; otherwise delegates to the base function. The drop pattern is
// a deterministic function of the seed.
class ApproxDrop : public MergeFunction {
 public:
  ApproxDrop(MergeFunctionPtr base, double p, uint64_t seed, std::string id)
      : MergeFunction(std::move(id), base->element_kind()),
        base_(std::move(base)),
        p_(p),
        rng_(make_rng(seed, 0x5eed, 17)) {}

  void apply(MergeContext& ctx) override {
    ctx.alu(1);
    if (dist_(rng_) < p_) {
      ++dropped_;
      return;
    }
    base_->apply(ctx);
  }

  uint64_t dropped() const { return dropped_; }

 private:
  MergeFunctionPtr base_;
  double p_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> dist_{0.0, 1.0};
  uint64_t dropped_ = 0;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (true) {
    auto next = s.find(sep, pos);
    out.push_back(s.substr(pos, next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

MergeFunctionPtr make_impl(const std::string& spec, bool* ok) {
  auto fail = [&]() -> MergeFunctionPtr {
    if (ok) {
      *ok = false;
      return nullptr;
    }
    raise(ErrorCode::UnknownMergeFunction, "'" + spec + "' is not in the merge catalog");
  };
  if (ok) *ok = true;
  auto parts = split(spec, ':');
  const std::string& name = parts[0];
  if (name == "add_diff" && parts.size() == 1) return std::make_shared<AddDiff>();
  if (name == "vec_add_float" && parts.size() == 1) return std::make_shared<VecAddFloat>();
  if (name == "or_merge" && parts.size() == 1) return std::make_shared<OrMerge>();
  if (name == "min_merge" && parts.size() == 1) return std::make_shared<MinMerge>();
  if (name == "saturating_add" && parts.size() <= 2) {
    int64_t threshold = 255;
    if (parts.size() == 2) {
      try {
        threshold = std::stoll(parts[1]);
      } catch (const std::exception&) {
        return fail();
      }
    }
    return std::make_shared<SaturatingAdd>(threshold, spec);
  }
  if (name == "complex_mul" && parts.size() == 1) return std::make_shared<ComplexMul>();
  if (name == "approx_drop" && (parts.size() == 3 || parts.size() == 4)) {
    bool base_ok = true;
    auto base = make_impl(parts[1], &base_ok);
    if (!base_ok) return fail();
    double p = 0.0;
    uint64_t seed = 1;
    try {
      p = std::stod(parts[2]);
      if (parts.size() == 4) seed = std::stoull(parts[3]);
    } catch (const std::exception&) {
      return fail();
    }
    if (!(p >= 0.0 && p <= 1.0))
      raise(ErrorCode::BadConfig, "approx_drop probability must be in [0,1]");
    return std::make_shared<ApproxDrop>(std::move(base), p, seed, spec);
  }
  return fail();
}

}  // namespace

MergeFunctionPtr make_merge_function(const std::string& spec) { return make_impl(spec, nullptr); }

bool merge_function_exists(const std::string& spec) {
  bool ok = true;
  try {
    make_impl(spec, &ok);
  } catch (const SimError&) {
    return false;  // structurally recognized but invalid parameters
  }
  return ok;
}

std::vector<std::string> merge_function_names() {
  return {"add_diff",       "vec_add_float", "or_merge",
          "min_merge",      "saturating_add[:threshold]",
          "complex_mul",    "approx_drop:<base>:<p>[:seed]"};
}

Line apply_merge(MergeFunction& fn, const Line& src, const Line& upd, const Line& mem) {
  MergeRegisterFile regs;
  regs.stage(src, upd, mem);
  MergeContext ctx(regs);
  fn.apply(ctx);
  Line out = regs.mem();
  regs.clear();
  return out;
}

}  // namespace ccsim
