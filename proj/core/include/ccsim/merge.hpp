#ifndef CCSIM_MERGE_HPP
#define CCSIM_MERGE_HPP

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ccsim/line.hpp"

namespace ccsim {

enum class MergeReg : uint8_t { Src, Upd, Mem };

enum class ElementKind : uint8_t { Int64, Float64, Bit, ComplexPair };

// The three line-sized staging registers a merge function operates on.
// Functions may only read Src/Upd/Mem and write Mem, and every access goes
// through rd()/wr() so the executor can charge register-access cycles.
class MergeRegisterFile {
 public:
  void stage(const Line& src, const Line& upd, const Line& mem) {
    src_ = src;
    upd_ = upd;
    mem_ = mem;
    reads_ = writes_ = alu_ = 0;
    in_flight_ = true;
  }
  void clear() { in_flight_ = false; }
  bool in_flight() const { return in_flight_; }

  uint64_t rd(MergeReg r, unsigned i) {
    ++reads_;
    switch (r) {
      case MergeReg::Src: return src_.word(i);
      case MergeReg::Upd: return upd_.word(i);
      case MergeReg::Mem: return mem_.word(i);
    }
    return 0;
  }
  void wr(unsigned i, uint64_t v) {
    ++writes_;
    mem_.set_word(i, v);
  }
  void alu(uint64_t ops) { alu_ += ops; }

  const Line& src() const { return src_; }
  const Line& upd() const { return upd_; }
  const Line& mem() const { return mem_; }

  uint64_t register_accesses() const { return reads_ + writes_; }
  uint64_t alu_ops() const { return alu_; }

 private:
  Line src_, upd_, mem_;
  uint64_t reads_ = 0, writes_ = 0, alu_ = 0;
  bool in_flight_ = false;
};

// Typed view handed to a merge function body. Everything the function can
// touch lives here; the body cost is reads + writes + alu ops, one cycle each.
class MergeContext {
 public:
  explicit MergeContext(MergeRegisterFile& regs) : regs_(regs) {}

  uint64_t rd(MergeReg r, unsigned i) { return regs_.rd(r, i); }
  double rdf(MergeReg r, unsigned i) { return std::bit_cast<double>(regs_.rd(r, i)); }
  void wr(unsigned i, uint64_t v) { regs_.wr(i, v); }
  void wrf(unsigned i, double v) { regs_.wr(i, std::bit_cast<uint64_t>(v)); }
  void alu(uint64_t ops) { regs_.alu(ops); }

 private:
  MergeRegisterFile& regs_;
};

// A software reduction folding one core's private update of a line into the
// shared memory copy: (src, upd, mem) -> mem'.
class MergeFunction {
 public:
  MergeFunction(std::string id, ElementKind kind) : id_(std::move(id)), kind_(kind) {}
  virtual ~MergeFunction() = default;

  const std::string& id() const { return id_; }
  ElementKind element_kind() const { return kind_; }

  virtual void apply(MergeContext& ctx) = 0;

 private:
  std::string id_;
  ElementKind kind_;
};

using MergeFunctionPtr = std::shared_ptr<MergeFunction>;

// Catalog lookup by name. Parameterized forms:
//   saturating_add[:threshold]          (default threshold 255)
//   approx_drop:<base>:<p>[:seed]       (default seed 1)
// Throws UnknownMergeFunction for anything else.
MergeFunctionPtr make_merge_function(const std::string& spec);
bool merge_function_exists(const std::string& spec);
std::vector<std::string> merge_function_names();

// Convenience for tests and oracles: stage, run, return resulting mem line.
Line apply_merge(MergeFunction& fn, const Line& src, const Line& upd, const Line& mem);

}  // namespace ccsim

#endif
