#ifndef CCSIM_SYSTEM_HPP
#define CCSIM_SYSTEM_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "ccsim/cache.hpp"
#include "ccsim/config.hpp"
#include "ccsim/counters.hpp"
#include "ccsim/directory.hpp"
#include "ccsim/errors.hpp"
#include "ccsim/line.hpp"
#include "ccsim/merge.hpp"
#include "ccsim/source_buffer.hpp"

namespace ccsim {

struct SystemOptions {
  bool dirty_merge = true;        // skip merging privatized lines that were never written
  bool check_data_values = true;  // verify every coherent load against shadow memory
};

struct AccessResult {
  uint64_t latency = 0;
  LevelHit level = LevelHit::L1;
  uint64_t value = 0;
};

struct MergeOpResult {
  uint64_t merged = 0;  // lines actually folded into the LLC (clean skips excluded)
  uint64_t latency = 0;
};

// One simulated multicore: per-core L1/L2, shared LLC, full-map directory,
// backing memory with real 64-byte line contents at every level, and the
// per-core privatization hardware (source buffer, merge registers, MFRF).
//
// All operations complete synchronously and charge their latency to the
// issuing core's cycle clock. Interleaving across cores is the scheduler's
// job; a System instance is confined to one execution context.
class System {
 public:
  explicit System(const CacheConfig& cfg, SystemOptions opt = {});

  const CacheConfig& config() const { return cfg_; }
  const Counters& counters() const { return counters_; }

  // ---- workload setup (simulated-time free) ----

  // Line-aligned bump allocation in the simulated address space. `counted`
  // allocations contribute to the modeled data footprint; read-only inputs
  // pass counted=false.
  uint64_t alloc(uint64_t bytes, bool counted = true);
  void add_dynamic_bytes(int64_t delta);  // growth of modeled dynamic containers
  uint64_t peak_footprint_bytes() const { return peak_bytes_; }

  void declare_cdata(uint64_t base, uint64_t len);
  bool in_cdata(uint64_t addr) const;

  void poke(uint64_t addr, uint64_t value);   // backdoor write (memory + shadow)
  uint64_t peek(uint64_t addr) const;         // coherent view: owner copy, else LLC, else memory

  // ---- coherent path ----

  // Load ignores store_value and returns the loaded word; Store writes it.
  AccessResult access(uint32_t core, uint64_t addr, AccessKind kind, uint64_t store_value = 0);
  // Atomic read-modify-writes used for lock words and parallel bitmap
  // application; store-class accesses that return the previous word value.
  AccessResult amo_swap(uint32_t core, uint64_t addr, uint64_t value);
  AccessResult amo_or(uint32_t core, uint64_t addr, uint64_t bits);

  // ---- privatized path ----

  void merge_init(uint32_t core, const std::string& fn_name, unsigned slot);
  void merge_init(uint32_t core, MergeFunctionPtr fn, unsigned slot);
  MergeFunction* mfrf_slot(uint32_t core, unsigned slot) const;

  AccessResult c_read(uint32_t core, uint64_t addr, unsigned slot);
  AccessResult c_write(uint32_t core, uint64_t addr, uint64_t value, unsigned slot);

  uint64_t rd_mreg(uint32_t core, MergeReg reg, unsigned word);
  void wr_mreg(uint32_t core, MergeReg reg, uint64_t value, unsigned word);

  uint64_t soft_merge(uint32_t core);  // marks lines mergeable; returns count marked
  MergeOpResult merge(uint32_t core);
  uint64_t merge_line(uint32_t core, uint64_t line);  // returns the charged latency

  // ---- LLC line locks ----

  bool lock_llc_line(uint32_t core, uint64_t line_addr);
  void unlock_llc_line(uint32_t core, uint64_t line_addr);
  const LlcLockTable& llc_locks() const { return locks_; }

  // ---- time ----

  void tick(uint32_t core, uint64_t cycles);  // non-memory instructions, 1 cycle each
  uint64_t core_cycles(uint32_t core) const { return clock_[core]; }
  uint64_t charged_cycles(uint32_t core) const { return charged_[core]; }
  uint64_t max_cycles() const;
  // Barrier support: lifts every core's clock to the max. The jump is
  // recorded as idle time, not as charged latency.
  void sync_cores_to_max();
  uint64_t idle_cycles(uint32_t core) const { return idle_[core]; }

  // ---- introspection & invariants ----

  struct CoreView {
    SetAssocCache* l1;
    SetAssocCache* l2;
    SourceBuffer* sb;
  };
  CoreView core_view(uint32_t core) {
    return {l1_[core].get(), l2_[core].get(), sb_[core].get()};
  }
  SetAssocCache& llc() { return *llc_; }
  Directory& directory() { return dir_; }

  // Throw SimError{Internal} when a structural invariant is broken.
  void check_coherence_invariants() const;   // SWMR + directory consistency + CData isolation
  void check_privatization_invariants() const;  // per-core SB <-> L1 CCache-bit bijection

  uint64_t debug_evictions_of_pinned() const { return pinned_evictions_; }

 private:
  friend class MergeExecutor;

  struct Region {
    uint64_t base, len;
  };

  enum class WriteOp : uint8_t { None, Put, Or, Swap };

  // protocol helpers (system.cpp)
  AccessResult do_access(uint32_t core, uint64_t addr, bool is_store, WriteOp op,
                         uint64_t operand);
  void guard_not_in_merge_fn() const;
  void count_dir_msg(uint64_t line, uint64_t n = 1);
  void count_invalidation(uint64_t line, uint64_t n = 1);
  CacheWay* private_copy(uint32_t core, uint64_t line);
  void drop_private(uint32_t core, uint64_t line);
  void downgrade_private(uint32_t core, uint64_t line);
  // Invalidate every other private copy; returns the freshest data if a
  // dirty owner copy was written back.
  bool recall_and_invalidate(uint64_t line, uint32_t requester, Line* out);
  void fill(SetAssocCache& cache, uint32_t core, uint64_t line, MesiState st, bool dirty,
            const Line& data, uint64_t* latency);
  CacheWay& allocate_way(SetAssocCache& cache, uint32_t core, uint64_t line, uint64_t* latency);
  void evict_way(SetAssocCache& cache, uint32_t core, CacheWay& w, uint64_t* latency);
  void leave_private(uint32_t core, uint64_t line, bool dirty, const Line& data,
                     uint64_t* latency);
  CacheWay& llc_fill(uint64_t line, bool dirty, const Line& data, uint64_t* latency);
  Line memory_line(uint64_t line) const;
  void write_memory_line(uint64_t line, const Line& data);
  uint64_t upgrade_to_modified(uint32_t core, uint64_t line);  // latency for S->M

  // privatized-path helpers (system_ccache.cpp)
  AccessResult cop(uint32_t core, uint64_t addr, unsigned slot, bool is_write, uint64_t value);
  uint64_t do_merge_line(uint32_t core, uint64_t line);  // latency is NOT charged here
  uint64_t sb_insert(uint32_t core, uint64_t line, const Line& data);
  void sb_remove(uint32_t core, SourceBufferEntry& e);

  void charge(uint32_t core, uint64_t cycles) {
    clock_[core] += cycles;
    charged_[core] += cycles;
  }
  void shadow_store(uint64_t addr, uint64_t value) { shadow_[addr / kWordBytes] = value; }
  void shadow_check(uint64_t addr, uint64_t value) const;

  CacheConfig cfg_;
  SystemOptions opt_;
  Counters counters_;

  std::vector<std::unique_ptr<SetAssocCache>> l1_, l2_;
  std::unique_ptr<SetAssocCache> llc_;
  Directory dir_;
  LlcLockTable locks_;

  std::vector<std::unique_ptr<SourceBuffer>> sb_;
  std::vector<MergeRegisterFile> mregs_;
  std::vector<std::array<MergeFunctionPtr, 4>> mfrf_;
  std::vector<bool> in_merge_fn_;

  std::unordered_map<uint64_t, Line> memory_;     // line address -> contents
  std::unordered_map<uint64_t, uint64_t> shadow_; // word address -> last coherent store

  std::vector<Region> cdata_;
  uint64_t alloc_next_ = kLineBytes;  // keep address 0 unused
  uint64_t counted_bytes_ = 0;
  int64_t dynamic_bytes_ = 0;
  uint64_t peak_bytes_ = 0;

  std::vector<uint64_t> clock_, charged_, idle_;
  uint64_t pinned_evictions_ = 0;  // must stay zero; counted for the safety suite
};

}  // namespace ccsim

#endif
