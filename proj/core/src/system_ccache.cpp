#include <algorithm>

#include "ccsim/system.hpp"

namespace ccsim {

// The privatized data path. c_read/c_write move lines between the shared
// levels (LLC, memory) and the requesting core's L1 + source buffer without
// ever consulting the directory; merge_line folds a private update back
// into the LLC under a per-line lock.

void System::merge_init(uint32_t core, const std::string& fn_name, unsigned slot) {
  merge_init(core, make_merge_function(fn_name), slot);
}

void System::merge_init(uint32_t core, MergeFunctionPtr fn, unsigned slot) {
  guard_not_in_merge_fn();
  if (core >= cfg_.core_count) raise(ErrorCode::BadConfig, "core id out of range");
  if (slot >= mfrf_[core].size()) raise(ErrorCode::BadConfig, "MFRF slot out of range");
  if (!fn) raise(ErrorCode::UnknownMergeFunction, "null merge function");
  mfrf_[core][slot] = std::move(fn);  // overwriting is allowed; last write wins
  charge(core, 1);
}

MergeFunction* System::mfrf_slot(uint32_t core, unsigned slot) const {
  return slot < mfrf_[core].size() ? mfrf_[core][slot].get() : nullptr;
}

// Insert a source copy, flushing the oldest flushable entry when full.
// Only entries whose L1 line is mergeable may be flushed; pinned entries
// stay, and if nothing can move the buffer is genuinely full.
uint64_t System::sb_insert(uint32_t core, uint64_t line, const Line& data) {
  SourceBuffer& sb = *sb_[core];
  if (sb.find(line)) raise(ErrorCode::Internal, "duplicate source-buffer entry");
  uint64_t latency = 0;
  if (!sb.free_entry()) {
    SourceBufferEntry* flush = nullptr;
    for (SourceBufferEntry* e : sb.in_insertion_order()) {
      CacheWay* w = l1_[core]->find(e->line);
      if (!w || !w->ccache)
        raise(ErrorCode::Internal, "source-buffer entry without a privatized L1 line");
      if (w->mergeable) {
        flush = e;
        break;
      }
    }
    if (!flush)
      raise(ErrorCode::SourceBufferFull,
            "no invalid entry and no mergeable line to flush on core " + std::to_string(core));
    latency += do_merge_line(core, flush->line);
    if (CacheWay* w = l1_[core]->find(flush->line); w && w->valid && !w->ccache) {
      // clean skip left the line resident; drop it so the slot semantics
      // match a real eviction from the buffer
      w->valid = false;
    }
  }
  sb.insert(line, data);
  return latency;
}

void System::sb_remove(uint32_t core, SourceBufferEntry& e) {
  sb_[core]->invalidate(e);
  ++counters_.source_buffer_evictions;
}

AccessResult System::cop(uint32_t core, uint64_t addr, unsigned slot, bool is_write,
                         uint64_t value) {
  guard_not_in_merge_fn();
  if (core >= cfg_.core_count) raise(ErrorCode::BadConfig, "core id out of range");
  if (addr % kWordBytes != 0) raise(ErrorCode::BadConfig, "unaligned word access");
  if (!in_cdata(addr))
    raise(ErrorCode::BadConfig, "commutative access outside any declared CData region");
  if (slot >= 4) raise(ErrorCode::BadConfig, "merge-type slot out of range");
  if (!mfrf_[core][slot])
    raise(ErrorCode::MergeSlotEmpty, "MFRF slot " + std::to_string(slot) + " is empty");
  ++counters_.cops;

  const uint64_t line = line_of(addr);
  const unsigned word = word_of(addr);
  uint64_t latency = 0;
  LevelHit served = LevelHit::L1;

  CacheWay* w = l1_[core]->find(line);
  if (w) {
    ++counters_.l1.hits;
    // the source buffer is probed in parallel with the L1
    latency = std::max(cfg_.l1.hit_latency_cycles, cfg_.sb_hit_latency_cycles);
    if (w->ccache) {
      if (w->mergeable) w->mergeable = false;  // keep the line resident while hot
    } else {
      // left resident by a clean-merge skip: re-privatize in place, the
      // current contents become the new source copy
      latency += sb_insert(core, line, w->data);
      w->ccache = true;
      w->mergeable = false;
      w->dirty = false;
      w->mesi = MesiState::Invalid;  // never consulted while privatized
    }
    w->merge_type = static_cast<uint8_t>(slot);
  } else {
    ++counters_.l1.misses;
    latency = cfg_.l1.hit_latency_cycles + cfg_.l2.hit_latency_cycles;
    if (l2_[core]->find(line))
      raise(ErrorCode::Internal, "CData line resident in L2");
    ++counters_.l2.misses;
    latency += cfg_.llc.hit_latency_cycles;
    served = LevelHit::LLC;
    Line data;
    if (CacheWay* lw = llc_->find(line)) {
      ++counters_.llc.hits;
      if (locks_.locked_by_other(line, core))
        raise(ErrorCode::Internal, "fetch of an LLC line locked by another core");
      data = lw->data;
      llc_->touch(*lw);
    } else {
      ++counters_.llc.misses;
      latency += cfg_.memory_latency_cycles;
      ++counters_.memory_accesses;
      served = LevelHit::Memory;
      data = memory_line(line);
      llc_fill(line, false, data, nullptr);  // keep the shared copy close
    }
    // source copy is captured in parallel with the L1 fill (pre-update value)
    latency += sb_insert(core, line, data);
    CacheWay& nw = allocate_way(*l1_[core], core, line, &latency);
    nw.valid = true;
    nw.line = line;
    nw.mesi = MesiState::Invalid;
    nw.dirty = false;
    nw.ccache = true;
    nw.mergeable = false;
    nw.merge_type = static_cast<uint8_t>(slot);
    nw.data = data;
    w = &nw;
  }
  l1_[core]->touch(*w);
  if (is_write) {
    w->data.set_word(word, value);
    w->dirty = true;
  }
  charge(core, latency);
  return {latency, served, w->data.word(word)};
}

AccessResult System::c_read(uint32_t core, uint64_t addr, unsigned slot) {
  return cop(core, addr, slot, false, 0);
}

AccessResult System::c_write(uint32_t core, uint64_t addr, uint64_t value, unsigned slot) {
  return cop(core, addr, slot, true, value);
}

uint64_t System::rd_mreg(uint32_t core, MergeReg reg, unsigned word) {
  if (core >= cfg_.core_count) raise(ErrorCode::BadConfig, "core id out of range");
  if (word >= kWordsPerLine) raise(ErrorCode::BadConfig, "merge register word out of range");
  if (!mregs_[core].in_flight())
    raise(ErrorCode::NoMergeInFlight, "rd_mreg with no merge in flight");
  return mregs_[core].rd(reg, word);
}

void System::wr_mreg(uint32_t core, MergeReg reg, uint64_t value, unsigned word) {
  if (core >= cfg_.core_count) raise(ErrorCode::BadConfig, "core id out of range");
  if (word >= kWordsPerLine) raise(ErrorCode::BadConfig, "merge register word out of range");
  if (!mregs_[core].in_flight())
    raise(ErrorCode::NoMergeInFlight, "wr_mreg with no merge in flight");
  if (reg != MergeReg::Mem)
    raise(ErrorCode::WriteToReadOnlyRegister, "source and updated registers are read-only");
  mregs_[core].wr(word, value);
}

uint64_t System::soft_merge(uint32_t core) {
  guard_not_in_merge_fn();
  if (core >= cfg_.core_count) raise(ErrorCode::BadConfig, "core id out of range");
  uint64_t marked = 0;
  for (auto& e : sb_[core]->entries()) {
    if (!e.valid) continue;
    CacheWay* w = l1_[core]->find(e.line);
    if (!w || !w->ccache)
      raise(ErrorCode::Internal, "source-buffer entry without a privatized L1 line");
    w->mergeable = true;
    ++marked;
  }
  charge(core, std::max<uint64_t>(marked, 1));
  return marked;
}

MergeOpResult System::merge(uint32_t core) {
  guard_not_in_merge_fn();
  if (core >= cfg_.core_count) raise(ErrorCode::BadConfig, "core id out of range");
  if (mregs_[core].in_flight()) raise(ErrorCode::BadConfig, "merge already in flight");
  MergeOpResult r;
  for (SourceBufferEntry* e : sb_[core]->in_insertion_order()) {
    uint64_t before = counters_.merges_executed;
    r.latency += do_merge_line(core, e->line);
    if (counters_.merges_executed != before) ++r.merged;
  }
  charge(core, r.latency);
  return r;
}

uint64_t System::merge_line(uint32_t core, uint64_t line) {
  uint64_t latency = do_merge_line(core, line);
  charge(core, latency);
  return latency;
}

// The full per-line merge procedure. Returns the latency to charge.
uint64_t System::do_merge_line(uint32_t core, uint64_t line) {
  if (core >= cfg_.core_count) raise(ErrorCode::BadConfig, "core id out of range");
  SourceBufferEntry* sbe = sb_[core]->find(line);
  CacheWay* w = l1_[core]->find(line);
  if (!sbe || !w || !w->ccache)
    raise(ErrorCode::BadConfig, "merge_line without a privatized copy of the line");

  // dirty-merge: an unmodified copy cannot change the in-memory result
  if (!w->dirty && opt_.dirty_merge) {
    sb_remove(core, *sbe);
    ++counters_.merges_skipped_clean;
    w->ccache = false;
    w->mergeable = false;
    return 0;
  }

  uint64_t latency = 0;

  // (1) line must be resident in the LLC before it can be locked
  CacheWay* lw = llc_->find(line);
  if (lw) {
    ++counters_.llc.hits;
  } else {
    ++counters_.llc.misses;
    latency += cfg_.memory_latency_cycles;
    ++counters_.memory_accesses;
    lw = &llc_fill(line, false, memory_line(line), &latency);
  }
  // (2) lock out concurrent merges of the same line
  if (!lock_llc_line(core, line))
    raise(ErrorCode::Internal,
          "merge of a line locked across scheduler turns by another core");

  // (3) stage source, updated and memory copies into the merge registers
  mregs_[core].stage(sbe->data, w->data, lw->data);

  // (4) run the registered merge function; it sees only the registers
  MergeFunction* fn = mfrf_[core][w->merge_type].get();
  if (!fn) raise(ErrorCode::MergeSlotEmpty, "merge type names an empty MFRF slot");
  in_merge_fn_[core] = true;
  try {
    MergeContext ctx(mregs_[core]);
    fn->apply(ctx);
  } catch (...) {
    in_merge_fn_[core] = false;
    mregs_[core].clear();
    unlock_llc_line(core, line);
    throw;
  }
  in_merge_fn_[core] = false;
  latency += mregs_[core].register_accesses() * cfg_.mreg_access_cycles + mregs_[core].alu_ops();

  // (5) memory register goes back to the LLC
  lw->data = mregs_[core].mem();
  lw->dirty = true;
  llc_->touch(*lw);
  mregs_[core].clear();

  // (6) drop the private copy and its source entry
  sb_remove(core, *sbe);
  w->valid = false;
  w->ccache = false;
  w->mergeable = false;

  // (7) release the line, (8) fixed per-line overhead
  unlock_llc_line(core, line);
  latency += cfg_.merge_fixed_overhead_cycles;
  ++counters_.merges_executed;
  return latency;
}

bool System::lock_llc_line(uint32_t core, uint64_t line_addr) {
  if (core >= cfg_.core_count) raise(ErrorCode::BadConfig, "core id out of range");
  if (!llc_->find(line_addr)) {
    // lock implies LLC residency; fetch from memory first
    ++counters_.llc.misses;
    ++counters_.memory_accesses;
    charge(core, cfg_.memory_latency_cycles);
    llc_fill(line_addr, false, memory_line(line_addr), nullptr);
  }
  if (locks_.locked_by_other(line_addr, core)) {
    ++counters_.lock_conflicts;  // caller retries at the next scheduler step
    return false;
  }
  return locks_.try_lock(line_addr, core);
}

void System::unlock_llc_line(uint32_t core, uint64_t line_addr) {
  locks_.unlock(line_addr, core);
}

}  // namespace ccsim
