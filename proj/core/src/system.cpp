#include "ccsim/system.hpp"

#include <algorithm>

namespace ccsim {

// Message accounting. Every simulated protocol hop bumps directory_messages:
//   - core -> directory requests (GetS / GetM / upgrade / eviction notices)
//   - directory -> core grant/data responses
//   - directory -> owner forwards and the owner's data reply
//   - directory -> sharer invalidations (these also bump
//     invalidation_messages, one per invalidated private copy)
// Invalidation acks are folded into the invalidation count. Messages whose
// line lies in a declared CData region are additionally attributed to the
// cdata_* counters, which any correct run keeps at zero.
//
// Latency model: strictly additive probe costs. An access charges the hit
// latency of every level it reaches; a store that must consult the
// directory charges the probe path down to the LLC where the directory
// lives. Writebacks and eviction traffic move data but charge nothing.

System::System(const CacheConfig& cfg, SystemOptions opt) : cfg_(cfg), opt_(opt) {
  cfg_.validate();
  for (uint32_t c = 0; c < cfg_.core_count; ++c) {
    l1_.push_back(std::make_unique<SetAssocCache>("l1." + std::to_string(c), cfg_.l1));
    l2_.push_back(std::make_unique<SetAssocCache>("l2." + std::to_string(c), cfg_.l2));
    sb_.push_back(std::make_unique<SourceBuffer>(cfg_.sb_entries));
  }
  llc_ = std::make_unique<SetAssocCache>("llc", cfg_.llc);
  mregs_.resize(cfg_.core_count);
  mfrf_.resize(cfg_.core_count);
  in_merge_fn_.resize(cfg_.core_count, false);
  clock_.resize(cfg_.core_count, 0);
  charged_.resize(cfg_.core_count, 0);
  idle_.resize(cfg_.core_count, 0);
}

// ---------------------------------------------------------------- setup --

uint64_t System::alloc(uint64_t bytes, bool counted) {
  uint64_t base = alloc_next_;
  uint64_t padded = (bytes + kLineBytes - 1) & ~(kLineBytes - 1);
  alloc_next_ += padded;
  if (counted) {
    counted_bytes_ += padded;
    peak_bytes_ = std::max(peak_bytes_, counted_bytes_ + uint64_t(std::max<int64_t>(dynamic_bytes_, 0)));
  }
  return base;
}

void System::add_dynamic_bytes(int64_t delta) {
  dynamic_bytes_ += delta;
  peak_bytes_ = std::max(peak_bytes_, counted_bytes_ + uint64_t(std::max<int64_t>(dynamic_bytes_, 0)));
}

void System::declare_cdata(uint64_t base, uint64_t len) {
  if (base % kLineBytes != 0 || len % kLineBytes != 0)
    raise(ErrorCode::BadConfig, "CData region must be line aligned and padded");
  cdata_.push_back({base, len});
}

bool System::in_cdata(uint64_t addr) const {
  for (const auto& r : cdata_)
    if (addr >= r.base && addr < r.base + r.len) return true;
  return false;
}

Line System::memory_line(uint64_t line) const {
  auto it = memory_.find(line);
  return it == memory_.end() ? Line{} : it->second;
}

void System::write_memory_line(uint64_t line, const Line& data) { memory_[line] = data; }

void System::poke(uint64_t addr, uint64_t value) {
  uint64_t line = line_of(addr);
  auto& l = memory_[line];
  l.set_word(word_of(addr), value);
  shadow_store(addr, value);
}

uint64_t System::peek(uint64_t addr) const {
  uint64_t line = line_of(addr);
  unsigned word = word_of(addr);
  if (const DirectoryEntry* e = dir_.find(line); e && e->state == DirState::Exclusive) {
    uint32_t owner = static_cast<uint32_t>(e->owner);
    if (const CacheWay* w = l1_[owner]->find(line)) return w->data.word(word);
    if (const CacheWay* w = l2_[owner]->find(line)) return w->data.word(word);
    raise(ErrorCode::Internal, "directory owner holds no copy");
  }
  if (const CacheWay* w = llc_->find(line)) return w->data.word(word);
  return memory_line(line).word(word);
}

void System::shadow_check(uint64_t addr, uint64_t value) const {
  if (!opt_.check_data_values) return;
  auto it = shadow_.find(addr / kWordBytes);
  uint64_t expect = it == shadow_.end() ? 0 : it->second;
  if (value != expect)
    raise(ErrorCode::Internal, "data-value mismatch at " + std::to_string(addr) + ": loaded " +
                                   std::to_string(value) + ", expected " + std::to_string(expect));
}

// --------------------------------------------------------- protocol bits --

void System::count_dir_msg(uint64_t line, uint64_t n) {
  counters_.directory_messages += n;
  if (in_cdata(line * kLineBytes)) counters_.cdata_directory_messages += n;
}

void System::count_invalidation(uint64_t line, uint64_t n) {
  counters_.invalidation_messages += n;
  if (in_cdata(line * kLineBytes)) counters_.cdata_invalidation_messages += n;
}

CacheWay* System::private_copy(uint32_t core, uint64_t line) {
  if (CacheWay* w = l1_[core]->find(line)) return w;
  return l2_[core]->find(line);
}

void System::drop_private(uint32_t core, uint64_t line) {
  if (CacheWay* w = l1_[core]->find(line)) w->valid = false;
  if (CacheWay* w = l2_[core]->find(line)) w->valid = false;
}

void System::downgrade_private(uint32_t core, uint64_t line) {
  if (CacheWay* w = l1_[core]->find(line)) {
    w->mesi = MesiState::Shared;
    w->dirty = false;
  }
  if (CacheWay* w = l2_[core]->find(line)) {
    w->mesi = MesiState::Shared;
    w->dirty = false;
  }
}

bool System::recall_and_invalidate(uint64_t line, uint32_t requester, Line* out) {
  DirectoryEntry* e = dir_.find(line);
  if (!e) return false;
  bool have_dirty = false;
  for (uint32_t c = 0; c < cfg_.core_count; ++c) {
    if (c == requester || !e->has(c)) continue;
    count_dir_msg(line);       // invalidation to holder
    count_invalidation(line);
    CacheWay* w1 = l1_[c]->find(line);
    CacheWay* w2 = l2_[c]->find(line);
    bool dirty = (w1 && w1->dirty) || (w2 && w2->dirty);
    if (dirty) {
      *out = w1 ? w1->data : w2->data;  // L1 data is never staler than L2
      have_dirty = true;
      count_dir_msg(line);  // writeback data reply
    }
    if (w1) w1->valid = false;
    if (w2) w2->valid = false;
    e->remove(c);
  }
  if (e->owner >= 0 && static_cast<uint32_t>(e->owner) != requester) e->owner = -1;
  return have_dirty;
}

uint64_t System::upgrade_to_modified(uint32_t core, uint64_t line) {
  count_dir_msg(line);  // upgrade request
  Line scratch;
  recall_and_invalidate(line, core, &scratch);  // sharers are clean by SWMR
  DirectoryEntry& e = dir_.get(line);
  e.state = DirState::Exclusive;
  e.owner = static_cast<int>(core);
  e.sharers = 0;
  e.add(core);
  count_dir_msg(line);  // grant
  return 0;
}

// ------------------------------------------------------------- evictions --

CacheWay& System::llc_fill(uint64_t line, bool dirty, const Line& data, uint64_t* latency) {
  if (CacheWay* w = llc_->find(line)) {
    w->data = data;
    w->dirty = w->dirty || dirty;
    llc_->touch(*w);
    return *w;
  }
  CacheWay* slot = llc_->free_way(line);
  if (!slot) {
    slot = llc_->select_victim(line, [this](const CacheWay& w) { return !locks_.locked(w.line); });
    if (!slot) raise(ErrorCode::Internal, "all LLC ways locked in one set");
    evict_way(*llc_, /*core=*/0, *slot, latency);
  }
  slot->valid = true;
  slot->line = line;
  slot->mesi = MesiState::Invalid;  // LLC lines carry no private MESI state
  slot->dirty = dirty;
  slot->ccache = false;
  slot->mergeable = false;
  slot->data = data;
  llc_->touch(*slot);
  return *slot;
}

// The core no longer holds `line` in any private cache: tell the directory,
// writing dirty data back into the LLC. Lines outside the directory
// (privatized data that was silently dropped) leave quietly.
void System::leave_private(uint32_t core, uint64_t line, bool dirty, const Line& data,
                           uint64_t* latency) {
  DirectoryEntry* e = dir_.find(line);
  if (!e || !e->has(core)) {
    if (dirty) llc_fill(line, true, data, latency);
    return;
  }
  count_dir_msg(line);  // PutS / PutE / PutM notice
  if (dirty) llc_fill(line, true, data, latency);
  e->remove(core);
  if (e->owner == static_cast<int>(core)) e->owner = -1;
  if (e->count() == 0) {
    dir_.drop(line);
  } else if (e->count() == 1 && e->state == DirState::Exclusive) {
    e->owner = static_cast<int>(__builtin_ctzll(e->sharers));
  }
}

void System::evict_way(SetAssocCache& cache, uint32_t core, CacheWay& w, uint64_t* latency) {
  if (w.ccache && !w.mergeable) {
    ++pinned_evictions_;
    raise(ErrorCode::Internal, "attempted eviction of a pinned privatized line");
  }
  uint64_t line = w.line;
  if (&cache == llc_.get()) {
    if (w.dirty) {
      write_memory_line(line, w.data);
      ++counters_.memory_accesses;  // buffered writeback, no latency charged
    }
    w.valid = false;
    return;
  }
  bool is_l1 = (&cache == l1_[core].get());
  if (is_l1) {
    w.valid = false;
    if (CacheWay* w2 = l2_[core]->find(line)) {
      if (w.dirty) {
        w2->data = w.data;
        w2->dirty = true;
        w2->mesi = w.mesi;
      }
      return;  // still held in L2
    }
    if (w.dirty) {
      // victim install into L2 keeps the core as holder
      fill(*l2_[core], core, line, w.mesi, true, w.data, latency);
      return;
    }
    leave_private(core, line, false, w.data, latency);
    return;
  }
  // L2 eviction
  w.valid = false;
  if (CacheWay* w1 = l1_[core]->find(line)) {
    // L1 data is at least as fresh; carry responsibility for dirtiness up
    if (w.dirty) w1->dirty = true;
    return;
  }
  leave_private(core, line, w.dirty, w.data, latency);
}

CacheWay& System::allocate_way(SetAssocCache& cache, uint32_t core, uint64_t line,
                               uint64_t* latency) {
  if (CacheWay* w = cache.free_way(line)) return *w;
  bool is_l1 = (&cache == l1_[core].get());
  auto evictable = [&](const CacheWay& w) {
    if (is_l1 && w.ccache && !w.mergeable) return false;  // pinned privatized line
    if (&cache == llc_.get() && locks_.locked(w.line)) return false;
    return true;
  };
  CacheWay* victim = cache.select_victim(line, evictable);
  if (!victim) {
    if (is_l1)
      raise(ErrorCode::SetPinned, cache.name() + " set " + std::to_string(cache.set_of(line)) +
                                      ": every way pinned by privatized lines");
    raise(ErrorCode::Internal, cache.name() + ": no evictable way");
  }
  if (victim->ccache && victim->mergeable) {
    // merge-on-evict: fold the line into the LLC, then reuse the slot
    uint64_t lat = do_merge_line(core, victim->line);
    if (latency) *latency += lat;
    if (victim->valid) evict_way(cache, core, *victim, latency);  // clean skip left it resident
    return *victim;
  }
  evict_way(cache, core, *victim, latency);
  return *victim;
}

void System::fill(SetAssocCache& cache, uint32_t core, uint64_t line, MesiState st, bool dirty,
                  const Line& data, uint64_t* latency) {
  if (CacheWay* w = cache.find(line)) {
    w->mesi = st;
    w->dirty = w->dirty || dirty;
    w->data = data;
    cache.touch(*w);
    return;
  }
  CacheWay& w = allocate_way(cache, core, line, latency);
  w.valid = true;
  w.line = line;
  w.mesi = st;
  w.dirty = dirty;
  w.ccache = false;
  w.mergeable = false;
  w.merge_type = 0;
  w.data = data;
  cache.touch(w);
}

// ------------------------------------------------------------- accesses --

void System::guard_not_in_merge_fn() const {
  for (bool f : in_merge_fn_)
    if (f)
      raise(ErrorCode::MergeFunctionOutOfBounds,
            "merge function touched state outside its merge registers");
}

AccessResult System::do_access(uint32_t core, uint64_t addr, bool is_store, WriteOp op,
                               uint64_t operand) {
  guard_not_in_merge_fn();
  if (core >= cfg_.core_count) raise(ErrorCode::BadConfig, "core id out of range");
  if (addr % kWordBytes != 0) raise(ErrorCode::BadConfig, "unaligned word access");
  if (in_cdata(addr))
    raise(ErrorCode::CoherentAccessToCData,
          "coherent " + std::string(is_store ? "store" : "load") + " to CData address " +
              std::to_string(addr));
  if (is_store)
    ++counters_.coherent_stores;
  else
    ++counters_.coherent_loads;

  const uint64_t line = line_of(addr);
  const unsigned word = word_of(addr);
  uint64_t latency = cfg_.l1.hit_latency_cycles;
  LevelHit served = LevelHit::L1;

  CacheWay* w1 = l1_[core]->find(line);
  if (w1) {
    ++counters_.l1.hits;
    if (w1->ccache) raise(ErrorCode::Internal, "privatized line outside a declared CData region");
    if (is_store && w1->mesi == MesiState::Shared) {
      // upgrade consults the directory at the LLC
      latency += cfg_.l2.hit_latency_cycles + cfg_.llc.hit_latency_cycles;
      upgrade_to_modified(core, line);
      w1->mesi = MesiState::Modified;
      if (CacheWay* w2 = l2_[core]->find(line)) w2->mesi = MesiState::Modified;
    } else if (is_store && w1->mesi == MesiState::Exclusive) {
      w1->mesi = MesiState::Modified;  // silent E->M
      if (CacheWay* w2 = l2_[core]->find(line)) w2->mesi = MesiState::Modified;
    }
  } else {
    ++counters_.l1.misses;
    latency += cfg_.l2.hit_latency_cycles;
    if (CacheWay* w2 = l2_[core]->find(line)) {
      ++counters_.l2.hits;
      served = LevelHit::L2;
      MesiState grant = w2->mesi;
      if (is_store) {
        if (grant == MesiState::Shared) {
          latency += cfg_.llc.hit_latency_cycles;
          upgrade_to_modified(core, line);
        }
        grant = MesiState::Modified;
        w2->mesi = MesiState::Modified;
      }
      l2_[core]->touch(*w2);
      Line data = w2->data;  // copy first: the L1 fill may evict into this L2 set
      fill(*l1_[core], core, line, grant, false, data, &latency);
      w1 = l1_[core]->find(line);
    } else {
      ++counters_.l2.misses;
      latency += cfg_.llc.hit_latency_cycles;
      served = LevelHit::LLC;
      count_dir_msg(line);  // GetS / GetM request
      CacheWay* lw = llc_->find(line);
      if (lw) {
        ++counters_.llc.hits;
        llc_->touch(*lw);
      } else {
        ++counters_.llc.misses;
      }
      DirectoryEntry* e = dir_.find(line);
      Line data;
      MesiState grant;
      if (!is_store) {
        if (e && e->state == DirState::Exclusive && e->owner != static_cast<int>(core)) {
          // owner intervention: freshest data lives in the owning core
          count_dir_msg(line);  // forward to owner
          auto owner = static_cast<uint32_t>(e->owner);
          CacheWay* ow1 = l1_[owner]->find(line);
          CacheWay* ow2 = l2_[owner]->find(line);
          if (!ow1 && !ow2) raise(ErrorCode::Internal, "directory owner holds no copy");
          bool dirty = (ow1 && ow1->dirty) || (ow2 && ow2->dirty);
          data = ow1 ? ow1->data : ow2->data;
          count_dir_msg(line);  // owner data reply
          llc_fill(line, dirty, data, nullptr);
          if (ow1) {
            ow1->mesi = MesiState::Shared;
            ow1->dirty = false;
          }
          if (ow2) {
            ow2->mesi = MesiState::Shared;
            ow2->dirty = false;
          }
          e->state = DirState::Shared;
          e->owner = -1;
          e->add(core);
          grant = MesiState::Shared;
        } else {
          if (lw) {
            data = lw->data;
          } else {
            latency += cfg_.memory_latency_cycles;
            ++counters_.memory_accesses;
            served = LevelHit::Memory;
            data = memory_line(line);
            llc_fill(line, false, data, nullptr);
          }
          DirectoryEntry& en = dir_.get(line);
          if (en.count() == 0) {
            en.state = DirState::Exclusive;
            en.owner = static_cast<int>(core);
            grant = MesiState::Exclusive;
          } else {
            en.state = DirState::Shared;
            en.owner = -1;
            grant = MesiState::Shared;
          }
          en.add(core);
        }
      } else {
        Line fresh;
        bool from_owner = recall_and_invalidate(line, core, &fresh);
        if (from_owner) {
          data = fresh;
          llc_fill(line, true, data, nullptr);
        } else if (lw) {
          data = lw->data;
        } else {
          latency += cfg_.memory_latency_cycles;
          ++counters_.memory_accesses;
          served = LevelHit::Memory;
          data = memory_line(line);
          llc_fill(line, false, data, nullptr);
        }
        DirectoryEntry& en = dir_.get(line);
        en.state = DirState::Exclusive;
        en.owner = static_cast<int>(core);
        en.sharers = 0;
        en.add(core);
        grant = MesiState::Modified;
      }
      count_dir_msg(line);  // grant / data response
      fill(*l2_[core], core, line, grant, false, data, &latency);
      fill(*l1_[core], core, line, grant, false, data, &latency);
      w1 = l1_[core]->find(line);
    }
  }

  l1_[core]->touch(*w1);
  uint64_t old = w1->data.word(word);
  uint64_t result = old;
  if (is_store) {
    uint64_t next = operand;
    switch (op) {
      case WriteOp::Put:
        result = operand;
        break;
      case WriteOp::Or:
        next = old | operand;
        break;
      case WriteOp::Swap:
        break;  // result = old
      case WriteOp::None:
        raise(ErrorCode::Internal, "store without a write op");
    }
    w1->data.set_word(word, next);
    w1->dirty = true;
    w1->mesi = MesiState::Modified;
    shadow_store(addr, next);
  } else {
    shadow_check(addr, old);
  }
  charge(core, latency);
  return {latency, served, result};
}

AccessResult System::access(uint32_t core, uint64_t addr, AccessKind kind, uint64_t store_value) {
  bool is_store = kind == AccessKind::Store;
  return do_access(core, addr, is_store, is_store ? WriteOp::Put : WriteOp::None, store_value);
}

AccessResult System::amo_swap(uint32_t core, uint64_t addr, uint64_t value) {
  return do_access(core, addr, true, WriteOp::Swap, value);
}

AccessResult System::amo_or(uint32_t core, uint64_t addr, uint64_t bits) {
  return do_access(core, addr, true, WriteOp::Or, bits);
}

// ----------------------------------------------------------------- time --

void System::tick(uint32_t core, uint64_t cycles) {
  guard_not_in_merge_fn();
  charge(core, cycles);
}

uint64_t System::max_cycles() const {
  uint64_t m = 0;
  for (uint64_t c : clock_) m = std::max(m, c);
  return m;
}

void System::sync_cores_to_max() {
  uint64_t m = max_cycles();
  for (uint32_t c = 0; c < cfg_.core_count; ++c) {
    idle_[c] += m - clock_[c];
    clock_[c] = m;
  }
}

// ------------------------------------------------------------ invariants --

void System::check_coherence_invariants() const {
  // gather every privately held line, its effective per-core state
  struct Holder {
    uint32_t core;
    MesiState st;
    bool ccache;
  };
  std::unordered_map<uint64_t, std::vector<Holder>> held;
  for (uint32_t c = 0; c < cfg_.core_count; ++c) {
    for (const auto& w : l1_[c]->all_ways())
      if (w.valid) held[w.line].push_back({c, w.mesi, w.ccache});
    for (const auto& w : l2_[c]->all_ways()) {
      if (!w.valid) continue;
      if (w.ccache) raise(ErrorCode::Internal, "privatized line resident in L2");
      if (!l1_[c]->find(w.line)) held[w.line].push_back({c, w.mesi, false});
    }
  }
  for (const auto& [line, holders] : held) {
    uint32_t exclusive_holders = 0;
    bool any_cdata = false, any_coherent = false;
    for (const auto& h : holders) {
      if (h.ccache) {
        any_cdata = true;
        continue;
      }
      any_coherent = true;
      if (h.st == MesiState::Modified || h.st == MesiState::Exclusive) ++exclusive_holders;
    }
    if (any_cdata && any_coherent)
      raise(ErrorCode::Internal, "line both privatized and coherently cached");
    uint32_t coherent_count = 0;
    for (const auto& h : holders)
      if (!h.ccache) ++coherent_count;
    if (exclusive_holders > 1 || (exclusive_holders == 1 && coherent_count > 1))
      raise(ErrorCode::Internal, "SWMR violated for line " + std::to_string(line));
    const DirectoryEntry* e = dir_.find(line);
    if (any_cdata && e)
      raise(ErrorCode::Internal, "privatized line present in the directory");
    if (any_coherent) {
      if (!e) raise(ErrorCode::Internal, "coherent private line missing from directory");
      uint64_t mask = 0;
      for (const auto& h : holders)
        if (!h.ccache) mask |= uint64_t(1) << h.core;
      if (mask != e->sharers)
        raise(ErrorCode::Internal, "directory sharer set mismatch for line " + std::to_string(line));
      if (e->state == DirState::Exclusive &&
          (e->owner < 0 || e->count() != 1 || !e->has(static_cast<uint32_t>(e->owner))))
        raise(ErrorCode::Internal, "directory exclusive entry malformed");
      if ((e->state == DirState::Exclusive) != (exclusive_holders == 1))
        raise(ErrorCode::Internal, "directory state disagrees with cache states");
    }
  }
  for (const auto& [line, e] : dir_.snapshot()) {
    if (e.count() == 0) raise(ErrorCode::Internal, "empty directory entry not dropped");
    if (!held.count(line))
      raise(ErrorCode::Internal, "directory tracks a line no core holds");
  }
  if (counters_.cdata_directory_messages != 0 || counters_.cdata_invalidation_messages != 0)
    raise(ErrorCode::Internal, "coherence traffic attributed to CData addresses");
}

void System::check_privatization_invariants() const {
  for (uint32_t c = 0; c < cfg_.core_count; ++c) {
    uint32_t cdata_lines = 0;
    for (const auto& w : l1_[c]->all_ways()) {
      if (!w.valid) continue;
      if (w.mergeable && !w.ccache)
        raise(ErrorCode::Internal, "mergeable bit set on a non-privatized line");
      if (!w.ccache) continue;
      ++cdata_lines;
      bool found = false;
      for (const auto& e : sb_[c]->entries())
        if (e.valid && e.line == w.line) found = true;
      if (!found)
        raise(ErrorCode::Internal,
              "privatized L1 line without a source-buffer entry on core " + std::to_string(c));
    }
    // counts equal + forward containment => the correspondence is a bijection
    if (cdata_lines != sb_[c]->valid_count())
      raise(ErrorCode::Internal,
            "source buffer and CCache-bit population differ on core " + std::to_string(c));
  }
}

}  // namespace ccsim
