#include "ccsim/cache.hpp"

namespace ccsim {

SetAssocCache::SetAssocCache(std::string name, const LevelConfig& cfg)
    : name_(std::move(name)), sets_(cfg.num_sets()), ways_(cfg.ways) {
  slots_.resize(sets_ * ways_);
}

CacheWay* SetAssocCache::find(uint64_t line) {
  for (auto& w : set_ways(set_of(line)))
    if (w.valid && w.line == line) return &w;
  return nullptr;
}

const CacheWay* SetAssocCache::find(uint64_t line) const {
  for (const auto& w : set_ways(set_of(line)))
    if (w.valid && w.line == line) return &w;
  return nullptr;
}

CacheWay* SetAssocCache::free_way(uint64_t line) {
  for (auto& w : set_ways(set_of(line)))
    if (!w.valid) return &w;
  return nullptr;
}

CacheWay* SetAssocCache::select_victim(uint64_t line,
                                       const std::function<bool(const CacheWay&)>& evictable) {
  CacheWay* victim = nullptr;
  for (auto& w : set_ways(set_of(line))) {
    if (!w.valid || !evictable(w)) continue;
    if (!victim || w.lru < victim->lru) victim = &w;
  }
  return victim;
}

}  // namespace ccsim
