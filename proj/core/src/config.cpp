#include "ccsim/config.hpp"

#include <bit>
#include <fstream>
#include <sstream>

#include "ccsim/errors.hpp"

namespace ccsim {

namespace {

void validate_level(const char* name, const LevelConfig& lv) {
  if (lv.line_bytes != kLineBytes)
    raise(ErrorCode::BadConfig, std::string(name) + ": line size must be 64 bytes");
  if (lv.ways == 0 || lv.capacity_bytes == 0)
    raise(ErrorCode::BadConfig, std::string(name) + ": zero ways or capacity");
  if (lv.capacity_bytes % (uint64_t(lv.ways) * lv.line_bytes) != 0)
    raise(ErrorCode::BadConfig,
          std::string(name) + ": capacity not divisible by ways * line size");
  if (!std::has_single_bit(lv.num_sets()))
    raise(ErrorCode::BadConfig, std::string(name) + ": set count is not a power of two");
}

}  // namespace

void CacheConfig::validate() const {
  if (core_count == 0) raise(ErrorCode::BadConfig, "core_count must be positive");
  validate_level("l1", l1);
  validate_level("l2", l2);
  validate_level("llc", llc);
  if (sb_entries == 0) raise(ErrorCode::BadConfig, "sb_entries must be positive");
}

CacheConfig CacheConfig::desk_scale(uint32_t cores) {
  CacheConfig cfg;
  cfg.core_count = cores;
  cfg.l1.capacity_bytes = 8 * 1024;
  cfg.l2.capacity_bytes = 64 * 1024;
  cfg.llc.capacity_bytes = 256 * 1024;
  return cfg;
}

CacheConfig parse_cache_config(const std::string& text, CacheConfig cfg) {
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    auto eq = raw.find('=');
    if (eq == std::string::npos) {
      if (raw.find_first_not_of(" \t\r") != std::string::npos)
        raise(ErrorCode::BadConfig, "line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(raw.substr(0, eq));
    std::string val = trim(raw.substr(eq + 1));
    if (key.empty() || val.empty())
      raise(ErrorCode::BadConfig, "line " + std::to_string(lineno) + ": empty key or value");
    uint64_t n = 0;
    try {
      n = std::stoull(val);
    } catch (const std::exception&) {
      raise(ErrorCode::BadConfig, "line " + std::to_string(lineno) + ": bad number '" + val + "'");
    }
    if (key == "cores") cfg.core_count = static_cast<uint32_t>(n);
    else if (key == "memory.latency") cfg.memory_latency_cycles = static_cast<uint32_t>(n);
    else if (key == "l1.ways") cfg.l1.ways = static_cast<uint32_t>(n);
    else if (key == "l1.capacity") cfg.l1.capacity_bytes = n;
    else if (key == "l1.line") cfg.l1.line_bytes = static_cast<uint32_t>(n);
    else if (key == "l1.hit_latency") cfg.l1.hit_latency_cycles = static_cast<uint32_t>(n);
    else if (key == "l2.ways") cfg.l2.ways = static_cast<uint32_t>(n);
    else if (key == "l2.capacity") cfg.l2.capacity_bytes = n;
    else if (key == "l2.line") cfg.l2.line_bytes = static_cast<uint32_t>(n);
    else if (key == "l2.hit_latency") cfg.l2.hit_latency_cycles = static_cast<uint32_t>(n);
    else if (key == "llc.ways") cfg.llc.ways = static_cast<uint32_t>(n);
    else if (key == "llc.capacity") cfg.llc.capacity_bytes = n;
    else if (key == "llc.line") cfg.llc.line_bytes = static_cast<uint32_t>(n);
    else if (key == "llc.hit_latency") cfg.llc.hit_latency_cycles = static_cast<uint32_t>(n);
    else if (key == "sb.entries") cfg.sb_entries = static_cast<uint32_t>(n);
    else if (key == "sb.hit_latency") cfg.sb_hit_latency_cycles = static_cast<uint32_t>(n);
    else if (key == "merge.fixed_overhead") cfg.merge_fixed_overhead_cycles = static_cast<uint32_t>(n);
    else if (key == "merge.mreg_access") cfg.mreg_access_cycles = static_cast<uint32_t>(n);
    else raise(ErrorCode::BadConfig, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

CacheConfig load_cache_config(const std::string& path, CacheConfig cfg) {
  std::ifstream f(path);
  if (!f) raise(ErrorCode::Io, "cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_cache_config(ss.str(), cfg);
}

}  // namespace ccsim
