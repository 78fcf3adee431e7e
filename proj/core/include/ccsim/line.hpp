#ifndef CCSIM_LINE_HPP
#define CCSIM_LINE_HPP

#include <array>
#include <bit>
#include <cstdint>
#include <cstddef>

namespace ccsim {

inline constexpr uint64_t kLineBytes = 64;
inline constexpr uint64_t kWordBytes = 8;
inline constexpr uint64_t kWordsPerLine = kLineBytes / kWordBytes;

// A 64-byte cache line, addressed as eight 64-bit words. All data paths in
// the simulator (caches, source buffers, merge registers, backing memory)
// move data at this granularity.
struct Line {
  std::array<uint64_t, kWordsPerLine> w{};

  uint64_t word(unsigned i) const { return w[i]; }
  void set_word(unsigned i, uint64_t v) { w[i] = v; }

  double fword(unsigned i) const { return std::bit_cast<double>(w[i]); }
  void set_fword(unsigned i, double v) { w[i] = std::bit_cast<uint64_t>(v); }

  bool operator==(const Line&) const = default;
};

enum class MesiState : uint8_t { Invalid, Shared, Exclusive, Modified };

inline const char* to_string(MesiState s) {
  switch (s) {
    case MesiState::Invalid: return "I";
    case MesiState::Shared: return "S";
    case MesiState::Exclusive: return "E";
    case MesiState::Modified: return "M";
  }
  return "?";
}

enum class AccessKind : uint8_t { Load, Store };

// Which level served an access (for latency attribution and tests).
enum class LevelHit : uint8_t { L1, L2, LLC, Memory };

inline const char* to_string(LevelHit l) {
  switch (l) {
    case LevelHit::L1: return "L1";
    case LevelHit::L2: return "L2";
    case LevelHit::LLC: return "LLC";
    case LevelHit::Memory: return "Memory";
  }
  return "?";
}

inline uint64_t line_of(uint64_t byte_addr) { return byte_addr / kLineBytes; }
inline uint64_t line_base(uint64_t byte_addr) { return byte_addr & ~(kLineBytes - 1); }
inline unsigned word_of(uint64_t byte_addr) {
  return static_cast<unsigned>((byte_addr / kWordBytes) % kWordsPerLine);
}

}  // namespace ccsim

#endif
