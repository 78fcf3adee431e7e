#include "ccsim/directory.hpp"

#include <algorithm>

namespace ccsim {

std::vector<std::pair<uint64_t, DirectoryEntry>> Directory::snapshot() const {
  std::vector<std::pair<uint64_t, DirectoryEntry>> out(map_.begin(), map_.end());
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

}  // namespace ccsim
