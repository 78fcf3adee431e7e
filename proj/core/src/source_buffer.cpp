#include "ccsim/source_buffer.hpp"

#include <algorithm>

namespace ccsim {

std::vector<SourceBufferEntry*> SourceBuffer::in_insertion_order() {
  std::vector<SourceBufferEntry*> out;
  out.reserve(entries_.size());
  for (auto& e : entries_)
    if (e.valid) out.push_back(&e);
  std::sort(out.begin(), out.end(),
            [](const SourceBufferEntry* a, const SourceBufferEntry* b) {
              return a->order < b->order;
            });
  return out;
}

}  // namespace ccsim
