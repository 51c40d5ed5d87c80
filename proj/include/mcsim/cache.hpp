#pragma once

#include <deque>
#include <unordered_set>

#include "mcsim/arch.hpp"
#include "mcsim/types.hpp"

namespace mcsim {

// Fully-associative DMA cache with FIFO replacement. A hit never touches the
// replacement order; a miss installs the line at the FIFO tail, evicting the
// oldest line when full.
struct DmaCacheState {
  u32 capacity{16};
  u32 line_words{16};
  std::deque<u64> fifo;              // oldest tag at front
  std::unordered_set<u64> resident;  // same tags, for lookup

  explicit DmaCacheState(const DmaConfig& d = DmaConfig{})
      : capacity(d.cachelines), line_words(d.cacheline_words) {}

  u64 tag_of(u64 addr) const { return addr / line_words; }
  bool contains(u64 addr) const { return resident.count(tag_of(addr)) != 0; }

  // Returns true on hit; installs the line on miss.
  bool access(u64 addr) {
    const u64 tag = tag_of(addr);
    if (resident.count(tag)) return true;
    if (fifo.size() == capacity) {
      resident.erase(fifo.front());
      fifo.pop_front();
    }
    fifo.push_back(tag);
    resident.insert(tag);
    return false;
  }
};

struct CacheAccessResult {
  bool hit{false};
  u64 cycles{0};
};

// Single word access: hit costs 1 cycle; a miss pays the external-memory
// latency plus a full cacheline burst. The requested word itself becomes
// available at mem_latency + 1 (forwarded while the rest of the line fills).
inline CacheAccessResult cache_access(DmaCacheState& state, u64 addr, const DmaConfig& dma) {
  CacheAccessResult r;
  r.hit = state.access(addr);
  r.cycles = r.hit ? 1
                   : dma.mem_latency_cycles +
                         cycles_for_words(dma.cacheline_words, dma.read_words_per_cycle);
  return r;
}

}  // namespace mcsim
