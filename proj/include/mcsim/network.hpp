#pragma once

#include <algorithm>
#include <vector>

#include "mcsim/arch.hpp"
#include "mcsim/types.hpp"

namespace mcsim {

// Node ids: cores are 0..p-1; the DMA endpoint is node p.
inline u32 dma_node(const ArchConfig& cfg) { return cfg.num_cores; }

namespace detail {

inline u32 ring_distance(u32 src, u32 dst, u32 nodes) {
  // unidirectional ring, ascending node order
  return dst >= src ? dst - src : nodes - src + dst;
}

}  // namespace detail

// Cycles to move `words` from src to every node in `dests`.
//   bus:       words/link_width, all destinations served simultaneously
//   ring:      hop_latency * hop distance (farthest dest) + words/link_width,
//              links pipelined
//   crossbar / point-to-point: hop_latency + words/link_width; disjoint pairs
//              never contend
inline u64 network_delay(const ArchConfig& cfg, u32 src, const std::vector<u32>& dests,
                         u64 words) {
  const u32 nodes = cfg.num_cores + 1;
  if (src >= nodes) throw ProgramError("network: unknown source node " + std::to_string(src));
  for (u32 d : dests)
    if (d >= nodes) throw ProgramError("network: unknown destination node " + std::to_string(d));
  const u64 xfer = ceil_div(words, cfg.link_width_words);
  switch (cfg.interconnect) {
    case Interconnect::BusBroadcast:
      return xfer;
    case Interconnect::Ring: {
      u32 far = 0;
      for (u32 d : dests) far = std::max(far, detail::ring_distance(src, d, nodes));
      return static_cast<u64>(cfg.hop_latency_cycles) * far + xfer;
    }
    case Interconnect::Crossbar:
    case Interconnect::PointToPoint:
      return cfg.hop_latency_cycles + xfer;
  }
  return xfer;
}

}  // namespace mcsim
