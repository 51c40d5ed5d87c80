#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <set>
#include <vector>

#include "mcsim/arch.hpp"
#include "mcsim/cache.hpp"
#include "mcsim/memimg.hpp"
#include "mcsim/network.hpp"
#include "mcsim/program.hpp"
#include "mcsim/types.hpp"

namespace mcsim {

struct TrafficCount {
  u64 words_read{0};
  u64 words_written{0};
  u64 cache_hits{0};
  u64 cache_misses{0};

  u64 total() const { return words_read + words_written; }
  double hit_rate() const {
    u64 acc = cache_hits + cache_misses;
    return acc ? static_cast<double>(cache_hits) / static_cast<double>(acc) : 0.0;
  }
  bool operator==(const TrafficCount&) const = default;
};

struct SimReport {
  u64 total_cycles{0};
  double wall_time_s{0.0};
  u64 flops{0};
  double gflops{0.0};
  double efficiency{0.0};
  TrafficCount traffic;
  std::map<std::string, u64> busy_cycles;
  MemoryImage memory;   // final state; result regions live here
  u64 result_hash{0};   // FNV over every region, for quick equality checks
};

// busy fraction of one resource over the whole run
inline double utilization(const SimReport& report, const std::string& resource) {
  if (report.total_cycles == 0) throw ProgramError("utilization: zero-length run");
  auto it = report.busy_cycles.find(resource);
  if (it == report.busy_cycles.end())
    throw ProgramError("utilization: unknown resource " + resource);
  return static_cast<double>(it->second) / static_cast<double>(report.total_cycles);
}

// mean busy fraction across all cores
inline double core_utilization(const SimReport& report, const ArchConfig& cfg) {
  if (report.total_cycles == 0) throw ProgramError("utilization: zero-length run");
  u64 busy = 0;
  for (u32 c = 0; c < cfg.num_cores; ++c) {
    auto it = report.busy_cycles.find("core" + std::to_string(c));
    if (it != report.busy_cycles.end()) busy += it->second;
  }
  return static_cast<double>(busy) /
         (static_cast<double>(report.total_cycles) * cfg.num_cores);
}

// Deterministic textual form; two identical runs serialize byte-identically.
inline std::string serialize_report(const SimReport& r) {
  char buf[128];
  std::string s;
  s += "total_cycles=" + std::to_string(r.total_cycles) + "\n";
  std::snprintf(buf, sizeof buf, "wall_time_s=%.12g\n", r.wall_time_s);
  s += buf;
  s += "flops=" + std::to_string(r.flops) + "\n";
  std::snprintf(buf, sizeof buf, "gflops=%.12g\nefficiency=%.12g\n", r.gflops, r.efficiency);
  s += buf;
  s += "words_read=" + std::to_string(r.traffic.words_read) + "\n";
  s += "words_written=" + std::to_string(r.traffic.words_written) + "\n";
  s += "cache_hits=" + std::to_string(r.traffic.cache_hits) + "\n";
  s += "cache_misses=" + std::to_string(r.traffic.cache_misses) + "\n";
  for (const auto& [k, v] : r.busy_cycles) s += "busy." + k + "=" + std::to_string(v) + "\n";
  s += "result_hash=" + std::to_string(r.result_hash) + "\n";
  return s;
}

struct SimOptions {
  std::ostream* trace{nullptr};  // CSV: id,kind,resource,start,end
};

namespace detail {

struct LocalBuffers {
  // buffer id -> storage; footprint per core is validated up front
  std::vector<std::vector<float>> bufs;
};

inline void validate_program(const Program& prog, const ArchConfig& cfg,
                             const MemoryImage& mem) {
  u64 loads = 0, stores = 0;
  for (u32 i = 0; i < prog.txns.size(); ++i) {
    const Transaction& t = prog.txns[i];
    if (t.id != i) throw ProgramError("transaction ids must be dense and ascending");
    for (u32 d = 0; d < t.dep_count; ++d) {
      const Dep& dep = prog.deps[t.dep_first + d];
      if (dep.id >= t.id)
        throw ProgramError("cyclic dependency at transaction " + std::to_string(t.id));
    }
    switch (t.kind) {
      case TxnKind::DmaLoad:
        if (t.res.kind != ResKind::DmaRead)
          throw ProgramError("transaction " + std::to_string(t.id) + ": DmaLoad must bind dma_read");
        ++loads;
        break;
      case TxnKind::DmaStore:
        if (t.res.kind != ResKind::DmaWrite)
          throw ProgramError("transaction " + std::to_string(t.id) + ": DmaStore must bind dma_write");
        ++stores;
        break;
      case TxnKind::Broadcast:
        if (t.res.kind != ResKind::Network)
          throw ProgramError("transaction " + std::to_string(t.id) + ": Broadcast must bind network");
        break;
      case TxnKind::ComputeFma:
        if (t.res.kind != ResKind::Core || t.res.index >= cfg.num_cores)
          throw ProgramError("transaction " + std::to_string(t.id) + ": ComputeFma must bind one core");
        break;
      case TxnKind::Barrier:
        break;
    }
    u64 run_words = 0;
    for (u32 ri = 0; ri < t.run_count; ++ri) {
      const Run& run = prog.runs[t.run_first + ri];
      if (run.region >= mem.num_regions() || !mem.in_region(run.region, run.offset, run.words))
        throw ProgramError("out-of-region access at transaction " + std::to_string(t.id));
      run_words += run.words;
    }
    if ((t.kind == TxnKind::DmaLoad || t.kind == TxnKind::DmaStore) &&
        run_words != t.payload_words)
      throw ProgramError("transaction " + std::to_string(t.id) +
                         ": payload does not match address runs");
  }
  // per-core footprint
  std::vector<u64> footprint(cfg.num_cores, 0);
  for (const BufferDecl& b : prog.buffers) {
    if (b.core >= cfg.num_cores)
      throw ProgramError("buffer '" + b.name + "' binds unknown core");
    footprint[b.core] += b.words;
  }
  for (u32 c = 0; c < cfg.num_cores; ++c)
    if (footprint[c] > cfg.local_mem_words)
      throw ProgramError("core-local buffer overflow on core " + std::to_string(c) + ": " +
                         std::to_string(footprint[c]) + " words > local_mem_words " +
                         std::to_string(cfg.local_mem_words));
  // every buffer read by an action should have an earlier writer
  std::vector<u32> first_writer(prog.buffers.size(), UINT32_MAX);
  for (const Transaction& t : prog.txns) {
    if (t.action.kind == ActionKind::CopyToLocal) {
      const CopyToLocalAction& a = prog.copy_to_local[t.action.index];
      for (u32 e = 0; e < a.count; ++e) {
        u32 buf = prog.copy_pool[a.first + e].buffer;
        first_writer[buf] = std::min(first_writer[buf], t.id);
      }
    }
  }
  for (const Transaction& t : prog.txns) {
    if (t.action.kind == ActionKind::FmaDense) {
      const FmaDenseAction& a = prog.fma_dense[t.action.index];
      if (first_writer[a.b_buffer] == UINT32_MAX || first_writer[a.b_buffer] >= t.id)
        throw ProgramError("transaction " + std::to_string(t.id) +
                           ": reads buffer never written");
    }
  }
}

inline void execute_action(const Program& prog, const Transaction& t, MemoryImage& mem,
                           LocalBuffers& locals) {
  switch (t.action.kind) {
    case ActionKind::None:
      return;
    case ActionKind::CopyToLocal: {
      const CopyToLocalAction& a = prog.copy_to_local[t.action.index];
      for (u32 e = 0; e < a.count; ++e) {
        const LocalCopyEntry& c = prog.copy_pool[a.first + e];
        std::vector<float>& dst = locals.bufs[c.buffer];
        const u64 base = mem.abs_addr(c.region, c.region_offset);
        for (u64 w = 0; w < c.words; ++w) dst[c.buf_offset + w] = mem.f32(base + w);
      }
      return;
    }
    case ActionKind::CopyToRegion: {
      const CopyToRegionAction& a = prog.copy_to_region[t.action.index];
      const std::vector<float>& src = locals.bufs[a.buffer];
      u64 off = a.buf_offset;
      for (u32 ri = 0; ri < a.run_count; ++ri) {
        const Run& run = prog.runs[a.first_run + ri];
        const u64 base = mem.abs_addr(run.region, run.offset);
        for (u64 w = 0; w < run.words; ++w) mem.set_f32(base + w, src[off++]);
      }
      return;
    }
    case ActionKind::FmaDense: {
      const FmaDenseAction& a = prog.fma_dense[t.action.index];
      const std::vector<float>& b = locals.bufs[a.b_buffer];
      std::vector<float>& c = locals.bufs[a.c_buffer];
      const u64 a_abs = mem.abs_addr(a.a_region, a.a_base);
      for (u32 kk = 0; kk < a.z; ++kk) {
        const u64 col = a_abs + static_cast<u64>(kk) * a.a_stride;
        const bool first = a.init && kk == 0;
        for (u32 r = 0; r < a.y; ++r) {
          const float av = mem.f32(col + r);
          float* crow = c.data() + static_cast<std::size_t>(r) * a.x;
          const float* brow = b.data() + static_cast<std::size_t>(kk) * a.x;
          if (first) {
            for (u32 cc = 0; cc < a.x; ++cc) crow[cc] = std::fmaf(av, brow[cc], 0.0f);
          } else {
            for (u32 cc = 0; cc < a.x; ++cc) crow[cc] = std::fmaf(av, brow[cc], crow[cc]);
          }
        }
      }
      return;
    }
    case ActionKind::FmaSpmv: {
      const FmaSpmvAction& a = prog.fma_spmv[t.action.index];
      std::vector<float>& y = locals.bufs[a.y_buffer];
      const float xj = mem.f32(mem.abs_addr(a.x_region, a.x_offset));
      const u64 vbase = mem.abs_addr(a.values_region, 0);
      for (u32 i = 0; i < a.pair_count; ++i) {
        const SpmvPair& pr = prog.spmv_pairs[a.first_pair + i];
        y[pr.local_row] = std::fmaf(mem.f32(vbase + pr.value_offset), xj, y[pr.local_row]);
      }
      return;
    }
  }
}

// Walks a load's address runs through the DMA cache. Returns misses; hit
// count is payload minus one access per missing line.
struct CacheWalk {
  u64 misses{0};
  u64 hits{0};
  bool first_access_miss{false};
};

inline CacheWalk walk_cache(DmaCacheState& cache, const Program& prog, const Transaction& t,
                            const MemoryImage& mem) {
  CacheWalk w;
  bool first = true;
  for (u32 ri = 0; ri < t.run_count; ++ri) {
    const Run& run = prog.runs[t.run_first + ri];
    u64 addr = mem.abs_addr(run.region, run.offset);
    u64 left = run.words;
    while (left > 0) {
      const bool hit = cache.access(addr);
      if (first) {
        w.first_access_miss = !hit;
        first = false;
      }
      // words sharing this line within the run are hits
      const u64 line_end = (addr / cache.line_words + 1) * cache.line_words;
      const u64 in_line = std::min<u64>(left, line_end - addr);
      if (hit) {
        w.hits += in_line;
      } else {
        w.misses += 1;
        w.hits += in_line - 1;
      }
      addr += in_line;
      left -= in_line;
    }
  }
  return w;
}

struct ResourceMap {
  u32 count{0};
  bool network_per_source{false};
  u32 p{0};

  explicit ResourceMap(const ArchConfig& cfg) {
    p = cfg.num_cores;
    network_per_source = cfg.interconnect == Interconnect::Crossbar ||
                         cfg.interconnect == Interconnect::PointToPoint;
    // 0 dma_read, 1 dma_write, 2..2+p-1 cores, then network port(s)
    count = 2 + p + (network_per_source ? p + 1 : 1);
  }
  std::optional<u32> index(const Transaction& t) const {
    switch (t.res.kind) {
      case ResKind::None: return std::nullopt;
      case ResKind::DmaRead: return 0;
      case ResKind::DmaWrite: return 1;
      case ResKind::Core: return 2 + t.res.index;
      case ResKind::Network: return 2 + p + (network_per_source ? t.bcast_src : 0);
    }
    return std::nullopt;
  }
};

}  // namespace detail

// Runs the program against the memory image. Functionally, result regions end
// up identical to replaying the actions in dependency order; timing follows
// the documented resource rules; identical inputs give bit-identical reports.
inline SimReport simulate(const Program& prog, const ArchConfig& cfg, MemoryImage mem,
                          const SimOptions& opt = SimOptions{}) {
  detail::validate_program(prog, cfg, mem);

  detail::LocalBuffers locals;
  locals.bufs.resize(prog.buffers.size());
  for (std::size_t i = 0; i < prog.buffers.size(); ++i)
    locals.bufs[i].assign(prog.buffers[i].words, 0.0f);

  DmaCacheState cache(cfg.dma);
  detail::ResourceMap rmap(cfg);

  const std::size_t n = prog.txns.size();
  std::vector<u32> remaining(n, 0);
  // reverse adjacency: per producer, (consumer, kind) pairs
  std::vector<std::vector<std::pair<u32, DepKind>>> dependents(n);
  std::vector<bool> wants_first_word(n, false);
  for (u32 i = 0; i < n; ++i) {
    const Transaction& t = prog.txns[i];
    remaining[i] = t.dep_count;
    for (u32 d = 0; d < t.dep_count; ++d) {
      const Dep& dep = prog.deps[t.dep_first + d];
      dependents[dep.id].push_back({i, dep.kind});
      if (dep.kind == DepKind::FirstWord) wants_first_word[dep.id] = true;
    }
  }

  enum class Ev : u8 { Complete, FirstWord };
  struct Event {
    u64 time;
    Ev kind;
    u32 txn;
    bool operator>(const Event& o) const {
      if (time != o.time) return time > o.time;
      if (kind != o.kind) return kind == Ev::FirstWord && o.kind == Ev::Complete;
      return txn > o.txn;
    }
  };
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> events;

  std::vector<bool> res_busy(rmap.count, false);
  std::vector<std::priority_queue<u32, std::vector<u32>, std::greater<u32>>> res_queue(rmap.count);

  SimReport report;
  u64 makespan = 0;
  u64 read_stream_end = 0;  // back-to-back descriptors keep the memory pipeline primed

  auto start_txn = [&](u32 id, u64 now) {
    const Transaction& t = prog.txns[id];
    detail::execute_action(prog, t, mem, locals);
    u64 duration = 0;
    u64 first_word = 0;
    switch (t.kind) {
      case TxnKind::DmaLoad: {
        detail::CacheWalk w = detail::walk_cache(cache, prog, t, mem);
        report.traffic.cache_misses += w.misses;
        report.traffic.cache_hits += w.hits;
        report.traffic.words_read += t.payload_words;
        const u64 burst = std::max<u64>(w.misses * cfg.dma.cacheline_words, t.payload_words);
        // first-word latency applies when the channel went idle; a queued
        // descriptor rides the still-streaming pipeline
        const bool stall = w.misses > 0 && (now > read_stream_end || now == 0);
        duration = (stall ? cfg.dma.mem_latency_cycles : 0) +
                   cycles_for_words(burst, cfg.dma.read_words_per_cycle);
        first_word = (stall && w.first_access_miss) ? cfg.dma.mem_latency_cycles + 1 : 1;
        read_stream_end = now + duration;
        break;
      }
      case TxnKind::DmaStore:
        report.traffic.words_written += t.payload_words;
        duration = cycles_for_words(t.payload_words, cfg.dma.write_words_per_cycle);
        first_word = duration;
        break;
      case TxnKind::Broadcast: {
        std::vector<u32> dests(prog.bcast_dests.begin() + t.bcast_dest_first,
                               prog.bcast_dests.begin() + t.bcast_dest_first + t.bcast_dest_count);
        duration = network_delay(cfg, t.bcast_src, dests, t.payload_words);
        const u64 xfer = ceil_div(t.payload_words, cfg.link_width_words);
        first_word = duration - xfer + 1;
        break;
      }
      case TxnKind::ComputeFma:
        report.flops += 2 * t.n_fmas;
        duration = t.n_fmas + static_cast<u64>(cfg.fma_latency_cycles - 1) * t.n_bursts;
        first_word = duration;
        break;
      case TxnKind::Barrier:
        break;
    }
    const u64 end = now + duration;
    makespan = std::max(makespan, end);
    if (auto ri = rmap.index(t)) {
      res_busy[*ri] = true;
      // one busy counter per serially-occupied server; crossbar-style
      // topologies have one port per source node
      std::string key = t.res.kind == ResKind::Network
                            ? (rmap.network_per_source ? "network" + std::to_string(t.bcast_src)
                                                       : "network")
                            : to_string(t.res);
      report.busy_cycles[key] += duration;
    }
    if (opt.trace)
      *opt.trace << id << ',' << to_string(t.kind) << ',' << to_string(t.res) << ',' << now
                 << ',' << end << '\n';
    if (wants_first_word[id]) events.push(Event{now + std::min(first_word, duration), Ev::FirstWord, id});
    events.push(Event{end, Ev::Complete, id});
  };

  std::set<u32> touched;  // resources to try after draining one timestamp

  auto make_ready = [&](u32 id, u64 now) {
    const Transaction& t = prog.txns[id];
    if (auto ri = rmap.index(t)) {
      res_queue[*ri].push(id);
      touched.insert(*ri);
    } else {
      start_txn(id, now);  // barrier: completes immediately
    }
  };

  // seed
  for (u32 i = 0; i < n; ++i)
    if (remaining[i] == 0) make_ready(i, 0);
  for (u32 ri : touched)
    if (!res_busy[ri] && !res_queue[ri].empty()) {
      u32 id = res_queue[ri].top();
      res_queue[ri].pop();
      start_txn(id, 0);
    }
  touched.clear();

  while (!events.empty()) {
    const u64 now = events.top().time;
    while (!events.empty() && events.top().time == now) {
      Event ev = events.top();
      events.pop();
      if (ev.kind == Ev::Complete) {
        if (auto ri = rmap.index(prog.txns[ev.txn])) {
          res_busy[*ri] = false;
          touched.insert(*ri);
        }
      }
      for (const auto& [dep_id, kind] : dependents[ev.txn]) {
        const bool satisfies = (ev.kind == Ev::Complete && kind == DepKind::Completion) ||
                               (ev.kind == Ev::FirstWord && kind == DepKind::FirstWord);
        if (satisfies && --remaining[dep_id] == 0) make_ready(dep_id, now);
      }
    }
    for (u32 ri : touched) {
      if (!res_busy[ri] && !res_queue[ri].empty()) {
        u32 id = res_queue[ri].top();
        res_queue[ri].pop();
        start_txn(id, now);
      }
    }
    touched.clear();
  }

  report.total_cycles = makespan;
  report.wall_time_s = static_cast<double>(makespan) / static_cast<double>(cfg.clock_hz);
  if (makespan > 0) {
    report.gflops = static_cast<double>(report.flops) / report.wall_time_s / 1e9;
    report.efficiency = static_cast<double>(report.flops) /
                        (2.0 * cfg.num_cores * static_cast<double>(makespan));
  }
  // canonical resource keys, present even when idle
  for (const char* k : {"dma_read", "dma_write"}) report.busy_cycles.emplace(k, 0);
  if (rmap.network_per_source)
    for (u32 s = 0; s <= cfg.num_cores; ++s)
      report.busy_cycles.emplace("network" + std::to_string(s), 0);
  else
    report.busy_cycles.emplace("network", 0);
  for (u32 c = 0; c < cfg.num_cores; ++c)
    report.busy_cycles.emplace("core" + std::to_string(c), 0);

  u64 h = 1469598103934665603ull;
  for (u32 r = 0; r < mem.num_regions(); ++r) {
    h ^= mem.region_hash(r);
    h *= 1099511628211ull;
  }
  report.result_hash = h;
  report.memory = std::move(mem);
  return report;
}

}  // namespace mcsim
