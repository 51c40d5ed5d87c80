#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "mcsim/arch.hpp"
#include "mcsim/golden.hpp"
#include "mcsim/memimg.hpp"
#include "mcsim/program.hpp"
#include "mcsim/types.hpp"

namespace mcsim {

// Tile choice for the blocked kernel: each core holds a y*x block of C and a
// doubled z*x buffer of B, so 2zx + xy <= L.
struct BlockPlan {
  u64 x{1};
  u64 y{1};
  u64 z{1};
  u32 p{1};
  u64 local_mem_words{0};
  u64 n{0};

  u64 footprint_words() const { return 2 * z * x + x * y; }
};

struct RealBlockOptimum {
  double x;
  double y;
};

// Continuous minimizer of external traffic for local memory L and p cores:
// y = sqrt(pL), x = L / (2 + sqrt(pL)).
inline RealBlockOptimum eq2_real_optimum(u64 local_mem_words, u32 p) {
  const double s = std::sqrt(static_cast<double>(p) * static_cast<double>(local_mem_words));
  return RealBlockOptimum{static_cast<double>(local_mem_words) / (2.0 + s), s};
}

struct TrafficPrediction {
  u64 reads_a{0};
  u64 reads_b{0};
  u64 writes_c{0};

  u64 total() const { return reads_a + reads_b + writes_c; }
  bool operator==(const TrafficPrediction&) const = default;
};

// Closed form for the generated schedule's external traffic. Validated
// against the simulator's instrumented counts, which it must match exactly.
inline TrafficPrediction predict_traffic(const BlockPlan& plan) {
  const u64 n3 = plan.n * plan.n * plan.n;
  return TrafficPrediction{n3 / (plan.x * plan.p), n3 / plan.y, plan.n * plan.n};
}

namespace detail {

inline std::vector<u64> divisors(u64 n) {
  std::vector<u64> d;
  for (u64 i = 1; i * i <= n; ++i)
    if (n % i == 0) {
      d.push_back(i);
      if (i != n / i) d.push_back(n / i);
    }
  std::sort(d.begin(), d.end());
  return d;
}

}  // namespace detail

// Integer plan: enumerates divisor pairs (y | n, x | n/p) that fit local
// memory and keeps the traffic minimizer; ties go to the larger y (the
// continuous optimum grows y before x). z is fixed at 1, which leaves the
// traffic unchanged and minimizes the B buffer.
inline BlockPlan plan_blocks(u64 local_mem_words, u32 p, u64 n) {
  if (local_mem_words < 4 || p < 1 || n < 1)
    throw PlanError("plan_blocks: require L >= 4, p >= 1, n >= 1");
  if (n < p)
    throw PlanError("infeasible plan: n < x*p for every x >= 1 (n=" + std::to_string(n) +
                    ", p=" + std::to_string(p) + ")");
  if (n % p != 0)
    throw PlanError("infeasible plan: num_cores (" + std::to_string(p) +
                    ") must divide n (" + std::to_string(n) + ")");
  const u64 q = n / p;
  const std::vector<u64> ys = detail::divisors(n);
  const std::vector<u64> xs = detail::divisors(q);

  std::optional<BlockPlan> best;
  auto better = [&](const BlockPlan& a, const BlockPlan& b) {
    // compare 1/(x p) + 1/y as exact fractions
    const u64 an = a.y + a.x * p, ad = a.x * p * a.y;
    const u64 bn = b.y + b.x * p, bd = b.x * p * b.y;
    if (an * bd != bn * ad) return an * bd < bn * ad;
    return a.y > b.y;
  };
  for (u64 y : ys) {
    u64 x_best = 0;
    for (u64 x : xs)
      if (x * (2 + y) <= local_mem_words) x_best = std::max(x_best, x);
    if (x_best == 0) continue;
    BlockPlan cand{x_best, y, 1, p, local_mem_words, n};
    if (!best || better(cand, *best)) best = cand;
  }
  if (!best)
    throw PlanError("infeasible plan: no integer (x, y) fits local_mem_words=" +
                    std::to_string(local_mem_words));
  return *best;
}

// Lays out the operands for the dense kernel. A is stored column-major so the
// per-step column pieces stream as contiguous bursts; B and C are row-major.
struct DenseRegions {
  u32 a{0}, b{0}, c{0};
};

inline DenseRegions build_dense_memory(MemoryImage& mem, const DenseMatrix& a,
                                       const DenseMatrix& b) {
  if (a.nrows != a.ncols || b.nrows != b.ncols || a.nrows != b.nrows)
    throw ProgramError("dense kernel expects square matrices of equal size");
  const u64 n = a.nrows;
  DenseRegions r;
  r.a = mem.add_region("A", n * n, Layout::ColMajor, n, n);
  r.b = mem.add_region("B", n * n, Layout::RowMajor, n, n);
  r.c = mem.add_region("C", n * n, Layout::RowMajor, n, n);
  for (u64 row = 0; row < n; ++row)
    for (u64 col = 0; col < n; ++col) {
      mem.set_f32(mem.abs_addr(r.a, col * n + row), a.at(row, col));
      mem.set_f32(mem.abs_addr(r.b, row * n + col), b.at(row, col));
    }
  return r;
}

inline DenseMatrix extract_dense_result(const MemoryImage& mem, u32 region, u64 n) {
  DenseMatrix c;
  c.nrows = c.ncols = n;
  c.values.resize(n * n);
  for (u64 i = 0; i < n * n; ++i) c.values[i] = mem.f32(mem.abs_addr(region, i));
  return c;
}

struct DenseScheduleOptions {
  // Broadcast elements are consumed in batches of the per-core input buffer
  // depth; each batch is one pipelined FMA burst.
  u32 batch_words{8};
};

// Emits the blocked schedule: per y * x*p strip of C, a sequence of n/z
// partial steps. Each step prefetches the next B piece into the doubled
// buffer, broadcasts the A piece to all cores, and runs one multiply-
// accumulate transaction per core; the final step's C blocks drain through
// the network to the write channel.
inline Program build_dense_schedule(const BlockPlan& plan, const ArchConfig& cfg,
                                    const MemoryImage& mem, const DenseRegions& regions,
                                    const DenseScheduleOptions& opt = DenseScheduleOptions{}) {
  const u64 n = plan.n, x = plan.x, y = plan.y, z = plan.z;
  const u32 p = plan.p;
  if (cfg.num_cores != p) throw ProgramError("plan/config mismatch: core counts differ");
  if (n % z != 0 || n % y != 0 || n % (x * p) != 0)
    throw ProgramError("plan/region mismatch: n must be divisible by z, y and x*p");
  if (plan.footprint_words() > cfg.local_mem_words)
    throw ProgramError("plan/region mismatch: footprint exceeds local memory");
  for (u32 reg : {regions.a, regions.b, regions.c})
    if (mem.region(reg).words != n * n)
      throw ProgramError("plan/region mismatch: regions must hold n*n words");
  if (mem.region(regions.a).layout != Layout::ColMajor)
    throw ProgramError("plan/region mismatch: A region must be column-major");

  Program prog;
  prog.meta = ProgramMeta{"dense", n, x, y, z, ""};

  std::vector<u32> b_buf[2];
  std::vector<u32> c_buf(p);
  b_buf[0].resize(p);
  b_buf[1].resize(p);
  for (u32 c = 0; c < p; ++c) {
    b_buf[0][c] = prog.declare_buffer(c, "b0", z * x);
    b_buf[1][c] = prog.declare_buffer(c, "b1", z * x);
    c_buf[c] = prog.declare_buffer(c, "c", y * x);
  }

  std::vector<u32> all_cores(p);
  for (u32 c = 0; c < p; ++c) all_cores[c] = c;
  const u32 dests_all = prog.add_dests(all_cores);
  const u32 dma = dma_node(cfg);

  const u64 k0 = n / z;
  const u64 xp = x * p;
  const u64 groups = n / xp;
  const u64 iblocks = n / y;

  u64 gk = 0;  // global step counter; B slot parity follows it
  std::optional<u32> sync_prev1, sync_prev2;
  std::vector<std::optional<u32>> c_drained(p);

  for (u64 g = 0; g < groups; ++g) {
    for (u64 ib = 0; ib < iblocks; ++ib) {
      std::vector<u32> last_fma(p);
      for (u64 k = 0; k < k0; ++k, ++gk) {
        const u32 slot = static_cast<u32>(gk % 2);
        const u64 krow = k * z;

        // fetch the B piece (z rows of the group's column range)
        std::vector<Run> bruns;
        for (u64 kk = 0; kk < z; ++kk)
          bruns.push_back(Run{regions.b, (krow + kk) * n + g * xp, xp});
        Transaction& dmab = prog.add(TxnKind::DmaLoad, Resource{ResKind::DmaRead, 0});
        dmab.payload_words = z * xp;
        dmab.run_first = prog.add_runs(bruns);
        dmab.run_count = static_cast<u32>(bruns.size());
        const u32 dmab_id = dmab.id;

        // forward it to the doubled per-core buffers
        std::vector<Dep> fwd_deps{{dmab_id, DepKind::Completion}};
        if (sync_prev2) fwd_deps.push_back({*sync_prev2, DepKind::Completion});
        u32 copy_first = static_cast<u32>(prog.copy_pool.size());
        for (u32 c = 0; c < p; ++c)
          for (u64 kk = 0; kk < z; ++kk)
            prog.copy_pool.push_back(LocalCopyEntry{c, b_buf[slot][c], kk * x, regions.b,
                                                    (krow + kk) * n + g * xp + c * x, x});
        prog.copy_to_local.push_back(CopyToLocalAction{copy_first, static_cast<u32>(p * z)});
        Transaction& fwdb = prog.add(TxnKind::Broadcast, Resource{ResKind::Network, 0});
        fwdb.payload_words = z * xp;
        fwdb.bcast_src = dma;
        fwdb.bcast_dest_first = dests_all;
        fwdb.bcast_dest_count = p;
        fwdb.dep_first = prog.add_deps(fwd_deps);
        fwdb.dep_count = static_cast<u32>(fwd_deps.size());
        fwdb.action = ActionRef{ActionKind::CopyToLocal,
                                static_cast<u32>(prog.copy_to_local.size() - 1)};
        const u32 fwdb_id = fwdb.id;

        // fetch the A piece (z columns of this row block; column-major)
        std::vector<Run> aruns;
        for (u64 kk = 0; kk < z; ++kk)
          aruns.push_back(Run{regions.a, (krow + kk) * n + ib * y, y});
        Transaction& dmaa = prog.add(TxnKind::DmaLoad, Resource{ResKind::DmaRead, 0});
        dmaa.payload_words = z * y;
        dmaa.run_first = prog.add_runs(aruns);
        dmaa.run_count = static_cast<u32>(aruns.size());
        const u32 dmaa_id = dmaa.id;

        // broadcast it; cores must have drained the previous step first
        std::vector<Dep> bc_deps{{dmaa_id, DepKind::Completion}};
        if (sync_prev1) bc_deps.push_back({*sync_prev1, DepKind::Completion});
        Transaction& bcast = prog.add(TxnKind::Broadcast, Resource{ResKind::Network, 0});
        bcast.payload_words = z * y;
        bcast.bcast_src = dma;
        bcast.bcast_dest_first = dests_all;
        bcast.bcast_dest_count = p;
        bcast.dep_first = prog.add_deps(bc_deps);
        bcast.dep_count = static_cast<u32>(bc_deps.size());
        const u32 bcast_id = bcast.id;

        // one multiply-accumulate transaction per core for this step
        std::vector<Dep> sync_deps;
        for (u32 c = 0; c < p; ++c) {
          prog.fma_dense.push_back(FmaDenseAction{c, regions.a, krow * n + ib * y, n,
                                                  static_cast<u32>(z), static_cast<u32>(y),
                                                  static_cast<u32>(x), b_buf[slot][c], c_buf[c],
                                                  k == 0});
          Transaction& fma = prog.add(TxnKind::ComputeFma, Resource{ResKind::Core, c});
          fma.n_fmas = z * y * x;
          fma.n_bursts = static_cast<u32>(ceil_div(z * y, opt.batch_words));
          std::vector<Dep> fd{{bcast_id, DepKind::Completion}, {fwdb_id, DepKind::Completion}};
          if (k == 0 && c_drained[c]) fd.push_back({*c_drained[c], DepKind::Completion});
          fma.dep_first = prog.add_deps(fd);
          fma.dep_count = static_cast<u32>(fd.size());
          fma.action = ActionRef{ActionKind::FmaDense,
                                 static_cast<u32>(prog.fma_dense.size() - 1)};
          last_fma[c] = fma.id;
          sync_deps.push_back({fma.id, DepKind::Completion});
        }
        Transaction& sync = prog.add(TxnKind::Barrier, Resource{ResKind::None, 0});
        sync.dep_first = prog.add_deps(sync_deps);
        sync.dep_count = static_cast<u32>(sync_deps.size());
        sync_prev2 = sync_prev1;
        sync_prev1 = sync.id;
      }

      // drain the finished C blocks: core -> network -> write channel
      for (u32 c = 0; c < p; ++c) {
        Transaction& fwdc = prog.add(TxnKind::Broadcast, Resource{ResKind::Network, 0});
        fwdc.payload_words = y * x;
        fwdc.bcast_src = c;
        fwdc.bcast_dest_first = prog.add_dests({dma});
        fwdc.bcast_dest_count = 1;
        fwdc.dep_first = prog.add_deps({{last_fma[c], DepKind::Completion}});
        fwdc.dep_count = 1;
        const u32 fwdc_id = fwdc.id;

        std::vector<Run> cruns;
        for (u64 r = 0; r < y; ++r)
          cruns.push_back(Run{regions.c, (ib * y + r) * n + g * xp + c * x, x});
        const u32 run_first = prog.add_runs(cruns);
        prog.copy_to_region.push_back(
            CopyToRegionAction{c, c_buf[c], 0, run_first, static_cast<u32>(y)});
        Transaction& store = prog.add(TxnKind::DmaStore, Resource{ResKind::DmaWrite, 0});
        store.payload_words = y * x;
        store.run_first = run_first;
        store.run_count = static_cast<u32>(y);
        store.dep_first = prog.add_deps({{fwdc_id, DepKind::Completion}});
        store.dep_count = 1;
        store.action = ActionRef{ActionKind::CopyToRegion,
                                 static_cast<u32>(prog.copy_to_region.size() - 1)};
        c_drained[c] = fwdc_id;
      }
    }
  }
  return prog;
}

}  // namespace mcsim
