#pragma once

#include <deque>
#include <vector>

#include "mcsim/arch.hpp"
#include "mcsim/csc.hpp"
#include "mcsim/memimg.hpp"
#include "mcsim/network.hpp"
#include "mcsim/program.hpp"
#include "mcsim/types.hpp"

namespace mcsim {

struct SpmvRegions {
  u32 col_ptr{0}, values{0}, row_idx{0}, x{0}, y{0};
};

inline SpmvRegions build_spmv_memory(MemoryImage& mem, const CscMatrix& m,
                                     const std::vector<float>& x) {
  if (x.size() != m.ncols) throw ProgramError("spmv: x vector must have N entries");
  SpmvRegions r;
  r.col_ptr = mem.add_region("col_ptr", m.ncols + 1);
  r.values = mem.add_region("values", std::max<u64>(m.nnz(), 1));
  r.row_idx = mem.add_region("row_idx", std::max<u64>(m.nnz(), 1));
  r.x = mem.add_region("x", m.ncols);
  r.y = mem.add_region("y", m.nrows);
  for (u64 j = 0; j <= m.ncols; ++j)
    mem.set_u32(mem.abs_addr(r.col_ptr, j), static_cast<u32>(m.col_ptr[j]));
  for (u64 i = 0; i < m.nnz(); ++i) {
    mem.set_f32(mem.abs_addr(r.values, i), m.values[i]);
    mem.set_u32(mem.abs_addr(r.row_idx, i), m.row_idx[i]);
  }
  for (u64 j = 0; j < m.ncols; ++j) mem.set_f32(mem.abs_addr(r.x, j), x[j]);
  return r;
}

inline std::vector<float> extract_spmv_result(const MemoryImage& mem, u32 y_region, u64 nrows) {
  std::vector<float> y(nrows);
  for (u64 r = 0; r < nrows; ++r) y[r] = mem.f32(mem.abs_addr(y_region, r));
  return y;
}

struct SpmvScheduleOptions {
  u64 stream_chunk_pairs{512};  // (value, index) pairs per DMA descriptor
  u64 stream_chunk_words{1024};  // col_ptr / x vector descriptor size
  u32 column_window{4};  // bounded column run-ahead; models the depth-8 input FIFOs
};

// Column-major streaming schedule. The DMA read channel carries the col_ptr
// control stream, the x vector and the interleaved (value, row) pairs; each
// nonempty column broadcasts x[j], then its pairs are dispatched to the
// owning cores (row mod p) for one FMA each into the core-local y partials.
// A final phase drains each core's owned rows to external memory.
inline Program build_spmv_schedule(const CscMatrix& m, const ArchConfig& cfg,
                                   const MemoryImage& mem, const SpmvRegions& regions,
                                   const SpmvScheduleOptions& opt = SpmvScheduleOptions{}) {
  const u32 p = cfg.num_cores;
  if (mem.region(regions.x).words != m.ncols || mem.region(regions.y).words != m.nrows)
    throw ProgramError("spmv: region size mismatch (x needs N words, y needs M words)");

  RowAssignment assign = assign_rows(m.nrows, p);
  for (u32 c = 0; c < p; ++c)
    if (assign.rows_per_core[c] > cfg.local_mem_words)
      throw ProgramError("spmv: y partials for core " + std::to_string(c) + " need " +
                         std::to_string(assign.rows_per_core[c]) +
                         " words > local_mem_words " + std::to_string(cfg.local_mem_words));

  Program prog;
  prog.meta = ProgramMeta{"spmv", m.ncols, 0, 0, 0, ""};

  std::vector<u32> y_buf(p, UINT32_MAX);
  for (u32 c = 0; c < p; ++c)
    if (assign.rows_per_core[c] > 0)
      y_buf[c] = prog.declare_buffer(c, "y", assign.rows_per_core[c]);

  std::vector<u32> all_cores(p);
  for (u32 c = 0; c < p; ++c) all_cores[c] = c;
  const u32 dests_all = prog.add_dests(all_cores);
  const u32 dma = dma_node(cfg);

  // control + operand streams (timing and traffic; consumed via chunk deps)
  auto stream = [&](u32 region, u64 words, u64 chunk) {
    std::vector<u32> ids;
    for (u64 off = 0; off < words; off += chunk) {
      const u64 len = std::min(chunk, words - off);
      Transaction& t = prog.add(TxnKind::DmaLoad, Resource{ResKind::DmaRead, 0});
      t.payload_words = len;
      t.run_first = prog.add_runs({Run{region, off, len}});
      t.run_count = 1;
      ids.push_back(t.id);
    }
    return ids;
  };
  stream(regions.col_ptr, m.ncols + 1, opt.stream_chunk_words);
  std::vector<u32> x_chunks = stream(regions.x, m.ncols, opt.stream_chunk_words);

  std::vector<u32> pair_chunks;
  for (u64 i0 = 0; i0 < m.nnz(); i0 += opt.stream_chunk_pairs) {
    const u64 len = std::min(opt.stream_chunk_pairs, m.nnz() - i0);
    Transaction& t = prog.add(TxnKind::DmaLoad, Resource{ResKind::DmaRead, 0});
    t.payload_words = 2 * len;
    t.run_first = prog.add_runs({Run{regions.values, i0, len}, Run{regions.row_idx, i0, len}});
    t.run_count = 2;
    pair_chunks.push_back(t.id);
  }

  std::vector<u32> last_fma(p, UINT32_MAX);
  std::deque<std::vector<u32>> recent_cols;  // fma ids of recent nonempty columns

  for (u64 j = 0; j < m.ncols; ++j) {
    const u64 i0 = m.col_ptr[j], i1 = m.col_ptr[j + 1];
    if (i0 == i1) continue;

    Transaction& xb = prog.add(TxnKind::Broadcast, Resource{ResKind::Network, 0});
    xb.payload_words = 1;
    xb.bcast_src = dma;
    xb.bcast_dest_first = dests_all;
    xb.bcast_dest_count = p;
    xb.dep_first = prog.add_deps({{x_chunks[j / opt.stream_chunk_words], DepKind::Completion}});
    xb.dep_count = 1;
    const u32 xb_id = xb.id;

    std::vector<Dep> dd;
    for (u64 ch = i0 / opt.stream_chunk_pairs; ch <= (i1 - 1) / opt.stream_chunk_pairs; ++ch)
      dd.push_back({pair_chunks[ch], DepKind::Completion});
    if (recent_cols.size() >= opt.column_window)
      for (u32 id : recent_cols[recent_cols.size() - opt.column_window])
        dd.push_back({id, DepKind::Completion});
    Transaction& disp = prog.add(TxnKind::Broadcast, Resource{ResKind::Network, 0});
    disp.payload_words = 2 * (i1 - i0);
    disp.bcast_src = dma;
    disp.bcast_dest_first = dests_all;
    disp.bcast_dest_count = p;
    disp.dep_first = prog.add_deps(dd);
    disp.dep_count = static_cast<u32>(dd.size());
    const u32 disp_id = disp.id;

    // group this column's nonzeros by owning core
    std::vector<u32> col_fmas;
    for (u32 c = 0; c < p; ++c) {
      const u32 first_pair = static_cast<u32>(prog.spmv_pairs.size());
      for (u64 i = i0; i < i1; ++i)
        if (assign.core_of(m.row_idx[i]) == c)
          prog.spmv_pairs.push_back(SpmvPair{static_cast<u32>(i),
                                             static_cast<u32>(assign.local_row(m.row_idx[i]))});
      const u32 cnt = static_cast<u32>(prog.spmv_pairs.size()) - first_pair;
      if (cnt == 0) continue;
      prog.fma_spmv.push_back(FmaSpmvAction{c, regions.x, j, regions.values, y_buf[c],
                                            first_pair, cnt});
      Transaction& fma = prog.add(TxnKind::ComputeFma, Resource{ResKind::Core, c});
      fma.n_fmas = cnt;
      fma.n_bursts = 1;
      fma.dep_first = prog.add_deps({{disp_id, DepKind::Completion}, {xb_id, DepKind::Completion}});
      fma.dep_count = 2;
      fma.action = ActionRef{ActionKind::FmaSpmv, static_cast<u32>(prog.fma_spmv.size() - 1)};
      last_fma[c] = fma.id;
      col_fmas.push_back(fma.id);
    }
    recent_cols.push_back(std::move(col_fmas));
    if (recent_cols.size() > opt.column_window) recent_cols.pop_front();
  }

  // drain each core's owned rows
  for (u32 c = 0; c < p; ++c) {
    if (y_buf[c] == UINT32_MAX) continue;
    Transaction& fwd = prog.add(TxnKind::Broadcast, Resource{ResKind::Network, 0});
    fwd.payload_words = assign.rows_per_core[c];
    fwd.bcast_src = c;
    fwd.bcast_dest_first = prog.add_dests({dma});
    fwd.bcast_dest_count = 1;
    if (last_fma[c] != UINT32_MAX) {
      fwd.dep_first = prog.add_deps({{last_fma[c], DepKind::Completion}});
      fwd.dep_count = 1;
    }
    const u32 fwd_id = fwd.id;

    std::vector<Run> yruns;
    for (u64 r = c; r < m.nrows; r += p) yruns.push_back(Run{regions.y, r, 1});
    const u32 run_first = prog.add_runs(yruns);
    prog.copy_to_region.push_back(
        CopyToRegionAction{c, y_buf[c], 0, run_first, static_cast<u32>(yruns.size())});
    Transaction& store = prog.add(TxnKind::DmaStore, Resource{ResKind::DmaWrite, 0});
    store.payload_words = assign.rows_per_core[c];
    store.run_first = run_first;
    store.run_count = static_cast<u32>(yruns.size());
    store.dep_first = prog.add_deps({{fwd_id, DepKind::Completion}});
    store.dep_count = 1;
    store.action = ActionRef{ActionKind::CopyToRegion,
                             static_cast<u32>(prog.copy_to_region.size() - 1)};
  }
  return prog;
}

}  // namespace mcsim
