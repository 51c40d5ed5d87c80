#pragma once

#include <string>
#include <vector>

#include "mcsim/types.hpp"

namespace mcsim {

enum class TxnKind : u8 { DmaLoad, DmaStore, Broadcast, ComputeFma, Barrier };

inline const char* to_string(TxnKind k) {
  switch (k) {
    case TxnKind::DmaLoad: return "dma_load";
    case TxnKind::DmaStore: return "dma_store";
    case TxnKind::Broadcast: return "broadcast";
    case TxnKind::ComputeFma: return "compute_fma";
    case TxnKind::Barrier: return "barrier";
  }
  return "?";
}

enum class ResKind : u8 { None, DmaRead, DmaWrite, Network, Core };

struct Resource {
  ResKind kind{ResKind::None};
  u32 index{0};  // core index when kind == Core

  bool operator==(const Resource&) const = default;
};

inline std::string to_string(const Resource& r) {
  switch (r.kind) {
    case ResKind::None: return "none";
    case ResKind::DmaRead: return "dma_read";
    case ResKind::DmaWrite: return "dma_write";
    case ResKind::Network: return "network";
    case ResKind::Core: return "core" + std::to_string(r.index);
  }
  return "?";
}

// A consumer may wait for a producer's whole payload or just its first word
// (the DMA forwards the requested word while the rest of the burst fills).
enum class DepKind : u8 { Completion, FirstWord };

struct Dep {
  u32 id;
  DepKind kind{DepKind::Completion};
};

// Contiguous span of words inside a memory region.
struct Run {
  u32 region;
  u64 offset;
  u64 words;
};

// ---- Functional actions -------------------------------------------------
// Actions are stored in typed pools on the Program; a transaction carries an
// (kind, index) reference. Word-level data movement happens here; timing is
// the engine's concern.

enum class ActionKind : u8 { None, CopyToLocal, CopyToRegion, FmaDense, FmaSpmv };

// Copies region words into core-local buffers (one entry per core for a
// B-piece forward; a single entry otherwise).
struct LocalCopyEntry {
  u32 core;
  u32 buffer;
  u64 buf_offset;
  u32 region;
  u64 region_offset;
  u64 words;
};

struct CopyToLocalAction {
  u32 first;  // into Program::copy_pool
  u32 count;
};

// Copies a local buffer back to region runs (row strips of C, or the owned
// rows of y).
struct CopyToRegionAction {
  u32 core;
  u32 buffer;
  u64 buf_offset;
  u32 first_run;  // into Transaction runs (the store's own address runs)
  u32 run_count;
};

// One dense partial-block step on one core: for each broadcast element
// a(r, kk) multiply the x-wide stored B row and accumulate into the local C
// block. Accumulation is k-ascending, then row-ascending -- the documented
// golden order.
struct FmaDenseAction {
  u32 core;
  u32 a_region;
  u64 a_base;    // region offset of a(r0, kc) in column-major storage
  u64 a_stride;  // words between consecutive A columns
  u32 z;         // columns in this piece
  u32 y;         // rows in this piece
  u32 x;         // stored B width
  u32 b_buffer;  // double-buffer slot holding z*x words
  u32 c_buffer;
  bool init;     // first partial product of the block: overwrite, not accumulate
};

// One column's worth of owned nonzeros on one core: y[r] += v * x[j].
struct SpmvPair {
  u32 value_offset;  // into the values region
  u32 local_row;
};

struct FmaSpmvAction {
  u32 core;
  u32 x_region;
  u64 x_offset;
  u32 values_region;
  u32 y_buffer;
  u32 first_pair;  // into Program::spmv_pairs
  u32 pair_count;
};

struct ActionRef {
  ActionKind kind{ActionKind::None};
  u32 index{0};
};

// ---- Transactions --------------------------------------------------------

struct Transaction {
  u32 id{0};
  TxnKind kind{TxnKind::Barrier};
  Resource res{};
  u64 payload_words{0};  // words moved (loads/stores/broadcasts)
  u64 n_fmas{0};         // ComputeFma only
  u32 n_bursts{1};       // back-to-back pipelined bursts within the txn
  u32 dep_first{0}, dep_count{0};  // into Program::deps
  u32 run_first{0}, run_count{0};  // into Program::runs (memory address runs)
  u32 bcast_src{0};                // Broadcast only
  u32 bcast_dest_first{0}, bcast_dest_count{0};  // into Program::bcast_dests
  ActionRef action{};
};

struct BufferDecl {
  u32 core;
  std::string name;
  u64 words;
};

struct ProgramMeta {
  std::string kernel;  // "dense", "spmv", ...
  u64 n{0};
  u64 x{0}, y{0}, z{0};
  std::string matrix_name;
};

// Dependency-ordered transaction list plus the pooled payloads. Ids are
// strictly ascending and every dependency points backwards, so id order is a
// topological order.
struct Program {
  std::vector<Transaction> txns;
  std::vector<Dep> deps;
  std::vector<Run> runs;
  std::vector<u32> bcast_dests;

  std::vector<LocalCopyEntry> copy_pool;
  std::vector<CopyToLocalAction> copy_to_local;
  std::vector<CopyToRegionAction> copy_to_region;
  std::vector<FmaDenseAction> fma_dense;
  std::vector<SpmvPair> spmv_pairs;
  std::vector<FmaSpmvAction> fma_spmv;

  std::vector<BufferDecl> buffers;
  ProgramMeta meta;

  u32 next_id() const { return static_cast<u32>(txns.size()); }

  Transaction& add(TxnKind kind, Resource res) {
    Transaction t;
    t.id = next_id();
    t.kind = kind;
    t.res = res;
    txns.push_back(t);
    return txns.back();
  }

  u32 add_deps(const std::vector<Dep>& ds) {
    u32 first = static_cast<u32>(deps.size());
    deps.insert(deps.end(), ds.begin(), ds.end());
    return first;
  }
  u32 add_runs(const std::vector<Run>& rs) {
    u32 first = static_cast<u32>(runs.size());
    runs.insert(runs.end(), rs.begin(), rs.end());
    return first;
  }
  u32 add_dests(const std::vector<u32>& ds) {
    u32 first = static_cast<u32>(bcast_dests.size());
    bcast_dests.insert(bcast_dests.end(), ds.begin(), ds.end());
    return first;
  }

  u32 declare_buffer(u32 core, const std::string& name, u64 words) {
    buffers.push_back(BufferDecl{core, name, words});
    return static_cast<u32>(buffers.size() - 1);
  }
};

}  // namespace mcsim
