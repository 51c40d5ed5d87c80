#pragma once

#include <cmath>
#include <vector>

#include "mcsim/csc.hpp"
#include "mcsim/memimg.hpp"
#include "mcsim/program.hpp"
#include "mcsim/sim.hpp"
#include "mcsim/types.hpp"

namespace mcsim {

struct DenseMatrix {
  u64 nrows{0};
  u64 ncols{0};
  std::vector<float> values;  // row-major

  float at(u64 r, u64 c) const { return values[r * ncols + c]; }
  float& at(u64 r, u64 c) { return values[r * ncols + c]; }
};

// Naive triple loop, single precision, k-ascending accumulation with fused
// multiply-add. This order is the documented golden order, so schedules that
// accumulate k-ascending compare bit-for-bit.
inline DenseMatrix matmul_ref(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.ncols != b.nrows) throw ProgramError("matmul_ref: dimension mismatch");
  DenseMatrix c;
  c.nrows = a.nrows;
  c.ncols = b.ncols;
  c.values.assign(a.nrows * b.ncols, 0.0f);
  for (u64 i = 0; i < a.nrows; ++i)
    for (u64 k = 0; k < a.ncols; ++k) {
      const float av = a.at(i, k);
      for (u64 j = 0; j < b.ncols; ++j)
        c.at(i, j) = std::fmaf(av, b.at(k, j), c.at(i, j));
    }
  return c;
}

// Column-major accumulation: j ascending, then within-column order.
inline std::vector<float> spmv_ref(const CscMatrix& a, const std::vector<float>& x) {
  if (x.size() != a.ncols) throw ProgramError("spmv_ref: dimension mismatch");
  std::vector<float> y(a.nrows, 0.0f);
  for (u64 j = 0; j < a.ncols; ++j) {
    const float xj = x[j];
    for (u64 i = a.col_ptr[j]; i < a.col_ptr[j + 1]; ++i)
      y[a.row_idx[i]] = std::fmaf(a.values[i], xj, y[a.row_idx[i]]);
  }
  return y;
}

// Order-exact functional replay: runs only the functional actions, in id
// order (ids are a topological order by construction). The simulator's result
// regions must match this bit for bit.
inline MemoryImage replay_ref(const Program& prog, const ArchConfig& cfg, MemoryImage mem) {
  detail::validate_program(prog, cfg, mem);
  detail::LocalBuffers locals;
  locals.bufs.resize(prog.buffers.size());
  for (std::size_t i = 0; i < prog.buffers.size(); ++i)
    locals.bufs[i].assign(prog.buffers[i].words, 0.0f);
  for (const Transaction& t : prog.txns) detail::execute_action(prog, t, mem, locals);
  return mem;
}

}  // namespace mcsim
