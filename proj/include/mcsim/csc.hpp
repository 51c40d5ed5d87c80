#pragma once

#include <algorithm>
#include <vector>

#include "mcsim/types.hpp"

namespace mcsim {

struct Triplet {
  u64 row;
  u64 col;
  float value;
};

struct TripletMatrix {
  u64 nrows{0};
  u64 ncols{0};
  std::vector<Triplet> entries;
};

// Compressed sparse column: three one-dimensional arrays. col_ptr is
// non-decreasing with col_ptr[0]=0 and col_ptr[N]=NNZ; row indices strictly
// increase within a column.
struct CscMatrix {
  u64 nrows{0};
  u64 ncols{0};
  std::vector<float> values;
  std::vector<u32> row_idx;
  std::vector<u64> col_ptr;  // ncols + 1

  u64 nnz() const { return values.size(); }
};

// Canonicalize triplets: duplicates summed, rows sorted within each column.
inline CscMatrix to_csc(const TripletMatrix& t) {
  for (const Triplet& e : t.entries)
    if (e.row >= t.nrows || e.col >= t.ncols)
      throw ProgramError("to_csc: index out of range (" + std::to_string(e.row) + "," +
                         std::to_string(e.col) + ")");
  std::vector<Triplet> s = t.entries;
  std::stable_sort(s.begin(), s.end(), [](const Triplet& a, const Triplet& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });
  CscMatrix m;
  m.nrows = t.nrows;
  m.ncols = t.ncols;
  m.col_ptr.assign(t.ncols + 1, 0);
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i + 1;
    float sum = s[i].value;
    while (j < s.size() && s[j].col == s[i].col && s[j].row == s[i].row) {
      sum += s[j].value;
      ++j;
    }
    m.values.push_back(sum);
    m.row_idx.push_back(static_cast<u32>(s[i].row));
    m.col_ptr[s[i].col + 1]++;
    i = j;
  }
  for (u64 c = 0; c < t.ncols; ++c) m.col_ptr[c + 1] += m.col_ptr[c];
  return m;
}

inline TripletMatrix triplets_of(const CscMatrix& m) {
  TripletMatrix t;
  t.nrows = m.nrows;
  t.ncols = m.ncols;
  for (u64 j = 0; j < m.ncols; ++j)
    for (u64 i = m.col_ptr[j]; i < m.col_ptr[j + 1]; ++i)
      t.entries.push_back(Triplet{m.row_idx[i], j, m.values[i]});
  return t;
}

// Round-robin row attribution: row i belongs to core i mod p.
struct RowAssignment {
  u32 p{1};
  u64 nrows{0};
  std::vector<u64> rows_per_core;
  std::vector<u64> nnz_per_core;

  u32 core_of(u64 row) const { return static_cast<u32>(row % p); }
  u64 local_row(u64 row) const { return row / p; }
};

inline RowAssignment assign_rows(u64 nrows, u32 p) {
  if (p < 1) throw ProgramError("assign_rows: p must be >= 1");
  RowAssignment a;
  a.p = p;
  a.nrows = nrows;
  a.rows_per_core.assign(p, 0);
  a.nnz_per_core.assign(p, 0);
  for (u32 c = 0; c < p; ++c) a.rows_per_core[c] = nrows / p + (c < nrows % p ? 1 : 0);
  return a;
}

inline RowAssignment assign_rows(const CscMatrix& m, u32 p) {
  RowAssignment a = assign_rows(m.nrows, p);
  for (u32 r : m.row_idx) a.nnz_per_core[r % p]++;
  return a;
}

struct LoadBalance {
  std::vector<double> fractions;
  double min_fraction{0};
  double max_fraction{0};
  double imbalance{0};  // max / mean
};

inline LoadBalance load_balance(const CscMatrix& m, const RowAssignment& a) {
  if (m.nnz() == 0) throw ProgramError("load_balance: no nonzeros");
  LoadBalance lb;
  lb.fractions.resize(a.p);
  const double total = static_cast<double>(m.nnz());
  std::vector<u64> counts(a.p, 0);
  for (u32 r : m.row_idx) counts[r % a.p]++;
  lb.min_fraction = 1.0;
  for (u32 c = 0; c < a.p; ++c) {
    lb.fractions[c] = counts[c] / total;
    lb.min_fraction = std::min(lb.min_fraction, lb.fractions[c]);
    lb.max_fraction = std::max(lb.max_fraction, lb.fractions[c]);
  }
  lb.imbalance = lb.max_fraction * a.p;
  return lb;
}

}  // namespace mcsim
