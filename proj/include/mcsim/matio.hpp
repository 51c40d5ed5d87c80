#pragma once

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "mcsim/csc.hpp"
#include "mcsim/golden.hpp"
#include "mcsim/types.hpp"

namespace mcsim {

// Pinned generator: splitmix64. Platform PRNGs differ; this one is spelled
// out so generated inputs are identical everywhere.
class SplitMix64 {
 public:
  explicit SplitMix64(u64 seed) : state_(seed) {}

  u64 next() {
    u64 z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // uniform in [0, bound)
  u64 below(u64 bound) { return bound ? next() % bound : 0; }
  // small exact-in-float integers, [-8, 8]
  float small_value() { return static_cast<float>(static_cast<i64>(below(17)) - 8); }
  // same but nonzero
  float small_nonzero() {
    i64 v = static_cast<i64>(below(16)) - 8;
    return static_cast<float>(v >= 0 ? v + 1 : v);
  }

 private:
  u64 state_;
};

inline DenseMatrix gen_dense(u64 n, u64 seed) {
  if (n < 1) throw ProgramError("gen_dense: n must be >= 1");
  DenseMatrix m;
  m.nrows = m.ncols = n;
  m.values.resize(n * n);
  SplitMix64 rng(seed);
  for (auto& v : m.values) v = rng.small_value();
  return m;
}

inline std::vector<float> gen_vector(u64 n, u64 seed) {
  std::vector<float> v(n);
  SplitMix64 rng(seed);
  for (auto& x : v) x = rng.small_value();
  return v;
}

namespace detail {

inline std::vector<u64> distinct_rows(u64 m, u64 count, SplitMix64& rng) {
  std::vector<u64> rows;
  rows.reserve(count);
  if (count * 2 >= m) {
    // dense column: partial Fisher-Yates over all rows
    std::vector<u64> all(m);
    for (u64 i = 0; i < m; ++i) all[i] = i;
    for (u64 i = 0; i < count; ++i) std::swap(all[i], all[i + rng.below(m - i)]);
    rows.assign(all.begin(), all.begin() + count);
  } else {
    std::unordered_set<u64> seen;
    while (rows.size() < count) {
      u64 r = rng.below(m);
      if (seen.insert(r).second) rows.push_back(r);
    }
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace detail

// Per column, a count drawn uniformly from [lo, hi], distinct random rows.
inline TripletMatrix gen_sparse(u64 m, u64 n, u64 lo, u64 hi, u64 seed) {
  if (lo > hi || hi > m) throw ProgramError("gen_sparse: infeasible nnz-per-column range");
  TripletMatrix t;
  t.nrows = m;
  t.ncols = n;
  SplitMix64 rng(seed);
  for (u64 j = 0; j < n; ++j) {
    const u64 cnt = lo + rng.below(hi - lo + 1);
    for (u64 r : detail::distinct_rows(m, cnt, rng))
      t.entries.push_back(Triplet{r, j, rng.small_nonzero()});
  }
  return t;
}

// Variant targeting an exact total nonzero count while keeping every column's
// count inside [lo, hi]; used for the published-matrix stand-ins.
inline TripletMatrix gen_sparse_nnz(u64 m, u64 n, u64 nnz, u64 lo, u64 hi, u64 seed) {
  if (lo > hi || hi > m) throw ProgramError("gen_sparse_nnz: infeasible nnz-per-column range");
  if (nnz < n * lo || nnz > n * hi)
    throw ProgramError("gen_sparse_nnz: nnz " + std::to_string(nnz) +
                       " unreachable with " + std::to_string(n) + " columns in [" +
                       std::to_string(lo) + ", " + std::to_string(hi) + "]");
  SplitMix64 rng(seed);
  std::vector<u64> counts(n, lo);
  u64 remaining = nnz - n * lo;
  while (remaining > 0) {
    const u64 j = rng.below(n);
    if (counts[j] < hi) {
      ++counts[j];
      --remaining;
    }
  }
  TripletMatrix t;
  t.nrows = m;
  t.ncols = n;
  for (u64 j = 0; j < n; ++j)
    for (u64 r : detail::distinct_rows(m, counts[j], rng))
      t.entries.push_back(Triplet{r, j, rng.small_nonzero()});
  return t;
}

// ---- Matrix Market -------------------------------------------------------

namespace detail {

inline IoError mm_error(u64 line, const std::string& what) {
  return IoError("matrix market, line " + std::to_string(line) + ": " + what);
}

}  // namespace detail

// Coordinate-format reader: real|integer|pattern, general|symmetric. Indices
// convert to 0-based; symmetric inputs expand to general by mirroring
// off-diagonal entries; pattern entries take value 1.0.
inline TripletMatrix read_matrix_market(std::istream& in) {
  std::string line;
  u64 lineno = 0;
  if (!std::getline(in, line)) throw detail::mm_error(1, "empty stream");
  ++lineno;
  std::istringstream hdr(line);
  std::string banner, object, format, field, symmetry;
  hdr >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || object != "matrix")
    throw detail::mm_error(lineno, "malformed header: " + line);
  if (format != "coordinate") throw detail::mm_error(lineno, "unsupported format: " + format);
  const bool pattern = field == "pattern";
  if (field != "real" && field != "integer" && !pattern)
    throw detail::mm_error(lineno, "unsupported field: " + field);
  const bool symmetric = symmetry == "symmetric";
  if (symmetry != "general" && !symmetric)
    throw detail::mm_error(lineno, "unsupported symmetry: " + symmetry);

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream size_line(line);
  u64 nrows = 0, ncols = 0, declared = 0;
  if (!(size_line >> nrows >> ncols >> declared))
    throw detail::mm_error(lineno, "malformed size line: " + line);

  TripletMatrix t;
  t.nrows = nrows;
  t.ncols = ncols;
  u64 seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream es(line);
    u64 r = 0, c = 0;
    double v = 1.0;
    if (!(es >> r >> c)) throw detail::mm_error(lineno, "malformed entry: " + line);
    if (!pattern && !(es >> v)) throw detail::mm_error(lineno, "missing value: " + line);
    if (r < 1 || r > nrows || c < 1 || c > ncols)
      throw detail::mm_error(lineno, "index out of bounds: " + line);
    ++seen;
    t.entries.push_back(Triplet{r - 1, c - 1, static_cast<float>(v)});
    if (symmetric && r != c) t.entries.push_back(Triplet{c - 1, r - 1, static_cast<float>(v)});
  }
  if (seen != declared)
    throw detail::mm_error(lineno, "entry count mismatch: declared " + std::to_string(declared) +
                                       ", found " + std::to_string(seen));
  return t;
}

inline TripletMatrix read_matrix_market(const std::string& text) {
  std::istringstream in(text);
  return read_matrix_market(in);
}

inline void write_matrix_market(std::ostream& out, const TripletMatrix& t) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << t.nrows << ' ' << t.ncols << ' ' << t.entries.size() << '\n';
  char buf[64];
  for (const Triplet& e : t.entries) {
    std::snprintf(buf, sizeof buf, "%llu %llu %.9g\n",
                  static_cast<unsigned long long>(e.row + 1),
                  static_cast<unsigned long long>(e.col + 1), static_cast<double>(e.value));
    out << buf;
  }
}

// ---- Published test-matrix stand-ins --------------------------------------
// Synthetic matrices matching the published rows / nonzero totals and
// per-column occupancy ranges, so the suite runs without network access.
// Fetching the real SuiteSparse files and passing them by path is the
// documented alternative.

struct SparsePreset {
  const char* name;
  u64 rows, cols, nnz, col_lo, col_hi;
};

inline const std::vector<SparsePreset>& sparse_presets() {
  static const std::vector<SparsePreset> presets = {
      {"maragal_2", 555, 350, 4357, 0, 139},
      {"flower_5_4", 5226, 14721, 43942, 1, 3},
      {"bibd_14_7", 91, 3432, 72072, 21, 21},
      {"ld_pilot87", 2030, 9000, 74949, 1, 96},
  };
  return presets;
}

inline TripletMatrix gen_preset(const SparsePreset& p, u64 seed) {
  return gen_sparse_nnz(p.rows, p.cols, p.nnz, p.col_lo, p.col_hi, seed);
}

inline const SparsePreset* find_preset(const std::string& name) {
  for (const auto& p : sparse_presets())
    if (name == p.name) return &p;
  return nullptr;
}

}  // namespace mcsim
