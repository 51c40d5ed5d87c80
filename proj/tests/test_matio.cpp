#include <catch2/catch.hpp>

#include <sstream>

#include "mcsim/matio.hpp"

using namespace mcsim;

TEST_CASE("matrix market reader") {
  SECTION("coordinate real general identity") {
    TripletMatrix t = read_matrix_market(
        "%%MatrixMarket matrix coordinate real general\n"
        "2 2 2\n"
        "1 1 1.0\n"
        "2 2 1.0\n");
    CHECK(t.nrows == 2);
    CHECK(t.ncols == 2);
    REQUIRE(t.entries.size() == 2);
    CHECK(t.entries[0].row == 0);
    CHECK(t.entries[0].col == 0);
    CHECK(t.entries[1].row == 1);
    CHECK(t.entries[1].col == 1);
  }
  SECTION("pattern symmetric expands off-diagonal entries") {
    TripletMatrix t = read_matrix_market(
        "%%MatrixMarket matrix coordinate pattern symmetric\n"
        "% a comment\n"
        "3 3 1\n"
        "2 1\n");
    REQUIRE(t.entries.size() == 2);
    CHECK(t.entries[0].row == 1);
    CHECK(t.entries[0].col == 0);
    CHECK(t.entries[0].value == 1.0f);
    CHECK(t.entries[1].row == 0);
    CHECK(t.entries[1].col == 1);
  }
  SECTION("symmetric diagonal entries are not duplicated") {
    TripletMatrix t = read_matrix_market(
        "%%MatrixMarket matrix coordinate real symmetric\n"
        "2 2 2\n"
        "1 1 5.0\n"
        "2 1 7.0\n");
    CHECK(t.entries.size() == 3);
  }
  SECTION("errors carry line numbers") {
    REQUIRE_THROWS_WITH(read_matrix_market("%%MatrixMarket matrix coordinate complex general\n"),
                        Catch::Contains("line 1") && Catch::Contains("unsupported field"));
    REQUIRE_THROWS_WITH(read_matrix_market("%%MatrixMarket matrix array real general\n"),
                        Catch::Contains("unsupported format"));
    REQUIRE_THROWS_WITH(read_matrix_market("not a header\n1 1 1\n"),
                        Catch::Contains("malformed header"));
    REQUIRE_THROWS_WITH(read_matrix_market("%%MatrixMarket matrix coordinate real general\n"
                                           "2 2 2\n"
                                           "1 1 1.0\n"),
                        Catch::Contains("entry count mismatch"));
    REQUIRE_THROWS_WITH(read_matrix_market("%%MatrixMarket matrix coordinate real general\n"
                                           "2 2 1\n"
                                           "3 1 1.0\n"),
                        Catch::Contains("line 3") && Catch::Contains("out of bounds"));
  }
}

TEST_CASE("write-then-read round trip") {
  TripletMatrix t = gen_sparse(17, 23, 0, 6, 321);
  std::ostringstream out;
  write_matrix_market(out, t);
  TripletMatrix back = read_matrix_market(out.str());
  REQUIRE(back.entries.size() == t.entries.size());
  CHECK(back.nrows == t.nrows);
  CHECK(back.ncols == t.ncols);
  for (std::size_t i = 0; i < t.entries.size(); ++i) {
    CHECK(back.entries[i].row == t.entries[i].row);
    CHECK(back.entries[i].col == t.entries[i].col);
    CHECK(back.entries[i].value == t.entries[i].value);
  }
}

TEST_CASE("dense generator") {
  SECTION("deterministic per seed") {
    CHECK(gen_dense(24, 42).values == gen_dense(24, 42).values);
    CHECK(gen_dense(24, 42).values != gen_dense(24, 43).values);
  }
  SECTION("n = 1") { CHECK(gen_dense(1, 7).values.size() == 1); }
  SECTION("values are small integers") {
    for (float v : gen_dense(32, 9).values) {
      CHECK(v == static_cast<float>(static_cast<int>(v)));
      CHECK(v >= -8.0f);
      CHECK(v <= 8.0f);
    }
  }
  SECTION("pinned checksum for the 1024 input") {
    // frozen from the documented splitmix64 stream; guards cross-platform drift
    DenseMatrix m = gen_dense(1024, 42);
    double sum = 0;
    for (float v : m.values) sum += v;
    u64 h = 1469598103934665603ull;
    for (float v : m.values) {
      h ^= static_cast<u64>(static_cast<i64>(v) + 8);
      h *= 1099511628211ull;
    }
    CHECK(sum == 3110.0);
    CHECK(h == 14498181333233453121ull);
  }
}

TEST_CASE("sparse generators") {
  SECTION("deterministic per seed") {
    TripletMatrix a = gen_sparse(50, 40, 1, 5, 9);
    TripletMatrix b = gen_sparse(50, 40, 1, 5, 9);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
      CHECK(a.entries[i].row == b.entries[i].row);
      CHECK(a.entries[i].value == b.entries[i].value);
    }
  }
  SECTION("range [0,0] gives an empty matrix") {
    CHECK(gen_sparse(10, 10, 0, 0, 1).entries.empty());
  }
  SECTION("infeasible ranges") {
    REQUIRE_THROWS(gen_sparse(4, 4, 3, 2, 1));   // lo > hi
    REQUIRE_THROWS(gen_sparse(4, 4, 0, 5, 1));   // hi > rows
    REQUIRE_THROWS(gen_sparse_nnz(10, 4, 100, 0, 10, 1));  // nnz unreachable
  }
  SECTION("degenerate range hits the published BIBD count exactly") {
    TripletMatrix t = gen_sparse(91, 3432, 21, 21, 3);
    CHECK(t.entries.size() == 72072);
  }
  SECTION("per-column counts stay in range") {
    TripletMatrix t = gen_sparse_nnz(555, 350, 4357, 0, 139, 5);
    CHECK(t.entries.size() == 4357);
    std::vector<u64> counts(350, 0);
    for (const Triplet& e : t.entries) counts[e.col]++;
    for (u64 c : counts) CHECK(c <= 139);
  }
}

TEST_CASE("the four published stand-ins match the reference shapes") {
  struct Expect {
    const char* name;
    u64 nnz, rows;
  };
  for (const Expect& e : {Expect{"maragal_2", 4357, 555}, Expect{"flower_5_4", 43942, 5226},
                          Expect{"bibd_14_7", 72072, 91}, Expect{"ld_pilot87", 74949, 2030}}) {
    const SparsePreset* p = find_preset(e.name);
    REQUIRE(p != nullptr);
    CscMatrix m = to_csc(gen_preset(*p, 1));
    CHECK(m.nnz() == e.nnz);
    CHECK(m.nrows == e.rows);
    for (u64 j = 0; j < m.ncols; ++j) {
      const u64 cnt = m.col_ptr[j + 1] - m.col_ptr[j];
      CHECK(cnt >= p->col_lo);
      CHECK(cnt <= p->col_hi);
    }
  }
  CHECK(find_preset("nonesuch") == nullptr);
}
