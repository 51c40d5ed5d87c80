#include <catch2/catch.hpp>

#include "mcsim/arch.hpp"

using namespace mcsim;

TEST_CASE("minimal config document fills documented defaults") {
  ArchConfig cfg = parse_config(
      R"({"num_cores":16, "local_mem_words":8192, "clock_hz":250000000})");
  CHECK(cfg.num_cores == 16);
  CHECK(cfg.cores_per_cluster == 16);
  CHECK(cfg.local_mem_words == 8192);
  CHECK(cfg.clock_hz == 250000000);
  CHECK(cfg.interconnect == Interconnect::BusBroadcast);
  CHECK(cfg.dma.cachelines == 16);
  CHECK(cfg.dma.cacheline_words == 16);
  CHECK(cfg.dma.mem_latency_cycles == 30);
  CHECK(cfg.dma.read_words_per_cycle == Rational{1, 1});
  CHECK(cfg.fma_latency_cycles == 5);
}

TEST_CASE("config errors") {
  SECTION("cluster multiple violation") {
    REQUIRE_THROWS_WITH(
        parse_config(R"({"num_cores":6, "cores_per_cluster":4, "local_mem_words":64, "clock_hz":100})"),
        Catch::Contains("num_cores not a multiple of cores_per_cluster"));
  }
  SECTION("unknown key") {
    REQUIRE_THROWS_WITH(
        parse_config(R"({"num_cores":4, "local_mem_words":64, "clock_hz":100, "cores":4})"),
        Catch::Contains("unknown config key: cores"));
  }
  SECTION("syntax error reports position") {
    REQUIRE_THROWS_WITH(parse_config("{\"num_cores\":"), Catch::Contains("syntax error"));
  }
  SECTION("missing required key") {
    REQUIRE_THROWS_WITH(parse_config(R"({"num_cores":4})"),
                        Catch::Contains("missing required key"));
  }
}

TEST_CASE("validate names field and rule") {
  ArchConfig cfg;
  cfg.local_mem_words = 2;
  auto v = validate(cfg);
  REQUIRE(v.size() == 1);
  CHECK(v[0] == "local_mem_words below minimum 4");

  cfg = ArchConfig{};
  cfg.cores_per_cluster = 0;
  v = validate(cfg);
  REQUIRE_FALSE(v.empty());
  CHECK(v[0] == "cores_per_cluster must be >= 1");

  CHECK(validate(ArchConfig{}).empty());  // the published 16-core configuration
}

TEST_CASE("reference configurations parse") {
  ArchConfig c16 = parse_config(
      R"({"num_cores":16, "local_mem_words":8192, "clock_hz":250000000})");
  ArchConfig c32 = parse_config(
      R"({"num_cores":32, "local_mem_words":4096, "clock_hz":250000000})");
  CHECK(c16.local_mem_words * 4 == 32 * 1024);  // 32 KB per core
  CHECK(c32.local_mem_words * 4 == 16 * 1024);  // 16 KB per core
}

TEST_CASE("peak flops") {
  ArchConfig cfg;
  cfg.clock_hz = 250000000;
  cfg.num_cores = 16;
  CHECK(peak_flops(cfg) == 8000000000ull);
  cfg.num_cores = 32;
  cfg.cores_per_cluster = 16;
  CHECK(peak_flops(cfg) == 16000000000ull);
  cfg.num_cores = 1;
  cfg.cores_per_cluster = 1;
  CHECK(peak_flops(cfg) == 500000000ull);
}

TEST_CASE("peak flops is linear in cores and clock") {
  for (u32 p : {1u, 2u, 3u, 8u, 24u}) {
    ArchConfig a;
    a.num_cores = p;
    a.cores_per_cluster = 1;
    a.clock_hz = 123456789;
    ArchConfig b = a;
    b.num_cores = 2 * p;
    CHECK(peak_flops(b) == 2 * peak_flops(a));
    ArchConfig c = a;
    c.clock_hz *= 3;
    CHECK(peak_flops(c) == 3 * peak_flops(a));
  }
}

TEST_CASE("resource estimate reproduces both published columns exactly") {
  ArchConfig c16;
  c16.num_cores = 16;
  c16.local_mem_words = 8192;
  ResourceEstimate r16 = estimate_resources(c16);
  CHECK(r16.luts == 24390);
  CHECK(r16.dsps == 71);
  CHECK(r16.brams == 140);
  CHECK_FALSE(r16.extrapolated);

  ArchConfig c32;
  c32.num_cores = 32;
  c32.local_mem_words = 4096;
  ResourceEstimate r32 = estimate_resources(c32);
  CHECK(r32.luts == 46576);
  CHECK(r32.dsps == 135);
  CHECK(r32.brams == 140);
  CHECK_FALSE(r32.extrapolated);
}

TEST_CASE("bram estimate depends only on total local memory") {
  ArchConfig a, b;
  a.num_cores = 16;
  a.local_mem_words = 8192;
  b.num_cores = 32;
  b.local_mem_words = 4096;
  CHECK(a.total_mem_words() == b.total_mem_words());
  CHECK(estimate_resources(a).brams == estimate_resources(b).brams);
}

TEST_CASE("estimate is monotone and flags extrapolation") {
  ResourceEstimate prev{};
  for (u32 p = 1; p <= 64; ++p) {
    ArchConfig cfg;
    cfg.num_cores = p;
    cfg.cores_per_cluster = 1;
    cfg.local_mem_words = 4096;
    ResourceEstimate r = estimate_resources(cfg);
    CHECK(r.luts >= prev.luts);
    CHECK(r.dsps >= prev.dsps);
    CHECK(r.brams >= prev.brams);
    CHECK(r.extrapolated == (p < 16 || p > 32));
    prev = r;
  }
}

TEST_CASE("parse of serialize is the identity") {
  ArchConfig cfg;
  cfg.num_cores = 24;
  cfg.cores_per_cluster = 12;
  cfg.local_mem_words = 2048;
  cfg.cluster_shared_mem_words = 512;
  cfg.clock_hz = 100000000;
  cfg.interconnect = Interconnect::Ring;
  cfg.hop_latency_cycles = 2;
  cfg.link_width_words = 4;
  cfg.fma_latency_cycles = 3;
  cfg.dma.cachelines = 8;
  cfg.dma.cacheline_words = 32;
  cfg.dma.read_words_per_cycle = Rational{1, 2};
  cfg.dma.write_words_per_cycle = Rational{2, 1};
  cfg.dma.mem_latency_cycles = 100;
  CHECK(parse_config(serialize_config(cfg)) == cfg);
  CHECK(parse_config(default_config_document()) == ArchConfig{});
}
