#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcsim/types.hpp"

namespace mcsim {

enum class Interconnect { BusBroadcast, Ring, Crossbar, PointToPoint };

inline const char* to_string(Interconnect ic) {
  switch (ic) {
    case Interconnect::BusBroadcast: return "bus";
    case Interconnect::Ring: return "ring";
    case Interconnect::Crossbar: return "crossbar";
    case Interconnect::PointToPoint: return "point_to_point";
  }
  return "?";
}

struct DmaConfig {
  u32 cachelines{16};
  u32 cacheline_words{16};
  Rational read_words_per_cycle{1, 1};
  Rational write_words_per_cycle{1, 1};
  u32 mem_latency_cycles{30};
};

// Full parameterization of one many-core instance. All sizes are in 32-bit
// words, the clock in Hz.
struct ArchConfig {
  u32 num_cores{16};
  u32 cores_per_cluster{16};
  u64 local_mem_words{8192};
  u64 cluster_shared_mem_words{0};
  u64 clock_hz{250000000};
  Interconnect interconnect{Interconnect::BusBroadcast};
  u32 hop_latency_cycles{1};
  u32 link_width_words{1};
  DmaConfig dma{};
  u32 fma_latency_cycles{5};

  static constexpr u32 word_bytes = 4;  // single precision only

  u32 num_clusters() const {
    return cores_per_cluster ? num_cores / cores_per_cluster : 0;
  }
  u64 total_mem_words() const {
    return static_cast<u64>(num_cores) * local_mem_words +
           static_cast<u64>(num_clusters()) * cluster_shared_mem_words;
  }
};

struct ResourceEstimate {
  i64 luts{0};
  i64 dsps{0};
  i64 brams{0};
  bool extrapolated{false};  // outside the calibrated 16..32 core range
};

// Checks every invariant; each violation names the field and the rule.
inline std::vector<std::string> validate(const ArchConfig& cfg) {
  std::vector<std::string> v;
  if (cfg.num_cores < 1) v.push_back("num_cores must be >= 1");
  if (cfg.cores_per_cluster < 1) v.push_back("cores_per_cluster must be >= 1");
  if (cfg.num_cores >= 1 && cfg.cores_per_cluster >= 1 &&
      cfg.num_cores % cfg.cores_per_cluster != 0)
    v.push_back("num_cores not a multiple of cores_per_cluster");
  if (cfg.local_mem_words < 4) v.push_back("local_mem_words below minimum 4");
  if (cfg.clock_hz < 1) v.push_back("clock_hz must be >= 1");
  if (cfg.hop_latency_cycles < 1) v.push_back("hop_latency_cycles must be >= 1");
  if (cfg.link_width_words < 1) v.push_back("link_width_words must be >= 1");
  if (cfg.fma_latency_cycles < 1) v.push_back("fma_latency_cycles must be >= 1");
  if (cfg.dma.cachelines < 1) v.push_back("cachelines must be >= 1");
  if (cfg.dma.cacheline_words < 1) v.push_back("cacheline_words must be >= 1");
  if (cfg.dma.read_words_per_cycle.num == 0)
    v.push_back("read_words_per_cycle must be > 0");
  if (cfg.dma.write_words_per_cycle.num == 0)
    v.push_back("write_words_per_cycle must be > 0");
  return v;
}

// 2 FLOPs per core per cycle: one fused multiply-add, counted as two
// floating-point operations.
inline u64 peak_flops(const ArchConfig& cfg) {
  return 2ull * cfg.num_cores * cfg.clock_hz;
}

namespace detail {

// Linear resource model anchored at the two published 16- and 32-core builds.
constexpr i64 kLutsPerCore = 1364;
constexpr i64 kDspsPerCore = 4;
constexpr i64 kDspOverhead = 7;
constexpr i64 kLutOverheadAt16 = 2566;   // 24390 - 16*1364
constexpr i64 kLutOverheadSlope = 362;   // (2928 - 2566) over 16 cores
constexpr i64 kBramAnchorBlocks = 140;   // blocks for 131072 total words
constexpr i64 kBramAnchorWords = 131072;

inline i64 lut_overhead(i64 p) {
  // overhead(16)=2566, overhead(32)=2928, interpolated linearly, rounded.
  i64 scaled = kLutOverheadAt16 * 16 + kLutOverheadSlope * (p - 16);
  return (scaled + 8) / 16;
}

}  // namespace detail

inline ResourceEstimate estimate_resources(const ArchConfig& cfg) {
  const i64 p = cfg.num_cores;
  ResourceEstimate r;
  r.luts = detail::kLutsPerCore * p + detail::lut_overhead(p);
  r.dsps = detail::kDspsPerCore * p + detail::kDspOverhead;
  const i64 words = static_cast<i64>(cfg.total_mem_words());
  r.brams = (words * detail::kBramAnchorBlocks + detail::kBramAnchorWords - 1) /
            detail::kBramAnchorWords;
  r.extrapolated = p < 16 || p > 32;
  return r;
}

namespace detail {

inline Rational rational_from_json_number(const nlohmann::json& j, const std::string& key) {
  if (j.is_number_integer()) {
    i64 v = j.get<i64>();
    if (v <= 0) throw ConfigError(key + " must be > 0");
    return Rational{static_cast<u64>(v), 1};
  }
  if (!j.is_number()) throw ConfigError(key + " must be a number");
  double d = j.get<double>();
  if (!(d > 0)) throw ConfigError(key + " must be > 0");
  // Accept dyadic rationals only (1, 0.5, 0.25, 2.5, ...) so arithmetic is exact.
  u64 den = 1;
  while (d != std::floor(d)) {
    d *= 2;
    den *= 2;
    if (den > (1ull << 32)) throw ConfigError(key + " must be a dyadic rational (e.g. 0.5)");
  }
  return Rational{static_cast<u64>(d), den};
}

inline u64 uint_field(const nlohmann::json& j, const std::string& key) {
  if (!j.is_number_integer() || j.get<i64>() < 0)
    throw ConfigError(key + " must be a non-negative integer");
  return j.get<u64>();
}

// Default cluster grouping: largest divisor of p not exceeding 16, so the
// multiple-of invariant holds for any core count.
inline u32 default_cores_per_cluster(u32 p) {
  for (u32 d = std::min<u32>(16, p); d >= 1; --d)
    if (p % d == 0) return d;
  return 1;
}

}  // namespace detail

// Parses the flat JSON config schema. Unknown keys are errors; omitted
// optional keys get the documented defaults; the result is validated.
inline ArchConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  static const char* known[] = {
      "num_cores", "cores_per_cluster", "local_mem_words", "cluster_shared_mem_words",
      "clock_hz", "interconnect", "hop_latency_cycles", "link_width_words",
      "fma_latency_cycles", "cachelines", "cacheline_words", "read_words_per_cycle",
      "write_words_per_cycle", "mem_latency_cycles", "word_bytes"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return it.key() == k; }) == std::end(known))
      throw ConfigError("unknown config key: " + it.key());
  }
  for (const char* req : {"num_cores", "local_mem_words", "clock_hz"})
    if (!j.contains(req)) throw ConfigError(std::string("missing required key: ") + req);

  ArchConfig cfg;
  cfg.num_cores = static_cast<u32>(detail::uint_field(j["num_cores"], "num_cores"));
  cfg.local_mem_words = detail::uint_field(j["local_mem_words"], "local_mem_words");
  cfg.clock_hz = detail::uint_field(j["clock_hz"], "clock_hz");
  cfg.cores_per_cluster = j.contains("cores_per_cluster")
      ? static_cast<u32>(detail::uint_field(j["cores_per_cluster"], "cores_per_cluster"))
      : detail::default_cores_per_cluster(cfg.num_cores);
  if (j.contains("cluster_shared_mem_words"))
    cfg.cluster_shared_mem_words = detail::uint_field(j["cluster_shared_mem_words"], "cluster_shared_mem_words");
  if (j.contains("interconnect")) {
    std::string s = j["interconnect"].get<std::string>();
    if (s == "bus") cfg.interconnect = Interconnect::BusBroadcast;
    else if (s == "ring") cfg.interconnect = Interconnect::Ring;
    else if (s == "crossbar") cfg.interconnect = Interconnect::Crossbar;
    else if (s == "point_to_point") cfg.interconnect = Interconnect::PointToPoint;
    else throw ConfigError("interconnect must be one of bus|ring|crossbar|point_to_point");
  }
  if (j.contains("hop_latency_cycles"))
    cfg.hop_latency_cycles = static_cast<u32>(detail::uint_field(j["hop_latency_cycles"], "hop_latency_cycles"));
  if (j.contains("link_width_words"))
    cfg.link_width_words = static_cast<u32>(detail::uint_field(j["link_width_words"], "link_width_words"));
  if (j.contains("fma_latency_cycles"))
    cfg.fma_latency_cycles = static_cast<u32>(detail::uint_field(j["fma_latency_cycles"], "fma_latency_cycles"));
  if (j.contains("cachelines"))
    cfg.dma.cachelines = static_cast<u32>(detail::uint_field(j["cachelines"], "cachelines"));
  if (j.contains("cacheline_words"))
    cfg.dma.cacheline_words = static_cast<u32>(detail::uint_field(j["cacheline_words"], "cacheline_words"));
  if (j.contains("read_words_per_cycle"))
    cfg.dma.read_words_per_cycle = detail::rational_from_json_number(j["read_words_per_cycle"], "read_words_per_cycle");
  if (j.contains("write_words_per_cycle"))
    cfg.dma.write_words_per_cycle = detail::rational_from_json_number(j["write_words_per_cycle"], "write_words_per_cycle");
  if (j.contains("mem_latency_cycles"))
    cfg.dma.mem_latency_cycles = static_cast<u32>(detail::uint_field(j["mem_latency_cycles"], "mem_latency_cycles"));
  if (j.contains("word_bytes") && detail::uint_field(j["word_bytes"], "word_bytes") != 4)
    throw ConfigError("word_bytes is fixed at 4 (single precision)");

  auto violations = validate(cfg);
  if (!violations.empty()) {
    std::string msg = "invalid config:";
    for (const auto& s : violations) msg += " " + s + ";";
    throw ConfigError(msg);
  }
  return cfg;
}

namespace detail {

inline nlohmann::json rational_to_json(const Rational& r) {
  if (r.den == 1) return static_cast<i64>(r.num);
  return static_cast<double>(r.num) / static_cast<double>(r.den);
}

}  // namespace detail

// Canonical document; parse_config(serialize_config(cfg)) == cfg.
inline std::string serialize_config(const ArchConfig& cfg) {
  nlohmann::ordered_json j;
  j["num_cores"] = cfg.num_cores;
  j["cores_per_cluster"] = cfg.cores_per_cluster;
  j["local_mem_words"] = cfg.local_mem_words;
  j["cluster_shared_mem_words"] = cfg.cluster_shared_mem_words;
  j["clock_hz"] = cfg.clock_hz;
  j["interconnect"] = to_string(cfg.interconnect);
  j["hop_latency_cycles"] = cfg.hop_latency_cycles;
  j["link_width_words"] = cfg.link_width_words;
  j["fma_latency_cycles"] = cfg.fma_latency_cycles;
  j["cachelines"] = cfg.dma.cachelines;
  j["cacheline_words"] = cfg.dma.cacheline_words;
  j["read_words_per_cycle"] = detail::rational_to_json(cfg.dma.read_words_per_cycle);
  j["write_words_per_cycle"] = detail::rational_to_json(cfg.dma.write_words_per_cycle);
  j["mem_latency_cycles"] = cfg.dma.mem_latency_cycles;
  return j.dump(2) + "\n";
}

inline std::string default_config_document() { return serialize_config(ArchConfig{}); }

inline bool operator==(const DmaConfig& a, const DmaConfig& b) {
  return a.cachelines == b.cachelines && a.cacheline_words == b.cacheline_words &&
         a.read_words_per_cycle == b.read_words_per_cycle &&
         a.write_words_per_cycle == b.write_words_per_cycle &&
         a.mem_latency_cycles == b.mem_latency_cycles;
}

inline bool operator==(const ArchConfig& a, const ArchConfig& b) {
  return a.num_cores == b.num_cores && a.cores_per_cluster == b.cores_per_cluster &&
         a.local_mem_words == b.local_mem_words &&
         a.cluster_shared_mem_words == b.cluster_shared_mem_words &&
         a.clock_hz == b.clock_hz && a.interconnect == b.interconnect &&
         a.hop_latency_cycles == b.hop_latency_cycles &&
         a.link_width_words == b.link_width_words && a.dma == b.dma &&
         a.fma_latency_cycles == b.fma_latency_cycles;
}

}  // namespace mcsim
