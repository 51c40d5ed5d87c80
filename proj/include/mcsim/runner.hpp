#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcsim/arch.hpp"
#include "mcsim/dense.hpp"
#include "mcsim/golden.hpp"
#include "mcsim/matio.hpp"
#include "mcsim/sim.hpp"
#include "mcsim/spmv.hpp"
#include "mcsim/types.hpp"

namespace mcsim {

struct GoldenMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One line of the report CSV. Column set is fixed; kernels leave fields they
// do not use empty.
struct ReportRow {
  std::string kernel;
  std::string n_or_matrix;
  u32 p{0};
  u64 local_mem_words{0};
  u64 clock_hz{0};
  u64 x{0}, y{0}, z{0};
  bool has_plan{false};
  u64 cycles{0};
  double time_s{0};
  double gflops{0};
  double efficiency{0};
  u64 words_read{0};
  u64 words_written{0};
  double cache_hit_rate{0};
  std::string error;
};

inline std::string csv_header() {
  return "kernel,n|matrix,p,L_words,clock_hz,x,y,z,cycles,time_s,gflops,efficiency,"
         "words_read,words_written,cache_hit_rate,error";
}

namespace detail {

inline std::string csv_sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n') c = ';';
  return s;
}

inline std::string fmt_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace detail

inline std::string to_csv(const ReportRow& r) {
  std::string s;
  s += r.kernel + ',' + detail::csv_sanitize(r.n_or_matrix) + ',';
  s += std::to_string(r.p) + ',' + std::to_string(r.local_mem_words) + ',' +
       std::to_string(r.clock_hz) + ',';
  if (r.has_plan)
    s += std::to_string(r.x) + ',' + std::to_string(r.y) + ',' + std::to_string(r.z) + ',';
  else
    s += ",,,";
  if (r.error.empty()) {
    s += std::to_string(r.cycles) + ',' + detail::fmt_double(r.time_s) + ',' +
         detail::fmt_double(r.gflops) + ',' + detail::fmt_double(r.efficiency) + ',' +
         std::to_string(r.words_read) + ',' + std::to_string(r.words_written) + ',' +
         detail::fmt_double(r.cache_hit_rate) + ',';
  } else {
    s += ",,,,,,,";
  }
  s += detail::csv_sanitize(r.error);
  return s;
}

inline ReportRow row_from_report(const SimReport& rep, const ArchConfig& cfg) {
  ReportRow r;
  r.p = cfg.num_cores;
  r.local_mem_words = cfg.local_mem_words;
  r.clock_hz = cfg.clock_hz;
  r.cycles = rep.total_cycles;
  r.time_s = rep.wall_time_s;
  r.gflops = rep.gflops;
  r.efficiency = rep.efficiency;
  r.words_read = rep.traffic.words_read;
  r.words_written = rep.traffic.words_written;
  r.cache_hit_rate = rep.traffic.hit_rate();
  return r;
}

struct RunResult {
  SimReport report;
  ReportRow row;
};

// plan -> schedule -> simulate -> verify against the golden oracles.
// Verification is bit-exact: the dense schedule accumulates k-ascending,
// matching matmul_ref's documented order (z == 1), and the simulator must
// match the order-exact replay for any z.
inline RunResult run_dense(const ArchConfig& cfg, u64 n, u64 seed,
                           const SimOptions& opt = SimOptions{}) {
  BlockPlan plan = plan_blocks(cfg.local_mem_words, cfg.num_cores, n);
  DenseMatrix a = gen_dense(n, seed);
  DenseMatrix b = gen_dense(n, seed + 1);

  MemoryImage mem;
  DenseRegions regions = build_dense_memory(mem, a, b);
  Program prog = build_dense_schedule(plan, cfg, mem, regions);

  MemoryImage replayed = replay_ref(prog, cfg, mem);
  RunResult res{simulate(prog, cfg, std::move(mem), opt), ReportRow{}};

  if (!res.report.memory.region_equal(replayed, regions.c))
    throw GoldenMismatch("dense: simulate result differs from order-exact replay");
  DenseMatrix got = extract_dense_result(res.report.memory, regions.c, n);
  DenseMatrix want = matmul_ref(a, b);
  for (u64 i = 0; i < n * n; ++i) {
    if (plan.z == 1) {
      if (std::bit_cast<u32>(got.values[i]) != std::bit_cast<u32>(want.values[i]))
        throw GoldenMismatch("dense: result differs from matmul_ref at element " +
                             std::to_string(i));
    } else {
      const double diff = std::abs(static_cast<double>(got.values[i]) - want.values[i]);
      const double mag = std::max(1.0, std::abs(static_cast<double>(want.values[i])));
      if (diff > 1e-4 * mag)
        throw GoldenMismatch("dense: result outside 1e-4 of matmul_ref at element " +
                             std::to_string(i));
    }
  }

  res.row = row_from_report(res.report, cfg);
  res.row.kernel = "dense";
  res.row.n_or_matrix = std::to_string(n);
  res.row.x = plan.x;
  res.row.y = plan.y;
  res.row.z = plan.z;
  res.row.has_plan = true;
  return res;
}

inline RunResult run_spmv(const ArchConfig& cfg, const CscMatrix& m,
                          const std::string& matrix_name, u64 seed,
                          const SimOptions& opt = SimOptions{}) {
  std::vector<float> x = gen_vector(m.ncols, seed + 2);

  MemoryImage mem;
  SpmvRegions regions = build_spmv_memory(mem, m, x);
  Program prog = build_spmv_schedule(m, cfg, mem, regions);

  MemoryImage replayed = replay_ref(prog, cfg, mem);
  RunResult res{simulate(prog, cfg, std::move(mem), opt), ReportRow{}};

  if (!res.report.memory.region_equal(replayed, regions.y))
    throw GoldenMismatch("spmv: simulate result differs from order-exact replay");
  std::vector<float> got = extract_spmv_result(res.report.memory, regions.y, m.nrows);
  std::vector<float> want = spmv_ref(m, x);
  for (u64 r = 0; r < m.nrows; ++r)
    if (std::bit_cast<u32>(got[r]) != std::bit_cast<u32>(want[r]))
      throw GoldenMismatch("spmv: result differs from spmv_ref at row " + std::to_string(r));

  res.row = row_from_report(res.report, cfg);
  res.row.kernel = "spmv";
  res.row.n_or_matrix = matrix_name;
  return res;
}

// ---- design-space sweep ----------------------------------------------------

struct KernelSpec {
  std::string name;          // "dense" | "spmv"
  u64 n{0};                  // dense
  std::string matrix_path;   // spmv: Matrix Market file
  std::string preset;        // spmv: named synthetic stand-in
  u64 seed{1};
};

struct SweepSpec {
  nlohmann::json base;  // config document
  std::vector<std::pair<std::string, std::vector<nlohmann::json>>> axes;  // sorted by key
  KernelSpec kernel;

  u64 num_points() const {
    u64 n = 1;
    for (const auto& [_, vals] : axes) n *= vals.size();
    return n;
  }
};

inline SweepSpec parse_sweep_spec(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("sweep spec syntax error: ") + e.what());
  }
  SweepSpec s;
  if (!j.contains("base") || !j["base"].is_object())
    throw ConfigError("sweep spec: missing 'base' config object");
  s.base = j["base"];
  if (j.contains("axes")) {
    std::map<std::string, std::vector<nlohmann::json>> sorted;
    for (auto it = j["axes"].begin(); it != j["axes"].end(); ++it) {
      if (!it.value().is_array() || it.value().empty())
        throw ConfigError("empty sweep axis: " + it.key());
      sorted[it.key()] = std::vector<nlohmann::json>(it.value().begin(), it.value().end());
    }
    s.axes.assign(sorted.begin(), sorted.end());
  }
  if (!j.contains("kernel") || !j["kernel"].is_object())
    throw ConfigError("sweep spec: missing 'kernel' object");
  const auto& k = j["kernel"];
  s.kernel.name = k.value("name", "");
  if (s.kernel.name != "dense" && s.kernel.name != "spmv")
    throw ConfigError("sweep spec: kernel name must be dense or spmv");
  s.kernel.n = k.value("n", 0ull);
  s.kernel.matrix_path = k.value("matrix", "");
  s.kernel.preset = k.value("preset", "");
  s.kernel.seed = k.value("seed", 1ull);
  if (s.kernel.name == "dense" && s.kernel.n == 0)
    throw ConfigError("sweep spec: dense kernel needs n");
  if (s.kernel.name == "spmv" && s.kernel.matrix_path.empty() && s.kernel.preset.empty())
    throw ConfigError("sweep spec: spmv kernel needs matrix or preset");
  return s;
}

inline CscMatrix load_sweep_matrix(const KernelSpec& k) {
  if (!k.matrix_path.empty()) {
    std::ifstream in(k.matrix_path);
    if (!in) throw IoError("cannot open matrix file: " + k.matrix_path);
    return to_csc(read_matrix_market(in));
  }
  const SparsePreset* p = find_preset(k.preset);
  if (!p) throw ConfigError("unknown matrix preset: " + k.preset);
  return to_csc(gen_preset(*p, k.seed));
}

// Enumerates the cross product (axes in key order, values in listed order)
// and writes one CSV row per point. Failing points become rows with the error
// column set. Identical specs produce byte-identical files.
inline void run_sweep(const SweepSpec& spec, std::ostream& out, std::ostream* progress) {
  if (progress) *progress << "sweep: " << spec.num_points() << " points\n";

  CscMatrix matrix;
  if (spec.kernel.name == "spmv") matrix = load_sweep_matrix(spec.kernel);

  out << csv_header() << '\n';
  std::vector<std::size_t> idx(spec.axes.size(), 0);
  const u64 points = spec.num_points();
  for (u64 pt = 0; pt < points; ++pt) {
    nlohmann::json doc = spec.base;
    for (std::size_t a = 0; a < spec.axes.size(); ++a)
      doc[spec.axes[a].first] = spec.axes[a].second[idx[a]];

    ReportRow row;
    row.kernel = spec.kernel.name;
    row.n_or_matrix = spec.kernel.name == "dense"
                          ? std::to_string(spec.kernel.n)
                          : (spec.kernel.preset.empty() ? spec.kernel.matrix_path
                                                        : spec.kernel.preset);
    try {
      ArchConfig cfg = parse_config(doc.dump());
      row.p = cfg.num_cores;
      row.local_mem_words = cfg.local_mem_words;
      row.clock_hz = cfg.clock_hz;
      if (spec.kernel.name == "dense")
        row = run_dense(cfg, spec.kernel.n, spec.kernel.seed).row;
      else
        row = run_spmv(cfg, matrix, row.n_or_matrix, spec.kernel.seed).row;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    out << to_csv(row) << '\n';

    for (std::size_t a = spec.axes.size(); a-- > 0;) {
      if (++idx[a] < spec.axes[a].second.size()) break;
      idx[a] = 0;
    }
  }
}

}  // namespace mcsim
