// mcsim command-line front end: validate and estimate architecture configs,
// run the dense and sparse kernels against the simulator, and sweep the
// design space into a CSV report.
//
// Exit codes: 0 success, 2 config error, 3 infeasible plan, 4 golden
// mismatch, 5 I/O error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mcsim/mcsim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitGolden = 4;
constexpr int kExitIo = 5;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mcsim::IoError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Config comes from --config, else the MCSIM_CONFIG environment variable.
mcsim::ArchConfig load_config(const std::string& flag_path) {
  std::string path = flag_path;
  if (path.empty()) {
    const char* env = std::getenv("MCSIM_CONFIG");
    if (env) path = env;
  }
  if (path.empty())
    throw mcsim::ConfigError("no config given: pass --config or set MCSIM_CONFIG");
  return mcsim::parse_config(read_file(path));
}

// Accepts "key=value" positionals, e.g. `run-dense n=1024`.
std::map<std::string, std::string> parse_kv(const std::vector<std::string>& args) {
  std::map<std::string, std::string> kv;
  for (const std::string& a : args) {
    auto eq = a.find('=');
    if (eq == std::string::npos)
      throw mcsim::ConfigError("expected key=value argument, got: " + a);
    kv[a.substr(0, eq)] = a.substr(eq + 1);
  }
  return kv;
}

struct TraceFile {
  std::ofstream stream;
  mcsim::SimOptions options{};

  explicit TraceFile(const std::string& path) {
    if (path.empty()) return;
    stream.open(path);
    if (!stream) throw mcsim::IoError("cannot open trace file: " + path);
    stream << "id,kind,resource,start,end\n";
    options.trace = &stream;
  }
};

void print_run(const mcsim::RunResult& res) {
  const mcsim::ReportRow& r = res.row;
  std::cout << "kernel:        " << r.kernel << " (" << r.n_or_matrix << ")\n";
  if (r.has_plan)
    std::cout << "plan:          x=" << r.x << " y=" << r.y << " z=" << r.z << "\n";
  std::cout << "cycles:        " << r.cycles << "\n";
  char buf[96];
  std::snprintf(buf, sizeof buf, "time:          %.9g s @ %llu Hz\n", r.time_s,
                static_cast<unsigned long long>(r.clock_hz));
  std::cout << buf;
  std::snprintf(buf, sizeof buf, "gflops:        %.4g\nefficiency:    %.2f%%\n", r.gflops,
                100.0 * r.efficiency);
  std::cout << buf;
  std::cout << "words read:    " << r.words_read << "\n";
  std::cout << "words written: " << r.words_written << "\n";
  std::snprintf(buf, sizeof buf, "cache hits:    %.2f%%\n", 100.0 * r.cache_hit_rate);
  std::cout << buf;
  std::cout << "golden check:  ok\n";
}

void append_csv(const std::string& path, const mcsim::ReportRow& row) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw mcsim::IoError("cannot open csv file: " + path);
  out << mcsim::csv_header() << '\n' << mcsim::to_csv(row) << '\n';
}

mcsim::CscMatrix load_matrix(const std::map<std::string, std::string>& kv, mcsim::u64 seed,
                             std::string& name_out) {
  if (auto it = kv.find("matrix"); it != kv.end()) {
    std::ifstream in(it->second);
    if (!in) throw mcsim::IoError("cannot open matrix file: " + it->second);
    name_out = it->second;
    return mcsim::to_csc(mcsim::read_matrix_market(in));
  }
  if (auto it = kv.find("gen"); it != kv.end()) {
    const mcsim::SparsePreset* p = mcsim::find_preset(it->second);
    if (!p) throw mcsim::ConfigError("unknown matrix preset: " + it->second);
    name_out = it->second;
    return mcsim::to_csc(mcsim::gen_preset(*p, seed));
  }
  auto need = [&](const char* k) -> mcsim::u64 {
    auto f = kv.find(k);
    if (f == kv.end()) throw mcsim::ConfigError(std::string("run-spmv: missing ") + k);
    return std::stoull(f->second);
  };
  if (kv.count("rows")) {
    name_out = "synthetic";
    return mcsim::to_csc(mcsim::gen_sparse_nnz(need("rows"), need("cols"), need("nnz"),
                                               need("col_lo"), need("col_hi"), seed));
  }
  throw mcsim::ConfigError(
      "run-spmv: give matrix=<path>, gen=<preset>, or rows=/cols=/nnz=/col_lo=/col_hi=");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mcsim: many-core overlay simulator and design-space explorer"};
  app.require_subcommand(1);

  std::string config_path, trace_path, csv_path, out_path, spec_path, balance_path;
  mcsim::u64 seed = 1;
  app.add_option("--config", config_path, "architecture config (JSON)")->capture_default_str();
  app.add_option("--seed", seed, "generator seed")->capture_default_str();
  app.add_option("--trace", trace_path, "write a per-transaction trace CSV");

  auto* validate_cmd = app.add_subcommand("validate", "check a config against all invariants");
  auto* estimate_cmd = app.add_subcommand("estimate", "print resource estimate and peak rate");
  auto* defaults_cmd = app.add_subcommand("print-defaults", "emit the canonical default config");
  auto* dense_cmd = app.add_subcommand("run-dense", "run the blocked dense matmul kernel");
  auto* spmv_cmd = app.add_subcommand("run-spmv", "run the CSC sparse matrix-vector kernel");
  auto* verify_cmd = app.add_subcommand("verify", "cross-check simulator against the oracles");
  auto* sweep_cmd = app.add_subcommand("sweep", "enumerate configs and write a report CSV");

  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> dense_args, spmv_args, verify_args;
  dense_cmd->add_option("args", dense_args, "n=<size>");
  dense_cmd->add_option("--csv", csv_path, "also write the report row as CSV");
  spmv_cmd->add_option("args", spmv_args,
                       "matrix=<path> | gen=<preset> | rows=..cols=..nnz=..col_lo=..col_hi=..");
  spmv_cmd->add_option("--csv", csv_path, "also write the report row as CSV");
  spmv_cmd->add_option("--balance", balance_path, "write the per-core balance table as CSV");
  verify_cmd->add_option("args", verify_args, "kernel=dense|spmv n=<size>");
  sweep_cmd->add_option("--spec", spec_path, "sweep spec (JSON)")->required();
  sweep_cmd->add_option("--out", out_path, "output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*defaults_cmd) {
      std::cout << mcsim::default_config_document();
      return kExitOk;
    }
    if (*validate_cmd) {
      mcsim::ArchConfig cfg = load_config(config_path);  // throws on any violation
      std::cout << "config ok: " << cfg.num_cores << " cores, "
                << cfg.local_mem_words << " words local memory, " << cfg.clock_hz << " Hz\n";
      return kExitOk;
    }
    if (*estimate_cmd) {
      mcsim::ArchConfig cfg = load_config(config_path);
      mcsim::ResourceEstimate est = mcsim::estimate_resources(cfg);
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.1f", mcsim::peak_flops(cfg) / 1e9);
      std::cout << est.luts << " LUTs, " << est.dsps << " DSPs, " << est.brams
                << " BRAMs, " << buf << " GFLOPs peak";
      if (est.extrapolated) std::cout << " [uncalibrated extrapolation]";
      std::cout << "\n";
      return kExitOk;
    }
    if (*dense_cmd) {
      mcsim::ArchConfig cfg = load_config(config_path);
      auto kv = parse_kv(dense_args);
      if (!kv.count("n")) throw mcsim::ConfigError("run-dense: missing n=<size>");
      TraceFile trace(trace_path);
      mcsim::RunResult res = mcsim::run_dense(cfg, std::stoull(kv["n"]), seed, trace.options);
      print_run(res);
      append_csv(csv_path, res.row);
      return kExitOk;
    }
    if (*spmv_cmd) {
      mcsim::ArchConfig cfg = load_config(config_path);
      auto kv = parse_kv(spmv_args);
      std::string name;
      mcsim::CscMatrix m = load_matrix(kv, seed, name);
      TraceFile trace(trace_path);
      mcsim::RunResult res = mcsim::run_spmv(cfg, m, name, seed, trace.options);
      print_run(res);
      append_csv(csv_path, res.row);
      if (!balance_path.empty()) {
        std::ofstream out(balance_path);
        if (!out) throw mcsim::IoError("cannot open balance file: " + balance_path);
        mcsim::RowAssignment assign = mcsim::assign_rows(m, cfg.num_cores);
        mcsim::LoadBalance lb = mcsim::load_balance(m, assign);
        out << "core,rows,nnz,fraction\n";
        char line[96];
        for (mcsim::u32 c = 0; c < cfg.num_cores; ++c) {
          std::snprintf(line, sizeof line, "%u,%llu,%llu,%.9g\n", c,
                        static_cast<unsigned long long>(assign.rows_per_core[c]),
                        static_cast<unsigned long long>(assign.nnz_per_core[c]),
                        lb.fractions[c]);
          out << line;
        }
      }
      return kExitOk;
    }
    if (*verify_cmd) {
      mcsim::ArchConfig cfg = load_config(config_path);
      auto kv = parse_kv(verify_args);
      const std::string kernel = kv.count("kernel") ? kv["kernel"] : "dense";
      if (kernel == "dense") {
        const mcsim::u64 n = kv.count("n") ? std::stoull(kv["n"]) : 64;
        mcsim::run_dense(cfg, n, seed);
        std::cout << "verify dense n=" << n << ": simulate matches replay and matmul_ref\n";
      } else if (kernel == "spmv") {
        const mcsim::u64 n = kv.count("n") ? std::stoull(kv["n"]) : 64;
        mcsim::CscMatrix m = mcsim::to_csc(mcsim::gen_sparse(n, n, 0, 4, seed));
        mcsim::run_spmv(cfg, m, "synthetic", seed);
        std::cout << "verify spmv n=" << n << ": simulate matches replay and spmv_ref\n";
      } else {
        throw mcsim::ConfigError("verify: kernel must be dense or spmv");
      }
      return kExitOk;
    }
    if (*sweep_cmd) {
      mcsim::SweepSpec spec = mcsim::parse_sweep_spec(read_file(spec_path));
      std::ofstream out(out_path);
      if (!out) throw mcsim::IoError("cannot open output file: " + out_path);
      mcsim::run_sweep(spec, out, &std::cerr);
      std::cout << "wrote " << out_path << "\n";
      return kExitOk;
    }
  } catch (const mcsim::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const mcsim::PlanError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const mcsim::GoldenMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGolden;
  } catch (const mcsim::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
