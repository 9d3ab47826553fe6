// Copyright 2026 The cdtbounds Authors.
// Licensed under the Apache License, Version 2.0.

#include "cli.hpp"

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif
#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "cdt/bounds.hpp"
#include "cdt/instance_io.hpp"

namespace cdt::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

struct Config {
  std::string instance;
  std::string bound = "twoopt";
  std::vector<std::string> bounds;
  std::optional<double> eps;
  std::optional<double> tol;
  std::uint64_t seed = 1;
  int n = 0;
  int count = 1;
  std::string out;
  bool trace = false;
  unsigned jobs = 0;
};

BoundOptions bound_options(const Config& c) {
  BoundOptions o;
  o.eps = c.eps;
  o.tol = c.tol;
  o.trace = c.trace;
  return o;
}

BoundKind bound_or_throw(const std::string& name) {
  const std::optional<BoundKind> b = parse_bound(name);
  if (!b) throw ValidationError("unknown bound '" + name + "'");
  return *b;
}

void write_trace(std::ostream& os, const BoundReport& r) {
  os << "iter,lambda,lb";
  for (std::size_t k = 0; k < r.cuts.size(); ++k)
    for (Eigen::Index i = 0; i < r.cuts[k].anchor.size(); ++i)
      os << ",anchor" << k + 1 << '_' << i + 1;
  os << '\n';
  char buf[40];
  auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    os << buf;
  };
  for (const TraceRecord& t : r.trace) {
    os << t.iter << ',';
    put(t.lambda);
    os << ',';
    put(t.lb);
    for (const Vector& a : t.anchors)
      for (Eigen::Index i = 0; i < a.size(); ++i) {
        os << ',';
        put(a(i));
      }
    os << '\n';
  }
}

int cmd_solve(const Config& c, std::ostream& out, std::ostream& err) {
  const BoundKind bound = bound_or_throw(c.bound);
  const CdtInstance inst = read_instance(c.instance);
  const PipelineResult pr = run_pipeline(inst, bound, bound_options(c));
  const BoundReport& r = pr.report(bound);
  const GapCertificate gap = relative_gap(r.lb, pr.ub->ub);

  ordered_json j;
  j["bound"] = std::string(bound_name(bound));
  j["lb"] = r.lb;
  j["ub"] = gap.ub;
  j["rel_gap"] = gap.rel_gap;
  j["lambda"] = r.final_lambda;
  j["iterations"] = r.iterations;
  j["time_ms"] = 1e3 * pr.cumulative_time(bound);
  j["solved"] = gap.solved;
  out << j.dump() << '\n';

  if (c.trace) {
    if (c.out.empty()) {
      write_trace(err, r);
    } else {
      std::ofstream f(c.out);
      if (!f) throw ValidationError("cannot open trace file " + c.out);
      write_trace(f, r);
    }
  }
  return kExitOk;
}

int cmd_bench(const Config& c, std::ostream& out, std::ostream& err) {
  std::error_code ec;
  if (!fs::is_directory(c.instance, ec)) {
    err << "bench: not a readable directory: " << c.instance << '\n';
    return kExitInvalid;
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(c.instance, ec))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  if (ec) {
    err << "bench: cannot list " << c.instance << ": " << ec.message() << '\n';
    return kExitInvalid;
  }
  std::sort(files.begin(), files.end());

  std::vector<BenchInstance> instances;
  for (const fs::path& p : files) {
    try {
      InstanceFile f = read_instance_file(p);
      instances.push_back({f.meta.name.value_or(p.stem().string()), std::move(f.instance)});
    } catch (const Error& e) {
      err << "bench: skipping " << p.string() << ": " << e.what() << '\n';
    }
  }
  if (instances.empty()) {
    err << "bench: no valid instances in " << c.instance << '\n';
    return kExitInvalid;
  }

  BenchOptions opts;
  if (!c.bounds.empty()) {
    opts.bounds.clear();
    for (const std::string& b : c.bounds) opts.bounds.push_back(bound_or_throw(b));
  }
  opts.bound_options = bound_options(c);
  opts.bound_options.trace = false;
  opts.jobs = c.jobs;
  const BenchResult result = benchmark_run(instances, opts);
  for (const BenchFailure& f : result.failures)
    err << "bench: " << f.instance << " failed: " << f.message << '\n';

  if (c.out.empty()) {
    write_bench_csv(out, result);
  } else {
    std::ofstream f(c.out);
    if (!f) throw ValidationError("cannot open report file " + c.out);
    write_bench_csv(f, result);
  }
  return result.records.empty() ? kExitNumeric : kExitOk;
}

int cmd_gen(const Config& c, std::ostream& out, std::ostream& err) {
  if (c.n < 2) throw ValidationError("gen: --n must be >= 2");
  if (c.count < 1) throw ValidationError("gen: --count must be >= 1");
  const fs::path dir = c.out.empty() ? fs::path(".") : fs::path(c.out);
  fs::create_directories(dir);
  int failed = 0;
  for (int i = 0; i < c.count; ++i) {
    const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(i);
    const fs::path path = dir / (instance_name(c.n, seed) + ".json");
    try {
      const InstanceFile f = generate_instance_file(c.n, seed);
      write_instance(f.instance, path, f.meta);
      out << path.string() << '\n';
    } catch (const Error& e) {
      ++failed;
      err << "gen: " << path.string() << ": " << e.what() << '\n';
    }
  }
  return failed ? kExitNumeric : kExitOk;
}

int cmd_check(const Config& c, std::ostream& out, std::ostream& err) {
  ordered_json j;
  std::optional<InstanceFile> file;
  try {
    file = read_instance_file(c.instance, false);
  } catch (const Error& e) {
    j["verdict"] = "fail";
    j["reason"] = e.what();
    out << j.dump() << '\n';
    err << "check: " << e.what() << '\n';
    return kExitInvalid;
  }
  const CdtInstance& inst = file->instance;
  const InteriorCheck ic = check_interior_assumption(inst);
  const SymEig qe = sym_eig(inst.Q());
  const SymEig ae = sym_eig(inst.A());
  const Eigen::Index n = inst.n();
  j["n"] = n;
  j["ell_a"] = ic.ell_a;
  j["a0"] = inst.a0();
  j["lambda_hat"] = ic.satisfied ? ordered_json(lambda_hat(inst)) : ordered_json(nullptr);
  j["Q_eig"] = {qe.values(0), qe.values(n - 1)};
  j["A_eig"] = {ae.values(0), ae.values(n - 1)};
  j["interior_assumption"] = ic.satisfied;
  j["verdict"] = ic.satisfied ? "pass" : "fail";
  out << j.dump() << '\n';
  return ic.satisfied ? kExitOk : kExitInvalid;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lower and upper bounds for the CDT problem", "cdtbound"};
  app.require_subcommand(1);
  Config c;

  auto add_tolerances = [&](CLI::App* sub) {
    sub->add_option("--eps", c.eps, "lambda bisection width (default 1e-8 (1 + lambda_hat))")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol", c.tol, "cut optimization improvement threshold")
        ->check(CLI::PositiveNumber);
  };
  const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (BoundKind b : kAllBounds) v.emplace_back(bound_name(b));
    return v;
  }();

  CLI::App* solve = app.add_subcommand("solve", "compute one bound for an instance file");
  solve->add_option("instance", c.instance, "instance file")->required();
  solve->add_option("--bound", c.bound, "bound to report")->check(CLI::IsMember(names));
  add_tolerances(solve);
  solve->add_flag("--trace", c.trace, "per-iteration CSV to --out (default stderr)");
  solve->add_option("--out", c.out, "trace output file");

  CLI::App* bench = app.add_subcommand("bench", "run bounds over a directory of instances");
  bench->add_option("instance", c.instance, "directory of .json instance files")->required();
  bench->add_option("--bound", c.bounds, "bounds to report (repeatable, default all)")
      ->check(CLI::IsMember(names));
  add_tolerances(bench);
  bench->add_option("--out", c.out, "CSV report file (default stdout)");
  bench->add_option("--jobs", c.jobs, "worker threads (default: number of processors)");

  CLI::App* gen = app.add_subcommand("gen", "generate random instances");
  gen->add_option("--n", c.n, "dimension (>= 2)")->required();
  gen->add_option("--count", c.count, "number of instances");
  gen->add_option("--seed", c.seed, "first seed");
  gen->add_option("--out", c.out, "output directory (default .)");

  CLI::App* check = app.add_subcommand("check", "validate an instance file");
  check->add_option("instance", c.instance, "instance file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*solve) return cmd_solve(c, out, err);
    if (*bench) return cmd_bench(c, out, err);
    if (*gen) return cmd_gen(c, out, err);
    return cmd_check(c, out, err);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const AssumptionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"cdtbound"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace cdt::cli
