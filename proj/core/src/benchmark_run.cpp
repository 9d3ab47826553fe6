// Copyright 2026 The cdtbounds Authors.
// Licensed under the Apache License, Version 2.0.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <thread>

#include "cdt/instance_io.hpp"

namespace cdt {

namespace {

constexpr const char* kHeader = "instance,bound,lb,ub,rel_gap,lambda,iterations,time_ms,solved";
constexpr const char* kSummaryMarker = "# summary";

std::string g12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

struct InstanceOutcome {
  std::vector<BenchRecord> records;
  std::optional<BenchFailure> failure;
};

InstanceOutcome solve_one(const BenchInstance& bi, const BenchOptions& opts) {
  InstanceOutcome out;
  try {
    const PipelineResult pr = run_bounds(bi.instance, opts.bounds, opts.bound_options);
    const double ub = round12(pr.ub->ub);
    for (BoundKind b : kAllBounds) {
      if (std::find(opts.bounds.begin(), opts.bounds.end(), b) == opts.bounds.end()) continue;
      const BoundReport& r = pr.report(b);
      BenchRecord rec;
      rec.instance = bi.name;
      rec.bound = b;
      rec.lb = round12(r.lb);
      rec.ub = ub;
      const GapCertificate gap = relative_gap(rec.lb, rec.ub);
      rec.rel_gap = round12(gap.rel_gap);
      rec.solved = gap.solved;
      rec.lambda = round12(r.final_lambda);
      rec.iterations = r.iterations;
      rec.time_ms = round12(1e3 * pr.cumulative_time(b));
      out.records.push_back(std::move(rec));
    }
  } catch (const std::exception& e) {
    out.records.clear();
    out.failure = BenchFailure{bi.name, e.what()};
  }
  return out;
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double max_of(const std::vector<double>& xs) {
  return xs.empty() ? 0.0 : *std::max_element(xs.begin(), xs.end());
}

}  // namespace

double round12(double x) { return std::strtod(g12(x).c_str(), nullptr); }

BenchResult benchmark_run(const std::vector<BenchInstance>& instances,
                          const BenchOptions& opts) {
  if (instances.empty()) throw ValidationError("benchmark_run: no instances");
  if (opts.bounds.empty()) throw ValidationError("benchmark_run: empty bound selection");

  std::vector<InstanceOutcome> outcomes(instances.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < instances.size(); i = next++)
      outcomes[i] = solve_one(instances[i], opts);
  };
  unsigned jobs = opts.jobs ? opts.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, instances.size()));
  std::vector<std::jthread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  pool.clear();

  std::vector<std::size_t> order(instances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return instances[a].name < instances[b].name;
  });

  BenchResult result;
  for (std::size_t i : order) {
    auto& o = outcomes[i];
    for (BenchRecord& r : o.records) result.records.push_back(std::move(r));
    if (o.failure) result.failures.push_back(std::move(*o.failure));
  }
  std::vector<BoundKind> bounds;
  for (BoundKind b : kAllBounds)
    if (std::find(opts.bounds.begin(), opts.bounds.end(), b) != opts.bounds.end())
      bounds.push_back(b);
  result.aggregates = aggregate_records(result.records, bounds);
  return result;
}

std::vector<BenchAggregate> aggregate_records(const std::vector<BenchRecord>& records,
                                              const std::vector<BoundKind>& bounds) {
  // Instances that twocut leaves unsolved select the twoopt timing sample.
  std::vector<std::string> twocut_unsolved;
  bool have_twocut = false;
  for (const BenchRecord& r : records)
    if (r.bound == BoundKind::twocut) {
      have_twocut = true;
      if (!r.solved) twocut_unsolved.push_back(r.instance);
    }

  std::vector<BenchAggregate> out;
  for (BoundKind b : bounds) {
    BenchAggregate agg;
    agg.bound = b;
    std::vector<double> gaps, unsolved_gaps, times, timed;
    for (const BenchRecord& r : records) {
      if (r.bound != b) continue;
      ++agg.records;
      if (r.solved) ++agg.solved;
      gaps.push_back(r.rel_gap);
      if (!r.solved) unsolved_gaps.push_back(r.rel_gap);
      times.push_back(r.time_ms);
      const bool in_sample =
          !have_twocut || std::find(twocut_unsolved.begin(), twocut_unsolved.end(),
                                    r.instance) != twocut_unsolved.end();
      if (in_sample) timed.push_back(r.time_ms);
    }
    const bool unsolved_only = b == BoundKind::twocut || b == BoundKind::twoopt;
    agg.avg_gap = mean(unsolved_only ? unsolved_gaps : gaps);
    agg.max_gap = max_of(gaps);
    agg.avg_time_ms = mean(b == BoundKind::twoopt ? timed : times);
    agg.max_time_ms = max_of(times);
    agg.mean_gap_all = mean(gaps);
    out.push_back(agg);
  }
  return out;
}

std::string format_summary(const std::vector<BenchAggregate>& aggregates) {
  std::string s = std::string(kSummaryMarker) +
                  "\nbound,records,solved,avg_gap,max_gap,avg_time_ms,max_time_ms,"
                  "mean_gap_all\n";
  for (const BenchAggregate& a : aggregates) {
    s += std::string(bound_name(a.bound)) + ',' + std::to_string(a.records) + ',' +
         std::to_string(a.solved) + ',' + g12(a.avg_gap) + ',' + g12(a.max_gap) + ',' +
         g12(a.avg_time_ms) + ',' + g12(a.max_time_ms) + ',' + g12(a.mean_gap_all) + '\n';
  }
  return s;
}

void write_bench_csv(std::ostream& out, const BenchResult& result) {
  out << kHeader << '\n';
  for (const BenchRecord& r : result.records) {
    out << r.instance << ',' << bound_name(r.bound) << ',' << g12(r.lb) << ',' << g12(r.ub)
        << ',' << g12(r.rel_gap) << ',' << g12(r.lambda) << ',' << r.iterations << ','
        << g12(r.time_ms) << ',' << (r.solved ? 1 : 0) << '\n';
  }
  out << format_summary(result.aggregates);
}

std::vector<BenchRecord> parse_bench_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kHeader)
    throw ParseError("bench csv: missing or unexpected header");
  std::vector<BenchRecord> out;
  while (std::getline(in, line)) {
    if (line == kSummaryMarker) break;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() != 9) throw ParseError("bench csv: expected 9 fields in: " + line);
    BenchRecord r;
    r.instance = f[0];
    const std::optional<BoundKind> b = parse_bound(f[1]);
    if (!b) throw ParseError("bench csv: unknown bound " + f[1]);
    r.bound = *b;
    r.lb = std::strtod(f[2].c_str(), nullptr);
    r.ub = std::strtod(f[3].c_str(), nullptr);
    r.rel_gap = std::strtod(f[4].c_str(), nullptr);
    r.lambda = std::strtod(f[5].c_str(), nullptr);
    r.iterations = std::atoi(f[6].c_str());
    r.time_ms = std::strtod(f[7].c_str(), nullptr);
    r.solved = f[8] == "1";
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace cdt
