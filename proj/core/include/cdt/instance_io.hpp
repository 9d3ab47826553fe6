// Copyright 2026 The cdtbounds Authors.
// Licensed under the Apache License, Version 2.0.

// Instance files, the random instance generator and the benchmark runner.
//
// Instance file (UTF-8 JSON, keys in this order):
//   {"n": 2, "Q": [[...], ...], "q": [...], "A": [[...], ...], "a": [...],
//    "a0": 2, "meta": {"name": "...", "seed": 1, "known_optimum": -4}}
// Floats are written with 17 significant digits so a read/write cycle is
// bit exact and equal instances serialize to identical bytes.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cdt/bounds.hpp"
#include "cdt/model.hpp"

namespace cdt {

struct InstanceMeta {
  std::optional<std::string> name;
  std::optional<std::uint64_t> seed;
  std::optional<double> known_optimum;

  bool empty() const { return !name && !seed && !known_optimum; }
  friend bool operator==(const InstanceMeta&, const InstanceMeta&) = default;
};

struct InstanceFile {
  CdtInstance instance;
  InstanceMeta meta;
};

/// Canonical text. Throws ValidationError on non-finite data.
std::string serialize_instance(const CdtInstance& inst, const InstanceMeta& meta = {});

/// Throws ParseError (malformed), ValidationError (bad data) or, when
/// `require_interior` is set, AssumptionError.
InstanceFile parse_instance(std::string_view text, bool require_interior = true);

InstanceFile read_instance_file(const std::filesystem::path& path,
                                bool require_interior = true);
CdtInstance read_instance(const std::filesystem::path& path);

/// Throws ValidationError on non-finite data and Error on I/O failure.
void write_instance(const CdtInstance& inst, const std::filesystem::path& path,
                    const InstanceMeta& meta = {});

class GenerationError : public Error {
 public:
  using Error::Error;
};

/// "cdt_n{n}_s{seed}".
std::string instance_name(int n, std::uint64_t seed);

/// Deterministic in (n, seed): Q with a simple, negative smallest eigenvalue
/// and a local-nonglobal TRS minimizer, A with condition number <= 6, and a0
/// halfway between the ellipsoid values at the TRS global (made infeasible)
/// and local-nonglobal minimizers. Throws ValidationError for n < 2 and
/// GenerationError after 1000 rejected draws.
CdtInstance generate_instance(int n, std::uint64_t seed);
InstanceFile generate_instance_file(int n, std::uint64_t seed);

struct BenchRecord {
  std::string instance;
  BoundKind bound = BoundKind::dual;
  double lb = 0.0;
  double ub = 0.0;
  double rel_gap = 0.0;
  double lambda = 0.0;
  int iterations = 0;
  double time_ms = 0.0;  // cumulative along the pipeline up to this bound
  bool solved = false;
};

struct BenchAggregate {
  BoundKind bound = BoundKind::dual;
  int records = 0;
  int solved = 0;
  // Mean gap under the table conventions: twocut and twoopt average only
  // over the instances they leave unsolved (0 when there are none).
  double avg_gap = 0.0;
  double max_gap = 0.0;
  // Mean time; twoopt averages over the instances twocut leaves unsolved.
  double avg_time_ms = 0.0;
  double max_time_ms = 0.0;
  double mean_gap_all = 0.0;  // plain mean over every record
};

struct BenchFailure {
  std::string instance;
  std::string message;
};

struct BenchInstance {
  std::string name;
  CdtInstance instance;
};

struct BenchOptions {
  std::vector<BoundKind> bounds{kAllBounds.begin(), kAllBounds.end()};
  BoundOptions bound_options;
  unsigned jobs = 0;  // 0: hardware concurrency
};

struct BenchResult {
  std::vector<BenchRecord> records;  // sorted by instance name, then bound
  std::vector<BenchAggregate> aggregates;
  std::vector<BenchFailure> failures;
};

/// Throws ValidationError on an empty instance list or bound selection.
/// Per-instance failures are collected, not thrown.
BenchResult benchmark_run(const std::vector<BenchInstance>& instances,
                          const BenchOptions& opts = {});

/// Aggregates in the order of `bounds`, computed from the records alone.
std::vector<BenchAggregate> aggregate_records(const std::vector<BenchRecord>& records,
                                              const std::vector<BoundKind>& bounds);

/// CSV records, then a "# summary" line and the aggregate table.
void write_bench_csv(std::ostream& out, const BenchResult& result);
std::string format_summary(const std::vector<BenchAggregate>& aggregates);

/// Records from CSV text produced by write_bench_csv (summary ignored).
std::vector<BenchRecord> parse_bench_csv(std::string_view text);

/// `x` printed with 12 significant digits and parsed back.
double round12(double x);

}  // namespace cdt
