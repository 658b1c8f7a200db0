#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qae/engine.hpp"
#include "qae/workload.hpp"

namespace qae {

struct BenchResult {
  std::string case_name;
  Variant variant = Variant::full;
  std::optional<int> run;  // empty on the aggregate row
  double throughput_tps = 0.0;
  double latency_avg_ms = 0.0;
  double latency_p50_ms = 0.0;
  double latency_p99_ms = 0.0;
  double comparisons_avg = 0.0;
  double grant_rate = 0.0;
};

struct Replay {
  BenchResult result;
  std::vector<Decision> decisions;
  std::size_t rebuilds = 0;
};

/// Replays the whole stream through a fresh engine. The first 5% of the
/// stream is excluded from latency and throughput statistics. Throws
/// Errc::empty_stream for an empty stream.
Replay replay(const Workload& w, Variant variant, const EngineConfig& config, int run = 0);

struct CaseBench {
  std::vector<BenchResult> runs;
  BenchResult mean;

  std::vector<BenchResult> rows() const;  // runs then mean
};

BenchResult mean_of(std::span<const BenchResult> runs);

CaseBench run_case(const std::string& case_name, Variant variant, int runs, std::uint64_t seed,
                   double scale, const EngineConfig& config);
CaseBench run_workload(const Workload& w, Variant variant, int runs, const EngineConfig& config);

struct AnonymityRow {
  std::string case_name;
  std::size_t t = 0;
  std::size_t r = 0;
  std::size_t cohort_size = 0;
  double e_req_min = 0.0;
  double e_req_mean = 0.0;
  double e_req_max = 0.0;
};

struct AnonymityReport {
  std::string case_name;
  std::vector<AnonymityRow> rows;  // ascending t
  double a_sub_q1 = 0.0;
  double a_sub_median = 0.0;
  double a_sub_q3 = 0.0;
};

/// Per feasible t: (r,t)-anonymity and E_req statistics over the distinct
/// size-t credentials the population can present; A_sub quartiles across
/// subjects. Throws Errc::empty_population.
AnonymityReport anonymity_report(const std::string& case_name, const Registry& registry,
                                 const Ledger& history);
AnonymityReport anonymity_report(const Workload& w);

/// Type-7 (linear interpolation) quantile of an unsorted sample.
double quantile(std::vector<double> values, double q);

std::string bench_csv(std::span<const BenchResult> rows);
std::string anonymity_csv(std::span<const AnonymityReport> reports);

/// Writes text to path, throwing Errc::io_error when the path is not writable.
void export_csv(const std::string& csv, const std::string& path);

}  // namespace qae
