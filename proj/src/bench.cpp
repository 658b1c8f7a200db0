#include "qae/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "qae/anonymity.hpp"
#include "qae/error.hpp"

namespace qae {
namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

// All size-t subsets of `pairs`, appended as credential keys into `out`.
void collect_subsets(const std::vector<AVPair>& pairs, std::size_t t,
                     std::map<std::string, Credential>& out) {
  std::vector<bool> pick(pairs.size(), false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(t), true);
  do {
    std::vector<AVPair> chosen;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (pick[i]) chosen.push_back(pairs[i]);
    }
    Credential c(std::move(chosen));
    out.try_emplace(c.key(), std::move(c));
  } while (std::prev_permutation(pick.begin(), pick.end()));
}

}  // namespace

Replay replay(const Workload& w, Variant variant, const EngineConfig& config, int run) {
  if (w.requests.empty()) throw Error(Errc::empty_stream, w.spec.name);
  Engine engine(w.registry, w.policies, config, variant);

  const std::size_t n = w.requests.size();
  const std::size_t warmup = n * 5 / 100;
  Replay out;
  out.decisions.reserve(n);
  std::vector<double> latencies;
  latencies.reserve(n - warmup);

  std::uint64_t comparisons = 0;
  std::size_t grants = 0;
  Clock::time_point measured_start = Clock::now();
  for (std::size_t i = 0; i < n; ++i) {
    if (i == warmup) measured_start = Clock::now();
    const auto t0 = Clock::now();
    const Decision d = engine.authorize(w.requests[i]);
    const auto t1 = Clock::now();
    if (i >= warmup) latencies.push_back(ms_between(t0, t1));
    comparisons += d.comparisons;
    if (d.outcome == Outcome::grant) ++grants;
    out.decisions.push_back(d);
  }
  const double wall_ms = ms_between(measured_start, Clock::now());

  auto& r = out.result;
  r.case_name = w.spec.name;
  r.variant = variant;
  r.run = run;
  r.throughput_tps = static_cast<double>(latencies.size()) / (std::max(wall_ms, 1e-9) / 1000.0);
  double sum = 0.0;
  for (double l : latencies) sum += l;
  r.latency_avg_ms = sum / static_cast<double>(latencies.size());
  r.latency_p50_ms = quantile(latencies, 0.5);
  r.latency_p99_ms = quantile(latencies, 0.99);
  r.comparisons_avg = static_cast<double>(comparisons) / static_cast<double>(n);
  r.grant_rate = static_cast<double>(grants) / static_cast<double>(n);
  out.rebuilds = engine.rebuild_count();
  return out;
}

std::vector<BenchResult> CaseBench::rows() const {
  auto out = runs;
  out.push_back(mean);
  return out;
}

BenchResult mean_of(std::span<const BenchResult> runs) {
  if (runs.empty()) throw Error(Errc::invalid_argument, "no runs to average");
  BenchResult m;
  m.case_name = runs.front().case_name;
  m.variant = runs.front().variant;
  for (const auto& r : runs) {
    m.throughput_tps += r.throughput_tps;
    m.latency_avg_ms += r.latency_avg_ms;
    m.latency_p50_ms += r.latency_p50_ms;
    m.latency_p99_ms += r.latency_p99_ms;
    m.comparisons_avg += r.comparisons_avg;
    m.grant_rate += r.grant_rate;
  }
  const auto n = static_cast<double>(runs.size());
  m.throughput_tps /= n;
  m.latency_avg_ms /= n;
  m.latency_p50_ms /= n;
  m.latency_p99_ms /= n;
  m.comparisons_avg /= n;
  m.grant_rate /= n;
  return m;
}

CaseBench run_workload(const Workload& w, Variant variant, int runs, const EngineConfig& config) {
  if (runs < 1) throw Error(Errc::invalid_argument, "runs must be >= 1");
  CaseBench out;
  for (int i = 0; i < runs; ++i) out.runs.push_back(replay(w, variant, config, i).result);
  out.mean = mean_of(out.runs);
  return out;
}

CaseBench run_case(const std::string& case_name, Variant variant, int runs, std::uint64_t seed,
                   double scale, const EngineConfig& config) {
  const auto w = generate(case_spec(case_name), seed, scale);
  return run_workload(w, variant, runs, config);
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

AnonymityReport anonymity_report(const std::string& case_name, const Registry& registry,
                                 const Ledger& history) {
  if (registry.subject_count() == 0) throw Error(Errc::empty_population, case_name);
  AnonymityReport rep;
  rep.case_name = case_name;
  for (std::size_t t = 1; t <= registry.max_subject_attrs(); ++t) {
    RTResult rt;
    try {
      rt = rt_anonymity(registry, history, t);
    } catch (const Error& e) {
      if (e.code() == Errc::empty_cohort) continue;
      throw;
    }
    std::map<std::string, Credential> credentials;
    for (const auto& s : registry.subjects()) {
      if (s.pairs.size() >= t) collect_subsets(s.pairs, t, credentials);
    }
    AnonymityRow row;
    row.case_name = case_name;
    row.t = t;
    row.r = rt.r;
    row.cohort_size = rt.cohort.size();
    row.e_req_min = std::numeric_limits<double>::infinity();
    row.e_req_max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const auto& [key, c] : credentials) {
      const double e = request_entropy(subject_space(c, registry, history));
      row.e_req_min = std::min(row.e_req_min, e);
      row.e_req_max = std::max(row.e_req_max, e);
      sum += e;
    }
    row.e_req_mean = sum / static_cast<double>(credentials.size());
    rep.rows.push_back(row);
  }
  const auto by_size = subject_anonymity_by_size(registry, history);
  std::vector<double> scores;
  scores.reserve(registry.subject_count());
  for (const auto& s : registry.subjects()) scores.push_back(by_size[s.pairs.size()]);
  rep.a_sub_q1 = quantile(scores, 0.25);
  rep.a_sub_median = quantile(scores, 0.5);
  rep.a_sub_q3 = quantile(scores, 0.75);
  return rep;
}

AnonymityReport anonymity_report(const Workload& w) {
  return anonymity_report(w.spec.name, w.registry, Ledger{});
}

std::string bench_csv(std::span<const BenchResult> rows) {
  std::ostringstream out;
  out << std::setprecision(12);
  out << "case,variant,run,throughput_tps,latency_avg_ms,latency_p50_ms,latency_p99_ms,"
         "comparisons_avg,grant_rate\n";
  for (const auto& r : rows) {
    out << r.case_name << ',' << to_string(r.variant) << ',';
    if (r.run) {
      out << *r.run;
    } else {
      out << "mean";
    }
    out << ',' << r.throughput_tps << ',' << r.latency_avg_ms << ',' << r.latency_p50_ms << ','
        << r.latency_p99_ms << ',' << r.comparisons_avg << ',' << r.grant_rate << '\n';
  }
  return out.str();
}

std::string anonymity_csv(std::span<const AnonymityReport> reports) {
  std::vector<const AnonymityRow*> rows;
  std::map<std::string, const AnonymityReport*> by_case;
  for (const auto& rep : reports) {
    by_case[rep.case_name] = &rep;
    for (const auto& row : rep.rows) rows.push_back(&row);
  }
  // Case names sort naturally (C2 before C10).
  auto case_key = [](const std::string& name) {
    std::size_t digits = name.find_first_of("0123456789");
    long num = digits == std::string::npos ? 0 : std::stol(name.substr(digits));
    return std::pair(name.substr(0, digits), num);
  };
  std::stable_sort(rows.begin(), rows.end(), [&](const AnonymityRow* a, const AnonymityRow* b) {
    const auto ka = case_key(a->case_name);
    const auto kb = case_key(b->case_name);
    if (ka != kb) return ka < kb;
    return a->t < b->t;
  });
  std::ostringstream out;
  out << std::setprecision(12);
  out << "case,t,r,cohort_size,e_req_min,e_req_mean,e_req_max,a_sub_q1,a_sub_median,a_sub_q3\n";
  for (const auto* row : rows) {
    const auto* rep = by_case.at(row->case_name);
    out << row->case_name << ',' << row->t << ',' << row->r << ',' << row->cohort_size << ','
        << row->e_req_min << ',' << row->e_req_mean << ',' << row->e_req_max << ','
        << rep->a_sub_q1 << ',' << rep->a_sub_median << ',' << rep->a_sub_q3 << '\n';
  }
  return out.str();
}

void export_csv(const std::string& csv, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  out << csv;
  if (!out) throw Error(Errc::io_error, "short write to " + path);
}

}  // namespace qae
