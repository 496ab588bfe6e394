#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "uavjam/admm.hpp"
#include "uavjam/baselines.hpp"
#include "uavjam/errors.hpp"
#include "uavjam/io.hpp"
#include "uavjam/scenario.hpp"

namespace uavjam {

inline const std::vector<std::string>& all_schemes() {
  static const std::vector<std::string> names{"proposed", "baseline2", "baseline1"};
  return names;
}

inline bool known_scheme(const std::string& name) {
  const auto& all = all_schemes();
  return std::find(all.begin(), all.end(), name) != all.end();
}

struct SweepSpec {
  std::vector<int> m_values{1, 2, 3, 4};
  int k = 3;
  int num_seeds = 10;
  std::uint64_t base_seed = 0;
  std::vector<std::string> schemes = all_schemes();
  TargetRegion region;
  AdmmConfig admm;
  BcdConfig bcd;
};

inline std::vector<Violation> validate_sweep(const SweepSpec& s) {
  std::vector<Violation> out;
  if (s.m_values.empty()) out.push_back({"m_values", "m_values must not be empty"});
  for (int m : s.m_values) {
    if (m < 1) out.push_back({"m_values", "every M must be ≥ 1"});
  }
  if (s.k < 1) out.push_back({"k", "k must be ≥ 1"});
  if (s.num_seeds < 1) out.push_back({"num_seeds", "num_seeds must be ≥ 1"});
  if (s.schemes.empty()) out.push_back({"schemes", "schemes must not be empty"});
  for (const auto& name : s.schemes) {
    if (!known_scheme(name)) out.push_back({"schemes", "unknown scheme '" + name + "'"});
  }
  for (auto& v : validate_config(s.admm)) out.push_back(std::move(v));
  return out;
}

struct SweepRow {
  std::string scheme;
  int m = 0;
  std::uint64_t seed = 0;
  double avg_sinr_db = 0.0;
  double runtime_s = 0.0;
  bool converged = false;
  std::string status = "ok";  // error message when the run failed
};

inline SolverReport run_scheme(const std::string& scheme, const Scenario& s, const AdmmConfig& admm,
                               const BcdConfig& bcd) {
  if (scheme == "proposed") return solve(s, std::nullopt, admm);
  if (scheme == "baseline1") return baseline1(s, bcd);
  if (scheme == "baseline2") return baseline2(s, bcd);
  throw Error("unknown scheme '" + scheme + "'");
}

// Runs every scheme x M x seed cell on up to `jobs` threads. Rows come back in
// spec order (scheme, then M, then seed) whatever the completion order.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, int jobs = 1) {
  if (auto v = validate_sweep(spec); !v.empty()) throw ValidationError(std::move(v));
  std::vector<SweepRow> rows;
  for (const auto& scheme : spec.schemes) {
    for (int m : spec.m_values) {
      for (int j = 0; j < spec.num_seeds; ++j) {
        SweepRow r;
        r.scheme = scheme;
        r.m = m;
        r.seed = spec.base_seed + static_cast<std::uint64_t>(j);
        rows.push_back(std::move(r));
      }
    }
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      SweepRow& r = rows[i];
      try {
        const Scenario s = random_scenario(r.seed, r.m, spec.k, spec.region);
        const SolverReport rep = run_scheme(r.scheme, s, spec.admm, spec.bcd);
        r.avg_sinr_db = rep.avg_sinr_db;
        r.runtime_s = rep.wall_time_s;
        r.converged = rep.converged;
      } catch (const std::exception& e) {
        r.status = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(rows.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

struct SweepCell {
  std::string scheme;
  int m = 0;
  int runs = 0;       // successful rows
  int failures = 0;
  int converged = 0;
  double mean_avg_sinr_db = 0.0;
  double mean_runtime_s = 0.0;
};

inline std::vector<SweepCell> aggregate(const std::vector<SweepRow>& rows) {
  std::vector<SweepCell> cells;
  for (const auto& r : rows) {
    if (cells.empty() || cells.back().scheme != r.scheme || cells.back().m != r.m) {
      SweepCell c;
      c.scheme = r.scheme;
      c.m = r.m;
      cells.push_back(c);
    }
    SweepCell& c = cells.back();
    if (r.status != "ok") {
      ++c.failures;
      continue;
    }
    ++c.runs;
    c.converged += r.converged ? 1 : 0;
    c.mean_avg_sinr_db += r.avg_sinr_db;
    c.mean_runtime_s += r.runtime_s;
  }
  for (auto& c : cells) {
    if (c.runs > 0) {
      c.mean_avg_sinr_db /= c.runs;
      c.mean_runtime_s /= c.runs;
    }
  }
  return cells;
}

namespace detail {
inline std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}
}  // namespace detail

// include_timing = false writes 0 for runtimes, making the files byte-stable.
inline std::string sweep_detail_csv(const std::vector<SweepRow>& rows, bool include_timing = true) {
  std::string out = "scheme,M,seed,avg_sinr_db,runtime_s,converged,status\n";
  for (const auto& r : rows) {
    const bool ok = r.status == "ok";
    out += r.scheme + "," + std::to_string(r.m) + "," + std::to_string(r.seed) + "," +
           (ok ? fmt_double(r.avg_sinr_db) : std::string("nan")) + "," +
           fmt_double(include_timing ? r.runtime_s : 0.0) + "," + (r.converged ? "1" : "0") + "," +
           detail::csv_safe(r.status) + "\n";
  }
  return out;
}

inline std::string sweep_aggregate_csv(const std::vector<SweepCell>& cells, bool include_timing = true) {
  std::string out = "scheme,M,mean_avg_sinr_db,mean_runtime_s,converged,runs,failures\n";
  for (const auto& c : cells) {
    out += c.scheme + "," + std::to_string(c.m) + "," +
           (c.runs > 0 ? fmt_double(c.mean_avg_sinr_db) : std::string("nan")) + "," +
           fmt_double(include_timing ? c.mean_runtime_s : 0.0) + "," + std::to_string(c.converged) + "," +
           std::to_string(c.runs) + "," + std::to_string(c.failures) + "\n";
  }
  return out;
}

// True when every (scheme, M) cell has at least one successful row.
inline bool every_cell_ran(const std::vector<SweepCell>& cells) {
  return std::all_of(cells.begin(), cells.end(), [](const SweepCell& c) { return c.runs > 0; });
}

}  // namespace uavjam
