#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "icc/config.hpp"
#include "icc/metrics.hpp"
#include "icc/model.hpp"
#include "icc/nomographic.hpp"
#include "icc/receiver_benchmark.hpp"
#include "icc/receiver_icc.hpp"
#include "icc/types.hpp"

namespace icc {

/// One sweep: the same system evaluated by each algorithm at each SNR point.
/// system.noise_var is overwritten per point from the SNR grid.
struct Scenario {
  std::string name = "scenario";
  SystemConfig system;
  std::vector<Algorithm> algorithms{Algorithm::single_stream};
  std::vector<double> snr_grid_db;
  int trials = 100;
  std::string output_path;
  /// Wall-clock time per row; off by default so reruns stay byte-identical.
  bool record_timing = false;
};

struct ResultRow {
  std::string algorithm;
  std::string solver_mode;
  int n_antennas = 0;
  int n_users = 0;
  int n_streams = 0;
  double snr_db = 0.0;
  int trials = 0;
  double ber = 0.0;
  double ber_ci95 = 0.0;
  double nmse = 0.0;
  double nmse_db = 0.0;
  double diverged_fraction = 0.0;
  double elapsed_ms = 0.0;
};

/// Configuration of one (algorithm, SNR) point.
inline SystemConfig point_config(const Scenario& sc, Algorithm alg, double snr_db) {
  SystemConfig cfg = sc.system;
  cfg.algorithm = alg;
  cfg.noise_var = snr_to_noise_var(snr_db, cfg);
  return cfg;
}

inline void validate(const Scenario& sc) {
  auto fail = [&](const std::string& what) { throw ConfigError("scenario '" + sc.name + "': " + what); };
  if (sc.snr_grid_db.empty()) fail("snr_grid_db is empty");
  if (sc.trials < 1) fail("trials must be >= 1");
  if (sc.algorithms.empty()) fail("no algorithms listed");
  for (double snr : sc.snr_grid_db) {
    if (!std::isfinite(snr)) fail("snr_grid_db entries must be finite");
  }
  for (Algorithm a : sc.algorithms) validate(point_config(sc, a, sc.snr_grid_db.front()));
}

/// One Monte Carlo trial of cfg.algorithm. Numerical blow-ups are reported
/// in the metrics rather than thrown.
inline TrialMetrics run_trial(const SystemConfig& cfg, std::uint64_t trial) {
  const TrialDraw t = draw_trial(cfg, trial);
  const auto selectors = make_selectors(cfg);
  TrialMetrics m;
  m.n_users = cfg.n_users;

  CVector d_hat;
  CVector f_hat;
  std::vector<bool> diverged;
  try {
    switch (cfg.algorithm) {
      case Algorithm::benchmark: {
        auto out = run_benchmark(t.rx, t.channel, cfg);
        d_hat = std::move(out.d_hat);
        f_hat = std::move(out.f_hat);
        diverged = std::move(out.combiner_diverged);
        break;
      }
      case Algorithm::single_stream:
      case Algorithm::multi_stream:
      case Algorithm::mf_bound: {
        IccOutput out = cfg.algorithm == Algorithm::single_stream ? run_single_stream(t.rx, t.channel, cfg)
                        : cfg.algorithm == Algorithm::multi_stream
                            ? run_multi_stream(t.rx, t.channel, cfg, selectors)
                            : run_mf_bound(t.rx, t.channel, cfg, t.frame);
        d_hat = std::move(out.d_hat);
        f_hat = std::move(out.f_hat);
        diverged = std::move(out.combiner_diverged);
        break;
      }
    }
  } catch (const NumericalDivergence&) {
    m.numerically_diverged = true;
    return m;
  } catch (const SingularSystemError&) {
    m.numerically_diverged = true;
    return m;
  }

  const BitCount bits = count_bit_errors(d_hat, t.frame, cfg.roles);
  m.bit_errors = bits.errors;
  m.bits_total = bits.total;
  for (std::size_t s = 0; s < selectors.size(); ++s) {
    const TargetValue f = evaluate_target(cfg.function, t.frame.s_raw, selectors[s]);
    if (f.empty_selector) continue;
    m.nmse_num += std::norm(f.value - f_hat(static_cast<Eigen::Index>(s)));
    ++m.streams;
  }
  for (bool d : diverged) m.combiner_diverged = m.combiner_diverged || d;
  return m;
}

/// Runs body(i) for i in [0, n) on up to `threads` workers. The first
/// exception thrown by any body is rethrown after all workers join.
template <class Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i; !stop && (i = next.fetch_add(1)) < n;) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        stop = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

inline int default_thread_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Rows are ordered by SNR point, then by the scenario's algorithm order.
/// Trial t of every point uses the same seeds, so algorithms and SNR points
/// are compared on common random numbers.
inline std::vector<ResultRow> run_campaign(const Scenario& sc, int threads = 1) {
  validate(sc);
  std::vector<ResultRow> rows;
  std::vector<TrialMetrics> results(static_cast<std::size_t>(sc.trials));
  for (double snr : sc.snr_grid_db) {
    for (Algorithm alg : sc.algorithms) {
      const SystemConfig cfg = point_config(sc, alg, snr);
      const auto start = std::chrono::steady_clock::now();
      parallel_for(results.size(), threads, [&](std::size_t i) { results[i] = run_trial(cfg, i); });
      const auto stop = std::chrono::steady_clock::now();

      AggregateMetrics agg;
      for (const auto& r : results) agg.add(r);  // fixed trial order

      ResultRow row;
      row.algorithm = std::string(to_string(alg));
      row.solver_mode = std::string(to_string(cfg.solver_mode));
      row.n_antennas = cfg.n_antennas;
      row.n_users = cfg.n_users;
      row.n_streams = cfg.n_streams;
      row.snr_db = snr;
      row.trials = sc.trials;
      row.ber = agg.ber();
      row.ber_ci95 = agg.ber_ci95();
      row.nmse = agg.nmse();
      row.nmse_db = std::isnan(row.nmse) ? row.nmse : to_db(row.nmse);
      row.diverged_fraction = agg.diverged_fraction();
      row.elapsed_ms =
          sc.record_timing ? std::chrono::duration<double, std::milli>(stop - start).count() : 0.0;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

// ---- CSV --------------------------------------------------------------------

inline constexpr const char* kCsvHeader =
    "algorithm,solver_mode,N,K,M,snr_db,trials,ber,ber_ci95,nmse,nmse_db,diverged_fraction,elapsed_ms";

/// 9 significant digits; non-finite values as nan, inf, -inf.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string format_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.algorithm << ',' << r.solver_mode << ',' << r.n_antennas << ',' << r.n_users << ',' << r.n_streams
       << ',' << format_real(r.snr_db) << ',' << r.trials << ',' << format_real(r.ber) << ','
       << format_real(r.ber_ci95) << ',' << format_real(r.nmse) << ',' << format_real(r.nmse_db) << ','
       << format_real(r.diverged_fraction) << ',' << format_real(r.elapsed_ms) << '\n';
  }
  return os.str();
}

inline void write_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  if (rows.empty()) throw ConfigError("write_csv: no rows to write");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << format_csv(rows);
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline std::vector<ResultRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ConfigError("CSV header mismatch");
  std::vector<ResultRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 13) throw ConfigError("CSV line " + std::to_string(line_no) + ": expected 13 fields");
    auto real = [&](const std::string& s) {
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (end == s.c_str() || *end != '\0') {
        throw ConfigError("CSV line " + std::to_string(line_no) + ": bad number '" + s + "'");
      }
      return v;
    };
    auto integer = [&](const std::string& s) { return static_cast<int>(real(s)); };
    rows.push_back({f[0], f[1], integer(f[2]), integer(f[3]), integer(f[4]), real(f[5]), integer(f[6]), real(f[7]),
                    real(f[8]), real(f[9]), real(f[10]), real(f[11]), real(f[12])});
  }
  return rows;
}

inline std::vector<ResultRow> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return parse_csv(in);
}

}  // namespace icc
