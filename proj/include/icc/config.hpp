#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "icc/types.hpp"

namespace icc {

enum class Modulation { qpsk };

enum class Algorithm { benchmark, single_stream, multi_stream, mf_bound };

enum class Role { data_only, compute_only, both };

enum class NomographicKind { sum, product };

/// How the OTAC combiner u = A^{-1} b is obtained.
enum class SolverMode { direct, woodbury, gabp };

/// Construction of the data-error covariance fed to the combiner.
enum class OmegaMode { as_printed, diagonal };

inline bool carries_data(Role r) noexcept { return r != Role::compute_only; }
inline bool carries_compute(Role r) noexcept { return r != Role::data_only; }

struct SystemConfig {
  int n_antennas = 64;
  int n_users = 32;
  int n_streams = 1;
  double data_power = 1.0;
  double noise_var = 1.0;
  int i_max = 30;
  double beta_d = 0.5;
  double beta_s = 0.8;
  double beta_u = 0.3;
  /// Prior variance of the combiner entries.
  double sigma_u2 = 1.0;
  std::uint64_t base_seed = 1;
  Modulation modulation = Modulation::qpsk;
  Algorithm algorithm = Algorithm::single_stream;
  NomographicKind function = NomographicKind::sum;

  /// One entry per user.
  std::vector<Role> roles;
  /// 1-based stream index per user, 0 for data_only users.
  std::vector<int> stream_assignment;

  SolverMode solver_mode = SolverMode::gabp;
  OmegaMode omega_mode = OmegaMode::as_printed;
  /// Also pin the data replicas of users that send both data and compute.
  bool pin_kds = false;
  /// Precision-weighted data consensus in the single/multi-stream receivers.
  bool weighted_consensus = false;
  /// Keep only the real part of the function estimate.
  bool real_only = false;

  int computing_users() const {
    return static_cast<int>(std::count_if(roles.begin(), roles.end(), carries_compute));
  }
  int data_users() const {
    return static_cast<int>(std::count_if(roles.begin(), roles.end(), carries_data));
  }
};

/// Every user sends both streams; computing users split into M contiguous
/// blocks, the first floor(K/M) in stream 1 and so on.
inline std::vector<int> contiguous_assignment(const std::vector<Role>& roles, int n_streams) {
  std::vector<int> out(roles.size(), 0);
  std::vector<std::size_t> computing;
  for (std::size_t k = 0; k < roles.size(); ++k) {
    if (carries_compute(roles[k])) computing.push_back(k);
  }
  // floor(K_C/M) users in each of the first M-1 streams, remainder in the last
  const std::size_t block = std::max<std::size_t>(computing.size() / static_cast<std::size_t>(n_streams), 1);
  for (std::size_t i = 0; i < computing.size(); ++i) {
    const auto m = std::min<std::size_t>(i / block, static_cast<std::size_t>(n_streams - 1));
    out[computing[i]] = static_cast<int>(m) + 1;
  }
  return out;
}

/// Convenience builder: K_D data-only users first, then K_S compute-only,
/// then K_DS dual-role users, streams assigned contiguously.
inline SystemConfig make_config(int n_antennas, int n_users, int n_streams = 1) {
  SystemConfig cfg;
  cfg.n_antennas = n_antennas;
  cfg.n_users = n_users;
  cfg.n_streams = n_streams;
  cfg.roles.assign(static_cast<std::size_t>(n_users), Role::both);
  cfg.stream_assignment = contiguous_assignment(cfg.roles, n_streams);
  return cfg;
}

inline void set_role_counts(SystemConfig& cfg, int k_data, int k_compute, int k_both) {
  cfg.n_users = k_data + k_compute + k_both;
  cfg.roles.clear();
  cfg.roles.insert(cfg.roles.end(), static_cast<std::size_t>(k_data), Role::data_only);
  cfg.roles.insert(cfg.roles.end(), static_cast<std::size_t>(k_compute), Role::compute_only);
  cfg.roles.insert(cfg.roles.end(), static_cast<std::size_t>(k_both), Role::both);
  cfg.stream_assignment = contiguous_assignment(cfg.roles, cfg.n_streams);
}

inline void validate(const SystemConfig& cfg) {
  auto fail = [](const std::string& what) { throw ConfigError("invalid config: " + what); };
  if (cfg.n_antennas < 1) fail("n_antennas must be >= 1");
  if (cfg.n_users < 1) fail("n_users must be >= 1");
  if (cfg.n_streams < 1) fail("n_streams must be >= 1");
  if (!(cfg.data_power > 0.0)) fail("data_power must be > 0");
  if (!(cfg.noise_var > 0.0)) fail("noise_var must be > 0");
  if (cfg.i_max < 1) fail("i_max must be >= 1");
  auto open_unit = [](double b) { return b > 0.0 && b < 1.0; };
  if (!open_unit(cfg.beta_d)) fail("beta_d must lie in (0,1)");
  if (!open_unit(cfg.beta_s)) fail("beta_s must lie in (0,1)");
  if (!open_unit(cfg.beta_u)) fail("beta_u must lie in (0,1)");
  if (!(cfg.sigma_u2 > 0.0)) fail("sigma_u2 must be > 0");
  const auto k = static_cast<std::size_t>(cfg.n_users);
  if (cfg.roles.size() != k) fail("roles must have one entry per user");
  if (cfg.stream_assignment.size() != k) fail("stream_assignment must have one entry per user");
  for (std::size_t i = 0; i < k; ++i) {
    const int m = cfg.stream_assignment[i];
    if (carries_compute(cfg.roles[i])) {
      if (m < 1 || m > cfg.n_streams) {
        fail("user " + std::to_string(i) + " assigned to stream " + std::to_string(m) +
             " outside 1.." + std::to_string(cfg.n_streams));
      }
    } else if (m != 0) {
      fail("data_only user " + std::to_string(i) + " must not carry a stream index");
    }
  }
  if (cfg.algorithm == Algorithm::single_stream && cfg.n_streams != 1) {
    fail("single_stream requires n_streams = 1");
  }
}

// Name tables shared by the scenario parser and CSV writer.

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::benchmark: return "benchmark";
    case Algorithm::single_stream: return "single_stream";
    case Algorithm::multi_stream: return "multi_stream";
    case Algorithm::mf_bound: return "mf_bound";
  }
  return "?";
}

inline std::string_view to_string(SolverMode s) {
  switch (s) {
    case SolverMode::direct: return "direct";
    case SolverMode::woodbury: return "woodbury";
    case SolverMode::gabp: return "gabp";
  }
  return "?";
}

inline std::string_view to_string(OmegaMode o) {
  return o == OmegaMode::as_printed ? "as_printed" : "diagonal";
}

inline std::string_view to_string(Role r) {
  switch (r) {
    case Role::data_only: return "data_only";
    case Role::compute_only: return "compute_only";
    case Role::both: return "both";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view s) {
  for (auto a : {Algorithm::benchmark, Algorithm::single_stream, Algorithm::multi_stream,
                 Algorithm::mf_bound}) {
    if (s == to_string(a)) return a;
  }
  return std::nullopt;
}

inline std::optional<SolverMode> parse_solver_mode(std::string_view s) {
  for (auto m : {SolverMode::direct, SolverMode::woodbury, SolverMode::gabp}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

inline std::optional<OmegaMode> parse_omega_mode(std::string_view s) {
  if (s == "as_printed") return OmegaMode::as_printed;
  if (s == "diagonal") return OmegaMode::diagonal;
  return std::nullopt;
}

inline std::optional<Role> parse_role(std::string_view s) {
  for (auto r : {Role::data_only, Role::compute_only, Role::both}) {
    if (s == to_string(r)) return r;
  }
  return std::nullopt;
}

}  // namespace icc
