#pragma once

#include <cmath>
#include <vector>

#include "icc/config.hpp"
#include "icc/types.hpp"

namespace icc {

// Nomographic target functions f(s) = post(sum_k pre(s_k)).

/// Users contributing to one OTAC stream.
struct StreamSelector {
  RVector p;             ///< length K, entries in {0,1}
  int stream_index = 1;  ///< 1..M
};

inline cplx preprocess(NomographicKind kind, cplx s) {
  if (kind == NomographicKind::sum) return s;
  if (s == cplx{0.0, 0.0}) throw DomainError("product pre-processing: log2(0) is undefined");
  if (s.imag() == 0.0 && s.real() > 0.0) return std::log2(s.real());
  return std::log(s) / std::log(2.0);  // principal branch
}

inline cplx postprocess(NomographicKind kind, cplx aggregate) {
  if (kind == NomographicKind::sum) return aggregate;
  if (aggregate.imag() == 0.0) return std::exp2(aggregate.real());
  return std::exp(aggregate * std::log(2.0));
}

struct TargetValue {
  cplx value;
  bool empty_selector = false;
};

inline TargetValue evaluate_target(NomographicKind kind, const CVector& s, const StreamSelector& sel) {
  if (sel.p.size() != s.size()) {
    throw ConfigError("evaluate_target: selector length " + std::to_string(sel.p.size()) +
                      " does not match " + std::to_string(s.size()) + " users");
  }
  cplx acc{0.0, 0.0};
  bool any = false;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (sel.p(k) != 0.0) {
      acc += preprocess(kind, s(k));
      any = true;
    }
  }
  return {postprocess(kind, acc), !any};
}

inline std::vector<StreamSelector> make_selectors(const std::vector<Role>& roles,
                                                  const std::vector<int>& stream_assignment, int n_streams) {
  if (roles.size() != stream_assignment.size()) {
    throw ConfigError("make_selectors: roles and stream assignment differ in length");
  }
  const auto k = static_cast<Eigen::Index>(roles.size());
  std::vector<StreamSelector> out;
  out.reserve(static_cast<std::size_t>(n_streams));
  for (int m = 1; m <= n_streams; ++m) out.push_back({RVector::Zero(k), m});
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (!carries_compute(roles[idx])) continue;
    const int m = stream_assignment[idx];
    if (m < 1 || m > n_streams) {
      throw ConfigError("make_selectors: user " + std::to_string(i) + " assigned to stream " +
                        std::to_string(m) + " but M = " + std::to_string(n_streams));
    }
    out[static_cast<std::size_t>(m - 1)].p(i) = 1.0;
  }
  return out;
}

inline std::vector<StreamSelector> make_selectors(const SystemConfig& cfg) {
  return make_selectors(cfg.roles, cfg.stream_assignment, cfg.n_streams);
}

/// Single selector over every computing user (the 1_K of the single-stream combiner).
inline StreamSelector merged_selector(const std::vector<StreamSelector>& sels, Eigen::Index n_users) {
  StreamSelector all{RVector::Zero(n_users), 1};
  for (const auto& s : sels) all.p += s.p;
  return all;
}

}  // namespace icc
