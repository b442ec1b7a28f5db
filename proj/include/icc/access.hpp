#pragma once

#include <vector>

#include "icc/config.hpp"

namespace icc {

/// Users whose data replicas are held at zero (with zero variance) inside
/// every data-detection sweep. Default policy pins compute-only users; with
/// pin_kds the dual-role users are pinned as well.
struct AccessConstraints {
  std::vector<bool> force_zero_data;

  bool pinned(Eigen::Index k) const { return force_zero_data[static_cast<std::size_t>(k)]; }
};

inline AccessConstraints make_access_constraints(const SystemConfig& cfg) {
  AccessConstraints c;
  c.force_zero_data.reserve(cfg.roles.size());
  for (Role r : cfg.roles) {
    c.force_zero_data.push_back(r == Role::compute_only || (cfg.pin_kds && r == Role::both));
  }
  return c;
}

inline AccessConstraints no_constraints(int n_users) {
  return {std::vector<bool>(static_cast<std::size_t>(n_users), false)};
}

}  // namespace icc
