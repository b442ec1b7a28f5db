#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "icc/config.hpp"
#include "icc/harness.hpp"

namespace icc {

// Built-in campaigns. They reproduce the published trends; the published
// curves carry no tabulated points, so grids and trial counts are choices.

struct PresetInfo {
  std::string_view name;
  std::string_view description;
};

inline constexpr std::array<PresetInfo, 6> kPresets{{
    {"fig2a", "benchmark receiver and MF bound, N=100, K in {75,100,125}"},
    {"fig2b", "benchmark receiver and MF bound, N=200, K in {150,200}"},
    {"fig4", "benchmark vs single-stream receiver (GaBP combiner), N=100, K in {75,100,125}"},
    {"fig5", "NMSE against load, K = 20..120 step 20, N=100, fixed SNR"},
    {"fig6", "multi-stream receiver with M=2, N=100, K in {75,100}"},
    {"fig7", "multi-access role splits (25,25,25), (30,30,40), (40,40,45), N=100"},
}};

inline std::vector<double> default_snr_grid() { return {0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0}; }

namespace detail {

inline Scenario preset_scenario(std::string name, int n, int k, std::vector<Algorithm> algs, SolverMode solver,
                                int m = 1) {
  Scenario sc;
  sc.name = std::move(name);
  sc.system = make_config(n, k, m);
  sc.system.solver_mode = solver;
  sc.algorithms = std::move(algs);
  sc.snr_grid_db = default_snr_grid();
  sc.trials = 1000;
  return sc;
}

}  // namespace detail

inline bool is_preset(std::string_view name) {
  for (const auto& p : kPresets) {
    if (p.name == name) return true;
  }
  return false;
}

inline std::vector<Scenario> make_preset(std::string_view name) {
  using detail::preset_scenario;
  std::vector<Scenario> out;
  const std::string tag(name);
  if (name == "fig2a" || name == "fig2b") {
    const int n = name == "fig2a" ? 100 : 200;
    const std::vector<int> loads = name == "fig2a" ? std::vector<int>{75, 100, 125} : std::vector<int>{150, 200};
    for (int k : loads) {
      out.push_back(preset_scenario(tag + "_K" + std::to_string(k), n, k,
                                    {Algorithm::benchmark, Algorithm::mf_bound}, SolverMode::direct));
    }
  } else if (name == "fig4") {
    for (int k : {75, 100, 125}) {
      out.push_back(preset_scenario(tag + "_K" + std::to_string(k), 100, k,
                                    {Algorithm::benchmark, Algorithm::single_stream, Algorithm::mf_bound},
                                    SolverMode::gabp));
    }
  } else if (name == "fig5") {
    for (int k = 20; k <= 120; k += 20) {
      Scenario sc = preset_scenario(tag + "_K" + std::to_string(k), 100, k,
                                    {Algorithm::benchmark, Algorithm::single_stream, Algorithm::mf_bound},
                                    SolverMode::gabp);
      sc.snr_grid_db = {20.0};
      out.push_back(std::move(sc));
    }
  } else if (name == "fig6") {
    for (int k : {75, 100}) {
      out.push_back(preset_scenario(tag + "_K" + std::to_string(k), 100, k,
                                    {Algorithm::multi_stream, Algorithm::mf_bound}, SolverMode::gabp, 2));
    }
  } else if (name == "fig7") {
    constexpr std::array<std::array<int, 3>, 3> splits{{{25, 25, 25}, {30, 30, 40}, {40, 40, 45}}};
    for (const auto& s : splits) {
      Scenario sc = preset_scenario(tag + "_" + std::to_string(s[0]) + "_" + std::to_string(s[1]) + "_" +
                                        std::to_string(s[2]),
                                    100, s[0] + s[1] + s[2], {Algorithm::single_stream}, SolverMode::gabp);
      set_role_counts(sc.system, s[0], s[1], s[2]);
      out.push_back(std::move(sc));
    }
  } else {
    throw ConfigError("unknown preset '" + tag + "'");
  }
  return out;
}

}  // namespace icc
