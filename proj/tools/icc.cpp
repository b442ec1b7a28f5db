// icc: run ICC receiver Monte Carlo campaigns and write CSV results.

#include <charconv>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "icc/icc.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

std::optional<std::uint64_t> seed_from_env() {
  const char* raw = std::getenv("ICC_SEED");
  if (!raw || !*raw) return std::nullopt;
  const std::string s(raw);
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw icc::ConfigError("ICC_SEED must be an unsigned 64-bit integer, got '" + s + "'");
  }
  return v;
}

int simulate(const std::string& scenario_path, const std::string& preset, const std::string& out_path, int threads,
             int trials_override) {
  std::vector<icc::Scenario> scenarios;
  if (!scenario_path.empty()) scenarios.push_back(icc::load_scenario(scenario_path));
  if (!preset.empty()) {
    auto more = icc::make_preset(preset);
    scenarios.insert(scenarios.end(), more.begin(), more.end());
  }
  if (scenarios.empty()) throw icc::ConfigError("give --scenario or --preset");

  const auto seed = seed_from_env();
  for (auto& sc : scenarios) {
    if (seed) sc.system.base_seed = *seed;
    if (trials_override > 0) sc.trials = trials_override;
    icc::validate(sc);  // every scenario checked before any trial runs
  }

  std::vector<icc::ResultRow> rows;
  for (const auto& sc : scenarios) {
    std::cerr << "running " << sc.name << " (" << sc.trials << " trials x " << sc.snr_grid_db.size()
              << " SNR points x " << sc.algorithms.size() << " algorithms)\n";
    auto part = icc::run_campaign(sc, threads);
    rows.insert(rows.end(), part.begin(), part.end());
  }

  std::string target = out_path;
  if (target.empty() && scenarios.size() == 1) target = scenarios.front().output_path;
  if (target.empty() || target == "-") {
    std::cout << icc::format_csv(rows);
  } else {
    icc::write_csv(rows, target);
    std::cerr << "wrote " << rows.size() << " rows to " << target << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GaBP integrated communication and computing receivers: Monte Carlo campaigns"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "run a scenario file or a built-in preset");
  std::string scenario_path;
  std::string preset;
  std::string out_path;
  int threads = icc::default_thread_count();
  int trials = 0;
  sim->add_option("--scenario", scenario_path, "scenario file")->check(CLI::ExistingFile);
  sim->add_option("--preset", preset, "built-in preset (see `icc presets`)");
  sim->add_option("--out", out_path, "CSV output path; '-' for stdout");
  sim->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  sim->add_option("--trials", trials, "override the trial count of every scenario")->check(CLI::PositiveNumber);

  auto* list = app.add_subcommand("presets", "list built-in presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (list->parsed()) {
      for (const auto& p : icc::kPresets) std::cout << p.name << "\t" << p.description << '\n';
      return kExitOk;
    }
    return simulate(scenario_path, preset, out_path, threads, trials);
  } catch (const icc::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const icc::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
