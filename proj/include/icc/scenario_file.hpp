#pragma once

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "icc/config.hpp"
#include "icc/harness.hpp"
#include "icc/types.hpp"

namespace icc {

// Scenario files: TOML-style sections of `key = value` lines.
//
//   [system]    every SystemConfig scalar (n_antennas, beta_u, solver_mode, ...)
//   [roles]     counts = [K_D, K_S, K_DS]  or  list = ["both", "data_only", ...]
//               streams = "contiguous"  or  [1, 2, 0, ...]
//   [campaign]  name, algorithms, snr_grid_db, trials, output_path, record_timing
//
// Values are numbers, true/false, "strings" (bare words accepted) or flat
// [arrays]. `#` starts a comment. Unknown sections and keys are errors.

namespace detail {

struct RawValue {
  std::vector<std::string> items;  ///< one entry for scalars
  bool is_array = false;
  int line = 0;
};

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

inline std::string unquote(const std::string& tok, int line) {
  if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') return tok.substr(1, tok.size() - 2);
  if (tok.find('"') != std::string::npos) {
    throw ConfigError("line " + std::to_string(line) + ": unbalanced quotes in '" + tok + "'");
  }
  return tok;
}

inline RawValue parse_value(const std::string& text, int line) {
  RawValue v;
  v.line = line;
  if (text.empty()) throw ConfigError("line " + std::to_string(line) + ": missing value");
  if (text.front() == '[') {
    if (text.back() != ']') throw ConfigError("line " + std::to_string(line) + ": unterminated array");
    v.is_array = true;
    const std::string body = trim(std::string_view(text).substr(1, text.size() - 2));
    if (body.empty()) return v;
    std::stringstream ss(body);
    for (std::string item; std::getline(ss, item, ',');) {
      item = trim(item);
      if (item.empty()) throw ConfigError("line " + std::to_string(line) + ": empty array element");
      v.items.push_back(unquote(item, line));
    }
    return v;
  }
  v.items.push_back(unquote(text, line));
  return v;
}

inline std::string where(const RawValue& v, const std::string& key) {
  return "line " + std::to_string(v.line) + " (" + key + ")";
}

inline const std::string& scalar(const RawValue& v, const std::string& key) {
  if (v.is_array || v.items.size() != 1) throw ConfigError(where(v, key) + ": expected a single value");
  return v.items.front();
}

template <class T>
T parse_number(const std::string& s, const RawValue& v, const std::string& key) {
  T out{};
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, out);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ConfigError(where(v, key) + ": '" + s + "' is not a valid number");
  }
  return out;
}

inline bool parse_bool(const std::string& s, const RawValue& v, const std::string& key) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError(where(v, key) + ": expected true or false, got '" + s + "'");
}

template <class Enum>
Enum parse_enum(const std::string& s, std::optional<Enum> (*parser)(std::string_view), const RawValue& v,
                const std::string& key) {
  if (auto e = parser(s)) return *e;
  throw ConfigError(where(v, key) + ": unknown value '" + s + "'");
}

inline std::optional<NomographicKind> parse_function(std::string_view s) {
  if (s == "sum") return NomographicKind::sum;
  if (s == "product") return NomographicKind::product;
  return std::nullopt;
}

inline std::optional<Modulation> parse_modulation(std::string_view s) {
  if (s == "qpsk" || s == "QPSK") return Modulation::qpsk;
  return std::nullopt;
}

using Section = std::map<std::string, RawValue>;

}  // namespace detail

inline Scenario parse_scenario(std::istream& in) {
  using namespace detail;
  std::map<std::string, Section> sections;
  const std::set<std::string> known{"system", "roles", "campaign"};
  std::string current;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      current = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!known.count(current)) {
        throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" + current + "]");
      }
      if (sections.count(current)) {
        throw ConfigError("line " + std::to_string(line_no) + ": duplicate section [" + current + "]");
      }
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    if (current.empty()) throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    auto& sec = sections[current];
    if (sec.count(key)) throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    sec[key] = parse_value(trim(std::string_view(line).substr(eq + 1)), line_no);
  }

  Scenario sc;
  SystemConfig& cfg = sc.system;

  using Setter = std::function<void(const RawValue&, const std::string&)>;
  auto as_int = [](const RawValue& v, const std::string& k) { return parse_number<int>(scalar(v, k), v, k); };
  auto as_real = [](const RawValue& v, const std::string& k) { return parse_number<double>(scalar(v, k), v, k); };
  auto as_bool = [](const RawValue& v, const std::string& k) { return parse_bool(scalar(v, k), v, k); };

  const std::map<std::string, Setter> system_keys{
      {"n_antennas", [&](auto& v, auto& k) { cfg.n_antennas = as_int(v, k); }},
      {"n_users", [&](auto& v, auto& k) { cfg.n_users = as_int(v, k); }},
      {"n_streams", [&](auto& v, auto& k) { cfg.n_streams = as_int(v, k); }},
      {"data_power", [&](auto& v, auto& k) { cfg.data_power = as_real(v, k); }},
      {"noise_var", [&](auto& v, auto& k) { cfg.noise_var = as_real(v, k); }},
      {"i_max", [&](auto& v, auto& k) { cfg.i_max = as_int(v, k); }},
      {"beta_d", [&](auto& v, auto& k) { cfg.beta_d = as_real(v, k); }},
      {"beta_s", [&](auto& v, auto& k) { cfg.beta_s = as_real(v, k); }},
      {"beta_u", [&](auto& v, auto& k) { cfg.beta_u = as_real(v, k); }},
      {"sigma_u2", [&](auto& v, auto& k) { cfg.sigma_u2 = as_real(v, k); }},
      {"base_seed",
       [&](auto& v, auto& k) { cfg.base_seed = parse_number<std::uint64_t>(scalar(v, k), v, k); }},
      {"modulation", [&](auto& v, auto& k) { cfg.modulation = parse_enum(scalar(v, k), parse_modulation, v, k); }},
      {"function", [&](auto& v, auto& k) { cfg.function = parse_enum(scalar(v, k), parse_function, v, k); }},
      {"solver_mode",
       [&](auto& v, auto& k) { cfg.solver_mode = parse_enum(scalar(v, k), parse_solver_mode, v, k); }},
      {"omega_mode", [&](auto& v, auto& k) { cfg.omega_mode = parse_enum(scalar(v, k), parse_omega_mode, v, k); }},
      {"pin_kds", [&](auto& v, auto& k) { cfg.pin_kds = as_bool(v, k); }},
      {"weighted_consensus", [&](auto& v, auto& k) { cfg.weighted_consensus = as_bool(v, k); }},
      {"real_only", [&](auto& v, auto& k) { cfg.real_only = as_bool(v, k); }},
  };

  std::optional<std::vector<int>> role_counts;
  std::optional<std::vector<Role>> role_list;
  std::optional<std::vector<int>> streams;
  const std::map<std::string, Setter> role_keys{
      {"counts",
       [&](auto& v, auto& k) {
         if (!v.is_array || v.items.size() != 3) throw ConfigError(where(v, k) + ": expected [K_D, K_S, K_DS]");
         std::vector<int> c;
         for (const auto& s : v.items) c.push_back(parse_number<int>(s, v, k));
         role_counts = c;
       }},
      {"list",
       [&](auto& v, auto& k) {
         if (!v.is_array) throw ConfigError(where(v, k) + ": expected an array of roles");
         std::vector<Role> r;
         for (const auto& s : v.items) r.push_back(parse_enum(s, parse_role, v, k));
         role_list = r;
       }},
      {"streams",
       [&](auto& v, auto& k) {
         if (!v.is_array) {
           if (scalar(v, k) != "contiguous") throw ConfigError(where(v, k) + ": expected \"contiguous\" or an array");
           return;
         }
         std::vector<int> a;
         for (const auto& s : v.items) a.push_back(parse_number<int>(s, v, k));
         streams = a;
       }},
  };

  const std::map<std::string, Setter> campaign_keys{
      {"name", [&](auto& v, auto& k) { sc.name = scalar(v, k); }},
      {"algorithms",
       [&](auto& v, auto& k) {
         sc.algorithms.clear();
         if (!v.is_array) {
           sc.algorithms.push_back(parse_enum(scalar(v, k), parse_algorithm, v, k));
           return;
         }
         for (const auto& s : v.items) sc.algorithms.push_back(parse_enum(s, parse_algorithm, v, k));
       }},
      {"snr_grid_db",
       [&](auto& v, auto& k) {
         sc.snr_grid_db.clear();
         for (const auto& s : v.items) sc.snr_grid_db.push_back(parse_number<double>(s, v, k));
       }},
      {"trials", [&](auto& v, auto& k) { sc.trials = as_int(v, k); }},
      {"output_path", [&](auto& v, auto& k) { sc.output_path = scalar(v, k); }},
      {"record_timing", [&](auto& v, auto& k) { sc.record_timing = as_bool(v, k); }},
  };

  auto apply = [&](const std::string& name, const std::map<std::string, Setter>& table) {
    auto it = sections.find(name);
    if (it == sections.end()) return;
    for (const auto& [key, value] : it->second) {
      auto setter = table.find(key);
      if (setter == table.end()) {
        throw ConfigError("line " + std::to_string(value.line) + ": unknown key '" + key + "' in [" + name + "]");
      }
      setter->second(value, key);
    }
  };
  apply("system", system_keys);
  apply("roles", role_keys);
  apply("campaign", campaign_keys);

  if (role_counts && role_list) throw ConfigError("[roles]: give either counts or list, not both");
  const bool users_given = sections.count("system") && sections["system"].count("n_users");
  if (role_counts) {
    const auto& c = *role_counts;
    if (c[0] < 0 || c[1] < 0 || c[2] < 0) throw ConfigError("[roles]: counts must be nonnegative");
    if (users_given && c[0] + c[1] + c[2] != cfg.n_users) {
      throw ConfigError("[roles]: counts sum to " + std::to_string(c[0] + c[1] + c[2]) + " but n_users = " +
                        std::to_string(cfg.n_users));
    }
    set_role_counts(cfg, c[0], c[1], c[2]);
  } else if (role_list) {
    if (users_given && static_cast<int>(role_list->size()) != cfg.n_users) {
      throw ConfigError("[roles]: list has " + std::to_string(role_list->size()) + " entries but n_users = " +
                        std::to_string(cfg.n_users));
    }
    cfg.n_users = static_cast<int>(role_list->size());
    cfg.roles = *role_list;
  } else {
    cfg.roles.assign(static_cast<std::size_t>(std::max(cfg.n_users, 0)), Role::both);
  }
  if (streams) {
    cfg.stream_assignment = *streams;
  } else if (cfg.n_streams >= 1) {
    cfg.stream_assignment = contiguous_assignment(cfg.roles, cfg.n_streams);
  }
  return sc;
}

inline Scenario parse_scenario(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file '" + path + "'");
  try {
    return parse_scenario(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace icc
