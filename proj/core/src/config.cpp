#include "flexduplex/config.hpp"

#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "flexduplex/csv.hpp"

namespace flexduplex::config {

ConfigError::ConfigError(std::string source, int line, std::string key, const std::string& message)
    : InvalidArgument(line > 0 ? fmt::format("{}:{}: {}: {}", source, line, key, message)
                               : fmt::format("{}: {}: {}", source, key, message)),
      line_(line),
      key_(std::move(key)) {}

namespace {

using engine::SimConfig;

struct KeyDef {
  std::string section;
  std::string key;
  std::string description;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
T parse_number(std::string_view v) {
  if constexpr (std::is_floating_point_v<T>) {
    return static_cast<T>(csv::to_double(v));
  } else {
    const long long x = csv::to_integer(v);
    if constexpr (std::is_unsigned_v<T>) {
      if (x < 0) throw InvalidArgument("must be non-negative");
    }
    return static_cast<T>(x);
  }
}

bool parse_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw InvalidArgument(fmt::format("not a boolean: '{}'", v));
}

template <class T, class Access>
KeyDef number(std::string section, std::string key, std::string doc, Access access) {
  return {std::move(section), std::move(key), std::move(doc),
          [access](ExperimentConfig& c, std::string_view v) { access(c.sim) = parse_number<T>(v); },
          [access](const ExperimentConfig& c) {
            auto copy = c.sim;
            return fmt::format("{}", access(copy));
          }};
}

template <class Access>
KeyDef boolean(std::string section, std::string key, std::string doc, Access access) {
  return {std::move(section), std::move(key), std::move(doc),
          [access](ExperimentConfig& c, std::string_view v) { access(c.sim) = parse_bool(v); },
          [access](const ExperimentConfig& c) {
            auto copy = c.sim;
            return std::string(access(copy) ? "true" : "false");
          }};
}

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = [] {
    std::vector<KeyDef> t;
    t.push_back({"engine", "scheme", "ONLY_MENB, FMA_UL_REUSE, FMA_DL_REUSE, TMA_UL_REUSE, or FMA/TMA",
                 [](ExperimentConfig& c, std::string_view v) { c.scheme_name = std::string(v); },
                 [](const ExperimentConfig& c) { return c.scheme_name; }});
    t.push_back(number<long long>("engine", "horizon", "subframes per replication",
                                  [](SimConfig& s) -> auto& { return s.horizon; }));
    t.push_back(number<long long>("engine", "warmup", "subframes excluded from metrics",
                                  [](SimConfig& s) -> auto& { return s.warmup; }));
    t.push_back(number<std::uint64_t>("engine", "seed", "base seed", [](SimConfig& s) -> auto& { return s.seed; }));
    t.push_back(number<int>("engine", "replications", "independent drops",
                            [](SimConfig& s) -> auto& { return s.replications; }));
    t.push_back(number<double>("engine", "interferer_activity", "neighbour MeNB load factor in [0, 1]",
                               [](SimConfig& s) -> auto& { return s.interferer_activity; }));
    t.push_back(boolean("engine", "neighbor_ue_interference", "one full-power UE per neighbour sector",
                        [](SimConfig& s) -> auto& { return s.neighbor_ue_interference; }));
    t.push_back(boolean("engine", "check_invariants", "verify conservation every subframe",
                        [](SimConfig& s) -> auto& { return s.check_invariants; }));
    t.push_back({"engine", "ut_averaging", "packet or ue",
                 [](ExperimentConfig& c, std::string_view v) {
                   if (v == "packet") {
                     c.sim.ut_averaging = metrics::UtAveraging::kPerPacket;
                   } else if (v == "ue") {
                     c.sim.ut_averaging = metrics::UtAveraging::kPerUe;
                   } else {
                     throw InvalidArgument(fmt::format("expected packet or ue, got '{}'", v));
                   }
                 },
                 [](const ExperimentConfig& c) {
                   return std::string(c.sim.ut_averaging == metrics::UtAveraging::kPerUe ? "ue" : "packet");
                 }});

    t.push_back(number<double>("traffic", "lambda_dl", "DL packets/s per UE",
                               [](SimConfig& s) -> auto& { return s.lambda_dl; }));
    t.push_back(number<double>("traffic", "asymmetry_ratio", "lambda_ul / lambda_dl",
                               [](SimConfig& s) -> auto& { return s.asymmetry_ratio; }));
    t.push_back(number<double>("traffic", "packet_bits", "packet size L, bits",
                               [](SimConfig& s) -> auto& { return s.packet_bits; }));
    t.push_back(number<double>("traffic", "packet_bits_sq", "mean squared size; 0 = fixed size",
                               [](SimConfig& s) -> auto& { return s.packet_bits_sq; }));

    t.push_back(number<double>("scenario", "isd", "inter-site distance, m",
                               [](SimConfig& s) -> auto& { return s.isd_m; }));
    t.push_back(number<double>("scenario", "senb_distance", "MeNB to SeNB distance, m",
                               [](SimConfig& s) -> auto& { return s.senb_distance_m; }));
    t.push_back(number<int>("scenario", "ring_count", "interfering rings around the observed site",
                            [](SimConfig& s) -> auto& { return s.ring_count; }));
    t.push_back(number<int>("scenario", "ue_count", "UEs dropped in the observed sector",
                            [](SimConfig& s) -> auto& { return s.ue_count; }));
    t.push_back(number<int>("scenario", "target_sues", "UEs the CRE bias aims to offload",
                            [](SimConfig& s) -> auto& { return s.target_sues; }));
    t.push_back(number<double>("scenario", "cre_min_db", "CRE search grid start",
                               [](SimConfig& s) -> auto& { return s.cre.min_db; }));
    t.push_back(number<double>("scenario", "cre_max_db", "CRE search grid end",
                               [](SimConfig& s) -> auto& { return s.cre.max_db; }));
    t.push_back(number<double>("scenario", "cre_step_db", "CRE search grid step",
                               [](SimConfig& s) -> auto& { return s.cre.step_db; }));

    t.push_back(number<double>("radio", "tx_power_menb", "dBm", [](SimConfig& s) -> auto& {
      return s.budget.tx_power_menb_dbm;
    }));
    t.push_back(number<double>("radio", "tx_power_senb", "dBm", [](SimConfig& s) -> auto& {
      return s.budget.tx_power_senb_dbm;
    }));
    t.push_back(number<double>("radio", "tx_power_ue", "dBm", [](SimConfig& s) -> auto& {
      return s.budget.tx_power_ue_dbm;
    }));
    t.push_back(number<double>("radio", "gain_menb", "dBi, sector peak",
                               [](SimConfig& s) -> auto& { return s.budget.gain_menb_dbi; }));
    t.push_back(number<double>("radio", "gain_senb", "dBi", [](SimConfig& s) -> auto& { return s.budget.gain_senb_dbi; }));
    t.push_back(number<double>("radio", "gain_ue", "dBi", [](SimConfig& s) -> auto& { return s.budget.gain_ue_dbi; }));
    t.push_back(number<double>("radio", "nf_enb", "dB", [](SimConfig& s) -> auto& { return s.budget.nf_enb_db; }));
    t.push_back(number<double>("radio", "nf_ue", "dB", [](SimConfig& s) -> auto& { return s.budget.nf_ue_db; }));
    t.push_back(number<double>("radio", "noise_density", "dBm/Hz",
                               [](SimConfig& s) -> auto& { return s.budget.noise_density_dbm_hz; }));
    t.push_back(number<double>("radio", "mimo_gain", "dB added to the desired link",
                               [](SimConfig& s) -> auto& { return s.budget.mimo_gain_db; }));
    t.push_back(number<double>("radio", "theta_3db", "sector half-power beamwidth, deg",
                               [](SimConfig& s) -> auto& { return s.sector_theta_3db_deg; }));
    t.push_back(number<double>("radio", "max_attenuation", "sector front-to-back limit, dB",
                               [](SimConfig& s) -> auto& { return s.sector_max_attenuation_db; }));
    t.push_back(number<double>("radio", "acir_db", "adjacent-channel interference ratio; inf disables ACI",
                               [](SimConfig& s) -> auto& { return s.aci.acir_db; }));
    t.push_back(boolean("radio", "fading", "per-RB Rayleigh fading",
                        [](SimConfig& s) -> auto& { return s.propagation.fading_enabled; }));
    t.push_back(number<double>("radio", "min_distance", "pathloss distance floor, m",
                               [](SimConfig& s) -> auto& { return s.propagation.min_distance_m; }));
    t.push_back(number<double>("radio", "eta", "Shannon attenuation factor",
                               [](SimConfig& s) -> auto& { return s.link_adaptation.eta; }));
    t.push_back(number<double>("radio", "se_cap", "spectral efficiency cap, bit/s/Hz",
                               [](SimConfig& s) -> auto& { return s.link_adaptation.cap_bps_hz; }));
    t.push_back(number<double>("radio", "sinr_min", "SINR below which nothing is decoded, dB",
                               [](SimConfig& s) -> auto& { return s.link_adaptation.sinr_min_db; }));
    constexpr std::array<const char*, radio::kLinkClassCount> classes{"macro_ue", "small_ue", "macro_small", "ue_ue"};
    for (std::size_t i = 0; i < classes.size(); ++i) {
      const std::string c = classes[i];
      t.push_back(number<double>("radio", "pl_" + c + "_intercept", "pathloss at 1 km, dB",
                                 [i](SimConfig& s) -> auto& { return s.propagation.profiles[i].intercept_db; }));
      t.push_back(number<double>("radio", "pl_" + c + "_slope", "dB per decade",
                                 [i](SimConfig& s) -> auto& { return s.propagation.profiles[i].slope_db; }));
      t.push_back(number<double>("radio", "shadowing_" + c, "log-normal sigma, dB",
                                 [i](SimConfig& s) -> auto& { return s.propagation.shadowing_sigma_db[i]; }));
    }

    t.push_back(number<int>("spectrum", "total_rbs", "RBs per carrier",
                            [](SimConfig& s) -> auto& { return s.plan.total_rbs; }));
    t.push_back(number<int>("spectrum", "guard_rbs", "guard RBs between reuse segments",
                            [](SimConfig& s) -> auto& { return s.plan.guard_rbs; }));
    t.push_back(number<int>("spectrum", "pucch_edge_width", "control RBs per band edge",
                            [](SimConfig& s) -> auto& { return s.plan.pucch_edge_width; }));
    return t;
  }();
  return table;
}

std::vector<double> parse_number_list(std::string_view v) {
  std::vector<double> out;
  if (csv::trim(v).empty()) return out;
  for (const auto& f : csv::split(v)) out.push_back(csv::to_double(f));
  return out;
}

std::string strip_comment(const std::string& line) {
  const auto pos = line.find_first_of("#;");
  return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

engine::Scheme resolve_scheme(std::string_view name, double ratio) {
  if (name == "FMA") return ratio <= 1.0 ? engine::Scheme::kFmaUlReuse : engine::Scheme::kFmaDlReuse;
  if (name == "TMA") {
    if (ratio > 1.0) throw InvalidArgument("TMA is defined only for FDD-UL reuse (ratio <= 1)");
    return engine::Scheme::kTmaUlReuse;
  }
  return engine::parse_scheme(name);
}

std::vector<SweepPoint> ExperimentConfig::sweep_points() const {
  std::vector<SweepPoint> out;
  for (const auto& s : sweeps) {
    for (const auto& name : s.schemes) {
      for (double l : s.lambda_dl) {
        for (double r : s.ratio) out.push_back({resolve_scheme(name, r), l, r});
      }
    }
  }
  return out;
}

std::vector<KeyInfo> known_keys() {
  std::vector<KeyInfo> out;
  for (const auto& k : key_table()) out.push_back({k.section, k.key, k.description});
  out.push_back({"sweep", "schemes", "comma-separated scheme names"});
  out.push_back({"sweep", "lambda_dl", "comma-separated DL arrival rates"});
  out.push_back({"sweep", "ratio", "comma-separated asymmetry ratios"});
  return out;
}

ExperimentConfig parse(std::istream& in, const std::string& source) {
  ExperimentConfig cfg;
  std::map<std::string, int> seen;  // "section.key" -> line
  std::string section;
  SweepAxes* sweep = nullptr;
  std::map<std::string, int> sweep_lines;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line(csv::trim(strip_comment(raw)));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(source, line_no, line, "unterminated section header");
      section = std::string(csv::trim(std::string_view(line).substr(1, line.size() - 2)));
      sweep = nullptr;
      if (section == "sweep" || section.rfind("sweep.", 0) == 0) {
        const std::string name = section == "sweep" ? "" : section.substr(6);
        for (const auto& s : cfg.sweeps) {
          if (s.name == name) throw ConfigError(source, line_no, section, "duplicate sweep section");
        }
        cfg.sweeps.push_back({name, {}, {}, {}});
        sweep = &cfg.sweeps.back();
        sweep_lines[section] = line_no;
        continue;
      }
      static const std::set<std::string> sections{"engine", "traffic", "scenario", "radio", "spectrum"};
      if (!sections.count(section)) throw ConfigError(source, line_no, section, "unknown section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line_no, line, "expected key = value");
    const std::string key(csv::trim(std::string_view(line).substr(0, eq)));
    const std::string value(csv::trim(std::string_view(line).substr(eq + 1)));
    if (section.empty()) throw ConfigError(source, line_no, key, "key outside any section");
    const std::string full = section + "." + key;
    if (seen.count(full)) {
      throw ConfigError(source, line_no, full, fmt::format("duplicate key (first set on line {})", seen[full]));
    }
    seen[full] = line_no;
    try {
      if (sweep) {
        if (key == "schemes") {
          if (!value.empty()) {
            for (const auto& s : csv::split(value)) sweep->schemes.push_back(s);
          }
        } else if (key == "lambda_dl") {
          sweep->lambda_dl = parse_number_list(value);
        } else if (key == "ratio") {
          sweep->ratio = parse_number_list(value);
        } else {
          throw ConfigError(source, line_no, full, "unknown key");
        }
        continue;
      }
      const auto& table = key_table();
      const auto it = std::find_if(table.begin(), table.end(),
                                   [&](const KeyDef& k) { return k.section == section && k.key == key; });
      if (it == table.end()) throw ConfigError(source, line_no, full, "unknown key");
      it->set(cfg, value);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(source, line_no, full, e.what());
    }
  }

  auto line_of = [&](const std::string& key) {
    const auto it = seen.find(key);
    return it == seen.end() ? 0 : it->second;
  };
  try {
    cfg.sim.scheme = resolve_scheme(cfg.scheme_name, cfg.sim.asymmetry_ratio);
  } catch (const std::exception& e) {
    throw ConfigError(source, line_of("engine.scheme"), "engine.scheme", e.what());
  }
  try {
    cfg.sim.validate();
  } catch (const engine::InvalidConfig& e) {
    throw ConfigError(source, line_of(e.key()), e.key(), e.what());
  }
  for (const auto& s : cfg.sweeps) {
    const std::string sec = s.name.empty() ? "sweep" : "sweep." + s.name;
    const int at = sweep_lines[sec];
    auto empty_axis = [&](const std::string& axis) {
      const int l = line_of(sec + "." + axis);
      return ConfigError(source, l > 0 ? l : at, sec + "." + axis, "empty axis");
    };
    if (s.schemes.empty()) throw empty_axis("schemes");
    if (s.lambda_dl.empty()) throw empty_axis("lambda_dl");
    if (s.ratio.empty()) throw empty_axis("ratio");
    for (double l : s.lambda_dl) {
      if (!(l >= 0.0)) throw ConfigError(source, line_of(sec + ".lambda_dl"), sec + ".lambda_dl", "must be >= 0");
    }
    for (double r : s.ratio) {
      if (!(r >= 0.0)) throw ConfigError(source, line_of(sec + ".ratio"), sec + ".ratio", "must be >= 0");
    }
    for (const auto& name : s.schemes) {
      for (double r : s.ratio) {
        try {
          resolve_scheme(name, r);
        } catch (const std::exception& e) {
          throw ConfigError(source, line_of(sec + ".schemes"), sec + ".schemes", e.what());
        }
      }
    }
  }
  return cfg;
}

ExperimentConfig load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "file", "cannot open");
  return parse(in, path.string());
}

std::string dump(const ExperimentConfig& c) {
  std::string out;
  std::string section;
  for (const auto& k : key_table()) {
    if (k.section != section) {
      if (!section.empty()) out += '\n';
      section = k.section;
      out += fmt::format("[{}]\n", section);
    }
    out += fmt::format("{} = {}\n", k.key, k.get(c));
  }
  for (const auto& s : c.sweeps) {
    out += fmt::format("\n[{}]\n", s.name.empty() ? "sweep" : "sweep." + s.name);
    out += fmt::format("schemes = {}\n", fmt::join(s.schemes, ", "));
    out += fmt::format("lambda_dl = {}\n", fmt::join(s.lambda_dl, ", "));
    out += fmt::format("ratio = {}\n", fmt::join(s.ratio, ", "));
  }
  return out;
}

}  // namespace flexduplex::config
