#include "commands.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>

#include "flexduplex/bandplanner.hpp"
#include "flexduplex/config.hpp"
#include "flexduplex/csv.hpp"
#include "flexduplex/engine.hpp"
#include "flexduplex/metrics.hpp"
#include "flexduplex/provisioning.hpp"
#include "flexduplex/spectrum.hpp"

namespace flexduplex::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(fmt::format("cannot write {}", p.string()));
  return f;
}

std::string details_text(const metrics::MetricsReport& rep) {
  std::string out = fmt::format("{:<5} {:<3} {:>7} {:>8} {:>9} {:>13} {:>12} {:>8}\n", "cell", "dir", "ru",
                                "ut_mbps", "packets", "queue_bits", "C_bps_rb", "ru_eq1");
  for (const auto& r : rep.rows) {
    out += fmt::format("{:<5} {:<3} {:>7.3f} {:>8} {:>9} {:>13.4g} {:>12.4g} {:>8.3f}\n", to_string(r.cell),
                       to_string(r.direction), r.ru, r.ut_mbps ? fmt::format("{:.3f}", *r.ut_mbps) : "-",
                       r.packets_completed, r.queue_mean_bits, r.realized_c, r.analytic_ru);
  }
  return out;
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const config::ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kConfigError;
  } catch (const InvalidArgument& e) {
    fmt::print(err, "invalid input: {}\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kRuntimeError;
  }
}

}  // namespace

fs::path output_dir(const std::optional<fs::path>& explicit_dir) {
  if (explicit_dir) return *explicit_dir;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return fs::path(env);
  return fs::current_path();
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = config::load(opts.config);
    try {
      fs::create_directories(opts.out_dir);
      std::vector<metrics::MetricsReport> reports;
      if (opts.write_layout || opts.write_raw_log) {
        // Replication 0 rerun with the extra outputs attached; it is
        // deterministic, so its numbers match the aggregated run.
        engine::Simulation sim(cfg.sim, 0);
        std::ofstream raw;
        if (opts.write_raw_log) {
          raw = open_out(opts.out_dir / "raw_log.csv");
          sim.set_raw_log(&raw);
        }
        if (opts.write_layout) {
          auto f = open_out(opts.out_dir / "layout.csv");
          scenario::write_layout_csv(f, sim.layout(), sim.ues());
        }
        if (opts.write_raw_log) sim.run_to_horizon();
      }
      reports.push_back(engine::run(cfg.sim));
      {
        auto f = open_out(opts.out_dir / "report.csv");
        metrics::write_report_csv(f, reports);
      }
      const std::string text = metrics::table2_text(reports) + "\n" + details_text(reports.front());
      {
        auto f = open_out(opts.out_dir / "report.txt");
        f << text;
      }
      {
        auto f = open_out(opts.out_dir / "effective.cfg");
        f << config::dump(cfg);
      }
      out << text;
      return static_cast<int>(kOk);
    } catch (const InvalidArgument& e) {
      // Past parsing, bad arguments are internal failures.
      fmt::print(err, "error: {}\n", e.what());
      return static_cast<int>(kRuntimeError);
    }
  });
}

int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = config::load(opts.config);
    if (cfg.sweeps.empty()) throw config::ConfigError(opts.config.string(), 0, "sweep", "no [sweep] section");
    try {
      fs::create_directories(opts.out_dir);
      std::vector<metrics::MetricsReport> reports;
      for (const auto& p : cfg.sweep_points()) {
        auto sim = cfg.sim;
        sim.scheme = p.scheme;
        sim.lambda_dl = p.lambda_dl;
        sim.asymmetry_ratio = p.ratio;
        fmt::print(err, "running {} lambda_dl={} ratio={}\n", engine::to_string(p.scheme), p.lambda_dl, p.ratio);
        reports.push_back(engine::run(sim));
      }
      {
        auto f = open_out(opts.out_dir / "table2.csv");
        metrics::write_table2_csv(f, reports);
      }
      {
        auto f = open_out(opts.out_dir / "report.csv");
        metrics::write_report_csv(f, reports);
      }
      const std::string text = metrics::table2_text(reports);
      {
        auto f = open_out(opts.out_dir / "table2.txt");
        f << text;
      }
      out << text;
      return static_cast<int>(kOk);
    } catch (const InvalidArgument& e) {
      fmt::print(err, "error: {}\n", e.what());
      return static_cast<int>(kRuntimeError);
    }
  });
}

namespace {

std::vector<provisioning::CellDemand> read_demands(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument(fmt::format("cannot open {}", path.string()));
  std::string line;
  int line_no = 0;
  std::vector<provisioning::CellDemand> out;
  std::vector<double> packet_bits;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto f = csv::split(line);
    if (f.size() == 5 && f[0] == "cell") continue;  // header
    try {
      if (f.size() != 5) throw InvalidArgument(fmt::format("expected 5 fields, got {}", f.size()));
      out.push_back(provisioning::CellDemand::from_traffic(f[0], parse_direction(f[1]), csv::to_double(f[2]),
                                                           csv::to_double(f[3]), csv::to_double(f[4])));
      if (!(csv::to_double(f[3]) > 0.0)) throw InvalidArgument("packet_bits must be positive");
    } catch (const std::exception& e) {
      throw InvalidArgument(fmt::format("{}: row {}: {}", path.string(), line_no, e.what()));
    }
  }
  if (out.empty()) throw InvalidArgument(fmt::format("{}: no demand rows", path.string()));
  return out;
}

// Packet size per row, needed only for the delay target.
std::vector<double> read_packet_bits(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::vector<double> out;
  while (std::getline(in, line)) {
    const auto f = csv::split(line);
    if (csv::trim(line).empty() || f[0] == "cell") continue;
    out.push_back(csv::to_double(f[3]));
  }
  return out;
}

}  // namespace

int cmd_provision(const ProvisionOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const int modes = opts.total.has_value() + opts.rho_max.has_value() + opts.w_target.has_value();
    if (modes != 1) throw InvalidArgument("give exactly one of --total, --rho-max, --w-target");
    const auto demands = read_demands(opts.demands);

    if (opts.total) {
      // Directions own separate pools and are split independently.
      std::map<Direction, std::vector<std::size_t>> by_dir;
      for (std::size_t i = 0; i < demands.size(); ++i) by_dir[demands[i].direction].push_back(i);
      std::vector<std::string> infeasible;
      fmt::print(out, "{:<10} {:<3} {:>10} {:>12} {:>8} {:>10}\n", "cell", "dir", "demand", "x_real", "x_int",
                 "rho_int");
      for (const auto& [dir, idx] : by_dir) {
        std::vector<provisioning::CellDemand> group;
        for (auto i : idx) group.push_back(demands[i]);
        const auto alloc = provisioning::minmax_allocation(group, *opts.total);
        const auto rho = provisioning::utilizations(group, alloc.integer);
        for (std::size_t k = 0; k < group.size(); ++k) {
          fmt::print(out, "{:<10} {:<3} {:>10.4g} {:>12.4f} {:>8} {:>10.4f}\n", group[k].cell, to_string(dir),
                     group[k].equivalent_demand(), alloc.real[k], alloc.integer[k], rho[k]);
        }
        fmt::print(out, "{} max rho: real {:.6f}, integer {:.6f}\n", to_string(dir), alloc.max_rho_real,
                   alloc.max_rho_integer);
        for (auto k : alloc.infeasible) infeasible.push_back(fmt::format("{} {}", group[k].cell, to_string(dir)));
      }
      if (!infeasible.empty()) {
        fmt::print(err, "infeasible (demand exceeds {} resources): {}\n", *opts.total, fmt::join(infeasible, "; "));
        return static_cast<int>(kInfeasible);
      }
      return static_cast<int>(kOk);
    }

    std::vector<double> rho(demands.size());
    if (opts.rho_max) {
      if (!(*opts.rho_max > 0.0 && *opts.rho_max <= 1.0)) throw InvalidArgument("--rho-max must lie in (0, 1]");
      std::fill(rho.begin(), rho.end(), *opts.rho_max);
    } else {
      if (!(*opts.w_target > 0.0)) throw InvalidArgument("--w-target must be positive");
      const auto bits = read_packet_bits(opts.demands);
      for (std::size_t i = 0; i < demands.size(); ++i) {
        rho[i] = traffic::max_ru_for_delay(*opts.w_target, bits[i], bits[i] * bits[i]);
      }
    }
    fmt::print(out, "{:<10} {:<3} {:>10} {:>10} {:>12} {:>8}\n", "cell", "dir", "demand", "rho_max", "x_real",
               "x_int");
    for (std::size_t i = 0; i < demands.size(); ++i) {
      const auto r = provisioning::required_resources(demands[i], rho[i]);
      fmt::print(out, "{:<10} {:<3} {:>10.4g} {:>10.6f} {:>12.4f} {:>8}\n", demands[i].cell,
                 to_string(demands[i].direction), demands[i].equivalent_demand(), rho[i], r.real, r.integer);
    }
    return static_cast<int>(kOk);
  });
}

int cmd_bands_list(std::ostream& out) {
  spectrum::write_band_csv(out);
  return kOk;
}

int cmd_bands_lookup(int band, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    for (Direction d : {Direction::kUplink, Direction::kDownlink}) {
      const auto t = spectrum::tdd_reuse_lookup(band, d);
      fmt::print(out, "band {} {}: {}\n", band, to_string(d),
                 t.empty() ? std::string("not reusable") : fmt::format("TDD band {}", fmt::join(t, ", ")));
    }
    return static_cast<int>(kOk);
  });
}

int cmd_bands_check(int band, const std::string& direction, const std::string& scheme, bool json, std::ostream& out,
                    std::ostream& err) {
  return guarded(err, [&] {
    const auto v = bandplanner::evaluate_reuse(band, parse_direction(direction),
                                               bandplanner::parse_access_scheme(scheme));
    out << (json ? bandplanner::to_json(v) + "\n" : bandplanner::to_text(v));
    return static_cast<int>(kOk);
  });
}

int cmd_print_config(const fs::path& path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    out << config::dump(config::load(path));
    return static_cast<int>(kOk);
  });
}

}  // namespace flexduplex::cli
