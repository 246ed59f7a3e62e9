// Acceptance checks, one PASS/FAIL line per criterion. Exits non-zero when
// any criterion fails.
#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <set>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "flexduplex/engine.hpp"
#include "flexduplex/provisioning.hpp"
#include "flexduplex/spectrum.hpp"
#include "flexduplex/traffic.hpp"
#include "minmax_oracle.hpp"
#include "table3_oracle.hpp"

namespace fe = flexduplex::engine;
namespace ft = flexduplex::traffic;
namespace pv = flexduplex::provisioning;
namespace sp = flexduplex::spectrum;
using flexduplex::CellId;
using flexduplex::Direction;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

bool close_rel(double got, double want, double tol = 1e-12) {
  return want == 0.0 ? got == 0.0 : std::fabs(got - want) <= tol * std::fabs(want);
}

// Directional checks share one scenario: the reference deployment, fading off,
// ten 20 s replications.
fe::SimConfig table2_config(fe::Scheme scheme, double lambda_dl, double ratio) {
  fe::SimConfig c;
  c.scheme = scheme;
  c.lambda_dl = lambda_dl;
  c.asymmetry_ratio = ratio;
  c.senb_distance_m = 100.0;
  c.horizon = 20000;
  c.warmup = 2000;
  c.replications = 10;
  c.seed = 2016;
  c.propagation.fading_enabled = false;
  return c;
}

const flexduplex::metrics::CellDirectionMetrics& row(const flexduplex::metrics::MetricsReport& r, CellId c,
                                                     Direction d) {
  const auto* m = r.find(c, d);
  if (!m) throw flexduplex::Error("missing report row");
  return *m;
}

double ut(const flexduplex::metrics::MetricsReport& r, CellId c, Direction d) {
  const auto& m = row(r, c, d);
  return m.ut_mbps ? *m.ut_mbps : std::numeric_limits<double>::quiet_NaN();
}

Outcome formulas() {
  bool ok = true;
  ok &= ft::analytic_ru(0.0, 2e6, 50, 2e5) == 0.0;
  ok &= close_rel(ft::analytic_ru(1.0, 2e6, 50, 2e5), 0.2);
  ok &= close_rel(ft::analytic_ru(1.0, 2e6, 25, 2e5), 0.4);
  ok &= ft::analytic_queue(0.0, 2e6, 4e12) == 0.0;
  ok &= close_rel(ft::analytic_queue(0.5, 2e6, 4e12), 1e6);
  ok &= close_rel(ft::analytic_queue(0.8, 2e6, 4e12), 4e6);
  ok &= ft::max_ru_for_delay(0.0, 2e6, 4e12) == 0.0;
  ok &= close_rel(ft::max_ru_for_delay(1e6, 2e6, 4e12), 0.5);
  for (double w : {1e2, 1e6, 7.5e6, 1e9}) {
    ok &= close_rel(ft::analytic_queue(ft::max_ru_for_delay(w, 2e6, 4e12), 2e6, 4e12), w);
  }
  const auto d = pv::CellDemand::from_traffic("m", Direction::kDownlink, 1.0, 2e6, 2e5);
  const auto x = pv::required_resources(d, 0.5);
  ok &= close_rel(x.real, 20.0) && x.integer == 20;
  ok &= close_rel(ft::analytic_ru(1.0, 2e6, x.real, 2e5), 0.5);
  ok &= close_rel(pv::required_resources(d, 1.0).real, 10.0);
  return {ok, "analytic hand values and inversions at 1e-12"};
}

Outcome table3() {
  int mismatches = 0;
  for (const auto& r : table3_oracle()) {
    mismatches += sp::tdd_reuse_lookup(r.band, Direction::kUplink) != r.ul;
    mismatches += sp::tdd_reuse_lookup(r.band, Direction::kDownlink) != r.dl;
  }
  const bool ok = mismatches == 0 && sp::band_table().size() == 30;
  return {ok, fmt::format("30 bands x 2 directions, {} mismatches", mismatches)};
}

Outcome subframes() {
  const auto fdd = sp::reserved_subframes(sp::SystemKind::kFddDownlink);
  const auto tdd = sp::reserved_subframes(sp::SystemKind::kTdd);
  const auto r = sp::reusable_subframes();
  const bool ok = fdd == std::set<int>{0, 4, 5, 9} && tdd == std::set<int>{0, 1, 5, 6} &&
                  r.computed == std::set<int>{2, 3, 7, 8} && r.quoted_count == 2;
  return {ok, fmt::format("reusable {{{}}} ({} computed, stated count {})", fmt::join(r.computed, ","),
                          r.computed.size(), r.quoted_count)};
}

Outcome minmax() {
  long long instances = 0, wrong = 0;
  auto check = [&](const std::vector<double>& a, long long total) {
    std::vector<pv::CellDemand> demands;
    for (std::size_t k = 0; k < a.size(); ++k) {
      demands.push_back({"c" + std::to_string(k), Direction::kUplink, a[k], 1.0});
    }
    if (std::all_of(a.begin(), a.end(), [](double v) { return v == 0.0; })) return;
    const auto alloc = pv::minmax_allocation(demands, total);
    const double opt = brute_force_minmax(a, total);
    ++instances;
    const bool same = std::isinf(opt) ? std::isinf(alloc.max_rho_integer)
                                      : std::fabs(alloc.max_rho_integer - opt) <= 1e-12 * opt;
    wrong += !same;
  };
  // Integer demand grids (ties, zeros) and random real demands.
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.0, 12.0);
  for (std::size_t n = 1; n <= 4; ++n) {
    for (long long total = 1; total <= 30; ++total) {
      std::vector<double> a(n, 0.0);
      std::function<void(std::size_t)> grid = [&](std::size_t k) {
        if (k == n) {
          check(a, total);
          return;
        }
        for (int v = 0; v <= (n == 4 ? 3 : 5); ++v) {
          a[k] = v;
          grid(k + 1);
        }
      };
      grid(0);
      for (int trial = 0; trial < 20; ++trial) {
        for (auto& v : a) v = u(gen);
        check(a, total);
      }
    }
  }
  return {wrong == 0, fmt::format("{} instances up to 4 cells / 30 resources, {} off the exhaustive optimum",
                                  instances, wrong)};
}

Outcome queueing() {
  // Isolated MeNB, DL only; a low-load pilot measures C, then lambda is set
  // for each target utilization.
  fe::SimConfig base = table2_config(fe::Scheme::kOnlyMeNB, 0.2, 0.0);
  base.ring_count = 0;
  base.replications = 4;
  const auto pilot = fe::run(base);
  const double c = row(pilot, CellId::kMeNB, Direction::kDownlink).realized_c;
  const double n_ues = base.ue_count;
  std::vector<double> queues, gaps;
  std::string detail = fmt::format("C={:.3g} bit/s/RB;", c);
  bool ok = c > 0.0;
  for (double rho : {0.3, 0.5, 0.7}) {
    auto cfg = base;
    cfg.lambda_dl = rho * base.plan.total_rbs * c / (n_ues * base.packet_bits);
    const auto rep = fe::run(cfg);
    const auto& m = row(rep, CellId::kMeNB, Direction::kDownlink);
    const double gap = std::fabs(m.ru - m.analytic_ru) / m.analytic_ru;
    queues.push_back(m.queue_mean_bits);
    gaps.push_back(gap);
    ok &= gap <= 0.15;
    detail += fmt::format(" rho={}: RU {:.3f} vs analytic {:.3f} (gap {:.1f}%), W {:.3g} bits (analytic {:.3g});", rho, m.ru,
                          m.analytic_ru, 100 * gap, m.queue_mean_bits,
                          m.analytic_queue_bits ? *m.analytic_queue_bits : std::nan(""));
  }
  ok &= queues[0] < queues[1] && queues[1] < queues[2];
  return {ok, detail};
}

Outcome table2_top() {
  const auto only = fe::run(table2_config(fe::Scheme::kOnlyMeNB, 1.5, 0.1));
  const auto fma = fe::run(table2_config(fe::Scheme::kFmaUlReuse, 1.5, 0.1));
  const auto tma = fe::run(table2_config(fe::Scheme::kTmaUlReuse, 1.5, 0.1));
  const double ru_dl = row(only, CellId::kMeNB, Direction::kDownlink).ru;
  const double ru_ul = row(only, CellId::kMeNB, Direction::kUplink).ru;
  const bool a = ru_dl >= 0.9 && ru_ul <= 0.5;
  const double ut_only = ut(only, CellId::kMeNB, Direction::kDownlink);
  const double fm = ut(fma, CellId::kMeNB, Direction::kDownlink), fs = ut(fma, CellId::kSeNB, Direction::kDownlink);
  const double tm = ut(tma, CellId::kMeNB, Direction::kDownlink), ts = ut(tma, CellId::kSeNB, Direction::kDownlink);
  const bool b = fm > ut_only && fs > ut_only && tm > ut_only && ts > ut_only;
  const double tma_ul = ut(tma, CellId::kSeNB, Direction::kUplink), fma_ul = ut(fma, CellId::kSeNB, Direction::kUplink);
  const bool c = tma_ul >= fma_ul;
  return {a && b && c,
          fmt::format("(a) {} RU DL {:.2f} RU UL {:.2f}; (b) {} UT DL only {:.2f}, FMA {:.2f}/{:.2f}, TMA {:.2f}/{:.2f}; "
                      "(c) {} SeNB UT UL TMA {:.2f} vs FMA {:.2f}",
                      a ? "ok" : "FAILED", ru_dl, ru_ul, b ? "ok" : "FAILED", ut_only, fm, fs, tm, ts,
                      c ? "ok" : "FAILED", tma_ul, fma_ul)};
}

Outcome table2_bottom() {
  const auto only = fe::run(table2_config(fe::Scheme::kOnlyMeNB, 0.1, 10.0));
  const auto fma = fe::run(table2_config(fe::Scheme::kFmaDlReuse, 0.1, 10.0));
  auto isolated_cfg = table2_config(fe::Scheme::kFmaDlReuse, 0.1, 10.0);
  isolated_cfg.ring_count = 0;
  const auto isolated = fe::run(isolated_cfg);
  const double only_m = ut(only, CellId::kMeNB, Direction::kUplink);
  const double m = ut(fma, CellId::kMeNB, Direction::kUplink), s = ut(fma, CellId::kSeNB, Direction::kUplink);
  const double im = ut(isolated, CellId::kMeNB, Direction::kUplink);
  const double is = ut(isolated, CellId::kSeNB, Direction::kUplink);
  const bool a = m > only_m;
  const bool b = s < m;
  const bool c = is >= im;
  return {a && b && c,
          fmt::format("(a) {} MeNB UT UL FMA {:.2f} vs only {:.2f}; (b) {} SeNB {:.2f} vs MeNB {:.2f} "
                      "(SeNB UL packets {}); (c) {} ring off: SeNB {:.2f} vs MeNB {:.2f}",
                      a ? "ok" : "FAILED", m, only_m, b ? "ok" : "FAILED", s, m,
                      row(fma, CellId::kSeNB, Direction::kUplink).packets_completed, c ? "ok" : "FAILED", is, im)};
}

Outcome aci() {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> ru;
  std::string detail = "MeNB RU UL at ACIR";
  for (double acir : {20.0, 30.0, 40.0, inf}) {
    auto cfg = table2_config(fe::Scheme::kFmaUlReuse, 1.5, 0.1);
    cfg.aci.acir_db = acir;
    const auto rep = fe::run(cfg);
    const auto& m = row(rep, CellId::kMeNB, Direction::kUplink);
    ru.push_back(m.ru);
    detail += fmt::format(" {}: {:.4f} (C {:.3g})", acir, m.ru, m.realized_c);
  }
  const double g20 = ru[0] - ru[3], g30 = ru[1] - ru[3], g40 = ru[2] - ru[3];
  const bool ok = ru[1] >= ru[3] && g20 >= g30 && g30 >= g40 && g40 >= 0.0;
  return {ok, detail};
}

Outcome determinism() {
  auto cfg = table2_config(fe::Scheme::kFmaUlReuse, 1.5, 0.1);
  cfg.horizon = 5000;
  cfg.warmup = 500;
  cfg.replications = 3;
  auto csv = [&] {
    const auto r = fe::run(cfg);
    std::ostringstream out;
    flexduplex::metrics::write_report_csv(out, std::span(&r, 1));
    return out.str();
  };
  const bool same = csv() == csv();
  std::string broken;
  for (auto [scheme, lambda, ratio] : {std::tuple{fe::Scheme::kOnlyMeNB, 1.5, 0.1}, {fe::Scheme::kFmaUlReuse, 1.5, 0.1},
                                       {fe::Scheme::kTmaUlReuse, 1.5, 0.1}, {fe::Scheme::kFmaDlReuse, 0.1, 10.0}}) {
    auto c = table2_config(scheme, lambda, ratio);
    c.horizon = 5000;
    c.warmup = 500;
    c.check_invariants = true;
    try {
      fe::Simulation sim(c, 0);
      sim.run_to_horizon();
    } catch (const std::exception& e) {
      broken += fmt::format(" {}: {}", fe::to_string(scheme), e.what());
    }
  }
  return {same && broken.empty(),
          fmt::format("byte-identical reports: {}; conservation on 4 schemes x 5000 subframes: {}",
                      same ? "yes" : "no", broken.empty() ? "held" : "violated" + broken)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"formula exactness", formulas},
      {"band table fidelity", table3},
      {"reserved subframes", subframes},
      {"min-max provisioning optimality", minmax},
      {"queueing sanity", queueing},
      {"UL-reuse scheme directions", table2_top},
      {"DL-reuse scheme directions", table2_bottom},
      {"ACI mechanism", aci},
      {"determinism and conservation", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what())};
    }
    failed += !o.pass;
    std::cout << fmt::format("criterion {}: {} - {}: {}", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                             o.detail)
              << std::endl;
  }
  std::cout << fmt::format("{} of {} criteria passed", criteria.size() - failed, criteria.size()) << std::endl;
  return failed == 0 ? 0 : 1;
}
