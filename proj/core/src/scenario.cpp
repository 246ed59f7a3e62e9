#include "flexduplex/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace flexduplex::scenario {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Vec2 polar(double r, double deg) { return {r * std::cos(deg * kDeg), r * std::sin(deg * kDeg)}; }

// Distance from the site to its hexagon boundary along `deg`. Neighbours sit
// at multiples of 60 degrees, so the flat sides face those directions.
double hex_radius(double isd_m, double deg) {
  double rel = std::fmod(deg, 60.0);
  if (rel < 0) rel += 60.0;
  if (rel > 30.0) rel -= 60.0;
  return (isd_m / 2.0) / std::cos(rel * kDeg);
}

double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

}  // namespace

std::vector<Vec2> sector_polygon(Vec2 site, double azimuth_deg, double isd_m) {
  const double lo = azimuth_deg - 60.0;
  const double hi = azimuth_deg + 60.0;
  std::vector<Vec2> poly{site, site + polar(hex_radius(isd_m, lo), lo)};
  // Hexagon corners lie at 30 + 60k degrees.
  double first = 30.0 + 60.0 * std::ceil((lo - 30.0) / 60.0);
  if (first <= lo) first += 60.0;
  for (double a = first; a < hi - 1e-9; a += 60.0) {
    poly.push_back(site + polar(isd_m / std::sqrt(3.0), a));
  }
  poly.push_back(site + polar(hex_radius(isd_m, hi), hi));
  return poly;
}

bool inside_convex_polygon(const std::vector<Vec2>& polygon, Vec2 p) {
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = polygon[i];
    const Vec2 b = polygon[(i + 1) % n];
    if (cross(b - a, p - a) < -1e-9) return false;
  }
  return true;
}

double polygon_area(const std::vector<Vec2>& polygon) {
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    twice += cross(polygon[i], polygon[(i + 1) % polygon.size()]);
  }
  return 0.5 * twice;
}

Vec2 polygon_centroid(const std::vector<Vec2>& polygon) {
  double cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Vec2 a = polygon[i];
    const Vec2 b = polygon[(i + 1) % polygon.size()];
    const double c = cross(a, b);
    cx += (a.x + b.x) * c;
    cy += (a.y + b.y) * c;
  }
  const double a6 = 6.0 * polygon_area(polygon);
  return {cx / a6, cy / a6};
}

Vec2 sample_in_polygon(const std::vector<Vec2>& polygon, std::mt19937_64& gen) {
  auto [xmin, xmax] = std::minmax_element(polygon.begin(), polygon.end(),
                                          [](Vec2 a, Vec2 b) { return a.x < b.x; });
  auto [ymin, ymax] = std::minmax_element(polygon.begin(), polygon.end(),
                                          [](Vec2 a, Vec2 b) { return a.y < b.y; });
  std::uniform_real_distribution<double> ux(xmin->x, xmax->x);
  std::uniform_real_distribution<double> uy(ymin->y, ymax->y);
  while (true) {
    const Vec2 p{ux(gen), uy(gen)};
    if (inside_convex_polygon(polygon, p)) return p;
  }
}

std::vector<Vec2> NetworkLayout::observed_sector_polygon() const {
  return sector_polygon(observed().position, observed().sector_azimuth_deg, inter_site_distance_m);
}

NetworkLayout build_layout(double isd_m, double senb_distance_m, int ring_count,
                           double sector_azimuth_deg) {
  if (!(isd_m > 0.0)) throw InvalidArgument(fmt::format("build_layout: isd must be > 0 (got {})", isd_m));
  if (ring_count < 0) throw InvalidArgument("build_layout: ring_count must be >= 0");
  if (!(senb_distance_m > 0.0 && senb_distance_m < isd_m / 2.0)) {
    throw InvalidArgument(fmt::format(
        "build_layout: SeNB distance {} m lies outside the observed sector (must be in (0, {}))",
        senb_distance_m, isd_m / 2.0));
  }

  NetworkLayout layout;
  layout.inter_site_distance_m = isd_m;
  layout.interferer_ring_count = ring_count;
  layout.observed_sector = 0;

  // Axial hex coordinates, ordered by ring then by bearing.
  struct Candidate {
    int ring;
    double angle;
    Vec2 pos;
  };
  std::vector<Candidate> sites;
  for (int q = -ring_count; q <= ring_count; ++q) {
    for (int r = -ring_count; r <= ring_count; ++r) {
      const int s = -q - r;
      const int ring = std::max({std::abs(q), std::abs(r), std::abs(s)});
      if (ring > ring_count) continue;
      const Vec2 pos{isd_m * (q + r / 2.0), isd_m * (r * std::sqrt(3.0) / 2.0)};
      double ang = ring == 0 ? 0.0 : bearing_deg({}, pos);
      if (ang < -1e-9) ang += 360.0;
      sites.push_back({ring, ang, pos});
    }
  }
  std::sort(sites.begin(), sites.end(), [](const Candidate& a, const Candidate& b) {
    return a.ring != b.ring ? a.ring < b.ring : a.angle < b.angle;
  });
  for (const auto& c : sites) layout.macro_sites.push_back({c.pos, sector_azimuth_deg});

  layout.senb_position = layout.observed().position + polar(senb_distance_m, sector_azimuth_deg);
  return layout;
}

std::vector<UserTerminal> drop_ues(int count, const NetworkLayout& layout, std::uint64_t rng_seed) {
  if (count <= 0) throw InvalidArgument("drop_ues: count must be positive");
  std::mt19937_64 gen(rng_seed);
  const auto poly = layout.observed_sector_polygon();
  std::vector<UserTerminal> ues;
  ues.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    ues.push_back({i, sample_in_polygon(poly, gen), CellId::kMeNB, false});
  }
  return ues;
}

std::vector<CellSite> serving_cells(const NetworkLayout& layout, const radio::LinkBudget& budget,
                                    bool with_senb) {
  std::vector<CellSite> cells;
  CellSite menb;
  menb.id = CellId::kMeNB;
  menb.position = layout.observed().position;
  menb.antenna = {budget.gain_menb_dbi, true, layout.observed().sector_azimuth_deg};
  menb.tx_power_dbm = budget.tx_power_menb_dbm;
  menb.ue_link = radio::LinkClass::kMacroUe;
  cells.push_back(menb);
  if (with_senb) {
    CellSite senb;
    senb.id = CellId::kSeNB;
    senb.position = layout.senb_position;
    senb.antenna = {budget.gain_senb_dbi, false};
    senb.tx_power_dbm = budget.tx_power_senb_dbm;
    senb.ue_link = radio::LinkClass::kSmallUe;
    cells.push_back(senb);
  }
  return cells;
}

double rsrp_dbm(const UserTerminal& ue, const CellSite& cell, const radio::LinkBudget& budget,
                const radio::PropagationModel& prop, double shadowing_db) {
  const double gain = radio::antenna_gain_dbi(cell.antenna, bearing_deg(cell.position, ue.position));
  const double pl = radio::pathloss_db(cell.ue_link, distance(cell.position, ue.position), prop);
  return cell.tx_power_dbm + gain + budget.gain_ue_dbi - pl - shadowing_db;
}

std::vector<CellId> associate(const RsrpTable& table, double cre_bias_db) {
  std::vector<CellId> out;
  out.reserve(table.rsrp_dbm.size());
  for (const auto& row : table.rsrp_dbm) {
    CellId best = table.cells.front();
    double best_metric = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < table.cells.size(); ++c) {
      const bool senb = table.cells[c] == CellId::kSeNB;
      const double metric = row[c] + (senb ? cre_bias_db : 0.0);
      if (metric > best_metric || (metric == best_metric && senb)) {
        best_metric = metric;
        best = table.cells[c];
      }
    }
    out.push_back(best);
  }
  return out;
}

int count_sues(const std::vector<CellId>& assignment) {
  return static_cast<int>(std::count(assignment.begin(), assignment.end(), CellId::kSeNB));
}

CreUnreachable::CreUnreachable(int target, int max_achievable)
    : Error(fmt::format("calibrate_cre: target of {} SUEs unreachable; at most {} within the bias grid",
                        target, max_achievable)),
      max_achievable_(max_achievable) {}

CreCalibration calibrate_cre(const RsrpTable& table, int target_sue_count, const CreGrid& grid) {
  if (target_sue_count > static_cast<int>(table.rsrp_dbm.size())) {
    throw InvalidArgument("calibrate_cre: target exceeds UE count");
  }
  if (!(grid.step_db > 0.0) || grid.max_db < grid.min_db) {
    throw InvalidArgument("calibrate_cre: malformed bias grid");
  }
  const int steps = static_cast<int>(std::floor((grid.max_db - grid.min_db) / grid.step_db + 1e-9));
  int best = 0;
  for (int i = 0; i <= steps; ++i) {
    const double bias = grid.min_db + i * grid.step_db;
    const int n = count_sues(associate(table, bias));
    if (n >= target_sue_count) return {bias, n};
    best = std::max(best, n);
  }
  throw CreUnreachable(target_sue_count, best);
}

void write_layout_csv(std::ostream& out, const NetworkLayout& layout,
                      const std::vector<UserTerminal>& ues) {
  out << "id,type,x_m,y_m,azimuth_deg\n";
  int id = 0;
  for (std::size_t i = 0; i < layout.macro_sites.size(); ++i) {
    const auto& s = layout.macro_sites[i];
    fmt::print(out, "{},{},{},{},{}\n", id++, i == layout.observed_sector ? "menb" : "interferer_menb",
               s.position.x, s.position.y, s.sector_azimuth_deg);
  }
  fmt::print(out, "{},senb,{},{},\n", id++, layout.senb_position.x, layout.senb_position.y);
  for (const auto& ue : ues) {
    fmt::print(out, "{},{},{},{},\n", id++, ue.is_sue ? "sue" : "mue", ue.position.x, ue.position.y);
  }
}

}  // namespace flexduplex::scenario
