#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "flexduplex/common.hpp"
#include "flexduplex/radio.hpp"

namespace flexduplex::scenario {

struct MacroSite {
  Vec2 position;
  double sector_azimuth_deg = 0.0;
};

/// Hexagonal macro grid around one observed site plus the small cell.
/// `macro_sites[observed_sector]` is the observed MeNB; every other site is
/// an interference-only neighbour.
struct NetworkLayout {
  std::vector<MacroSite> macro_sites;
  double inter_site_distance_m = 500.0;
  std::size_t observed_sector = 0;
  Vec2 senb_position;
  int interferer_ring_count = 1;

  const MacroSite& observed() const { return macro_sites[observed_sector]; }
  /// Convex polygon of the observed 120-degree sector.
  std::vector<Vec2> observed_sector_polygon() const;
};

/// 120-degree wedge of the hexagonal cell of a site, centred on `azimuth_deg`.
std::vector<Vec2> sector_polygon(Vec2 site, double azimuth_deg, double isd_m);
bool inside_convex_polygon(const std::vector<Vec2>& polygon, Vec2 p);
double polygon_area(const std::vector<Vec2>& polygon);
Vec2 polygon_centroid(const std::vector<Vec2>& polygon);
Vec2 sample_in_polygon(const std::vector<Vec2>& polygon, std::mt19937_64& gen);

NetworkLayout build_layout(double isd_m, double senb_distance_m, int ring_count,
                           double sector_azimuth_deg = 0.0);

struct UserTerminal {
  int id = 0;
  Vec2 position;
  CellId serving_cell = CellId::kMeNB;
  bool is_sue = false;
};

std::vector<UserTerminal> drop_ues(int count, const NetworkLayout& layout, std::uint64_t rng_seed);

/// A serving cell candidate as seen by association.
struct CellSite {
  CellId id = CellId::kMeNB;
  Vec2 position;
  radio::AntennaPattern antenna;
  double tx_power_dbm = 0.0;
  radio::LinkClass ue_link = radio::LinkClass::kMacroUe;
};

std::vector<CellSite> serving_cells(const NetworkLayout& layout, const radio::LinkBudget& budget,
                                    bool with_senb);

double rsrp_dbm(const UserTerminal& ue, const CellSite& cell, const radio::LinkBudget& budget,
                const radio::PropagationModel& prop, double shadowing_db = 0.0);

/// RSRP of every UE (rows) toward every candidate cell (columns).
struct RsrpTable {
  std::vector<CellId> cells;
  std::vector<std::vector<double>> rsrp_dbm;
};

/// Biased max-RSRP association; ties go to the SeNB.
std::vector<CellId> associate(const RsrpTable& table, double cre_bias_db);

int count_sues(const std::vector<CellId>& assignment);

struct CreGrid {
  double min_db = 0.0;
  double max_db = 30.0;
  double step_db = 1.0;
};

struct CreCalibration {
  double bias_db = 0.0;
  int sue_count = 0;
};

class CreUnreachable : public Error {
 public:
  CreUnreachable(int target, int max_achievable);
  int max_achievable() const { return max_achievable_; }

 private:
  int max_achievable_;
};

/// Smallest grid bias whose association yields at least `target_sue_count`.
CreCalibration calibrate_cre(const RsrpTable& table, int target_sue_count, const CreGrid& grid = {});

void write_layout_csv(std::ostream& out, const NetworkLayout& layout,
                      const std::vector<UserTerminal>& ues);

}  // namespace flexduplex::scenario
