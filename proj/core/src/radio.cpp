#include "flexduplex/radio.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace flexduplex::radio {

std::string_view to_string(LinkClass c) {
  switch (c) {
    case LinkClass::kMacroUe:
      return "macro_ue";
    case LinkClass::kSmallUe:
      return "small_ue";
    case LinkClass::kMacroSmall:
      return "macro_small";
    case LinkClass::kUeUe:
      return "ue_ue";
  }
  return "unknown";
}

void LinkBudget::validate() const {
  const double values[] = {tx_power_menb_dbm, tx_power_senb_dbm, tx_power_ue_dbm,
                           gain_menb_dbi,     gain_senb_dbi,     gain_ue_dbi,
                           nf_enb_db,         nf_ue_db,          mimo_gain_db};
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("link budget: non-finite power or gain");
  }
  if (!(noise_density_dbm_hz < 0.0)) {
    throw InvalidArgument("link budget: noise density must be negative dBm/Hz");
  }
}

void PropagationModel::validate() const {
  for (std::size_t i = 0; i < kLinkClassCount; ++i) {
    if (!(profiles[i].slope_db > 0.0)) {
      throw InvalidArgument("propagation: slope must be positive for " +
                            std::string(to_string(static_cast<LinkClass>(i))));
    }
    if (!(shadowing_sigma_db[i] >= 0.0)) {
      throw InvalidArgument("propagation: shadowing sigma must be non-negative");
    }
  }
  if (!(min_distance_m > 0.0)) throw InvalidArgument("propagation: min_distance must be positive");
}

double pathloss_db(LinkClass link_class, double distance_m, const PropagationModel& prop) {
  const auto idx = static_cast<std::size_t>(link_class);
  if (idx >= kLinkClassCount) throw InvalidArgument("pathloss: unknown link class");
  if (!(distance_m >= 0.0)) throw InvalidArgument("pathloss: negative distance");
  const PathlossProfile& p = prop.profiles[idx];
  const double d = std::max(distance_m, prop.min_distance_m);
  return p.intercept_db + p.slope_db * std::log10(d / 1000.0);
}

double antenna_gain_dbi(const AntennaPattern& antenna, double angle_to_rx_deg) {
  if (!antenna.sectorized) return antenna.peak_gain_dbi;
  const double off = angle_diff_deg(angle_to_rx_deg, antenna.azimuth_deg) / antenna.theta_3db_deg;
  return antenna.peak_gain_dbi - std::min(12.0 * off * off, antenna.max_attenuation_db);
}

double noise_floor_dbm(double bandwidth_hz, double nf_db, double noise_density_dbm_hz) {
  if (!(bandwidth_hz > 0.0)) throw InvalidArgument("noise_floor: bandwidth must be positive");
  return noise_density_dbm_hz + 10.0 * std::log10(bandwidth_hz) + nf_db;
}

double sinr_db(double desired_dbm, double noise_dbm, std::span<const double> cochannel_dbm,
               std::span<const double> adjacent_dbm, const AciCoupling& aci) {
  double co = 0.0;
  for (double p : cochannel_dbm) co += db_to_linear(p);
  double adj = 0.0;
  for (double p : adjacent_dbm) adj += db_to_linear(p);
  return linear_to_db(
      sinr_linear(db_to_linear(desired_dbm), db_to_linear(noise_dbm), co, adj, aci.attenuation()));
}

double spectral_efficiency(double sinr_db, const LinkAdaptation& la) {
  if (std::isnan(sinr_db) || sinr_db < la.sinr_min_db) return 0.0;
  const double shannon = la.eta * std::log2(1.0 + db_to_linear(sinr_db));
  return std::min(shannon, la.cap_bps_hz);
}

double shadowing_db(std::uint64_t seed, std::uint64_t node_a, std::uint64_t node_b, double sigma_db) {
  if (sigma_db == 0.0) return 0.0;
  const auto lo = std::min(node_a, node_b);
  const auto hi = std::max(node_a, node_b);
  std::mt19937_64 gen(derive_seed(seed, lo, hi + 1));
  std::normal_distribution<double> normal(0.0, sigma_db);
  return normal(gen);
}

}  // namespace flexduplex::radio
