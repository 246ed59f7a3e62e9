#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

#include "flexduplex/common.hpp"

namespace flexduplex::radio {

enum class LinkClass : int { kMacroUe = 0, kSmallUe, kMacroSmall, kUeUe };
inline constexpr std::size_t kLinkClassCount = 4;

std::string_view to_string(LinkClass c);

/// Transmit powers, antenna gains and receiver noise. Defaults are the
/// Table 1-style deployment values.
struct LinkBudget {
  double tx_power_menb_dbm = 46.0;
  double tx_power_senb_dbm = 24.0;
  double tx_power_ue_dbm = 23.0;
  double gain_menb_dbi = 17.0;
  double gain_senb_dbi = 5.0;
  double gain_ue_dbi = 0.0;
  double nf_enb_db = 5.0;
  double nf_ue_db = 9.0;
  double noise_density_dbm_hz = -174.0;
  /// Scalar offset standing in for the 2-antenna configuration; added to
  /// the desired link only.
  double mimo_gain_db = 0.0;

  void validate() const;
};

struct PathlossProfile {
  double intercept_db = 0.0;  // loss at 1 km
  double slope_db = 0.0;      // per decade of distance
};

struct PropagationModel {
  std::array<PathlossProfile, kLinkClassCount> profiles{{
      {128.1, 37.6},  // macro <-> UE
      {140.7, 36.7},  // small cell <-> UE
      {128.1, 37.6},  // macro <-> small cell
      {145.4, 40.0},  // UE <-> UE
  }};
  std::array<double, kLinkClassCount> shadowing_sigma_db{{8.0, 10.0, 8.0, 10.0}};
  bool fading_enabled = false;
  double min_distance_m = 10.0;

  const PathlossProfile& profile(LinkClass c) const { return profiles[static_cast<int>(c)]; }
  double sigma(LinkClass c) const { return shadowing_sigma_db[static_cast<int>(c)]; }
  void validate() const;
};

/// Horizontal antenna pattern: parabolic sector roll-off or omnidirectional.
struct AntennaPattern {
  double peak_gain_dbi = 0.0;
  bool sectorized = false;
  double azimuth_deg = 0.0;
  double theta_3db_deg = 70.0;
  double max_attenuation_db = 25.0;
};

/// Adjacent-channel interference ratio applied between segments flagged as
/// adjacent by the band plan. `acir_db` may be +infinity (perfect filters).
struct AciCoupling {
  double acir_db = 30.0;

  /// Linear factor multiplying adjacent-band received power.
  double attenuation() const {
    return std::isinf(acir_db) ? 0.0 : db_to_linear(-acir_db);
  }
};

/// Truncated-Shannon link abstraction.
struct LinkAdaptation {
  double eta = 0.6;
  double cap_bps_hz = 4.8;
  double sinr_min_db = -7.0;
};

double pathloss_db(LinkClass link_class, double distance_m, const PropagationModel& prop);

/// Gain toward a receiver seen at absolute bearing `angle_to_rx_deg`.
double antenna_gain_dbi(const AntennaPattern& antenna, double angle_to_rx_deg);

double noise_floor_dbm(double bandwidth_hz, double nf_db, double noise_density_dbm_hz = -174.0);

/// Per-RB SINR in dB. Adjacent-band powers are the interferers' in-band
/// received powers on one RB; the ACIR attenuation is applied here.
double sinr_db(double desired_dbm, double noise_dbm, std::span<const double> cochannel_dbm,
               std::span<const double> adjacent_dbm, const AciCoupling& aci);

/// Linear-domain form used by the engine's inner loop (all powers in mW).
inline double sinr_linear(double desired_mw, double noise_mw, double cochannel_mw,
                          double adjacent_mw, double aci_attenuation) {
  return desired_mw / (noise_mw + cochannel_mw + adjacent_mw * aci_attenuation);
}

double spectral_efficiency(double sinr_db, const LinkAdaptation& la = {});

/// Log-normal shadowing sample for the unordered node pair (a, b); the same
/// pair always yields the same value for a given seed.
double shadowing_db(std::uint64_t seed, std::uint64_t node_a, std::uint64_t node_b, double sigma_db);

}  // namespace flexduplex::radio
