#pragma once

#include <string>
#include <vector>

#include "flexduplex/common.hpp"

namespace flexduplex::provisioning {

struct CellDemand {
  std::string cell;
  Direction direction = Direction::kDownlink;
  double offered_load_bps = 0.0;  // lambda * L
  double efficiency_bps = 0.0;    // C, bits/s per resource

  static CellDemand from_traffic(std::string cell, Direction d, double lambda, double packet_bits,
                                 double efficiency_bps);
  /// Resources needed at full utilization, a = lambda L / C.
  double equivalent_demand() const { return offered_load_bps / efficiency_bps; }
  void validate() const;
};

struct ResourceRequirement {
  double real = 0.0;
  long long integer = 0;  // ceiling of `real`
};

/// Smallest allocation keeping the utilization at or below `rho_max`.
ResourceRequirement required_resources(const CellDemand& demand, double rho_max);

struct Allocation {
  std::vector<double> real;
  std::vector<long long> integer;
  double max_rho_real = 0.0;
  double max_rho_integer = 0.0;
  /// Cells whose demand exceeds the whole pool (rho > 1 even alone).
  std::vector<std::size_t> infeasible;

  bool feasible() const { return infeasible.empty(); }
};

/// Utilization of each cell under `x`; zero-demand cells read 0, starved
/// cells with demand read +inf.
std::vector<double> utilizations(const std::vector<CellDemand>& demands, const std::vector<long long>& x);

/// Splits `total_resources` so that the largest utilization is minimal.
/// Cells with zero demand receive nothing.
Allocation minmax_allocation(const std::vector<CellDemand>& demands, long long total_resources);

/// Per-cell requirements for a target mean queue of `w_target_bits`.
std::vector<ResourceRequirement> provision_for_delay(const std::vector<CellDemand>& demands, double w_target_bits,
                                                     double mean_bits, double mean_sq_bits);

}  // namespace flexduplex::provisioning
