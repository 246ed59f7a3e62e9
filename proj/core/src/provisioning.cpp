#include "flexduplex/provisioning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "flexduplex/traffic.hpp"

namespace flexduplex::provisioning {

CellDemand CellDemand::from_traffic(std::string cell, Direction d, double lambda, double packet_bits,
                                    double efficiency_bps) {
  CellDemand c{std::move(cell), d, lambda * packet_bits, efficiency_bps};
  c.validate();
  return c;
}

void CellDemand::validate() const {
  if (!(offered_load_bps >= 0.0) || !std::isfinite(offered_load_bps)) {
    throw InvalidArgument(fmt::format("cell {}: offered load must be finite and >= 0", cell));
  }
  if (!(efficiency_bps > 0.0) || !std::isfinite(efficiency_bps)) {
    throw InvalidArgument(fmt::format("cell {}: efficiency must be positive", cell));
  }
}

ResourceRequirement required_resources(const CellDemand& demand, double rho_max) {
  if (!(rho_max > 0.0 && rho_max <= 1.0)) throw InvalidArgument("required_resources: rho_max must lie in (0, 1]");
  demand.validate();
  ResourceRequirement r;
  r.real = demand.offered_load_bps / (rho_max * demand.efficiency_bps);
  // Guard against 20.000000000000004 rounding up to 21.
  const double nearest = std::round(r.real);
  r.integer = static_cast<long long>(std::fabs(r.real - nearest) <= 1e-9 * std::max(1.0, r.real) ? nearest
                                                                                                  : std::ceil(r.real));
  return r;
}

std::vector<double> utilizations(const std::vector<CellDemand>& demands, const std::vector<long long>& x) {
  std::vector<double> rho(demands.size());
  for (std::size_t k = 0; k < demands.size(); ++k) {
    const double a = demands[k].equivalent_demand();
    if (a == 0.0) {
      rho[k] = 0.0;
    } else {
      rho[k] = x[k] > 0 ? a / static_cast<double>(x[k]) : std::numeric_limits<double>::infinity();
    }
  }
  return rho;
}

namespace {

double max_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

}  // namespace

Allocation minmax_allocation(const std::vector<CellDemand>& demands, long long total_resources) {
  if (demands.empty()) throw InvalidArgument("minmax_allocation: no demands");
  if (total_resources <= 0) throw InvalidArgument("minmax_allocation: total_resources must be positive");
  for (const auto& d : demands) d.validate();

  const std::size_t n = demands.size();
  std::vector<double> a(n);
  for (std::size_t k = 0; k < n; ++k) a[k] = demands[k].equivalent_demand();
  const double sum_a = std::accumulate(a.begin(), a.end(), 0.0);
  const double total = static_cast<double>(total_resources);

  Allocation out;
  out.real.assign(n, 0.0);
  out.integer.assign(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    if (a[k] > total) out.infeasible.push_back(k);
  }
  if (sum_a == 0.0) {
    // Nothing to equalize; leave the pool with the first cell so the sum holds.
    out.integer[0] = total_resources;
    out.real[0] = total;
    return out;
  }

  for (std::size_t k = 0; k < n; ++k) out.real[k] = total * a[k] / sum_a;
  out.max_rho_real = sum_a / total;

  // Largest remainder.
  long long assigned = 0;
  std::vector<std::pair<double, std::size_t>> remainders;
  for (std::size_t k = 0; k < n; ++k) {
    const double fl = std::floor(out.real[k]);
    out.integer[k] = static_cast<long long>(fl);
    assigned += out.integer[k];
    if (a[k] > 0.0) remainders.push_back({out.real[k] - fl, k});
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& l, const auto& r) { return l.first > r.first; });
  for (std::size_t i = 0; assigned < total_resources; i = (i + 1) % remainders.size()) {
    ++out.integer[remainders[i].second];
    ++assigned;
  }

  // Greedy repair: hand one resource to a max-rho cell whenever some donor
  // stays strictly below the current maximum after giving it up. Each move
  // lowers (max rho, number of cells at max) lexicographically, so the loop
  // terminates at an allocation no single move can improve, which for
  // x -> a/x objectives is the min-max optimum.
  auto rho_of = [&](std::size_t k, long long x) {
    if (a[k] == 0.0) return 0.0;
    return x > 0 ? a[k] / static_cast<double>(x) : std::numeric_limits<double>::infinity();
  };
  for (long long guard = 0; guard < total_resources * static_cast<long long>(n) + 1; ++guard) {
    std::size_t worst = 0;
    for (std::size_t k = 1; k < n; ++k) {
      if (rho_of(k, out.integer[k]) > rho_of(worst, out.integer[worst])) worst = k;
    }
    const double max_rho = rho_of(worst, out.integer[worst]);
    std::size_t donor = n;
    double donor_rho = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      if (k == worst || out.integer[k] == 0) continue;
      const double r = rho_of(k, out.integer[k] - 1);
      if (r < donor_rho) {
        donor_rho = r;
        donor = k;
      }
    }
    if (donor == n || !(donor_rho < max_rho)) break;
    --out.integer[donor];
    ++out.integer[worst];
  }
  out.max_rho_integer = max_of(utilizations(demands, out.integer));
  return out;
}

std::vector<ResourceRequirement> provision_for_delay(const std::vector<CellDemand>& demands, double w_target_bits,
                                                     double mean_bits, double mean_sq_bits) {
  if (!(w_target_bits > 0.0)) throw InvalidArgument("provision_for_delay: w_target must be positive");
  const double rho_max = traffic::max_ru_for_delay(w_target_bits, mean_bits, mean_sq_bits);
  std::vector<ResourceRequirement> out;
  out.reserve(demands.size());
  for (const auto& d : demands) out.push_back(required_resources(d, rho_max));
  return out;
}

}  // namespace flexduplex::provisioning
