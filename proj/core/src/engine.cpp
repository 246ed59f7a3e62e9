#include "flexduplex/engine.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace flexduplex::engine {

namespace {

constexpr int kCarrierCount = 2;
int carrier_index(Direction d) { return d == Direction::kDownlink ? 0 : 1; }

constexpr double kBitsPerRbPerBpsHz = kRbBandwidthHz * kSubframeSeconds;

}  // namespace

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::kOnlyMeNB:
      return "ONLY_MENB";
    case Scheme::kFmaUlReuse:
      return "FMA_UL_REUSE";
    case Scheme::kFmaDlReuse:
      return "FMA_DL_REUSE";
    case Scheme::kTmaUlReuse:
      return "TMA_UL_REUSE";
  }
  return "?";
}

Scheme parse_scheme(std::string_view s) {
  for (Scheme x : {Scheme::kOnlyMeNB, Scheme::kFmaUlReuse, Scheme::kFmaDlReuse, Scheme::kTmaUlReuse}) {
    if (s == to_string(x)) return x;
  }
  throw InvalidArgument(fmt::format("unknown scheme '{}'", s));
}

InvalidConfig::InvalidConfig(std::string key, const std::string& message)
    : InvalidArgument(fmt::format("{}: {}", key, message)), key_(std::move(key)) {}

traffic::TrafficDescriptor SimConfig::traffic() const {
  traffic::TrafficDescriptor t;
  t.lambda_dl = lambda_dl;
  t.lambda_ul = asymmetry_ratio * lambda_dl;
  t.mean_packet_bits = packet_bits;
  t.mean_sq_packet_bits = packet_bits_sq > 0.0 ? packet_bits_sq : packet_bits * packet_bits;
  return t;
}

void SimConfig::validate() const {
  auto require = [](bool ok, const char* key, const char* what) {
    if (!ok) throw InvalidConfig(key, what);
  };
  require(warmup >= 0, "engine.warmup", "must be >= 0");
  require(horizon > warmup, "engine.horizon", "must exceed engine.warmup");
  require(replications >= 1, "engine.replications", "must be >= 1");
  require(interferer_activity >= 0.0 && interferer_activity <= 1.0, "engine.interferer_activity",
          "must lie in [0, 1]");
  require(lambda_dl >= 0.0 && std::isfinite(lambda_dl), "traffic.lambda_dl", "must be >= 0");
  require(asymmetry_ratio >= 0.0 && std::isfinite(asymmetry_ratio), "traffic.asymmetry_ratio", "must be >= 0");
  require(packet_bits > 0.0, "traffic.packet_bits", "must be positive");
  require(packet_bits_sq == 0.0 || packet_bits_sq >= packet_bits * packet_bits * (1.0 - 1e-12),
          "traffic.packet_bits_sq", "must be 0 (fixed size) or >= packet_bits^2");
  require(isd_m > 0.0, "scenario.isd", "must be positive");
  require(senb_distance_m > 0.0 && senb_distance_m < isd_m / 2.0, "scenario.senb_distance",
          "must lie inside the observed sector, in (0, isd/2)");
  require(ring_count >= 0, "scenario.ring_count", "must be >= 0");
  require(ue_count > 0, "scenario.ue_count", "must be positive");
  require(target_sues >= 0 && target_sues <= ue_count, "scenario.target_sues", "must lie in [0, ue_count]");
  require(cre.step_db > 0.0 && cre.max_db >= cre.min_db, "scenario.cre_step_db", "malformed CRE grid");
  require(sector_theta_3db_deg > 0.0, "radio.theta_3db", "must be positive");
  require(sector_max_attenuation_db >= 0.0, "radio.max_attenuation", "must be >= 0");
  require(aci.acir_db > 0.0, "radio.acir_db", "must be positive");
  require(link_adaptation.eta > 0.0, "radio.eta", "must be positive");
  require(link_adaptation.cap_bps_hz > 0.0, "radio.se_cap", "must be positive");
  require(plan.total_rbs > 0, "spectrum.total_rbs", "must be positive");
  require(plan.guard_rbs >= 0, "spectrum.guard_rbs", "must be >= 0");
  require(plan.pucch_edge_width >= 0 && 2 * plan.pucch_edge_width < plan.total_rbs, "spectrum.pucch_edge_width",
          "must leave room inside the carrier");
  try {
    budget.validate();
  } catch (const InvalidArgument& e) {
    throw InvalidConfig("radio", e.what());
  }
  try {
    propagation.validate();
  } catch (const InvalidArgument& e) {
    throw InvalidConfig("radio", e.what());
  }
}

std::vector<ExternalInterferer> external_interference(long long /*t*/, const scenario::NetworkLayout& layout,
                                                      std::span<const Vec2> neighbor_ues, Direction carrier,
                                                      bool include_neighbor_ues) {
  // Neighbours are modelled as always on, so the set does not vary with t.
  std::vector<ExternalInterferer> out;
  if (carrier == Direction::kDownlink) {
    for (std::size_t i = 0; i < layout.macro_sites.size(); ++i) {
      if (i == layout.observed_sector) continue;
      out.push_back({InterfererKind::kNeighborMeNB, layout.macro_sites[i].position, Direction::kDownlink});
    }
  } else if (include_neighbor_ues) {
    for (Vec2 p : neighbor_ues) out.push_back({InterfererKind::kNeighborUe, p, Direction::kUplink});
  }
  return out;
}

Direction carrier_of(Scheme scheme, CellId cell, Direction direction) {
  switch (scheme) {
    case Scheme::kOnlyMeNB:
      return direction;
    case Scheme::kFmaUlReuse:
    case Scheme::kTmaUlReuse:
      return cell == CellId::kSeNB ? Direction::kUplink : direction;
    case Scheme::kFmaDlReuse:
      return cell == CellId::kSeNB ? Direction::kDownlink : direction;
  }
  return direction;
}

std::vector<Grant> schedule_rr(std::span<const int> backlogged_ues, int available_rbs, int& cursor,
                               std::span<const int> needs) {
  std::vector<Grant> out;
  const std::size_t n = backlogged_ues.size();
  if (n == 0 || available_rbs <= 0) return out;
  if (!needs.empty() && needs.size() != n) throw InvalidArgument("schedule_rr: needs not aligned with UEs");

  std::vector<int> share(n, 0);
  std::vector<char> capped(n, 0);
  int remaining = available_rbs;
  std::size_t open = n;
  // Satisfy every UE whose need fits in the fair share, then re-split.
  for (bool changed = !needs.empty(); changed && open > 0;) {
    changed = false;
    const int fair = remaining / static_cast<int>(open);
    for (std::size_t i = 0; i < n; ++i) {
      if (capped[i] || needs[i] > fair) continue;
      share[i] = std::max(needs[i], 0);
      remaining -= share[i];
      capped[i] = 1;
      --open;
      changed = true;
    }
  }
  if (open > 0) {
    const int base = remaining / static_cast<int>(open);
    const int extra = remaining % static_cast<int>(open);
    std::size_t start = static_cast<std::size_t>(
        std::lower_bound(backlogged_ues.begin(), backlogged_ues.end(), cursor) - backlogged_ues.begin());
    int k = 0;
    int last_extra = -1;
    for (std::size_t step = 0; step < n; ++step) {
      const std::size_t i = (start + step) % n;
      if (capped[i]) continue;
      share[i] = base + (k < extra ? 1 : 0);
      if (k < extra) last_extra = backlogged_ues[i];
      ++k;
    }
    if (last_extra >= 0) cursor = last_extra + 1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (share[i] > 0) out.push_back({backlogged_ues[i], share[i]});
  }
  return out;
}

// ---------------------------------------------------------------------------

Simulation::Simulation(const SimConfig& config, int replication)
    : cfg_(config), replication_(replication), seed_(derive_seed(config.seed, static_cast<std::uint64_t>(replication))) {
  cfg_.validate();
  layout_ = scenario::build_layout(cfg_.isd_m, cfg_.senb_distance_m, cfg_.ring_count);
  ues_ = scenario::drop_ues(cfg_.ue_count, layout_, derive_seed(seed_, 1));

  std::mt19937_64 neighbor_gen(derive_seed(seed_, 3));
  for (std::size_t i = 0; i < layout_.macro_sites.size(); ++i) {
    if (i == layout_.observed_sector) continue;
    const auto& site = layout_.macro_sites[i];
    for (int s = 0; s < 3; ++s) {
      const auto poly = scenario::sector_polygon(site.position, site.sector_azimuth_deg + 120.0 * s, cfg_.isd_m);
      neighbor_ues_.push_back(scenario::sample_in_polygon(poly, neighbor_gen));
    }
  }

  build_nodes();

  if (cfg_.scheme != Scheme::kOnlyMeNB) {
    scenario::RsrpTable table;
    table.cells = {CellId::kMeNB, CellId::kSeNB};
    for (const auto& ue : ues_) {
      // Reference-signal power: total transmit power plus the link coupling.
      table.rsrp_dbm.push_back({cfg_.budget.tx_power_menb_dbm + coupling_db(kMeNBNode, ue_node(ue.id)),
                                cfg_.budget.tx_power_senb_dbm + coupling_db(kSeNBNode, ue_node(ue.id))});
    }
    try {
      cre_bias_db_ = scenario::calibrate_cre(table, cfg_.target_sues, cfg_.cre).bias_db;
    } catch (const scenario::CreUnreachable&) {
      cre_bias_db_ = cfg_.cre.max_db;
    }
    const auto assignment = scenario::associate(table, cre_bias_db_);
    for (std::size_t i = 0; i < ues_.size(); ++i) {
      ues_[i].serving_cell = assignment[i];
      ues_[i].is_sue = assignment[i] == CellId::kSeNB;
    }
  }

  build_units();

  const auto td = cfg_.traffic();
  const double horizon_s = static_cast<double>(cfg_.horizon) * kSubframeSeconds;
  queues_.resize(ues_.size());
  interference_estimate_mw_.assign(ues_.size(), {0.0, 0.0});
  arrivals_.resize(ues_.size());
  next_arrival_.assign(ues_.size(), {0, 0});
  for (const auto& ue : ues_) {
    for (Direction d : {Direction::kDownlink, Direction::kUplink}) {
      const int di = carrier_index(d);
      queues_[ue.id][di] = traffic::PacketQueue(d, ue.id);
      arrivals_[ue.id][di] = traffic::generate_arrivals(
          td.lambda(d), horizon_s, derive_seed(seed_, 1000 + static_cast<std::uint64_t>(ue.id), di + 1));
    }
  }
  fading_rng_.seed(derive_seed(seed_, 4));
}

int Simulation::rb_need(const Unit& u, int ue) const {
  const int di = carrier_index(u.direction);
  const double backlog = queues_[static_cast<std::size_t>(ue)][static_cast<std::size_t>(di)].backlog_bits();
  const bool dl = u.direction == Direction::kDownlink;
  const int tx = dl ? u.cell_node : ue_node(ue);
  const int rx = dl ? ue_node(ue) : u.cell_node;
  const std::size_t n = nodes_.size();
  const double gain = coupling_mw_[static_cast<std::size_t>(tx) * n + static_cast<std::size_t>(rx)] *
                      db_to_linear(cfg_.budget.mimo_gain_db);
  // Floor: what the link sees with only neighbour cells active.
  const double floor_mw = nodes_[static_cast<std::size_t>(rx)].noise_mw +
                          external_mw_[static_cast<std::size_t>(rx)][static_cast<std::size_t>(carrier_index(u.carrier))];
  const double measured = interference_estimate_mw_[static_cast<std::size_t>(ue)][static_cast<std::size_t>(di)];
  const double p_ue = db_to_linear(cfg_.budget.tx_power_ue_dbm);

  // Bits per subframe over k RBs; UL power is shared over the grant.
  auto bits = [&](int k, double interference) {
    const double psd = dl ? db_to_linear(enb_psd_dbm(u.cell_node)) : p_ue / k;
    return k * radio::spectral_efficiency(linear_to_db(psd * gain / interference), cfg_.link_adaptation) *
           kBitsPerRbPerBpsHz;
  };
  auto need = [&](double interference) {
    if (dl) {
      const double per_rb = bits(1, interference);
      if (per_rb <= 0.0) return 0;
      return std::min(u.rbs(), static_cast<int>(std::ceil(backlog / per_rb - 1e-9)));
    }
    // Bits grow with k until the per-RB SINR drops under the decoding floor.
    const double s1 = p_ue * gain / interference;
    const double floor_lin = db_to_linear(cfg_.link_adaptation.sinr_min_db);
    int k_max = static_cast<int>(std::min<double>(u.rbs(), std::floor(s1 / floor_lin * (1.0 + 1e-12))));
    if (k_max < 1 || bits(1, interference) <= 0.0) return 0;
    while (k_max > 1 && bits(k_max, interference) <= 0.0) --k_max;
    if (bits(k_max, interference) < backlog * (1.0 - 1e-12)) return k_max;
    int lo = 1, hi = k_max;
    while (lo < hi) {
      const int mid = (lo + hi) / 2;
      if (bits(mid, interference) >= backlog * (1.0 - 1e-12)) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    return lo;
  };
  if (need(floor_mw) == 0) return 0;  // out of range even without intra-system interference
  const int measured_need = measured > 0.0 ? need(measured) : 0;
  return measured_need > 0 ? measured_need : need(floor_mw);
}

void Simulation::build_nodes() {
  const auto& b = cfg_.budget;
  const double noise_enb = db_to_linear(radio::noise_floor_dbm(kRbBandwidthHz, b.nf_enb_db, b.noise_density_dbm_hz));
  const double noise_ue = db_to_linear(radio::noise_floor_dbm(kRbBandwidthHz, b.nf_ue_db, b.noise_density_dbm_hz));

  nodes_.push_back({NodeKind::kMeNB, layout_.observed().position, noise_enb});
  nodes_.push_back({NodeKind::kSeNB, layout_.senb_position, noise_enb});
  for (const auto& ue : ues_) nodes_.push_back({NodeKind::kUe, ue.position, noise_ue});
  std::vector<double> neighbor_azimuth;
  for (std::size_t i = 0; i < layout_.macro_sites.size(); ++i) {
    if (i == layout_.observed_sector) continue;
    nodes_.push_back({NodeKind::kNeighborMeNB, layout_.macro_sites[i].position, noise_enb});
    neighbor_azimuth.push_back(layout_.macro_sites[i].sector_azimuth_deg);
  }
  for (Vec2 p : neighbor_ues_) nodes_.push_back({NodeKind::kNeighborUe, p, noise_ue});

  const radio::AntennaPattern sector{b.gain_menb_dbi, true, layout_.observed().sector_azimuth_deg,
                                     cfg_.sector_theta_3db_deg, cfg_.sector_max_attenuation_db};
  const int first_neighbor = 2 + static_cast<int>(ues_.size());

  auto gain_toward = [&](int n, Vec2 target) -> double {
    const Node& node = nodes_[static_cast<std::size_t>(n)];
    const double bearing = bearing_deg(node.position, target);
    switch (node.kind) {
      case NodeKind::kMeNB:
        return radio::antenna_gain_dbi(sector, bearing);
      case NodeKind::kSeNB:
        return b.gain_senb_dbi;
      case NodeKind::kUe:
      case NodeKind::kNeighborUe:
        return b.gain_ue_dbi;
      case NodeKind::kNeighborMeNB: {
        // Three co-sited sectors, all transmitting.
        radio::AntennaPattern p = sector;
        double lin = 0.0;
        for (int s = 0; s < 3; ++s) {
          p.azimuth_deg = neighbor_azimuth[static_cast<std::size_t>(n - first_neighbor)] + 120.0 * s;
          lin += db_to_linear(radio::antenna_gain_dbi(p, bearing));
        }
        return linear_to_db(lin);
      }
    }
    return 0.0;
  };

  auto link_class = [](NodeKind a, NodeKind c) {
    auto macro = [](NodeKind k) { return k == NodeKind::kMeNB || k == NodeKind::kNeighborMeNB; };
    auto ue = [](NodeKind k) { return k == NodeKind::kUe || k == NodeKind::kNeighborUe; };
    if (ue(a) && ue(c)) return radio::LinkClass::kUeUe;
    if (ue(a) || ue(c)) return (macro(a) || macro(c)) ? radio::LinkClass::kMacroUe : radio::LinkClass::kSmallUe;
    return radio::LinkClass::kMacroSmall;
  };

  const std::size_t n = nodes_.size();
  const std::uint64_t shadow_seed = derive_seed(seed_, 2);
  coupling_mw_.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // Links between two external nodes never matter.
      if (static_cast<int>(i) >= first_neighbor) continue;
      const auto cls = link_class(nodes_[i].kind, nodes_[j].kind);
      const double d = distance(nodes_[i].position, nodes_[j].position);
      const double db = gain_toward(static_cast<int>(i), nodes_[j].position) +
                        gain_toward(static_cast<int>(j), nodes_[i].position) -
                        radio::pathloss_db(cls, d, cfg_.propagation) -
                        radio::shadowing_db(shadow_seed, i, j, cfg_.propagation.sigma(cls));
      coupling_mw_[i * n + j] = coupling_mw_[j * n + i] = db_to_linear(db);
    }
  }

  // Neighbour emissions seen by every node of the observed system.
  const double menb_psd = db_to_linear(b.tx_power_menb_dbm) / cfg_.plan.total_rbs * cfg_.interferer_activity;
  const double ue_psd = db_to_linear(b.tx_power_ue_dbm) / cfg_.plan.total_rbs;
  external_mw_.assign(n, {0.0, 0.0});
  for (int rx = 0; rx < first_neighbor; ++rx) {
    for (std::size_t e = static_cast<std::size_t>(first_neighbor); e < n; ++e) {
      const double g = coupling_mw_[e * n + static_cast<std::size_t>(rx)];
      if (nodes_[e].kind == NodeKind::kNeighborMeNB) {
        external_mw_[static_cast<std::size_t>(rx)][0] += menb_psd * g;
      } else if (cfg_.neighbor_ue_interference) {
        external_mw_[static_cast<std::size_t>(rx)][1] += ue_psd * g;
      }
    }
  }
}

void Simulation::build_units() {
  auto find_or_add = [&](CellId cell, Direction dir, Direction carrier, int group) -> Unit& {
    for (auto& u : units_) {
      if (u.cell == cell && u.direction == dir) return u;
    }
    Unit u;
    u.cell = cell;
    u.direction = dir;
    u.carrier = carrier;
    u.group = group;
    u.role = dir == Direction::kDownlink ? spectrum::Role::kDownlink : spectrum::Role::kUplink;
    u.cell_node = cell == CellId::kMeNB ? kMeNBNode : kSeNBNode;
    units_.push_back(u);
    return units_.back();
  };
  auto full_carrier = [&](Direction carrier) {
    Unit& u = find_or_add(CellId::kMeNB, carrier, carrier, 0);
    u.rb_index.resize(static_cast<std::size_t>(cfg_.plan.total_rbs));
    std::iota(u.rb_index.begin(), u.rb_index.end(), 0);
  };
  auto add_plan = [&](const spectrum::BandPlan& plan) {
    auto group_of = [](CellId c) { return c == CellId::kMeNB ? 0 : 1; };
    for (const auto& seg : plan.segments) {
      const int g = group_of(seg.owner);
      std::vector<int> rbs(static_cast<std::size_t>(seg.rbs.count));
      std::iota(rbs.begin(), rbs.end(), seg.rbs.first);
      if (seg.duplexing == spectrum::Duplexing::kFdd) {
        Unit& u = find_or_add(seg.owner, seg.direction, plan.carrier, g);
        u.rb_index.insert(u.rb_index.end(), rbs.begin(), rbs.end());
        continue;
      }
      for (Direction d : {Direction::kDownlink, Direction::kUplink}) {
        Unit& u = find_or_add(seg.owner, d, plan.carrier, g);
        u.rb_index = rbs;
        u.pattern = seg.pattern;
      }
      if (seg.host) {
        Unit& h = find_or_add(*seg.host, plan.carrier, plan.carrier, g);
        h.rb_index = rbs;
        h.pattern = seg.pattern;
        h.role = spectrum::Role::kHost;
      }
    }
    auto& adj = adjacent_groups_[static_cast<std::size_t>(carrier_index(plan.carrier))];
    for (auto [i, j] : plan.adjacent_pairs) {
      const int a = group_of(plan.segments[i].owner);
      const int c = group_of(plan.segments[j].owner);
      if (a == c) continue;
      const std::pair<int, int> p{std::min(a, c), std::max(a, c)};
      if (std::find(adj.begin(), adj.end(), p) == adj.end()) adj.push_back(p);
    }
  };

  switch (cfg_.scheme) {
    case Scheme::kOnlyMeNB:
      full_carrier(Direction::kDownlink);
      full_carrier(Direction::kUplink);
      break;
    case Scheme::kFmaUlReuse:
      full_carrier(Direction::kDownlink);
      add_plan(spectrum::make_fma_plan(Direction::kUplink, cfg_.plan));
      break;
    case Scheme::kFmaDlReuse:
      add_plan(spectrum::make_fma_plan(Direction::kDownlink, cfg_.plan));
      full_carrier(Direction::kUplink);
      break;
    case Scheme::kTmaUlReuse:
      full_carrier(Direction::kDownlink);
      add_plan(spectrum::make_tma_plan(cfg_.plan));
      break;
  }
  std::sort(units_.begin(), units_.end(), [](const Unit& a, const Unit& b) {
    return std::pair{a.cell, a.direction} < std::pair{b.cell, b.direction};
  });
  for (auto& u : units_) {
    for (const auto& ue : ues_) {
      if (ue.serving_cell == u.cell) u.served_ues.push_back(ue.id);
    }
  }
  stats_.assign(units_.size(), {});
  trace_.assign(units_.size(), {});
}

double Simulation::coupling_db(int a, int b) const {
  const std::size_t n = nodes_.size();
  return linear_to_db(coupling_mw_[static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b)]);
}

double Simulation::noise_per_rb_dbm(int rx_node) const {
  return linear_to_db(nodes_[static_cast<std::size_t>(rx_node)].noise_mw);
}

double Simulation::external_interference_dbm(int rx_node, Direction carrier) const {
  return linear_to_db(external_mw_.at(static_cast<std::size_t>(rx_node))[static_cast<std::size_t>(carrier_index(carrier))]);
}

double Simulation::enb_psd_dbm(int node) const {
  const double p = node == kMeNBNode ? cfg_.budget.tx_power_menb_dbm : cfg_.budget.tx_power_senb_dbm;
  return p - linear_to_db(cfg_.plan.total_rbs);
}

const traffic::PacketQueue& Simulation::queue(int ue, Direction d) const {
  return queues_.at(static_cast<std::size_t>(ue))[static_cast<std::size_t>(carrier_index(d))];
}

void Simulation::inject_packet(int ue, Direction d, long long arrival, double bits) {
  queues_.at(static_cast<std::size_t>(ue))[static_cast<std::size_t>(carrier_index(d))].push(arrival, bits);
}

void Simulation::clear_arrivals() {
  for (auto& a : arrivals_) {
    a[0].clear();
    a[1].clear();
  }
}

void Simulation::set_raw_log(std::ostream* out) {
  raw_log_ = out;
  if (raw_log_) *raw_log_ << "t,cell,direction,rbs_used,bits_served\n";
}

void Simulation::step(long long t) {
  if (t != next_t_) throw InvalidArgument(fmt::format("step: expected subframe {}, got {}", next_t_, t));
  if (t >= cfg_.horizon) throw InvalidArgument("step: beyond the horizon");
  ++next_t_;
  const std::size_t n = nodes_.size();
  const double bits_per_packet = cfg_.packet_bits;

  // (1) arrivals stamped with this subframe
  for (std::size_t ue = 0; ue < ues_.size(); ++ue) {
    for (int di = 0; di < 2; ++di) {
      const auto& arr = arrivals_[ue][static_cast<std::size_t>(di)];
      auto& next = next_arrival_[ue][static_cast<std::size_t>(di)];
      while (next < arr.size() && static_cast<long long>(arr[next] / kSubframeSeconds) <= t) {
        queues_[ue][static_cast<std::size_t>(di)].push(t, bits_per_packet);
        ++next;
      }
    }
  }

  // (2) roles, (3) scheduling
  static thread_local std::vector<std::vector<Grant>> grants;
  grants.assign(units_.size(), {});
  std::array<std::vector<Emitter>, kCarrierCount> emitters;
  std::vector<int> backlogged;
  std::vector<int> needs;
  for (std::size_t ui = 0; ui < units_.size(); ++ui) {
    Unit& u = units_[ui];
    UnitTrace& tr = trace_[ui];
    tr = UnitTrace{u.cell, u.direction, u.carrier, u.active_at(t), 0, 0, 0.0, {}};
    if (!tr.active) continue;
    tr.available_rbs = u.rbs();
    backlogged.clear();
    needs.clear();
    const int di = carrier_index(u.direction);
    for (int ue : u.served_ues) {
      if (queues_[static_cast<std::size_t>(ue)][static_cast<std::size_t>(di)].empty()) continue;
      const int k = rb_need(u, ue);
      if (k == 0) continue;  // channel out of range: not schedulable
      backlogged.push_back(ue);
      needs.push_back(k);
    }
    grants[ui] = schedule_rr(backlogged, u.rbs(), u.cursor, needs);
    auto& em = emitters[static_cast<std::size_t>(carrier_index(u.carrier))];
    if (u.direction == Direction::kDownlink) {
      if (!grants[ui].empty()) {
        em.push_back({u.cell_node, static_cast<int>(ui), u.group, db_to_linear(enb_psd_dbm(u.cell_node))});
      }
    } else {
      const double p_ue = db_to_linear(cfg_.budget.tx_power_ue_dbm);
      for (const auto& g : grants[ui]) em.push_back({ue_node(g.ue), static_cast<int>(ui), u.group, p_ue / g.rbs});
    }
    for (const auto& g : grants[ui]) tr.allocated_rbs += g.rbs;
  }

  if (cfg_.check_invariants) {
    std::array<std::vector<int>, kCarrierCount> owner;
    for (auto& o : owner) o.assign(static_cast<std::size_t>(cfg_.plan.total_rbs), -1);
    for (std::size_t ui = 0; ui < units_.size(); ++ui) {
      const Unit& u = units_[ui];
      if (trace_[ui].allocated_rbs > trace_[ui].available_rbs) {
        throw InvariantViolation(fmt::format("t={}: {} {} allocated beyond availability", t, to_string(u.cell),
                                             to_string(u.direction)));
      }
      int offset = 0;
      for (const auto& g : grants[ui]) {
        for (int k = 0; k < g.rbs; ++k) {
          int& o = owner[static_cast<std::size_t>(carrier_index(u.carrier))]
                        [static_cast<std::size_t>(u.rb_index[static_cast<std::size_t>(offset + k)])];
          if (o >= 0) throw InvariantViolation(fmt::format("t={}: RB granted twice", t));
          o = static_cast<int>(ui);
        }
        offset += g.rbs;
      }
    }
  }

  // (4) SINR per link, (5) drain, (6) close finished packets
  const double aci_att = cfg_.aci.attenuation();
  const double mimo = db_to_linear(cfg_.budget.mimo_gain_db);
  std::vector<traffic::CompletedPacket> done;
  std::exponential_distribution<double> rayleigh_power(1.0);
  for (std::size_t ui = 0; ui < units_.size(); ++ui) {
    const Unit& u = units_[ui];
    UnitTrace& tr = trace_[ui];
    if (!tr.active) continue;
    const int ci = carrier_index(u.carrier);
    const auto& adj = adjacent_groups_[static_cast<std::size_t>(ci)];
    const int di = carrier_index(u.direction);
    for (const auto& g : grants[ui]) {
      const int tx = u.direction == Direction::kDownlink ? u.cell_node : ue_node(g.ue);
      const int rx = u.direction == Direction::kDownlink ? ue_node(g.ue) : u.cell_node;
      const double psd = u.direction == Direction::kDownlink ? db_to_linear(enb_psd_dbm(u.cell_node))
                                                             : db_to_linear(cfg_.budget.tx_power_ue_dbm) / g.rbs;
      const double desired = psd * coupling_mw_[static_cast<std::size_t>(tx) * n + static_cast<std::size_t>(rx)] * mimo;
      double co = external_mw_[static_cast<std::size_t>(rx)][static_cast<std::size_t>(ci)];
      double adjacent = 0.0;
      for (const auto& e : emitters[static_cast<std::size_t>(ci)]) {
        if (e.unit == static_cast<int>(ui) || e.node == rx) continue;
        const double rxp = e.psd_mw * coupling_mw_[static_cast<std::size_t>(e.node) * n + static_cast<std::size_t>(rx)];
        if (e.group == u.group) {
          co += rxp;
        } else {
          const std::pair<int, int> p{std::min(e.group, u.group), std::max(e.group, u.group)};
          if (std::find(adj.begin(), adj.end(), p) != adj.end()) adjacent += rxp;
        }
      }
      const double noise = nodes_[static_cast<std::size_t>(rx)].noise_mw;
      interference_estimate_mw_[static_cast<std::size_t>(g.ue)][static_cast<std::size_t>(di)] =
          noise + co + adjacent * aci_att;
      double bits = 0.0;
      double sinr_lin = 0.0;
      if (cfg_.propagation.fading_enabled) {
        for (int k = 0; k < g.rbs; ++k) {
          const double s = radio::sinr_linear(desired * rayleigh_power(fading_rng_), noise, co, adjacent, aci_att);
          sinr_lin += s / g.rbs;
          bits += radio::spectral_efficiency(linear_to_db(s), cfg_.link_adaptation) * kBitsPerRbPerBpsHz;
        }
      } else {
        sinr_lin = radio::sinr_linear(desired, noise, co, adjacent, aci_att);
        bits = g.rbs * radio::spectral_efficiency(linear_to_db(sinr_lin), cfg_.link_adaptation) * kBitsPerRbPerBpsHz;
      }
      done.clear();
      const double drained = queues_[static_cast<std::size_t>(g.ue)][static_cast<std::size_t>(di)].serve(bits, t, done);
      for (const auto& p : done) {
        if (p.arrival_subframe >= cfg_.warmup) {
          records_.push_back({g.ue, u.direction, p.arrival_subframe, p.completion_subframe, p.bits});
        }
      }
      tr.bits_served += drained;
      tr.links.push_back({g.ue, g.rbs, linear_to_db(sinr_lin), drained});
    }
  }

  if (t >= cfg_.warmup) {
    for (std::size_t ui = 0; ui < units_.size(); ++ui) {
      const Unit& u = units_[ui];
      UnitStats& st = stats_[ui];
      st.available.push_back(trace_[ui].available_rbs);
      st.allocated.push_back(trace_[ui].allocated_rbs);
      st.served_bits += trace_[ui].bits_served;
      double q = 0.0;
      for (int ue : u.served_ues) {
        q += queues_[static_cast<std::size_t>(ue)][static_cast<std::size_t>(carrier_index(u.direction))].backlog_bits();
      }
      st.queue_bits_sum += q;
      ++st.queue_samples;
    }
  }

  if (raw_log_) {
    for (const auto& tr : trace_) {
      if (!tr.active) continue;
      fmt::print(*raw_log_, "{},{},{},{},{}\n", t, to_string(tr.cell), to_string(tr.direction), tr.allocated_rbs,
                 tr.bits_served);
    }
  }

  if (cfg_.check_invariants) check_invariants(t);
}

void Simulation::check_invariants(long long t) const {
  for (const auto& pair : queues_) {
    for (const auto& q : pair) {
      const double lhs = q.arrived_bits() - q.served_bits();
      double listed = 0.0;
      for (const auto& e : q.entries()) listed += e.bits_remaining;
      const double tol = 1e-6 * std::max(1.0, q.arrived_bits());
      if (std::fabs(lhs - q.backlog_bits()) > tol || std::fabs(listed - q.backlog_bits()) > tol) {
        throw InvariantViolation(fmt::format("t={}: bit conservation broken for UE {} {}", t, q.owner_ue(),
                                             to_string(q.direction())));
      }
    }
  }
}

void Simulation::run_to_horizon() {
  while (next_t_ < cfg_.horizon) step(next_t_);
}

ReplicationSummary Simulation::summarize() const {
  ReplicationSummary out;
  out.cre_bias_db = cre_bias_db_;
  out.sue_count = static_cast<int>(std::count_if(ues_.begin(), ues_.end(), [](const auto& u) { return u.is_sue; }));
  auto& rep = out.report;
  rep.meta = {std::string(to_string(cfg_.scheme)), cfg_.lambda_dl, cfg_.asymmetry_ratio, cfg_.seed, 1};
  const auto td = cfg_.traffic();
  for (std::size_t ui = 0; ui < units_.size(); ++ui) {
    const Unit& u = units_[ui];
    const UnitStats& st = stats_[ui];
    metrics::CellDirectionMetrics row;
    row.cell = u.cell;
    row.direction = u.direction;
    row.ru = metrics::measured_ru(st.allocated, st.available);

    std::vector<metrics::PacketRecord> recs;
    for (const auto& r : records_) {
      if (r.direction == u.direction && ues_[static_cast<std::size_t>(r.ue)].serving_cell == u.cell) recs.push_back(r);
    }
    row.ut_mbps = cfg_.ut_averaging == metrics::UtAveraging::kPerUe ? metrics::mean_ut_per_ue(recs)
                                                                     : metrics::mean_ut(recs);
    row.packets_completed = static_cast<long long>(recs.size());
    row.queue_mean_bits = st.queue_samples ? st.queue_bits_sum / static_cast<double>(st.queue_samples) : 0.0;

    const double window = static_cast<double>(st.available.size());
    const double allocated = std::accumulate(st.allocated.begin(), st.allocated.end(), 0.0);
    const double available = std::accumulate(st.available.begin(), st.available.end(), 0.0);
    row.realized_c = allocated > 0.0 ? st.served_bits / (allocated * kSubframeSeconds) : 0.0;
    const double offered_rate = td.lambda(u.direction) * static_cast<double>(u.served_ues.size());
    if (row.realized_c > 0.0 && available > 0.0) {
      row.analytic_ru = traffic::analytic_ru(offered_rate, td.mean_packet_bits, available / window, row.realized_c);
      if (row.analytic_ru < 1.0) {
        row.analytic_queue_bits = traffic::analytic_queue(row.analytic_ru, td.mean_packet_bits, td.mean_sq_packet_bits);
      }
    }
    rep.rows.push_back(row);
  }
  return out;
}

std::vector<ReplicationSummary> run_replications(const SimConfig& config) {
  config.validate();
  auto one = [&config](int r) {
    Simulation sim(config, r);
    sim.run_to_horizon();
    return sim.summarize();
  };
  std::vector<ReplicationSummary> out;
  out.reserve(static_cast<std::size_t>(config.replications));
  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  if (workers == 1 || config.replications == 1) {
    for (int r = 0; r < config.replications; ++r) out.push_back(one(r));
    return out;
  }
  // Results are collected in replication order whatever the completion order.
  for (int base = 0; base < config.replications; base += static_cast<int>(workers)) {
    std::vector<std::future<ReplicationSummary>> batch;
    for (int r = base; r < std::min(config.replications, base + static_cast<int>(workers)); ++r) {
      batch.push_back(std::async(std::launch::async, one, r));
    }
    for (auto& f : batch) out.push_back(f.get());
  }
  return out;
}

metrics::MetricsReport run(const SimConfig& config) {
  const auto reps = run_replications(config);
  std::vector<metrics::MetricsReport> reports;
  reports.reserve(reps.size());
  for (const auto& r : reps) reports.push_back(r.report);
  return metrics::aggregate(reports);
}

}  // namespace flexduplex::engine
