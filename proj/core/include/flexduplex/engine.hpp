#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "flexduplex/common.hpp"
#include "flexduplex/metrics.hpp"
#include "flexduplex/radio.hpp"
#include "flexduplex/scenario.hpp"
#include "flexduplex/spectrum.hpp"
#include "flexduplex/traffic.hpp"

namespace flexduplex::engine {

enum class Scheme { kOnlyMeNB, kFmaUlReuse, kFmaDlReuse, kTmaUlReuse };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view s);

/// A configuration value failed validation; `key` names the offending key.
class InvalidConfig : public InvalidArgument {
 public:
  InvalidConfig(std::string key, const std::string& message);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct SimConfig {
  Scheme scheme = Scheme::kOnlyMeNB;
  double lambda_dl = 1.0;
  double asymmetry_ratio = 0.1;
  double packet_bits = 2e6;
  /// Mean squared packet length; 0 selects fixed-size packets (L^2).
  double packet_bits_sq = 0.0;
  long long horizon = 20000;  // subframes
  long long warmup = 2000;    // subframes
  std::uint64_t seed = 1;
  int replications = 1;

  // Deployment.
  double isd_m = 500.0;
  double senb_distance_m = 100.0;
  int ring_count = 1;
  int ue_count = 50;
  int target_sues = 10;
  scenario::CreGrid cre;

  radio::LinkBudget budget;
  double sector_theta_3db_deg = 70.0;
  double sector_max_attenuation_db = 25.0;
  radio::PropagationModel propagation;
  radio::AciCoupling aci;
  radio::LinkAdaptation link_adaptation;
  spectrum::PlanOptions plan;

  /// Load factor of neighbouring MeNBs, scales their transmit power.
  double interferer_activity = 1.0;
  bool neighbor_ue_interference = true;
  metrics::UtAveraging ut_averaging = metrics::UtAveraging::kPerPacket;
  /// Verify bit and RB conservation after every subframe.
  bool check_invariants = false;

  traffic::TrafficDescriptor traffic() const;
  void validate() const;
};

/// Violation of a per-subframe conservation invariant.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

enum class InterfererKind { kNeighborMeNB, kNeighborUe };

struct ExternalInterferer {
  InterfererKind kind = InterfererKind::kNeighborMeNB;
  Vec2 position;
  /// Carrier of the FDD pair it transmits on.
  Direction carrier = Direction::kDownlink;
};

/// Transmitters outside the observed system that are active in subframe `t`
/// on `carrier`: neighbour MeNBs on the DL carrier (full buffer) and one
/// representative UE per neighbour sector on the UL carrier.
std::vector<ExternalInterferer> external_interference(long long t, const scenario::NetworkLayout& layout,
                                                      std::span<const Vec2> neighbor_ues, Direction carrier,
                                                      bool include_neighbor_ues = true);

/// Carrier of the FDD pair on which `cell` operates in `direction` under `scheme`.
Direction carrier_of(Scheme scheme, CellId cell, Direction direction);

struct Grant {
  int ue = 0;
  int rbs = 0;
};

/// Round-robin split of `available_rbs` over `backlogged_ues` (ascending
/// ids). The remainder RBs go to the UEs at or after `cursor` in cyclic
/// order; `cursor` then advances past the last UE that received one.
///
/// With `needs` (aligned with `backlogged_ues`), no UE gets more than it
/// needs and the surplus is split among the others, so RBs stay idle only
/// when every backlog fits.
std::vector<Grant> schedule_rr(std::span<const int> backlogged_ues, int available_rbs, int& cursor,
                               std::span<const int> needs = {});

struct LinkTrace {
  int ue = 0;
  int rbs = 0;
  double sinr_db = 0.0;  // mean over the link's RBs when fading is on
  double bits = 0.0;
};

/// One (cell, direction) service of the current subframe.
struct UnitTrace {
  CellId cell = CellId::kMeNB;
  Direction direction = Direction::kDownlink;
  Direction carrier = Direction::kDownlink;
  bool active = false;
  int available_rbs = 0;
  int allocated_rbs = 0;
  double bits_served = 0.0;
  std::vector<LinkTrace> links;
};

struct ReplicationSummary {
  metrics::MetricsReport report;
  double cre_bias_db = 0.0;
  int sue_count = 0;
};

/// One replication: a drop, its association, and the subframe loop.
class Simulation {
 public:
  Simulation(const SimConfig& config, int replication);

  /// Advances subframe `t`; subframes must be stepped in order from 0.
  void step(long long t);
  void run_to_horizon();
  ReplicationSummary summarize() const;

  /// CSV rows (t, cell, direction, rbs_used, bits_served) for every active
  /// service, written as the loop advances.
  void set_raw_log(std::ostream* out);

  const scenario::NetworkLayout& layout() const { return layout_; }
  const std::vector<scenario::UserTerminal>& ues() const { return ues_; }
  const std::vector<Vec2>& neighbor_ues() const { return neighbor_ues_; }
  const std::vector<UnitTrace>& last_subframe() const { return trace_; }
  const traffic::PacketQueue& queue(int ue, Direction d) const;
  const std::vector<metrics::PacketRecord>& records() const { return records_; }
  double cre_bias_db() const { return cre_bias_db_; }

  // Node handles for link inspection.
  static constexpr int kMeNBNode = 0;
  static constexpr int kSeNBNode = 1;
  int ue_node(int ue) const { return 2 + ue; }
  /// Antenna gains minus pathloss and shadowing between two nodes, dB.
  double coupling_db(int a, int b) const;
  double noise_per_rb_dbm(int rx_node) const;
  /// Neighbour-cell interference per RB received by `rx_node` on a carrier, dBm.
  double external_interference_dbm(int rx_node, Direction carrier) const;
  /// Transmit power per RB of an eNB node, dBm.
  double enb_psd_dbm(int node) const;

  /// Adds a packet to a UE queue outside the Poisson stream (tests).
  void inject_packet(int ue, Direction d, long long arrival, double bits);
  /// Drops the generated arrivals so only injected packets remain (tests).
  void clear_arrivals();

 private:
  enum class NodeKind { kMeNB, kSeNB, kUe, kNeighborMeNB, kNeighborUe };

  struct Node {
    NodeKind kind = NodeKind::kUe;
    Vec2 position;
    double noise_mw = 0.0;  // per RB, receivers only
  };

  // The service of one cell in one direction on one carrier segment group.
  struct Unit {
    CellId cell = CellId::kMeNB;
    Direction direction = Direction::kDownlink;
    Direction carrier = Direction::kDownlink;
    int group = 0;
    std::vector<int> rb_index;
    std::optional<spectrum::FramePattern> pattern;
    spectrum::Role role = spectrum::Role::kDownlink;
    int cell_node = 0;
    std::vector<int> served_ues;
    int cursor = 0;

    bool active_at(long long t) const { return !pattern || pattern->at(t) == role; }
    int rbs() const { return static_cast<int>(rb_index.size()); }
  };

  struct Emitter {
    int node = 0;
    int unit = -1;
    int group = 0;
    double psd_mw = 0.0;
  };

  struct UnitStats {
    std::vector<int> allocated;
    std::vector<int> available;
    double served_bits = 0.0;
    double queue_bits_sum = 0.0;
    long long queue_samples = 0;
  };

  // RBs the UE would need to empty its queue, judged from the interference
  // it saw last time it was served.
  int rb_need(const Unit& u, int ue) const;

  void build_nodes();
  void build_units();
  void check_invariants(long long t) const;

  SimConfig cfg_;
  int replication_;
  std::uint64_t seed_;
  scenario::NetworkLayout layout_;
  std::vector<scenario::UserTerminal> ues_;
  std::vector<Vec2> neighbor_ues_;
  double cre_bias_db_ = 0.0;

  std::vector<Node> nodes_;
  std::vector<double> coupling_mw_;  // dense, nodes_ x nodes_
  std::vector<Unit> units_;
  std::vector<UnitStats> stats_;
  // Segment groups coupled through ACI, per carrier.
  std::array<std::vector<std::pair<int, int>>, 2> adjacent_groups_;
  // Received external interference per node and carrier, mW per RB.
  std::vector<std::array<double, 2>> external_mw_;

  std::vector<std::array<traffic::PacketQueue, 2>> queues_;
  // Noise plus interference per RB last measured on each UE's link, mW.
  std::vector<std::array<double, 2>> interference_estimate_mw_;
  std::vector<std::array<std::vector<double>, 2>> arrivals_;
  std::vector<std::array<std::size_t, 2>> next_arrival_;

  std::vector<metrics::PacketRecord> records_;
  std::vector<UnitTrace> trace_;
  std::mt19937_64 fading_rng_;
  std::ostream* raw_log_ = nullptr;
  long long next_t_ = 0;
};

/// Runs `config.replications` replications with derived seeds and
/// aggregates their metrics.
metrics::MetricsReport run(const SimConfig& config);

/// Per-replication summaries, in replication order.
std::vector<ReplicationSummary> run_replications(const SimConfig& config);

}  // namespace flexduplex::engine
