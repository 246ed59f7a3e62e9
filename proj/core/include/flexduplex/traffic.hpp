#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "flexduplex/common.hpp"

namespace flexduplex::traffic {

/// Per-UE Poisson packet streams (FTP model 3) in both directions.
struct TrafficDescriptor {
  double lambda_dl = 1.0;             // packets/s
  double lambda_ul = 0.1;             // packets/s
  double mean_packet_bits = 2e6;      // L
  double mean_sq_packet_bits = 4e12;  // mean of the squared length

  static TrafficDescriptor fixed_size(double lambda_dl, double asymmetry_ratio, double packet_bits);
  double lambda(Direction d) const { return d == Direction::kDownlink ? lambda_dl : lambda_ul; }
  void validate() const;
};

/// Exponential inter-arrival times in seconds, truncated at `horizon_s`.
std::vector<double> generate_arrivals(double lambda, double horizon_s, std::uint64_t rng_seed);

/// Resource utilization: offered traffic over the serving capacity of
/// `x_resources` resources of `c_per_resource` bits/s each.
double analytic_ru(double lambda, double mean_bits, double x_resources, double c_per_resource);

class QueueSaturated : public Error {
 public:
  explicit QueueSaturated(double rho);
};

/// Mean queued bits for Poisson arrivals at utilization `rho` in [0, 1).
double analytic_queue(double rho, double mean_bits, double mean_sq_bits);

/// Largest utilization keeping the mean queue at or below `w_target_bits`.
double max_ru_for_delay(double w_target_bits, double mean_bits, double mean_sq_bits);

struct CompletedPacket {
  long long arrival_subframe = 0;
  long long completion_subframe = 0;
  double bits = 0.0;
};

/// FIFO backlog of one UE in one direction.
class PacketQueue {
 public:
  struct Entry {
    long long arrival_subframe;
    double bits_remaining;
    double original_bits;
  };

  PacketQueue() = default;
  PacketQueue(Direction direction, int owner_ue) : direction_(direction), owner_ue_(owner_ue) {}

  void push(long long arrival_subframe, double bits);

  /// Drains up to `budget_bits` in FIFO order during subframe `now`; finished
  /// packets are appended to `done` with completion `now + 1`. Returns bits
  /// actually drained.
  double serve(double budget_bits, long long now, std::vector<CompletedPacket>& done);

  bool empty() const { return entries_.empty(); }
  double backlog_bits() const { return backlog_bits_; }
  double arrived_bits() const { return arrived_bits_; }
  double served_bits() const { return served_bits_; }
  const std::deque<Entry>& entries() const { return entries_; }
  Direction direction() const { return direction_; }
  int owner_ue() const { return owner_ue_; }

 private:
  std::deque<Entry> entries_;
  Direction direction_ = Direction::kDownlink;
  int owner_ue_ = 0;
  double backlog_bits_ = 0.0;
  double arrived_bits_ = 0.0;
  double served_bits_ = 0.0;
};

}  // namespace flexduplex::traffic
