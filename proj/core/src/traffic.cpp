#include "flexduplex/traffic.hpp"

#include <random>

#include <fmt/format.h>

namespace flexduplex::traffic {

TrafficDescriptor TrafficDescriptor::fixed_size(double lambda_dl, double asymmetry_ratio, double packet_bits) {
  TrafficDescriptor t;
  t.lambda_dl = lambda_dl;
  t.lambda_ul = asymmetry_ratio * lambda_dl;
  t.mean_packet_bits = packet_bits;
  t.mean_sq_packet_bits = packet_bits * packet_bits;
  t.validate();
  return t;
}

void TrafficDescriptor::validate() const {
  if (!(lambda_dl >= 0.0 && lambda_ul >= 0.0)) throw InvalidArgument("traffic: arrival rates must be >= 0");
  if (!(mean_packet_bits > 0.0)) throw InvalidArgument("traffic: packet size must be positive");
  // Relative slack so that L*L computed in floating point passes for fixed sizes.
  if (mean_sq_packet_bits < mean_packet_bits * mean_packet_bits * (1.0 - 1e-12)) {
    throw InvalidArgument("traffic: mean squared packet length below squared mean");
  }
}

std::vector<double> generate_arrivals(double lambda, double horizon_s, std::uint64_t rng_seed) {
  if (!(lambda >= 0.0)) throw InvalidArgument("generate_arrivals: lambda must be >= 0");
  if (!(horizon_s > 0.0)) throw InvalidArgument("generate_arrivals: horizon must be positive");
  std::vector<double> out;
  if (lambda == 0.0) return out;
  std::mt19937_64 gen(rng_seed);
  std::exponential_distribution<double> gap(lambda);
  for (double t = gap(gen); t < horizon_s; t += gap(gen)) out.push_back(t);
  return out;
}

double analytic_ru(double lambda, double mean_bits, double x_resources, double c_per_resource) {
  if (!(x_resources > 0.0) || !(c_per_resource > 0.0)) {
    throw InvalidArgument("analytic_ru: resources and efficiency must be positive");
  }
  return (lambda * mean_bits / x_resources) * (1.0 / c_per_resource);
}

QueueSaturated::QueueSaturated(double rho)
    : Error(fmt::format("analytic_queue: utilization {} >= 1, the queue is unstable", rho)) {}

double analytic_queue(double rho, double mean_bits, double mean_sq_bits) {
  if (rho >= 1.0) throw QueueSaturated(rho);
  if (!(rho >= 0.0)) throw InvalidArgument("analytic_queue: utilization must be >= 0");
  return (rho / (1.0 - rho)) * (mean_sq_bits / (2.0 * mean_bits));
}

double max_ru_for_delay(double w_target_bits, double mean_bits, double mean_sq_bits) {
  if (!(w_target_bits >= 0.0)) throw InvalidArgument("max_ru_for_delay: target must be >= 0");
  if (std::isinf(w_target_bits)) return 1.0;
  const double k = mean_sq_bits / (2.0 * mean_bits);
  return w_target_bits / (w_target_bits + k);
}

void PacketQueue::push(long long arrival_subframe, double bits) {
  if (!(bits > 0.0)) throw InvalidArgument("PacketQueue: packet must carry bits");
  if (!entries_.empty() && arrival_subframe < entries_.back().arrival_subframe) {
    throw InvalidArgument("PacketQueue: arrivals out of order");
  }
  entries_.push_back({arrival_subframe, bits, bits});
  backlog_bits_ += bits;
  arrived_bits_ += bits;
}

double PacketQueue::serve(double budget_bits, long long now, std::vector<CompletedPacket>& done) {
  double drained = 0.0;
  while (budget_bits > 0.0 && !entries_.empty()) {
    Entry& head = entries_.front();
    const double take = std::min(budget_bits, head.bits_remaining);
    head.bits_remaining -= take;
    budget_bits -= take;
    drained += take;
    if (head.bits_remaining <= 0.0) {
      done.push_back({head.arrival_subframe, now + 1, head.original_bits});
      entries_.pop_front();
    }
  }
  served_bits_ += drained;
  backlog_bits_ = entries_.empty() ? 0.0 : backlog_bits_ - drained;
  return drained;
}

}  // namespace flexduplex::traffic
