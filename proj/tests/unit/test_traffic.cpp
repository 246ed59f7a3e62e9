#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <numeric>
#include <vector>

#include "flexduplex/traffic.hpp"

namespace ft = flexduplex::traffic;
using flexduplex::Direction;

namespace {

constexpr double kL = 2e6;
constexpr double kL2 = 4e12;

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

TEST(Arrivals, ZeroRateIsEmpty) { EXPECT_TRUE(ft::generate_arrivals(0.0, 100.0, 1).empty()); }

TEST(Arrivals, CountMatchesPoissonMean) {
  const auto a = ft::generate_arrivals(1.0, 1e4, 42);
  EXPECT_NEAR(static_cast<double>(a.size()), 1e4, 300.0);
}

TEST(Arrivals, InterArrivalMean) {
  const double lambda = 2.5;
  const auto a = ft::generate_arrivals(lambda, 1e4 / lambda, 7);
  ASSERT_GT(a.size(), 9000u);
  const double mean_gap = a.back() / static_cast<double>(a.size());
  EXPECT_LT(rel(mean_gap, 1.0 / lambda), 0.05);
}

TEST(Arrivals, SortedTruncatedAndSeeded) {
  const auto a = ft::generate_arrivals(3.0, 50.0, 9);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  for (double t : a) {
    EXPECT_GT(t, 0.0);
    EXPECT_LT(t, 50.0);
  }
  EXPECT_EQ(a, ft::generate_arrivals(3.0, 50.0, 9));
  EXPECT_NE(a, ft::generate_arrivals(3.0, 50.0, 10));
}

TEST(Arrivals, StationaryAcrossWindows) {
  const auto a = ft::generate_arrivals(1.0, 2e4, 3);
  const auto first = std::count_if(a.begin(), a.end(), [](double t) { return t < 1e4; });
  const auto second = static_cast<long>(a.size()) - first;
  // Difference of two independent Poisson(1e4) counts has sd ~141.
  EXPECT_LT(std::abs(first - second), 4 * 142);
}

TEST(Arrivals, RejectsBadInput) {
  EXPECT_THROW(ft::generate_arrivals(-1.0, 1.0, 1), flexduplex::InvalidArgument);
  EXPECT_THROW(ft::generate_arrivals(1.0, 0.0, 1), flexduplex::InvalidArgument);
}

TEST(AnalyticRu, HandValues) {
  EXPECT_EQ(ft::analytic_ru(0.0, kL, 50, 2e5), 0.0);
  EXPECT_LT(rel(ft::analytic_ru(1.0, kL, 50, 2e5), 0.2), 1e-12);
  EXPECT_LT(rel(ft::analytic_ru(1.0, kL, 25, 2e5), 2 * ft::analytic_ru(1.0, kL, 50, 2e5)), 1e-12);
  EXPECT_LT(rel(ft::analytic_ru(3.0, kL, 50, 2e5), 3 * ft::analytic_ru(1.0, kL, 50, 2e5)), 1e-12);
  EXPECT_THROW(ft::analytic_ru(1.0, kL, 0, 2e5), flexduplex::InvalidArgument);
  EXPECT_THROW(ft::analytic_ru(1.0, kL, 50, 0), flexduplex::InvalidArgument);
}

TEST(AnalyticQueue, HandValues) {
  EXPECT_EQ(ft::analytic_queue(0.0, kL, kL2), 0.0);
  EXPECT_LT(rel(ft::analytic_queue(0.5, kL, kL2), 1e6), 1e-12);
  EXPECT_LT(rel(ft::analytic_queue(0.8, kL, kL2), 4e6), 1e-12);
  EXPECT_THROW(ft::analytic_queue(1.0, kL, kL2), ft::QueueSaturated);
  EXPECT_THROW(ft::analytic_queue(1.5, kL, kL2), ft::QueueSaturated);
}

TEST(AnalyticQueue, StrictlyIncreasing) {
  double prev = -1.0;
  for (int i = 0; i < 1000; ++i) {
    const double w = ft::analytic_queue(i / 1000.0, kL, kL2);
    EXPECT_GT(w, prev);
    prev = w;
  }
}

TEST(MaxRuForDelay, HandValuesAndInversion) {
  EXPECT_EQ(ft::max_ru_for_delay(0.0, kL, kL2), 0.0);
  EXPECT_LT(rel(ft::max_ru_for_delay(1e6, kL, kL2), 0.5), 1e-12);
  for (double w : {1e3, 1e5, 1e6, 3.3e6, 1e8}) {
    EXPECT_LT(rel(ft::analytic_queue(ft::max_ru_for_delay(w, kL, kL2), kL, kL2), w), 1e-12) << w;
  }
}

TEST(Descriptor, FixedSizeAndValidation) {
  const auto t = ft::TrafficDescriptor::fixed_size(1.5, 0.1, kL);
  EXPECT_DOUBLE_EQ(t.lambda(Direction::kUplink), 0.15);
  EXPECT_DOUBLE_EQ(t.mean_sq_packet_bits, kL2);
  ft::TrafficDescriptor bad = t;
  bad.mean_sq_packet_bits = 1e12;
  EXPECT_THROW(bad.validate(), flexduplex::InvalidArgument);
  bad = t;
  bad.lambda_ul = -1;
  EXPECT_THROW(bad.validate(), flexduplex::InvalidArgument);
}

TEST(PacketQueue, FifoServiceAndConservation) {
  ft::PacketQueue q(Direction::kDownlink, 3);
  q.push(0, 100);
  q.push(2, 50);
  std::vector<ft::CompletedPacket> done;
  EXPECT_DOUBLE_EQ(q.serve(60, 2, done), 60);
  EXPECT_TRUE(done.empty());
  EXPECT_DOUBLE_EQ(q.serve(60, 3, done), 60);
  ASSERT_EQ(done.size(), 1u);
  EXPECT_EQ(done[0].arrival_subframe, 0);
  EXPECT_EQ(done[0].completion_subframe, 4);
  EXPECT_DOUBLE_EQ(done[0].bits, 100);
  EXPECT_DOUBLE_EQ(q.serve(1000, 4, done), 30);
  EXPECT_TRUE(q.empty());
  EXPECT_DOUBLE_EQ(q.arrived_bits() - q.served_bits(), q.backlog_bits());
  EXPECT_EQ(done.size(), 2u);
}

TEST(PacketQueue, RejectsOutOfOrderAndEmptyPackets) {
  ft::PacketQueue q(Direction::kUplink, 0);
  q.push(5, 1);
  EXPECT_THROW(q.push(4, 1), flexduplex::InvalidArgument);
  EXPECT_THROW(q.push(6, 0), flexduplex::InvalidArgument);
}

TEST(PacketQueue, RandomizedConservation) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0, 1);
  ft::PacketQueue q(Direction::kDownlink, 0);
  std::vector<ft::CompletedPacket> done;
  for (long long t = 0; t < 5000; ++t) {
    if (u(gen) < 0.1) q.push(t, 1 + 1000 * u(gen));
    q.serve(60 * u(gen), t, done);
    ASSERT_NEAR(q.arrived_bits() - q.served_bits(), q.backlog_bits(), 1e-6);
    double sum = 0;
    for (const auto& e : q.entries()) {
      ASSERT_GT(e.bits_remaining, 0);
      ASSERT_LE(e.bits_remaining, e.original_bits);
      sum += e.bits_remaining;
    }
    ASSERT_NEAR(sum, q.backlog_bits(), 1e-6);
  }
  for (const auto& d : done) EXPECT_GE(d.completion_subframe, d.arrival_subframe + 1);
}
