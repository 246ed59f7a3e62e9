#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "flexduplex/provisioning.hpp"
#include "flexduplex/traffic.hpp"
#include "minmax_oracle.hpp"

namespace pv = flexduplex::provisioning;
using flexduplex::Direction;

namespace {

std::vector<pv::CellDemand> demands_from(const std::vector<double>& a) {
  std::vector<pv::CellDemand> out;
  for (std::size_t k = 0; k < a.size(); ++k) {
    out.push_back({"c" + std::to_string(k), Direction::kDownlink, a[k] * 1e5, 1e5});
  }
  return out;
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

TEST(RequiredResources, HandValue) {
  const auto d = pv::CellDemand::from_traffic("m", Direction::kDownlink, 1.0, 2e6, 2e5);
  const auto r = pv::required_resources(d, 0.5);
  EXPECT_LT(rel(r.real, 20.0), 1e-12);
  EXPECT_EQ(r.integer, 20);
  EXPECT_LT(rel(flexduplex::traffic::analytic_ru(1.0, 2e6, r.real, 2e5), 0.5), 1e-12);
  EXPECT_LT(rel(pv::required_resources(d, 1.0).real, d.equivalent_demand()), 1e-12);
  EXPECT_EQ(pv::required_resources(d, 0.3).integer, 34);
}

TEST(RequiredResources, RejectsBadRho) {
  const auto d = pv::CellDemand::from_traffic("m", Direction::kDownlink, 1.0, 2e6, 2e5);
  EXPECT_THROW(pv::required_resources(d, 0.0), flexduplex::InvalidArgument);
  EXPECT_THROW(pv::required_resources(d, 1.5), flexduplex::InvalidArgument);
  EXPECT_THROW(pv::CellDemand::from_traffic("m", Direction::kDownlink, 1.0, 2e6, 0.0), flexduplex::InvalidArgument);
}

TEST(MinMax, ThreeCellExample) {
  const auto alloc = pv::minmax_allocation(demands_from({2, 1, 1}), 40);
  EXPECT_EQ(alloc.integer, (std::vector<long long>{20, 10, 10}));
  for (double rho : pv::utilizations(demands_from({2, 1, 1}), alloc.integer)) EXPECT_NEAR(rho, 0.1, 1e-12);
  EXPECT_NEAR(alloc.max_rho_real, 0.1, 1e-12);
  EXPECT_TRUE(alloc.feasible());
}

TEST(MinMax, SingleCellTakesEverything) {
  const auto alloc = pv::minmax_allocation(demands_from({3}), 17);
  EXPECT_EQ(alloc.integer, (std::vector<long long>{17}));
}

TEST(MinMax, OddSplitOfEqualDemands) {
  const auto alloc = pv::minmax_allocation(demands_from({1, 1}), 5);
  std::vector<long long> sorted = alloc.integer;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<long long>{2, 3}));
  EXPECT_DOUBLE_EQ(alloc.max_rho_integer, brute_force_minmax({1, 1}, 5));
}

TEST(MinMax, ZeroDemandCellGetsNothing) {
  const auto alloc = pv::minmax_allocation(demands_from({2, 0, 1}), 30);
  EXPECT_EQ(alloc.integer[1], 0);
  EXPECT_EQ(alloc.integer[0] + alloc.integer[2], 30);
  EXPECT_NEAR(alloc.real[0] / alloc.real[2], 2.0, 1e-12);
}

TEST(MinMax, InfeasibleCellsAreReported) {
  const auto alloc = pv::minmax_allocation(demands_from({50, 1}), 40);
  EXPECT_FALSE(alloc.feasible());
  EXPECT_EQ(alloc.infeasible, (std::vector<std::size_t>{0}));
}

TEST(MinMax, RealSolutionEqualizes) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.01, 10);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(1 + trial % 6);
    for (auto& v : a) v = u(gen);
    const auto alloc = pv::minmax_allocation(demands_from(a), 100);
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_NEAR(a[k] / alloc.real[k], alloc.max_rho_real, 1e-9);
    }
    EXPECT_EQ(std::accumulate(alloc.integer.begin(), alloc.integer.end(), 0LL), 100);
  }
}

TEST(MinMax, IntegerMatchesExhaustiveSearch) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0.0, 8.0);
  for (std::size_t n = 1; n <= 4; ++n) {
    for (long long total = 1; total <= 30; total += (n == 4 ? 3 : 1)) {
      for (int trial = 0; trial < 4; ++trial) {
        std::vector<double> a(n);
        for (auto& v : a) v = trial == 0 ? std::round(u(gen)) : u(gen);
        if (std::accumulate(a.begin(), a.end(), 0.0) == 0.0) a[0] = 1.0;
        const auto alloc = pv::minmax_allocation(demands_from(a), total);
        ASSERT_EQ(std::accumulate(alloc.integer.begin(), alloc.integer.end(), 0LL), total);
        const double opt = brute_force_minmax(a, total);
        if (std::isinf(opt)) {
          EXPECT_TRUE(std::isinf(alloc.max_rho_integer));
        } else {
          EXPECT_NEAR(alloc.max_rho_integer, opt, 1e-12 * opt) << "n=" << n << " total=" << total;
        }
      }
    }
  }
}

TEST(ProvisionForDelay, CompositionAndHomogeneity) {
  const auto d = demands_from({10, 20});
  const auto x = pv::provision_for_delay(d, 1e6, 2e6, 4e12);
  EXPECT_LT(rel(x[0].real, 20.0), 1e-12);
  EXPECT_LT(rel(x[1].real, 40.0), 1e-12);
  const auto doubled = pv::provision_for_delay(demands_from({20, 40}), 1e6, 2e6, 4e12);
  EXPECT_LT(rel(doubled[0].real, 2 * x[0].real), 1e-12);
  const auto loose = pv::provision_for_delay(d, 1e15, 2e6, 4e12);
  EXPECT_LT(rel(loose[0].real, 10.0), 1e-6);
  EXPECT_THROW(pv::provision_for_delay(d, 0.0, 2e6, 4e12), flexduplex::InvalidArgument);
}
