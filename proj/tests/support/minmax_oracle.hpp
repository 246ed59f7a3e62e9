#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <vector>

// Exhaustive min-max: tries every split of `total` integer resources over
// the cells and returns the smallest achievable max of a_k / x_k. Cells with
// zero demand never bind.
inline double brute_force_minmax(const std::vector<double>& a, long long total) {
  const std::size_t n = a.size();
  std::vector<long long> x(n, 0);
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, long long)> rec = [&](std::size_t k, long long left) {
    if (k + 1 == n) {
      x[k] = left;
      double worst = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (a[i] == 0.0) continue;
        worst = std::max(worst, x[i] == 0 ? std::numeric_limits<double>::infinity() : a[i] / static_cast<double>(x[i]));
      }
      best = std::min(best, worst);
      return;
    }
    for (long long v = 0; v <= left; ++v) {
      x[k] = v;
      rec(k + 1, left - v);
    }
  };
  rec(0, total);
  return best;
}
