#pragma once

// Test-side oracles, independent of the library's computation paths.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "sfpe/rng.hpp"
#include "sfpe/wasserstein.hpp"

namespace testing_oracles {

// Brute-force d_p^p: midpoint Riemann sum of the quantile integral.
inline double riemann_dp_pow(const sfpe::EmpiricalDistribution& a,
                             const sfpe::EmpiricalDistribution& b, double p,
                             std::size_t points) {
  double acc = 0.0, carry = 0.0;
  for (std::size_t i = 1; i <= points; ++i) {
    const double u = (static_cast<double>(i) - 0.5) / static_cast<double>(points);
    const double d = std::pow(std::fabs(a.quantile(u) - b.quantile(u)), p);
    const double y = d - carry;
    const double t = acc + y;
    carry = (t - acc) - y;
    acc = t;
  }
  return acc / static_cast<double>(points);
}

// Quantile by definition: the smallest x in the support with F(x) >= u,
// via a linear scan over sorted values.
inline double quantile_by_scan(std::span<const double> sorted, double u) {
  const auto n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    double fx = static_cast<double>(i + 1) / n;
    // account for ties: F jumps to the count of values <= x
    while (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) {
      ++i;
      fx = static_cast<double>(i + 1) / n;
    }
    if (fx >= u) return sorted[i];
  }
  return sorted.back();
}

// Random sample from a few shapes used across the statistical tests.
inline std::vector<double> random_sample(sfpe::RandomStream& rng, std::size_t n,
                                         int shape) {
  std::vector<double> out(n);
  for (auto& v : out) {
    const double u = rng.u01();
    switch (shape % 4) {
      case 0:
        v = 4.0 * u - 2.0;  // uniform
        break;
      case 1:
        v = -std::log(u);  // exponential
        break;
      case 2:
        v = (u - 0.5) * (u - 0.5) * (u < 0.5 ? -9.0 : 9.0);  // bimodal-ish
        break;
      default: {
        const double w = rng.u01();
        v = std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586 * w);  // normal-ish
        break;
      }
    }
  }
  return out;
}

}  // namespace testing_oracles
