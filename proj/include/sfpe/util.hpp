#pragma once

#include <cmath>
#include <cstddef>
#include <exception>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

namespace sfpe {

// Kahan (compensated) accumulator. Distances between large pools land near
// zero, where naive summation of p-th powers loses the answer.
class KahanSum {
 public:
  void add(double x) noexcept {
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const noexcept { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

struct MeanStdErr {
  double mean = 0.0;
  double std_error = 0.0;  // of the mean
  double sd = 0.0;
};

inline MeanStdErr mean_and_se(std::span<const double> xs) {
  if (xs.empty()) return {};
  KahanSum s;
  for (double x : xs) s.add(x);
  const double mean = s.value() / static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0, 0.0};
  KahanSum sq;
  for (double x : xs) sq.add((x - mean) * (x - mean));
  const double var = sq.value() / static_cast<double>(xs.size() - 1);
  const double sd = std::sqrt(var);
  return {mean, sd / std::sqrt(static_cast<double>(xs.size())), sd};
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Ordinary least squares of y on x.
inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need two or more paired points");
  const auto n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

// Run body(lo, hi) over a partition of [0, n) on up to `threads` threads.
// Chunks are contiguous and deterministic; the first failing chunk's
// exception (lowest range) is rethrown after all threads join.
template <class Body>
void parallel_for_ranges(std::size_t n, int threads, Body&& body) {
  if (threads <= 1 || n < 2) {
    body(std::size_t{0}, n);
    return;
  }
  const auto want = static_cast<std::size_t>(threads);
  const std::size_t parts = want < n ? want : n;
  std::vector<std::exception_ptr> errors(parts);
  std::vector<std::thread> pool;
  pool.reserve(parts);
  const std::size_t base = n / parts;
  const std::size_t extra = n % parts;
  std::size_t lo = 0;
  for (std::size_t t = 0; t < parts; ++t) {
    const std::size_t hi = lo + base + (t < extra ? 1 : 0);
    pool.emplace_back([&, lo, hi, t] {
      try {
        body(lo, hi);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
    lo = hi;
  }
  for (auto& th : pool) th.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

}  // namespace sfpe
