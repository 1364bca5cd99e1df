#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hop/error.hpp"
#include "hop/rng.hpp"

namespace hop {

// Order-3 ordinal patterns in lexicographic order, indexed 1..6.
inline constexpr std::array<std::array<int, 3>, 6> kPatterns = {{
    {1, 2, 3}, {1, 3, 2}, {2, 1, 3}, {2, 3, 1}, {3, 1, 2}, {3, 2, 1},
}};

// Rank pattern of (x1, x2, x3): rank r_k < r_l iff x_k < x_l, ties broken by
// position (earlier entry ranks lower). Returns the 1-based index into
// kPatterns.
inline int encode_pattern(double x1, double x2, double x3) {
  if (!std::isfinite(x1) || !std::isfinite(x2) || !std::isfinite(x3))
    throw Error(errc::invalid_value, "encode_pattern: non-finite input");
  int r1 = 1, r2 = 1, r3 = 1;
  if (x2 < x1)
    ++r1;
  else
    ++r2;
  if (x3 < x1)
    ++r1;
  else
    ++r3;
  if (x3 < x2)
    ++r2;
  else
    ++r3;
  return 2 * (r1 - 1) + 1 + (r2 > r3 ? 1 : 0);
}

// Pattern frequencies of a series at one delay. n is the number of windows.
struct PatternCounts {
  std::array<std::int64_t, 6> counts{};
  std::int64_t n = 0;
  int delay = 1;
};

// Counts the patterns of all windows (x_t, x_{t+d}, x_{t+2d}); windows never
// wrap.
inline PatternCounts pattern_counts(std::span<const double> series, int delay) {
  if (delay < 1) throw Error(errc::invalid_value, "pattern_counts: delay must be >= 1");
  const std::int64_t len = static_cast<std::int64_t>(series.size());
  const std::int64_t required = 2ll * delay + 1;
  if (len < required)
    throw InsufficientDataError(
        required, "pattern_counts: series length " + std::to_string(len) +
                      " below required minimum " + std::to_string(required) +
                      " for delay " + std::to_string(delay));
  PatternCounts pc;
  pc.delay = delay;
  pc.n = len - 2ll * delay;
  for (std::int64_t t = 0; t < pc.n; ++t)
    ++pc.counts[encode_pattern(series[t], series[t + delay], series[t + 2ll * delay]) - 1];
  return pc;
}

// Adds i.i.d. uniform [0,1) noise. Breaks ties in integer-valued data without
// reordering values that differ by 1 or more; non-integer discrete data must
// be pre-scaled by the caller so distinct values differ by at least 1.
inline std::vector<double> dither(std::span<const double> series, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> out(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) out[i] = series[i] + u(rng);
  return out;
}

}  // namespace hop
