#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hop/error.hpp"
#include "hop/gilbert.hpp"
#include "hop/ordinal.hpp"
#include "hop/rng.hpp"
#include "hop/stats.hpp"

namespace hop {

enum class ValueKind { continuous, integer };

// A random-field sample on a regular grid; values in row-major order with the
// last axis fastest.
struct GridData {
  GridDims dims;
  std::vector<double> values;
  ValueKind kind = ValueKind::continuous;

  double at(const std::array<int, 3>& c) const {
    return values[static_cast<std::size_t>(linear_index(c, dims))];
  }

  void validate() const {
    dims.validate();
    if (static_cast<std::int64_t>(values.size()) != dims.cardinality())
      throw Error(errc::dimension_mismatch,
                  "grid holds " + std::to_string(values.size()) + " values, dims need " +
                      std::to_string(dims.cardinality()));
    for (double v : values)
      if (!std::isfinite(v))
        throw Error(errc::invalid_value, "grid contains a non-finite value");
  }
};

// Reads the grid values along the curve: output[t] = grid value at coords[t].
inline std::vector<double> hilbert_series(const GridData& grid, const CurvePath& path) {
  if (!(path.dims == grid.dims))
    throw Error(errc::dimension_mismatch, "curve path dims do not match grid dims");
  if (static_cast<std::int64_t>(path.coords.size()) != grid.dims.cardinality())
    throw Error(errc::dimension_mismatch, "curve path does not cover the grid");
  std::vector<double> out(path.coords.size());
  for (std::size_t t = 0; t < path.coords.size(); ++t)
    out[t] = grid.values[static_cast<std::size_t>(linear_index(path.coords[t], grid.dims))];
  return out;
}

struct DelayResult {
  int d = 1;
  bool ok = false;
  std::string error;                 // set when !ok
  FreqVector freq{};                 // valid when ok
  std::array<TestResult, 7> tests{};  // valid when ok
  std::int64_t n = 0;
};

struct HopReport {
  GridDims dims;
  std::string curve_tag = "gilbert";
  std::uint64_t seed = 0;
  ValueKind kind = ValueKind::continuous;
  std::vector<DelayResult> delays;

  bool all_ok() const {
    for (const auto& r : delays)
      if (!r.ok) return false;
    return true;
  }
};

// The Hilbert-curve ordinal-pattern test battery: serialize the grid along
// the curve, then run all seven order-3 tests at each delay. Integer grids
// are dithered once (seeded) before serialization, so all delays see the
// same dithered values. Delays that lack data produce an error entry while
// the others are still reported.
inline HopReport hop_test(const GridData& grid, std::span<const int> delays,
                          std::uint64_t seed) {
  grid.validate();
  if (delays.empty()) throw Error(errc::invalid_value, "hop_test: no delays given");

  HopReport report;
  report.dims = grid.dims;
  report.seed = seed;
  report.kind = grid.kind;

  const CurvePath path = gilbert_curve(grid.dims);
  std::vector<double> series;
  if (grid.kind == ValueKind::integer) {
    Rng stream = make_stream(seed, 0);
    GridData dithered = grid;
    dithered.values = dither(grid.values, stream);
    series = hilbert_series(dithered, path);
  } else {
    series = hilbert_series(grid, path);
  }

  for (int d : delays) {
    DelayResult r;
    r.d = d;
    try {
      auto pc = pattern_counts(series, d);
      r.freq = freq_from_counts(pc);
      r.tests = run_all_tests(pc);
      r.n = pc.n;
      r.ok = true;
    } catch (const Error& e) {
      r.error = e.what();
      r.ok = false;
    }
    report.delays.push_back(std::move(r));
  }
  return report;
}

namespace detail {

// Rank pattern of a 2x2 window read row-wise, packed as r1*1000 + r2*100 +
// r3*10 + r4. Ties break by position, like the series patterns.
inline int sop_pattern(double x1, double x2, double x3, double x4) {
  const std::array<double, 4> x = {x1, x2, x3, x4};
  std::array<int, 4> r = {1, 1, 1, 1};
  for (int k = 0; k < 4; ++k)
    for (int l = k + 1; l < 4; ++l) {
      if (x[l] < x[k])
        ++r[k];
      else
        ++r[l];
    }
  return ((r[0] * 10 + r[1]) * 10 + r[2]) * 10 + r[3];
}

// The eight type-3 patterns: ranks 1 and 2 share a diagonal of the window.
inline bool sop_is_type3(int packed) {
  static constexpr std::array<int, 8> kType3 = {
      1342, 1432, 2341, 2431, 3124, 3214, 4123, 4213,
  };
  return std::find(kType3.begin(), kType3.end(), packed) != kType3.end();
}

inline double sop_tau_raw(const GridData& grid) {
  const int e1 = grid.dims.ext[0];
  const int e2 = grid.dims.ext[1];
  std::int64_t hits = 0;
  for (int t1 = 1; t1 < e1; ++t1)
    for (int t2 = 1; t2 < e2; ++t2) {
      const int p = sop_pattern(grid.at({t1 - 1, t2 - 1, 0}), grid.at({t1 - 1, t2, 0}),
                                grid.at({t1, t2 - 1, 0}), grid.at({t1, t2, 0}));
      if (sop_is_type3(p)) ++hits;
    }
  const auto windows = static_cast<std::int64_t>(e1 - 1) * (e2 - 1);
  return static_cast<double>(hits) / static_cast<double>(windows) - 1.0 / 3.0;
}

}  // namespace detail

struct SopResult {
  double tau_tilde = 0.0;
  double pvalue = 1.0;
  std::int64_t n_squares = 0;
  int mc_reps = 0;
};

// Spatial ordinal-pattern competitor: relative frequency of type-3 patterns
// over all overlapping 2x2 windows, minus the null value 1/3. The null
// distribution is simulated from i.i.d. uniform grids of the same dims
// (the statistic is rank-based, so the null law is distribution-free); the
// p-value is a two-sided Monte Carlo rank.
inline SopResult sop_tau_tilde(const GridData& grid, int mc_reps, std::uint64_t seed) {
  grid.validate();
  if (grid.dims.k != 2)
    throw Error(errc::invalid_dimension, "sop_tau_tilde: grid must be 2D");
  if (grid.dims.ext[0] < 2 || grid.dims.ext[1] < 2)
    throw Error(errc::invalid_dimension, "sop_tau_tilde: both extents must be >= 2");
  if (mc_reps < 1) throw Error(errc::invalid_value, "sop_tau_tilde: mc_reps must be >= 1");

  SopResult res;
  res.tau_tilde = detail::sop_tau_raw(grid);
  res.n_squares =
      static_cast<std::int64_t>(grid.dims.ext[0] - 1) * (grid.dims.ext[1] - 1);
  res.mc_reps = mc_reps;

  GridData sim;
  sim.dims = grid.dims;
  sim.values.resize(grid.values.size());
  std::int64_t le = 0, ge = 0;
  for (int r = 0; r < mc_reps; ++r) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(r) + 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& v : sim.values) v = u(rng);
    const double t = detail::sop_tau_raw(sim);
    if (t <= res.tau_tilde) ++le;
    if (t >= res.tau_tilde) ++ge;
  }
  const double p_lo = static_cast<double>(1 + le) / static_cast<double>(mc_reps + 1);
  const double p_hi = static_cast<double>(1 + ge) / static_cast<double>(mc_reps + 1);
  res.pvalue = std::min(1.0, 2.0 * std::min(p_lo, p_hi));
  return res;
}

// Spatial autocorrelation at integer lag h: sums (X_t - mean)(X_{t-h} - mean)
// over all t with t-h inside the grid, normalized by the total sum of
// squares.
inline double sacf(const GridData& grid, std::span<const int> h) {
  grid.validate();
  if (static_cast<int>(h.size()) != grid.dims.k)
    throw Error(errc::dimension_mismatch, "sacf: lag dimension does not match grid");
  bool all_zero = true;
  for (int hi : h) {
    if (hi < 0) throw Error(errc::invalid_value, "sacf: lag components must be >= 0");
    if (hi != 0) all_zero = false;
  }
  if (all_zero) throw Error(errc::invalid_value, "sacf: lag must be nonzero");

  const double n = static_cast<double>(grid.values.size());
  double mean = 0.0;
  for (double v : grid.values) mean += v;
  mean /= n;

  double denom = 0.0;
  for (double v : grid.values) denom += (v - mean) * (v - mean);
  if (denom == 0.0)
    throw Error(errc::numeric_error, "sacf: constant grid has undefined variance");

  const auto& e = grid.dims.ext;
  std::array<int, 3> lag = {h[0], grid.dims.k > 1 ? h[1] : 0,
                            grid.dims.k > 2 ? h[2] : 0};
  double num = 0.0;
  std::array<int, 3> t{};
  for (t[0] = lag[0]; t[0] < e[0]; ++t[0])
    for (t[1] = lag[1]; t[1] < (grid.dims.k > 1 ? e[1] : 1); ++t[1])
      for (t[2] = lag[2]; t[2] < (grid.dims.k > 2 ? e[2] : 1); ++t[2]) {
        const std::array<int, 3> s = {t[0] - lag[0], t[1] - lag[1], t[2] - lag[2]};
        num += (grid.at(t) - mean) * (grid.at(s) - mean);
      }
  return num / denom;
}

struct SacfResult {
  double rho = 0.0;
  double pvalue = 1.0;
  std::vector<int> lag;
};

// The all-ones-lag autocorrelation test with two-sided normal p-value from
// N(0, 1/|T|).
inline SacfResult sacf_test(const GridData& grid) {
  std::vector<int> ones(grid.dims.k, 1);
  SacfResult r;
  r.lag = ones;
  r.rho = sacf(grid, ones);
  const double sd = 1.0 / std::sqrt(static_cast<double>(grid.dims.cardinality()));
  r.pvalue = std::min(1.0, 2.0 * normal_sf(std::abs(r.rho) / sd));
  return r;
}

}  // namespace hop
