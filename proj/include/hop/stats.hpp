#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "hop/error.hpp"
#include "hop/ordinal.hpp"

namespace hop {

inline const double kLn6 = std::log(6.0);
inline const double kNullEntropy = std::log(6.0);
inline const double kNullExtropy = 5.0 * std::log(6.0 / 5.0);

// Coefficients of the four independent chi-square(1) terms in the
// quadratic-form null distribution of the scaled entropy-like statistics.
inline const std::array<double, 4> kQ3Weights = {
    (2.0 + std::sqrt(2.0)) / 12.0,
    2.0 / 15.0,
    1.0 / 10.0,
    (2.0 - std::sqrt(2.0)) / 12.0,
};

// Null variances of sqrt(n) * statistic for the four linear statistics.
inline constexpr double kVarBeta = 1.0 / 3.0;
inline constexpr double kVarTau = 8.0 / 45.0;
inline constexpr double kVarGamma = 2.0 / 5.0;
inline constexpr double kVarDelta = 2.0 / 3.0;

// Relative pattern frequencies; componentwise in [0,1], summing to 1.
struct FreqVector {
  std::array<double, 6> p{};
};

inline FreqVector freq_from_probs(const std::array<double, 6>& p) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0))
      throw Error(errc::domain_error, "frequency vector entry outside [0,1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw Error(errc::domain_error,
                "frequency vector sums to " + std::to_string(sum) + ", expected 1");
  return FreqVector{p};
}

inline FreqVector freq_from_counts(const PatternCounts& pc) {
  if (pc.n < 1) throw Error(errc::domain_error, "pattern counts have n < 1");
  std::array<double, 6> p{};
  std::int64_t sum = 0;
  for (int i = 0; i < 6; ++i) {
    p[i] = static_cast<double>(pc.counts[i]) / static_cast<double>(pc.n);
    sum += pc.counts[i];
  }
  if (sum != pc.n)
    throw Error(errc::domain_error, "pattern counts do not sum to n");
  return FreqVector{p};
}

// -sum p_i ln p_i, with 0 ln 0 := 0. Maximal (ln 6) at the uniform vector.
inline double entropy(const FreqVector& f) {
  double h = 0.0;
  for (double p : f.p)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

// -sum (1-p_i) ln(1-p_i); null value 5 ln(6/5).
inline double extropy(const FreqVector& f) {
  double h = 0.0;
  for (double p : f.p) {
    const double q = 1.0 - p;
    if (q > 0.0) h -= q * std::log(q);
  }
  return h;
}

// sum (p_i - 1/6)^2; zero exactly at the uniform vector.
inline double delta2(const FreqVector& f) {
  double s = 0.0;
  for (double p : f.p) {
    const double d = p - 1.0 / 6.0;
    s += d * d;
  }
  return s;
}

struct LinearStats {
  double beta;   // p1 - p6
  double tau;    // p1 + p6 - 1/3
  double gamma;  // p3 + p4 - p2 - p5
  double delta;  // p2 + p3 - p4 - p5
};

inline LinearStats linear_stats(const FreqVector& f) {
  const auto& p = f.p;
  return LinearStats{
      p[0] - p[5],
      p[0] + p[5] - 1.0 / 3.0,
      p[2] + p[3] - p[1] - p[4],
      p[1] + p[2] - p[3] - p[4],
  };
}

namespace detail {

// Imhof integrand for the weighted chi-square survival function.
inline double imhof_integrand(double u, double q) {
  double theta = -0.5 * q * u;
  double rho = 1.0;
  for (double w : kQ3Weights) {
    theta += 0.5 * std::atan(w * u);
    rho *= std::sqrt(std::sqrt(1.0 + w * w * u * u));
  }
  if (u == 0.0) {
    double sum = 0.0;
    for (double w : kQ3Weights) sum += w;
    return 0.5 * (sum - q);
  }
  return std::sin(theta) / (u * rho);
}

inline double adaptive_simpson(double (*f)(double, double), double q, double a,
                               double b, double fa, double fm, double fb, double whole,
                               double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm, q), frm = f(rm, q);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, q, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, q, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate_panel(double a, double b, double q, double tol) {
  const double fa = imhof_integrand(a, q);
  const double fb = imhof_integrand(b, q);
  const double fm = imhof_integrand(0.5 * (a + b), q);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(&imhof_integrand, q, a, b, fa, fm, fb, whole, tol, 24);
}

}  // namespace detail

// P(Q3 > q): survival function of the weighted chi-square form, computed by
// numerical inversion of its characteristic function (Imhof's oscillatory
// integral) with adaptive panel quadrature. Absolute accuracy ~1e-8.
inline double qf_survival(double q) {
  if (!std::isfinite(q)) throw Error(errc::invalid_value, "qf_survival: non-finite q");
  if (q <= 1e-5) return 1.0;  // P(Q3 <= 1e-5) < 1e-8
  double wsum = 0.0, wprod = 1.0, wmax = 0.0, inv_wsum = 0.0;
  for (double w : kQ3Weights) {
    wsum += w;
    wprod *= w;
    inv_wsum += 1.0 / w;
    wmax = std::max(wmax, w);
  }
  if (q >= 15.0) {
    // dominated by w_max * chi2(4); below 1e-10 here
    const double s = q / (2.0 * wmax);
    return std::exp(-s) * (1.0 + s);
  }

  const double pi = 3.14159265358979323846;
  const double tail_tol = 2e-9;
  // panel short enough that the phase moves by at most ~pi/2
  const double panel = pi / (wsum + q);

  double integral = 0.0;
  double u = 0.0;
  const double sqrt_wprod = std::sqrt(wprod);
  for (int i = 0; i < 1000000; ++i) {
    const double next = u + panel;
    integral += detail::integrate_panel(u, next, q, 1e-12 * panel);
    u = next;
    // absolute envelope tail
    const double tail_abs = 1.0 / (2.0 * pi * sqrt_wprod * u * u);
    // alternating-lobe tail, valid once the phase decreases monotonically
    double tail_alt = std::numeric_limits<double>::infinity();
    if (u * u * q > inv_wsum) {
      double rho = 1.0;
      for (double w : kQ3Weights) rho *= std::sqrt(std::sqrt(1.0 + w * w * u * u));
      tail_alt = 4.0 / (q * u * rho);
    }
    if (std::min(tail_abs, tail_alt) < tail_tol) break;
  }
  double p = 0.5 + integral / pi;
  if (p < 0.0) p = 0.0;
  if (p > 1.0) p = 1.0;
  return p;
}

// Upper quantile: the q with P(Q3 > q) = prob, by bisection.
inline double qf_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0))
    throw Error(errc::invalid_value, "qf_quantile: probability must be in (0,1)");
  double lo = 0.0, hi = 1.0;
  while (qf_survival(hi) > prob) hi *= 2.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (qf_survival(mid) > prob)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Standard normal survival function.
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// Standard normal upper quantile by bisection on normal_sf.
inline double normal_upper_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0))
    throw Error(errc::invalid_value, "normal_upper_quantile: probability in (0,1)");
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (normal_sf(mid) > prob)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

enum class Statistic { H, Hex, Delta2, Beta, Tau, Gamma, Delta };

inline constexpr std::array<Statistic, 7> kAllStatistics = {
    Statistic::H,    Statistic::Hex,   Statistic::Delta2, Statistic::Beta,
    Statistic::Tau,  Statistic::Gamma, Statistic::Delta,
};

inline const char* statistic_name(Statistic s) {
  switch (s) {
    case Statistic::H: return "H";
    case Statistic::Hex: return "Hex";
    case Statistic::Delta2: return "Delta2";
    case Statistic::Beta: return "beta";
    case Statistic::Tau: return "tau";
    case Statistic::Gamma: return "gamma";
    case Statistic::Delta: return "delta";
  }
  return "?";
}

struct TestResult {
  Statistic stat{};
  double raw = 0.0;     // the statistic itself
  double scaled = 0.0;  // the quantity with the stated null distribution
  double pvalue = 1.0;
  int delay = 1;
  enum class Null { quadratic_form, normal } null_dist = Null::normal;
  double null_var = 0.0;  // variance of scaled under the null (normal case)
};

// Runs the three entropy-like tests (right-tailed against the quadratic form)
// and the four linear tests (two-sided normal) on one set of pattern counts.
inline std::array<TestResult, 7> run_all_tests(const PatternCounts& pc) {
  if (pc.n < 1)
    throw InsufficientDataError(1, "run_all_tests: no pattern windows (n = 0)");
  const FreqVector f = freq_from_counts(pc);
  const double n = static_cast<double>(pc.n);
  const double sqrt_n = std::sqrt(n);

  std::array<TestResult, 7> out{};
  auto qf_test = [&](Statistic s, double raw, double scaled) {
    TestResult r;
    r.stat = s;
    r.raw = raw;
    r.scaled = scaled;
    r.pvalue = qf_survival(scaled);
    r.delay = pc.delay;
    r.null_dist = TestResult::Null::quadratic_form;
    return r;
  };
  auto normal_test = [&](Statistic s, double raw, double var) {
    TestResult r;
    r.stat = s;
    r.raw = raw;
    r.scaled = sqrt_n * raw;
    r.pvalue = std::min(1.0, 2.0 * normal_sf(std::abs(r.scaled) / std::sqrt(var)));
    r.delay = pc.delay;
    r.null_dist = TestResult::Null::normal;
    r.null_var = var;
    return r;
  };

  const double h = entropy(f);
  const double hex = extropy(f);
  const double d2 = delta2(f);
  const LinearStats lin = linear_stats(f);

  out[0] = qf_test(Statistic::H, h, -(n / 3.0) * (h - kNullEntropy));
  out[1] = qf_test(Statistic::Hex, hex, -(5.0 * n / 3.0) * (hex - kNullExtropy));
  out[2] = qf_test(Statistic::Delta2, d2, n * d2);
  out[3] = normal_test(Statistic::Beta, lin.beta, kVarBeta);
  out[4] = normal_test(Statistic::Tau, lin.tau, kVarTau);
  out[5] = normal_test(Statistic::Gamma, lin.gamma, kVarGamma);
  out[6] = normal_test(Statistic::Delta, lin.delta, kVarDelta);
  return out;
}

}  // namespace hop
