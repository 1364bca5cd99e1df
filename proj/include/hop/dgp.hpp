#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hop/error.hpp"
#include "hop/rng.hpp"
#include "hop/spatial.hpp"

namespace hop {

// ---------------------------------------------------------------------------
// Unilateral SAR(1,1): X[t1,t2] = a1 X[t1-1,t2] + a2 X[t1,t2-1]
//                                + a3 X[t1-1,t2-1] + eps, zero-initialized on
// a burn-in margin along the leading sides, then cropped.
inline GridData sar11(const GridDims& dims, const std::array<double, 3>& alphas,
                      int burn, Rng& rng) {
  if (dims.k != 2) throw Error(errc::invalid_dimension, "sar11: dims must be 2D");
  dims.validate();
  if (burn < 0) throw Error(errc::parameter_error, "sar11: burn must be >= 0");
  if (std::abs(alphas[0]) + std::abs(alphas[1]) + std::abs(alphas[2]) >= 1.0)
    throw Error(errc::parameter_error, "sar11: |a1|+|a2|+|a3| must be < 1");

  const int E1 = dims.ext[0] + burn;
  const int E2 = dims.ext[1] + burn;
  std::vector<double> x(static_cast<std::size_t>(E1) * E2, 0.0);
  std::normal_distribution<double> g(0.0, 1.0);
  auto get = [&](int i, int j) -> double {
    return (i < 0 || j < 0) ? 0.0 : x[static_cast<std::size_t>(i) * E2 + j];
  };
  for (int i = 0; i < E1; ++i)
    for (int j = 0; j < E2; ++j)
      x[static_cast<std::size_t>(i) * E2 + j] = alphas[0] * get(i - 1, j) +
                                                alphas[1] * get(i, j - 1) +
                                                alphas[2] * get(i - 1, j - 1) + g(rng);

  GridData out;
  out.dims = dims;
  out.values.resize(static_cast<std::size_t>(dims.cardinality()));
  for (int t1 = 0; t1 < dims.ext[0]; ++t1)
    for (int t2 = 0; t2 < dims.ext[1]; ++t2)
      out.values[static_cast<std::size_t>(t1) * dims.ext[1] + t2] =
          x[static_cast<std::size_t>(t1 + burn) * E2 + (t2 + burn)];
  return out;
}

namespace detail {

// I - A for the simultaneous SAR(1) on the margin-enlarged grid with zero
// Dirichlet boundary; row-major cell order.
inline Eigen::SparseMatrix<double> sar1_system(int E1, int E2,
                                               const std::array<double, 4>& a) {
  const int n = E1 * E2;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 5);
  auto id = [E2](int i, int j) { return i * E2 + j; };
  for (int i = 0; i < E1; ++i)
    for (int j = 0; j < E2; ++j) {
      const int r = id(i, j);
      trip.emplace_back(r, r, 1.0);
      if (i > 0) trip.emplace_back(r, id(i - 1, j), -a[0]);
      if (j > 0) trip.emplace_back(r, id(i, j - 1), -a[1]);
      if (j + 1 < E2) trip.emplace_back(r, id(i, j + 1), -a[2]);
      if (i + 1 < E1) trip.emplace_back(r, id(i + 1, j), -a[3]);
    }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

inline GridData crop_center(const Eigen::VectorXd& x, const GridDims& dims, int margin,
                            int E2) {
  GridData out;
  out.dims = dims;
  out.values.resize(static_cast<std::size_t>(dims.cardinality()));
  for (int t1 = 0; t1 < dims.ext[0]; ++t1)
    for (int t2 = 0; t2 < dims.ext[1]; ++t2)
      out.values[static_cast<std::size_t>(t1) * dims.ext[1] + t2] =
          x[(t1 + margin) * E2 + (t2 + margin)];
  return out;
}

}  // namespace detail

// Simultaneous (multilateral) SAR(1): solves (I - A) X = eps on a
// margin-enlarged grid with zero outside values, then crops the center.
// A couples each cell to its four axial neighbors:
// a1 (t1-1,t2), a2 (t1,t2-1), a3 (t1,t2+1), a4 (t1+1,t2).
inline GridData sar1_sim(const GridDims& dims, const std::array<double, 4>& a,
                         int margin, Rng& rng) {
  if (dims.k != 2) throw Error(errc::invalid_dimension, "sar1_sim: dims must be 2D");
  dims.validate();
  if (margin < 0) throw Error(errc::parameter_error, "sar1_sim: margin must be >= 0");
  if (std::abs(a[0]) + std::abs(a[1]) + std::abs(a[2]) + std::abs(a[3]) >= 1.0)
    throw Error(errc::parameter_error, "sar1_sim: sum |a_i| must be < 1");

  const int E1 = dims.ext[0] + 2 * margin;
  const int E2 = dims.ext[1] + 2 * margin;
  Eigen::SparseMatrix<double> system = detail::sar1_system(E1, E2, a);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(system);
  if (lu.info() != Eigen::Success)
    throw Error(errc::parameter_error, "sar1_sim: singular system");

  Eigen::VectorXd eps(E1 * E2);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < eps.size(); ++i) eps[i] = g(rng);
  Eigen::VectorXd x = lu.solve(eps);
  return detail::crop_center(x, dims, margin, E2);
}

namespace detail {

template <std::size_t Terms>
struct QmaSpec {
  std::array<std::array<int, 3>, Terms> offsets;
  std::array<int, 3> pad_lo;  // innovation padding below zero per axis
  std::array<int, 3> pad_hi;  // and above the last cell
};

// Quadratic moving average: X_t = sum_i beta_i * eps_{t+off_i}^{q_i} + eps_t
// with the innovation field padded so every output cell sees defined terms.
template <std::size_t Terms>
GridData qma(const GridDims& dims, const QmaSpec<Terms>& spec,
             const std::array<double, Terms>& beta, const std::array<int, Terms>& q,
             Rng& rng) {
  dims.validate();
  for (int e : q)
    if (e < 1) throw Error(errc::parameter_error, "qma: exponents must be >= 1");

  std::array<int, 3> E{};
  for (int ax = 0; ax < 3; ++ax)
    E[ax] = (ax < dims.k ? dims.ext[ax] : 1) + spec.pad_lo[ax] + spec.pad_hi[ax];
  std::vector<double> eps(static_cast<std::size_t>(E[0]) * E[1] * E[2]);
  std::normal_distribution<double> g(0.0, 1.0);
  for (auto& v : eps) v = g(rng);
  auto at = [&](int i, int j, int l) -> double {
    return eps[(static_cast<std::size_t>(i + spec.pad_lo[0]) * E[1] +
                (j + spec.pad_lo[1])) *
                   E[2] +
               (l + spec.pad_lo[2])];
  };
  auto powi = [](double v, int e) {
    double r = v;
    for (int i = 1; i < e; ++i) r *= v;
    return r;
  };

  GridData out;
  out.dims = dims;
  out.values.resize(static_cast<std::size_t>(dims.cardinality()));
  std::size_t idx = 0;
  const int n1 = dims.ext[0];
  const int n2 = dims.k > 1 ? dims.ext[1] : 1;
  const int n3 = dims.k > 2 ? dims.ext[2] : 1;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      for (int l = 0; l < n3; ++l) {
        double v = at(i, j, l);
        for (std::size_t t = 0; t < Terms; ++t)
          v += beta[t] * powi(at(i + spec.offsets[t][0], j + spec.offsets[t][1],
                                 l + spec.offsets[t][2]),
                              q[t]);
        out.values[idx++] = v;
      }
  return out;
}

}  // namespace detail

// Unilateral spatial quadratic MA(1,1):
// X = b1 eps[t1-1,t2]^q1 + b2 eps[t1,t2-1]^q2 + b3 eps[t1-1,t2-1]^q3 + eps.
inline GridData sqma11(const GridDims& dims, const std::array<double, 3>& beta,
                       const std::array<int, 3>& q, Rng& rng) {
  if (dims.k != 2) throw Error(errc::invalid_dimension, "sqma11: dims must be 2D");
  detail::QmaSpec<3> spec;
  spec.offsets = {{{-1, 0, 0}, {0, -1, 0}, {-1, -1, 0}}};
  spec.pad_lo = {1, 1, 0};
  spec.pad_hi = {0, 0, 0};
  return detail::qma(dims, spec, beta, q, rng);
}

// Multilateral (simultaneous) quadratic MA(1) with diagonal neighbors:
// b1 eps[t1-1,t2-1]^q1 + b2 eps[t1+1,t2-1]^q2 + b3 eps[t1+1,t2+1]^q3
// + b4 eps[t1-1,t2+1]^q4 + eps.
inline GridData sqma1_sim(const GridDims& dims, const std::array<double, 4>& b,
                          const std::array<int, 4>& q, Rng& rng) {
  if (dims.k != 2) throw Error(errc::invalid_dimension, "sqma1_sim: dims must be 2D");
  detail::QmaSpec<4> spec;
  spec.offsets = {{{-1, -1, 0}, {1, -1, 0}, {1, 1, 0}, {-1, 1, 0}}};
  spec.pad_lo = {1, 1, 0};
  spec.pad_hi = {1, 1, 0};
  return detail::qma(dims, spec, b, q, rng);
}

// Unilateral 3D quadratic MA(1,1,1) with the seven lower-lag neighbors.
inline GridData sqma111(const GridDims& dims, const std::array<double, 7>& beta,
                        const std::array<int, 7>& q, Rng& rng) {
  if (dims.k != 3) throw Error(errc::invalid_dimension, "sqma111: dims must be 3D");
  detail::QmaSpec<7> spec;
  spec.offsets = {{{-1, 0, 0},
                   {0, -1, 0},
                   {0, 0, -1},
                   {-1, -1, 0},
                   {-1, 0, -1},
                   {0, -1, -1},
                   {-1, -1, -1}}};
  spec.pad_lo = {1, 1, 1};
  spec.pad_hi = {0, 0, 0};
  return detail::qma(dims, spec, beta, q, rng);
}

// Multilateral 3D quadratic MA(1) with the eight corner neighbors.
inline GridData sqma1_3d(const GridDims& dims, const std::array<double, 8>& b,
                         const std::array<int, 8>& q, Rng& rng) {
  if (dims.k != 3) throw Error(errc::invalid_dimension, "sqma1_3d: dims must be 3D");
  detail::QmaSpec<8> spec;
  spec.offsets = {{{-1, -1, -1},
                   {1, -1, -1},
                   {-1, 1, -1},
                   {-1, -1, 1},
                   {1, 1, -1},
                   {1, -1, 1},
                   {-1, 1, 1},
                   {1, 1, 1}}};
  spec.pad_lo = {1, 1, 1};
  spec.pad_hi = {1, 1, 1};
  return detail::qma(dims, spec, b, q, rng);
}

// Exponential covariance kernel with per-axis rescaled Euclidean distance.
struct KernelSpec {
  double lambda = 0.05;
  std::array<double, 3> rescale = {15.0, 15.0, 7.0};
};

inline Eigen::MatrixXd grf_covariance(const GridDims& dims, const KernelSpec& kernel) {
  if (dims.k != 3) throw Error(errc::invalid_dimension, "grf3d: dims must be 3D");
  dims.validate();
  if (kernel.lambda <= 0.0)
    throw Error(errc::parameter_error, "grf3d: lambda must be positive");
  for (double r : kernel.rescale)
    if (r <= 0.0) throw Error(errc::parameter_error, "grf3d: rescale divisors positive");

  const auto n = static_cast<int>(dims.cardinality());
  std::vector<std::array<int, 3>> cells;
  cells.reserve(n);
  for (int i = 0; i < dims.ext[0]; ++i)
    for (int j = 0; j < dims.ext[1]; ++j)
      for (int l = 0; l < dims.ext[2]; ++l) cells.push_back({i, j, l});

  Eigen::MatrixXd cov(n, n);
  for (int r = 0; r < n; ++r) {
    cov(r, r) = 1.0;
    for (int c = r + 1; c < n; ++c) {
      double d2 = 0.0;
      for (int ax = 0; ax < 3; ++ax) {
        const double diff = (cells[r][ax] - cells[c][ax]) / kernel.rescale[ax];
        d2 += diff * diff;
      }
      const double v = std::exp(-std::sqrt(d2) / kernel.lambda);
      cov(r, c) = v;
      cov(c, r) = v;
    }
  }
  return cov;
}

// Lower Cholesky factor of the kernel covariance, with a small diagonal
// jitter retry if the factorization fails numerically.
inline Eigen::MatrixXd grf_cholesky(const GridDims& dims, const KernelSpec& kernel,
                                    std::size_t cap = 4096) {
  if (static_cast<std::size_t>(dims.cardinality()) > cap)
    throw Error(errc::size_error,
                "grf3d: |T| = " + std::to_string(dims.cardinality()) +
                    " exceeds the dense-factorization cap " + std::to_string(cap));
  Eigen::MatrixXd cov = grf_covariance(dims, kernel);
  double jitter = 0.0;
  for (int attempt = 0; attempt < 4; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    jitter = jitter == 0.0 ? 1e-10 : jitter * 100.0;
    cov.diagonal().array() += jitter;
  }
  throw Error(errc::numeric_error, "grf3d: covariance not positive definite");
}

// Zero-mean Gaussian random field sample L * z.
inline GridData grf3d(const GridDims& dims, const KernelSpec& kernel, Rng& rng,
                      std::size_t cap = 4096) {
  const Eigen::MatrixXd chol = grf_cholesky(dims, kernel, cap);
  Eigen::VectorXd z(chol.rows());
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < z.size(); ++i) z[i] = g(rng);
  Eigen::VectorXd x = chol * z;
  GridData out;
  out.dims = dims;
  out.values.assign(x.data(), x.data() + x.size());
  return out;
}

// Additive-outlier contamination: round(fraction * |T|) distinct cells,
// chosen uniformly without replacement, are increased by magnitude.
inline GridData contaminate_ao(GridData grid, double fraction, double magnitude,
                               Rng& rng) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw Error(errc::parameter_error, "contaminate_ao: fraction must be in (0,1)");
  const auto total = static_cast<std::int64_t>(grid.values.size());
  const auto count = static_cast<std::int64_t>(
      std::floor(fraction * static_cast<double>(total) + 0.5));
  if (count == 0) return grid;

  std::vector<std::int64_t> idx(static_cast<std::size_t>(total));
  for (std::int64_t i = 0; i < total; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (std::int64_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::int64_t> pick(i, total - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
    grid.values[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] += magnitude;
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Declarative simulation scenarios.

enum class DgpFamily { sar11, sar1_sim, sqma11, sqma1_sim, sqma111, sqma1_3d, grf3d };

inline const char* dgp_family_name(DgpFamily f) {
  switch (f) {
    case DgpFamily::sar11: return "sar11";
    case DgpFamily::sar1_sim: return "sar1_sim";
    case DgpFamily::sqma11: return "sqma11";
    case DgpFamily::sqma1_sim: return "sqma1_sim";
    case DgpFamily::sqma111: return "sqma111";
    case DgpFamily::sqma1_3d: return "sqma1_3d";
    case DgpFamily::grf3d: return "grf3d";
  }
  return "?";
}

inline DgpFamily dgp_family_from_name(const std::string& name) {
  for (DgpFamily f : {DgpFamily::sar11, DgpFamily::sar1_sim, DgpFamily::sqma11,
                      DgpFamily::sqma1_sim, DgpFamily::sqma111, DgpFamily::sqma1_3d,
                      DgpFamily::grf3d})
    if (name == dgp_family_name(f)) return f;
  throw Error(errc::parameter_error, "unknown DGP family: " + name);
}

struct Contamination {
  double fraction = 0.1;
  double magnitude = 10.0;
};

struct DgpSpec {
  DgpFamily family = DgpFamily::sar11;
  GridDims dims;
  std::vector<double> coeffs;  // family-specific arity
  std::vector<int> exponents;  // qma families only
  double lambda = 0.05;        // grf3d only
  int burn = 50;               // sar11 only
  int margin = 10;             // sar1_sim only
  std::size_t grf_cap = 4096;
  std::optional<Contamination> contamination;

  void validate() const {
    dims.validate();
    auto need = [&](std::size_t n_coeff, std::size_t n_exp, int k) {
      if (dims.k != k)
        throw Error(errc::parameter_error, std::string(dgp_family_name(family)) +
                                               ": dims must be " + std::to_string(k) +
                                               "D");
      if (coeffs.size() != n_coeff)
        throw Error(errc::parameter_error, std::string(dgp_family_name(family)) +
                                               ": expected " + std::to_string(n_coeff) +
                                               " coefficients, got " +
                                               std::to_string(coeffs.size()));
      if (exponents.size() != n_exp)
        throw Error(errc::parameter_error, std::string(dgp_family_name(family)) +
                                               ": expected " + std::to_string(n_exp) +
                                               " exponents, got " +
                                               std::to_string(exponents.size()));
    };
    switch (family) {
      case DgpFamily::sar11: need(3, 0, 2); break;
      case DgpFamily::sar1_sim: need(4, 0, 2); break;
      case DgpFamily::sqma11: need(3, 3, 2); break;
      case DgpFamily::sqma1_sim: need(4, 4, 2); break;
      case DgpFamily::sqma111: need(7, 7, 3); break;
      case DgpFamily::sqma1_3d: need(8, 8, 3); break;
      case DgpFamily::grf3d:
        need(0, 0, 3);
        if (lambda <= 0.0) throw Error(errc::parameter_error, "grf3d: lambda > 0");
        break;
    }
    if (contamination) {
      if (!(contamination->fraction > 0.0 && contamination->fraction < 1.0))
        throw Error(errc::parameter_error, "contamination fraction must be in (0,1)");
    }
  }
};

// Draws samples for one scenario, reusing the expensive pieces (sparse
// factorization, Cholesky factor) across draws. Not thread-safe: build one
// sampler per worker.
class DgpSampler {
 public:
  explicit DgpSampler(const DgpSpec& spec) : spec_(spec) {
    spec_.validate();
    if (spec_.family == DgpFamily::sar1_sim) {
      const int E1 = spec_.dims.ext[0] + 2 * spec_.margin;
      const int E2 = spec_.dims.ext[1] + 2 * spec_.margin;
      system_ = detail::sar1_system(
          E1, E2, {spec_.coeffs[0], spec_.coeffs[1], spec_.coeffs[2], spec_.coeffs[3]});
      double s = 0.0;
      for (double c : spec_.coeffs) s += std::abs(c);
      if (s >= 1.0) throw Error(errc::parameter_error, "sar1_sim: sum |a_i| < 1");
      lu_.compute(system_);
      if (lu_.info() != Eigen::Success)
        throw Error(errc::parameter_error, "sar1_sim: singular system");
    } else if (spec_.family == DgpFamily::grf3d) {
      KernelSpec kernel;
      kernel.lambda = spec_.lambda;
      chol_ = grf_cholesky(spec_.dims, kernel, spec_.grf_cap);
    }
  }

  const DgpSpec& spec() const { return spec_; }

  GridData draw(Rng& rng) {
    GridData g = draw_clean(rng);
    if (spec_.contamination)
      g = contaminate_ao(std::move(g), spec_.contamination->fraction,
                         spec_.contamination->magnitude, rng);
    return g;
  }

  GridData draw_clean(Rng& rng) {
    const auto& c = spec_.coeffs;
    const auto& q = spec_.exponents;
    switch (spec_.family) {
      case DgpFamily::sar11:
        return sar11(spec_.dims, {c[0], c[1], c[2]}, spec_.burn, rng);
      case DgpFamily::sar1_sim: {
        const int E1 = spec_.dims.ext[0] + 2 * spec_.margin;
        const int E2 = spec_.dims.ext[1] + 2 * spec_.margin;
        Eigen::VectorXd eps(E1 * E2);
        std::normal_distribution<double> g(0.0, 1.0);
        for (int i = 0; i < eps.size(); ++i) eps[i] = g(rng);
        Eigen::VectorXd x = lu_.solve(eps);
        return detail::crop_center(x, spec_.dims, spec_.margin, E2);
      }
      case DgpFamily::sqma11:
        return sqma11(spec_.dims, {c[0], c[1], c[2]}, {q[0], q[1], q[2]}, rng);
      case DgpFamily::sqma1_sim:
        return sqma1_sim(spec_.dims, {c[0], c[1], c[2], c[3]}, {q[0], q[1], q[2], q[3]},
                         rng);
      case DgpFamily::sqma111:
        return sqma111(spec_.dims, {c[0], c[1], c[2], c[3], c[4], c[5], c[6]},
                       {q[0], q[1], q[2], q[3], q[4], q[5], q[6]}, rng);
      case DgpFamily::sqma1_3d:
        return sqma1_3d(spec_.dims, {c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7]},
                        {q[0], q[1], q[2], q[3], q[4], q[5], q[6], q[7]}, rng);
      case DgpFamily::grf3d: {
        Eigen::VectorXd z(chol_.rows());
        std::normal_distribution<double> g(0.0, 1.0);
        for (int i = 0; i < z.size(); ++i) z[i] = g(rng);
        Eigen::VectorXd x = chol_ * z;
        GridData out;
        out.dims = spec_.dims;
        out.values.assign(x.data(), x.data() + x.size());
        return out;
      }
    }
    throw Error(errc::parameter_error, "unknown DGP family");
  }

 private:
  DgpSpec spec_;
  Eigen::SparseMatrix<double> system_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  Eigen::MatrixXd chol_;
};

}  // namespace hop
