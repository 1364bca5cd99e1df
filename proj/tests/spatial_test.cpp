#include "hop/spatial.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace hop;

namespace {

GridData make_grid(GridDims dims, std::vector<double> values,
                   ValueKind kind = ValueKind::continuous) {
  GridData g;
  g.dims = dims;
  g.values = std::move(values);
  g.kind = kind;
  g.validate();
  return g;
}

GridData random_normal_grid(GridDims dims, std::uint64_t seed, std::uint64_t index) {
  GridData g;
  g.dims = dims;
  g.values.resize(static_cast<std::size_t>(dims.cardinality()));
  Rng rng = make_stream(seed, index);
  std::normal_distribution<double> n(0.0, 1.0);
  for (auto& v : g.values) v = n(rng);
  return g;
}

}  // namespace

TEST(HilbertSeries, ConstantAndStripGrids) {
  auto grid = make_grid(GridDims::d2(4, 4), std::vector<double>(16, 2.5));
  auto path = gilbert2d(4, 4);
  auto s = hilbert_series(grid, path);
  for (double v : s) EXPECT_EQ(v, 2.5);

  auto strip = make_grid(GridDims::d2(1, 5), {10, 11, 12, 13, 14});
  auto sp = gilbert2d(1, 5);
  EXPECT_EQ(hilbert_series(strip, sp), (std::vector<double>{10, 11, 12, 13, 14}));
}

TEST(HilbertSeries, TwoByTwoFollowsPathOrderAndRoundTrips) {
  auto grid = make_grid(GridDims::d2(2, 2), {1, 2, 3, 4});
  auto path = gilbert2d(2, 2);
  // pinned path (0,0),(0,1),(1,1),(1,0) over row-major values
  EXPECT_EQ(hilbert_series(grid, path), (std::vector<double>{1, 2, 4, 3}));
  // cell -> linear index -> cell is the identity over the whole grid
  for (const auto& c : path.coords) {
    auto idx = linear_index(c, grid.dims);
    std::array<int, 3> back = {static_cast<int>(idx / 2), static_cast<int>(idx % 2), 0};
    EXPECT_EQ(back, c);
  }
}

TEST(HilbertSeries, DimensionMismatchThrows) {
  auto grid = make_grid(GridDims::d2(3, 3), std::vector<double>(9, 0.0));
  auto path = gilbert2d(4, 4);
  EXPECT_THROW(hilbert_series(grid, path), Error);
}

TEST(HopTest, DeterministicGivenSeed) {
  auto grid = random_normal_grid(GridDims::d2(9, 9), 5, 0);
  grid.kind = ValueKind::integer;
  for (auto& v : grid.values) v = std::round(3 * v);
  std::array<int, 2> delays = {1, 2};
  auto r1 = hop_test(grid, delays, 42);
  auto r2 = hop_test(grid, delays, 42);
  ASSERT_EQ(r1.delays.size(), 2u);
  for (std::size_t i = 0; i < r1.delays.size(); ++i) {
    ASSERT_TRUE(r1.delays[i].ok);
    for (int j = 0; j < 6; ++j)
      EXPECT_EQ(r1.delays[i].freq.p[j], r2.delays[i].freq.p[j]);
    for (int j = 0; j < 7; ++j)
      EXPECT_EQ(r1.delays[i].tests[j].pvalue, r2.delays[i].tests[j].pvalue);
  }
}

TEST(HopTest, PerDelayErrorsKeepOtherDelays) {
  auto grid = random_normal_grid(GridDims::d2(3, 3), 6, 0);  // |T| = 9
  std::array<int, 3> delays = {1, 4, 2};                     // d=4 needs length 9 >= 9 ok
  auto r = hop_test(grid, delays, 1);
  EXPECT_TRUE(r.delays[0].ok);
  EXPECT_TRUE(r.delays[1].ok);  // 9 = 2*4+1 exactly, n = 1
  EXPECT_EQ(r.delays[1].n, 1);

  std::array<int, 2> delays2 = {1, 5};  // d=5 needs 11 > 9
  auto r2 = hop_test(grid, delays2, 1);
  EXPECT_TRUE(r2.delays[0].ok);
  EXPECT_FALSE(r2.delays[1].ok);
  EXPECT_FALSE(r2.delays[1].error.empty());
  EXPECT_FALSE(r2.all_ok());
}

TEST(HopTest, DelaysAreIndependent) {
  auto grid = random_normal_grid(GridDims::d3(8, 8, 8), 7, 3);
  std::array<int, 4> all = {1, 2, 3, 4};
  auto joint = hop_test(grid, all, 9);
  for (int d = 1; d <= 4; ++d) {
    std::array<int, 1> one = {d};
    auto single = hop_test(grid, one, 9);
    for (int j = 0; j < 7; ++j)
      EXPECT_EQ(joint.delays[d - 1].tests[j].raw, single.delays[0].tests[j].raw);
  }
}

TEST(HopTest, MonotoneTransformInvariance) {
  auto grid = random_normal_grid(GridDims::d2(12, 9), 8, 1);
  std::array<int, 3> delays = {1, 2, 3};
  auto base = hop_test(grid, delays, 0);

  GridData mapped = grid;
  for (auto& v : mapped.values) v = std::exp(v);
  auto r_exp = hop_test(mapped, delays, 0);
  for (auto& v : mapped.values) v = std::atan(v) + 2.0 * v;  // still increasing
  auto r_atan = hop_test(mapped, delays, 0);

  for (std::size_t i = 0; i < base.delays.size(); ++i)
    for (int j = 0; j < 7; ++j) {
      EXPECT_EQ(base.delays[i].tests[j].raw, r_exp.delays[i].tests[j].raw);
      EXPECT_EQ(base.delays[i].tests[j].raw, r_atan.delays[i].tests[j].raw);
    }
}

TEST(HopTest, ConstantIntegerGridCompletes) {
  auto grid = make_grid(GridDims::d2(8, 8), std::vector<double>(64, 3.0),
                        ValueKind::integer);
  std::array<int, 1> delays = {1};
  // dithered constants are i.i.d. uniforms; p-values should move around with
  // the seed instead of collapsing to one end
  int below_half = 0;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    auto r = hop_test(grid, delays, seed);
    ASSERT_TRUE(r.delays[0].ok);
    double p = r.delays[0].tests[4].pvalue;
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
    if (p < 0.5) ++below_half;
  }
  EXPECT_GT(below_half, 0);
  EXPECT_LT(below_half, 12);
}

TEST(HopTest, NullRejectionRateSmoke) {
  // light version of the size calibration: tau at 5% on i.i.d. grids
  const int reps = 1500;
  const double crit = normal_upper_quantile(0.025) * std::sqrt(kVarTau);
  int rejects = 0;
  std::array<int, 1> delays = {1};
  for (int r = 0; r < reps; ++r) {
    auto grid = random_normal_grid(GridDims::d2(11, 11), 99, r);
    auto rep = hop_test(grid, delays, 0);
    if (std::abs(rep.delays[0].tests[4].scaled) > crit) ++rejects;
  }
  const double rate = static_cast<double>(rejects) / reps;
  EXPECT_GT(rate, 0.03);
  EXPECT_LT(rate, 0.075);
}

TEST(HopTest, BarleyShapedWorkflow) {
  // a 28x7 grid serializes to 196 values; window counts follow n = 196 - 2d
  auto grid = random_normal_grid(GridDims::d2(28, 7), 12, 0);
  std::array<int, 3> delays = {1, 2, 3};
  auto r = hop_test(grid, delays, 0);
  ASSERT_TRUE(r.all_ok());
  EXPECT_EQ(r.delays[0].n, 194);
  EXPECT_EQ(r.delays[1].n, 192);
  EXPECT_EQ(r.delays[2].n, 190);
}

TEST(SopTauTilde, SingleWindowExamples) {
  auto in_s3 = make_grid(GridDims::d2(2, 2), {1, 3, 4, 2});
  auto r1 = sop_tau_tilde(in_s3, 50, 7);
  EXPECT_NEAR(r1.tau_tilde, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(r1.n_squares, 1);

  auto identity = make_grid(GridDims::d2(2, 2), {1, 2, 3, 4});
  auto r2 = sop_tau_tilde(identity, 50, 7);
  EXPECT_NEAR(r2.tau_tilde, -1.0 / 3.0, 1e-15);
}

TEST(SopTauTilde, AllEightType3PatternsCount) {
  const std::array<std::array<double, 4>, 8> members = {{
      {1, 3, 4, 2}, {1, 4, 3, 2}, {2, 3, 4, 1}, {2, 4, 3, 1},
      {3, 1, 2, 4}, {3, 2, 1, 4}, {4, 1, 2, 3}, {4, 2, 1, 3},
  }};
  for (const auto& m : members) {
    auto g = make_grid(GridDims::d2(2, 2), {m[0], m[1], m[2], m[3]});
    EXPECT_NEAR(sop_tau_tilde(g, 1, 0).tau_tilde, 2.0 / 3.0, 1e-15);
  }
  // remaining 16 patterns of S4 are not type 3; spot-check a few
  for (const auto& m : {std::array<double, 4>{1, 2, 4, 3}, {2, 1, 3, 4}, {4, 3, 2, 1}}) {
    auto g = make_grid(GridDims::d2(2, 2), {m[0], m[1], m[2], m[3]});
    EXPECT_NEAR(sop_tau_tilde(g, 1, 0).tau_tilde, -1.0 / 3.0, 1e-15);
  }
}

TEST(SopTauTilde, NullMeanIsZero) {
  const int reps = 4000;
  double sum = 0.0;
  for (int r = 0; r < reps; ++r) {
    GridData g;
    g.dims = GridDims::d2(9, 9);
    g.values.resize(81);
    Rng rng = make_stream(1234, r);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& v : g.values) v = u(rng);
    sum += detail::sop_tau_raw(g);
  }
  // null probability of the type-3 set is 1/3, so tau_tilde centers at 0;
  // sd of the mean is well under 0.002 here
  EXPECT_NEAR(sum / reps, 0.0, 0.005);
}

TEST(SopTauTilde, RejectsBadInputs) {
  auto g3 = random_normal_grid(GridDims::d3(4, 4, 4), 3, 0);
  EXPECT_THROW(sop_tau_tilde(g3, 100, 0), Error);
  auto thin = make_grid(GridDims::d2(1, 5), {1, 2, 3, 4, 5});
  EXPECT_THROW(sop_tau_tilde(thin, 100, 0), Error);
}

TEST(SopTauTilde, DependentGridGetsSmallPValue) {
  GridData g;
  g.dims = GridDims::d2(12, 12);
  g.values.resize(144);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) g.values[12 * i + j] = i + j + 0.001 * ((i * 7 + j * 3) % 5);
  auto r = sop_tau_tilde(g, 400, 11);
  EXPECT_LT(r.pvalue, 0.02);
}

TEST(Sacf, HandComputedExample) {
  auto g = make_grid(GridDims::d2(2, 2), {0, 1, 1, 2});
  std::array<int, 2> h = {1, 1};
  EXPECT_NEAR(sacf(g, h), -0.5, 1e-15);
}

TEST(Sacf, ShiftAndScaleInvariance) {
  auto g = random_normal_grid(GridDims::d2(10, 8), 21, 0);
  std::array<int, 2> h = {1, 0};
  const double base = sacf(g, h);
  GridData shifted = g;
  for (auto& v : shifted.values) v += 17.5;
  EXPECT_NEAR(sacf(shifted, h), base, 1e-9);
  GridData scaled = g;
  for (auto& v : scaled.values) v *= 3.25;
  EXPECT_NEAR(sacf(scaled, h), base, 1e-12);
}

TEST(Sacf, IidGridsHaveSmallLagOneCorrelation) {
  const int reps = 300;
  double sum = 0.0, sumsq = 0.0;
  for (int r = 0; r < reps; ++r) {
    auto g = random_normal_grid(GridDims::d2(21, 21), 31, r);
    auto res = sacf_test(g);
    sum += res.rho;
    sumsq += res.rho * res.rho;
  }
  const double mean = sum / reps;
  const double sd = std::sqrt(sumsq / reps - mean * mean);
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(sd, 1.0 / 21.0, 0.012);  // variance ~ 1/|T|
}

TEST(Sacf, ErrorsOnBadInput) {
  auto constant = make_grid(GridDims::d2(3, 3), std::vector<double>(9, 1.0));
  std::array<int, 2> h = {1, 1};
  EXPECT_THROW(sacf(constant, h), Error);

  auto g = random_normal_grid(GridDims::d2(4, 4), 1, 0);
  std::array<int, 2> zero = {0, 0};
  EXPECT_THROW(sacf(g, zero), Error);
  std::array<int, 2> neg = {-1, 0};
  EXPECT_THROW(sacf(g, neg), Error);
  std::array<int, 3> wrongk = {1, 1, 1};
  EXPECT_THROW(sacf(g, wrongk), Error);
}

TEST(SacfTest, PValueArithmetic) {
  // |T| = 441 and rho = 2/sqrt(441) sits exactly at two sigma
  auto g = random_normal_grid(GridDims::d2(21, 21), 77, 5);
  auto res = sacf_test(g);
  EXPECT_EQ(res.lag, (std::vector<int>{1, 1}));
  const double z = std::abs(res.rho) * 21.0;
  EXPECT_NEAR(res.pvalue, 2.0 * normal_sf(z), 1e-12);

  GridData g3 = random_normal_grid(GridDims::d3(6, 6, 6), 78, 2);
  auto res3 = sacf_test(g3);
  EXPECT_EQ(res3.lag, (std::vector<int>{1, 1, 1}));
}
