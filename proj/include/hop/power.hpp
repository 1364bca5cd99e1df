#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "hop/dgp.hpp"
#include "hop/error.hpp"
#include "hop/rng.hpp"
#include "hop/spatial.hpp"
#include "hop/stats.hpp"

namespace hop {

enum class TestId { H, Hex, Delta2, Beta, Tau, Gamma, Delta, SopTau, Sacf };

inline const char* test_id_name(TestId t) {
  switch (t) {
    case TestId::H: return "H";
    case TestId::Hex: return "Hex";
    case TestId::Delta2: return "Delta2";
    case TestId::Beta: return "beta";
    case TestId::Tau: return "tau";
    case TestId::Gamma: return "gamma";
    case TestId::Delta: return "delta";
    case TestId::SopTau: return "sop_tau";
    case TestId::Sacf: return "sacf";
  }
  return "?";
}

inline TestId test_id_from_name(const std::string& name) {
  for (TestId t : {TestId::H, TestId::Hex, TestId::Delta2, TestId::Beta, TestId::Tau,
                   TestId::Gamma, TestId::Delta, TestId::SopTau, TestId::Sacf})
    if (name == test_id_name(t)) return t;
  throw Error(errc::parameter_error, "unknown test id: " + name);
}

inline bool is_hop_test(TestId t) {
  return t != TestId::SopTau && t != TestId::Sacf;
}

struct StudySpec {
  DgpSpec dgp;
  std::vector<TestId> tests;
  std::vector<int> delays;  // used by the HOP tests
  double level = 0.05;
  int reps = 1000;
  std::uint64_t master_seed = 1;
  int sop_mc_reps = 2000;

  void validate() const {
    dgp.validate();
    if (tests.empty()) throw Error(errc::parameter_error, "study: no tests");
    if (!(level > 0.0 && level < 1.0))
      throw Error(errc::parameter_error, "study: level must be in (0,1)");
    if (reps < 1) throw Error(errc::parameter_error, "study: reps must be >= 1");
    bool any_hop = false;
    for (TestId t : tests) any_hop = any_hop || is_hop_test(t);
    if (any_hop && delays.empty())
      throw Error(errc::parameter_error, "study: HOP tests need at least one delay");
    for (int d : delays)
      if (d < 1) throw Error(errc::parameter_error, "study: delays must be >= 1");
    if (sop_mc_reps < 1)
      throw Error(errc::parameter_error, "study: sop_mc_reps must be >= 1");
  }
};

// Rows are keyed by (test, delay); delay is 0 for the delay-free competitors.
struct PowerKey {
  TestId test{};
  int delay = 0;
  bool operator<(const PowerKey& o) const {
    return test != o.test ? test < o.test : delay < o.delay;
  }
  bool operator==(const PowerKey& o) const = default;
};

struct PowerCell {
  double rate = 0.0;
  double se = 0.0;
  int reps = 0;
};

struct ReplicationError {
  int replication = 0;
  std::string message;
};

struct PowerTable {
  std::map<PowerKey, PowerCell> cells;
  std::vector<ReplicationError> errors;
};

inline int default_workers() {
  if (const char* env = std::getenv("HOP_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return std::min(v, 64);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 8u));
}

namespace detail {

// Stream index layout under one master seed: replication r uses index r; the
// shared sop null uses a disjoint block.
inline Rng replication_stream(std::uint64_t master, int r) {
  return make_stream(master, static_cast<std::uint64_t>(r));
}

struct RejectionCounter {
  std::vector<std::int64_t> counts;  // aligned with the study's cell list
  std::vector<ReplicationError> errors;
};

}  // namespace detail

// Monte Carlo rejection rates for one scenario. Replications are independent
// work items with counter-derived random streams, so the aggregate is
// deterministic for a given master seed regardless of the worker count.
inline PowerTable run_study(const StudySpec& spec, int workers = 0) {
  spec.validate();
  if (workers <= 0) workers = default_workers();
  workers = std::min(workers, spec.reps);

  // cell layout
  std::vector<PowerKey> keys;
  bool any_hop = false, want_sop = false, want_sacf = false;
  for (TestId t : spec.tests) {
    if (is_hop_test(t)) {
      any_hop = true;
      for (int d : spec.delays) keys.push_back({t, d});
    } else if (t == TestId::SopTau) {
      want_sop = true;
      keys.push_back({t, 0});
    } else {
      want_sacf = true;
      keys.push_back({t, 0});
    }
  }

  // shared deterministic state
  const CurvePath path = any_hop ? gilbert_curve(spec.dgp.dims) : CurvePath{};
  const double crit_qf = any_hop ? qf_quantile(spec.level) : 0.0;
  const double crit_z = normal_upper_quantile(spec.level / 2.0);

  std::vector<double> sop_null;
  if (want_sop) {
    if (spec.dgp.dims.k != 2)
      throw Error(errc::invalid_dimension, "sop_tau test needs a 2D grid");
    sop_null.resize(static_cast<std::size_t>(spec.sop_mc_reps));
    GridData sim;
    sim.dims = spec.dgp.dims;
    sim.values.resize(static_cast<std::size_t>(spec.dgp.dims.cardinality()));
    for (int r = 0; r < spec.sop_mc_reps; ++r) {
      Rng rng = make_stream(spec.master_seed, kStreamBlockAux + static_cast<std::uint64_t>(r));
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (auto& v : sim.values) v = u(rng);
      sop_null[static_cast<std::size_t>(r)] = detail::sop_tau_raw(sim);
    }
    std::sort(sop_null.begin(), sop_null.end());
  }
  const double sqrt_card = std::sqrt(static_cast<double>(spec.dgp.dims.cardinality()));

  auto run_block = [&](int lo, int hi, detail::RejectionCounter& out) {
    out.counts.assign(keys.size(), 0);
    DgpSampler sampler(spec.dgp);
    std::vector<double> series;
    for (int r = lo; r < hi; ++r) {
      Rng rng = detail::replication_stream(spec.master_seed, r);
      try {
        GridData grid = sampler.draw(rng);
        std::vector<bool> reject(keys.size(), false);

        if (any_hop) {
          if (grid.kind == ValueKind::integer) grid.values = dither(grid.values, rng);
          series = hilbert_series(grid, path);
          for (int d : spec.delays) {
            const PatternCounts pc = pattern_counts(series, d);
            const FreqVector f = freq_from_counts(pc);
            const double n = static_cast<double>(pc.n);
            const double sqrt_n = std::sqrt(n);
            const double h_scaled = -(n / 3.0) * (entropy(f) - kNullEntropy);
            const double hex_scaled = -(5.0 * n / 3.0) * (extropy(f) - kNullExtropy);
            const double d2_scaled = n * delta2(f);
            const LinearStats lin = linear_stats(f);
            for (std::size_t k = 0; k < keys.size(); ++k) {
              if (keys[k].delay != d || !is_hop_test(keys[k].test)) continue;
              switch (keys[k].test) {
                case TestId::H: reject[k] = h_scaled > crit_qf; break;
                case TestId::Hex: reject[k] = hex_scaled > crit_qf; break;
                case TestId::Delta2: reject[k] = d2_scaled > crit_qf; break;
                case TestId::Beta:
                  reject[k] = std::abs(sqrt_n * lin.beta) > crit_z * std::sqrt(kVarBeta);
                  break;
                case TestId::Tau:
                  reject[k] = std::abs(sqrt_n * lin.tau) > crit_z * std::sqrt(kVarTau);
                  break;
                case TestId::Gamma:
                  reject[k] = std::abs(sqrt_n * lin.gamma) > crit_z * std::sqrt(kVarGamma);
                  break;
                case TestId::Delta:
                  reject[k] = std::abs(sqrt_n * lin.delta) > crit_z * std::sqrt(kVarDelta);
                  break;
                default: break;
              }
            }
          }
        }

        if (want_sop) {
          const double obs = detail::sop_tau_raw(grid);
          const auto le = std::upper_bound(sop_null.begin(), sop_null.end(), obs) -
                          sop_null.begin();
          const auto ge = sop_null.end() -
                          std::lower_bound(sop_null.begin(), sop_null.end(), obs);
          const double denom = static_cast<double>(spec.sop_mc_reps + 1);
          const double p =
              std::min(1.0, 2.0 * std::min(static_cast<double>(1 + le),
                                           static_cast<double>(1 + ge)) /
                                 denom);
          for (std::size_t k = 0; k < keys.size(); ++k)
            if (keys[k].test == TestId::SopTau) reject[k] = p <= spec.level;
        }

        if (want_sacf) {
          std::vector<int> ones(grid.dims.k, 1);
          const double rho = sacf(grid, ones);
          const bool rej = std::abs(rho) * sqrt_card > crit_z;
          for (std::size_t k = 0; k < keys.size(); ++k)
            if (keys[k].test == TestId::Sacf) reject[k] = rej;
        }

        for (std::size_t k = 0; k < keys.size(); ++k)
          if (reject[k]) ++out.counts[k];
      } catch (const Error& e) {
        out.errors.push_back({r, e.what()});
      }
    }
  };

  std::vector<detail::RejectionCounter> partial(static_cast<std::size_t>(workers));
  if (workers == 1) {
    run_block(0, spec.reps, partial[0]);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (spec.reps + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int lo = w * chunk;
      const int hi = std::min(spec.reps, lo + chunk);
      pool.emplace_back([&, lo, hi, w] { run_block(lo, hi, partial[static_cast<std::size_t>(w)]); });
    }
    for (auto& t : pool) t.join();
  }

  PowerTable table;
  std::vector<std::int64_t> totals(keys.size(), 0);
  for (const auto& p : partial) {
    if (!p.counts.empty())
      for (std::size_t k = 0; k < keys.size(); ++k) totals[k] += p.counts[k];
    table.errors.insert(table.errors.end(), p.errors.begin(), p.errors.end());
  }
  std::sort(table.errors.begin(), table.errors.end(),
            [](const ReplicationError& a, const ReplicationError& b) {
              return a.replication < b.replication;
            });
  if (static_cast<double>(table.errors.size()) > 0.01 * spec.reps)
    throw Error(errc::numeric_error,
                std::to_string(table.errors.size()) + " of " + std::to_string(spec.reps) +
                    " replications failed; first: " + table.errors.front().message);

  const int effective = spec.reps - static_cast<int>(table.errors.size());
  for (std::size_t k = 0; k < keys.size(); ++k) {
    PowerCell cell;
    cell.reps = effective;
    cell.rate = effective > 0 ? static_cast<double>(totals[k]) / effective : 0.0;
    cell.se = effective > 0 ? std::sqrt(cell.rate * (1.0 - cell.rate) / effective) : 0.0;
    table.cells[keys[k]] = cell;
  }
  return table;
}

struct CellComparison {
  PowerKey key{};
  double rate = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;  // tol + 2 * SE
  bool pass = false;
};

struct CompareReport {
  std::vector<CellComparison> cells;
  int passed = 0;
  int failed = 0;
};

// Per-cell |rate - reference| <= tol + 2 * SE. Key sets must coincide.
inline CompareReport compare_to_reference(const PowerTable& table,
                                          const PowerTable& reference, double tol) {
  if (table.cells.size() != reference.cells.size())
    throw Error(errc::key_mismatch, "power tables have different cell sets");
  CompareReport report;
  for (const auto& [key, ref] : reference.cells) {
    auto it = table.cells.find(key);
    if (it == table.cells.end())
      throw Error(errc::key_mismatch, std::string("missing cell ") + test_id_name(key.test) +
                                          "/d=" + std::to_string(key.delay));
    CellComparison c;
    c.key = key;
    c.rate = it->second.rate;
    c.reference = ref.rate;
    c.tolerance = tol + 2.0 * it->second.se;
    c.pass = std::abs(c.rate - c.reference) <= c.tolerance;
    (c.pass ? report.passed : report.failed) += 1;
    report.cells.push_back(c);
  }
  return report;
}

}  // namespace hop
