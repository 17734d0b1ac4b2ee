// Acceptance battery: one PASS/FAIL line per criterion, exit status 0 iff all pass.
// Tolerances and seeds are fixed here and nowhere else.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include <fmt/format.h>

#include "clockaoi/basic_model.hpp"
#include "clockaoi/errors.hpp"
#include "clockaoi/extended_model.hpp"
#include "clockaoi/modmath.hpp"
#include "clockaoi/simulator.hpp"
#include "clockaoi/sweep.hpp"

#ifndef CLOCKAOI_SOURCE_DIR
#define CLOCKAOI_SOURCE_DIR "."
#endif

using namespace clockaoi;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances.
constexpr double kSigmaMultiplier = 3.0;        // standard errors for Monte-Carlo comparisons
constexpr std::int64_t kBridgeCycles = 10'000;  // criterion 7
constexpr std::int64_t kLongCycles = 1'000'000; // criteria 8 and 9
constexpr std::int64_t kMinBatchCycles = 2'000; // batch-means batch length floor
constexpr std::size_t kStochasticConfigs = 100;
constexpr double kSweepMeanLo = -0.08, kSweepMeanHi = 0.0;
constexpr double kSweepMassLo = -0.14, kSweepMassHi = 0.06, kSweepMassFraction = 0.95;
const Rational kExpectationTol = make_rational(1, std::int64_t{1} << 40);

struct Outcome {
  bool passed = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

using Triple = std::tuple<std::int64_t, std::int64_t, std::int64_t>;

std::vector<Triple> coprime_triples(std::int64_t hi) {
  std::vector<Triple> out;
  for (std::int64_t A = 1; A <= hi; ++A)
    for (std::int64_t B = 1; B <= hi; ++B)
      for (std::int64_t N = 1; N <= hi; ++N)
        if (std::gcd(A, std::gcd(B, N)) == 1) out.emplace_back(A, B, N);
  return out;
}

// Grid 1: every period triple up to 30 without a common divisor.
const std::vector<Triple>& grid1() {
  static const auto g = coprime_triples(30);
  return g;
}

// Grid 5: every triple up to 21 with shifts in 0..20 chosen by a fixed stride.
const std::vector<SystemConfig>& grid5() {
  static const auto g = [] {
    std::vector<SystemConfig> out;
    std::int64_t idx = 0;
    for (const auto& [Ap, Bp, Np] : coprime_triples(21)) {
      out.push_back(make_extended_config(decompose(Ap, Bp, Np), (idx * 7) % 21, (idx * 13 + 5) % 21, 1));
      ++idx;
    }
    return out;
  }();
  return g;
}

std::string describe(const SystemConfig& c) {
  const auto& d = c.periods;
  return fmt::format("A'={} B'={} N'={} dB={} dN={} p={}", d.processing_period, d.generation_period,
                     d.network_period, c.delta_b, c.delta_n, c.success_probability.get_str());
}

std::int64_t steady_cycle(const SystemConfig& cfg) {
  const auto& d = cfg.periods;
  return ceil_div(cfg.delta_b + cfg.delta_n + d.generation_period + d.network_period + 2, d.processing_period) + 1;
}

Multiset basic_sequence(const PeriodDecomposition& d) {
  Multiset m;
  for (std::int64_t k = 1; k <= d.cycle_period(); ++k) m.add(aoi_basic(d, k));
  return m;
}

Outcome basic_distribution_exhaustive() {
  std::int64_t mismatches = 0;
  std::string first;
  for (const auto& [Ap, Bp, Np] : grid1()) {
    const auto d = decompose(Ap, Bp, Np);
    if (distribution_basic(d).values != basic_sequence(d)) {
      if (mismatches++ == 0) first = fmt::format(" first A'={} B'={} N'={}", Ap, Bp, Np);
    }
  }
  return {mismatches == 0, fmt::format("{} configs, {} mismatches{}", grid1().size(), mismatches, first)};
}

Outcome exact_mean_identity() {
  std::int64_t mismatches = 0;
  std::string first;
  for (const auto& [Ap, Bp, Np] : grid1()) {
    const auto d = decompose(Ap, Bp, Np);
    const Multiset seq = basic_sequence(d);
    Rational brute(seq.sum(), seq.total());
    brute.canonicalize();
    if (expected_exact_basic(d) != brute && mismatches++ == 0)
      first = fmt::format(" first A'={} B'={} N'={}", Ap, Bp, Np);
  }
  return {mismatches == 0, fmt::format("{} configs, {} mismatches{}", grid1().size(), mismatches, first)};
}

Outcome basic_bounds() {
  std::int64_t band = 0, max = 0, rel = 0, rel_checked = 0;
  for (const auto& [Ap, Bp, Np] : grid1()) {
    const auto d = decompose(Ap, Bp, Np);
    const Rational exact = expected_exact_basic(d);
    const Rational center(Bp + Np - d.gcd_proc_net, 2);
    const Rational half(d.gcd_gen_net * d.gcd_proc_gen, 2);
    if (abs(exact - center) > half) ++band;
    if (distribution_basic(d).values.max() > Bp + Np - d.gcd_proc_net) ++max;
    if (exact > 0) {
      try {
        const Rational bound = rel_error_bound_basic(d);
        ++rel_checked;
        if (abs(exact - center) / exact > bound) ++rel;
      } catch (const UnboundedError&) {
        ++rel;  // a positive mean with an undefined bound contradicts the null-sequence case
      }
    }
  }
  return {band + max + rel == 0,
          fmt::format("{} configs: band violations {}, max violations {}, relative-error violations {} of {} checked",
                      grid1().size(), band, max, rel, rel_checked)};
}

Outcome reference_case() {
  const auto d = decompose(34, 7, 10);
  const auto dist = distribution_basic(d);
  bool ok = d.processing_cofactor == 17 && d.generation_cofactor == 7 && d.network_cofactor == 5 &&
            d.gcd_gen_net == 1 && d.gcd_proc_gen == 1 && d.gcd_proc_net == 2;
  ok = ok && dist.progressions.size() == 5;
  for (const auto& ap : dist.progressions) ok = ok && ap.count == 7 && ap.step == 1;
  const Rational mean = expected_exact_basic(d);
  const auto observed = dist.values.max();
  const auto bound = max_bound_basic(d);
  ok = ok && mean == 7 && dist.mean() == 7 && observed == 14 && bound == 15 && observed <= bound;
  return {ok, fmt::format("A={} B={} N={} a={} b={} n={}; {} progressions of {} step {}; mean {}; max {} <= {}",
                          d.processing_cofactor, d.generation_cofactor, d.network_cofactor, d.gcd_gen_net,
                          d.gcd_proc_gen, d.gcd_proc_net, dist.progressions.size(),
                          dist.progressions.empty() ? 0 : dist.progressions[0].count,
                          dist.progressions.empty() ? 0 : dist.progressions[0].step, to_fraction_string(mean),
                          observed, bound)};
}

Outcome conditional_distribution_exhaustive() {
  std::int64_t mismatches = 0, cases = 0;
  std::string first;
  for (const auto& cfg : grid5())
    for (std::int64_t l = 0; l <= 3; ++l) {
      ++cases;
      Multiset seq;
      for (std::int64_t k = 1; k <= cfg.periods.cycle_period(); ++k) seq.add(aoi_conditional(cfg, k, l));
      if (distribution_conditional(cfg, l).values != seq && mismatches++ == 0)
        first = fmt::format(" first {} l={}", describe(cfg), l);
    }
  return {mismatches == 0 && grid5().size() >= 2000,
          fmt::format("{} configs x l in 0..3 = {} cases, {} mismatches{}", grid5().size(), cases, mismatches, first)};
}

Outcome simulator_equivalence() {
  std::int64_t basic_bad = 0, ext_bad = 0, basic_records = 0, ext_records = 0;
  std::string first;
  for (const auto& [Ap, Bp, Np] : grid1()) {
    const auto d = decompose(Ap, Bp, Np);
    BasicSimulator sim(d);
    for (std::int64_t k = 0; k <= d.cycle_period(); ++k) {
      const auto r = sim.next();
      ++basic_records;
      if ((!r.age || *r.age != aoi_basic(d, k)) && basic_bad++ == 0)
        first = fmt::format(" first basic A'={} B'={} N'={} k={}", Ap, Bp, Np, k);
    }
  }
  for (const auto& cfg : grid5()) {
    ExtendedSimulator sim(cfg, RngSpec{1});
    const auto warm = steady_cycle(cfg);
    const auto end = warm + cfg.periods.cycle_period();
    for (std::int64_t k = 0; k <= end; ++k) {
      const auto r = sim.next();
      if (k < warm) continue;
      ++ext_records;
      if ((!r.age || *r.age != aoi_conditional(cfg, k, 0)) && ext_bad++ == 0)
        first = fmt::format(" first extended {} k={}", describe(cfg), k);
    }
  }
  return {basic_bad + ext_bad == 0,
          fmt::format("basic {} records ({} mismatches), extended p=1 {} post-warm-up records ({} mismatches){}",
                      basic_records, basic_bad, ext_records, ext_bad, first)};
}

// Shared runs for criteria 7-9.
struct StochasticRun {
  SystemConfig cfg;
  std::uint64_t seed = 0;
  std::int64_t bridge_checked = 0, bridge_bad = 0;       // first kBridgeCycles cycles
  std::int64_t bridge_checked_all = 0, bridge_bad_all = 0;  // all kLongCycles cycles
  MeanEstimate estimate;
  Rational exact_truncated, tail, closed;
  BandedValue band;
  std::int64_t post_warm = 0;
  std::int64_t exceed_90 = 0, exceed_99 = 0;
  std::int64_t bound_90 = 0, bound_99 = 0;
  std::string first_bridge;
};

const std::vector<StochasticRun>& stochastic_runs() {
  static const auto runs = [] {
    const std::vector<Rational> ps = {make_rational(1, 5), make_rational(1, 2), make_rational(4, 5)};
    const auto& g = grid5();
    std::vector<StochasticRun> out;
    for (std::size_t i = 0; i < kStochasticConfigs; ++i) {
      const auto& base = g[i * g.size() / kStochasticConfigs];
      for (std::size_t j = 0; j < ps.size(); ++j) {
        StochasticRun run;
        run.cfg = make_extended_config(base.periods, base.delta_b, base.delta_n, ps[j]);
        run.seed = 1000 * i + j + 1;
        const auto trace = simulate_extended(run.cfg, kLongCycles, RngSpec{run.seed});
        run.bound_90 = max_bound_prob(run.cfg, make_rational(9, 10));
        run.bound_99 = max_bound_prob(run.cfg, make_rational(99, 100));
        for (const auto& r : trace.records) {
          if (r.warm_up()) continue;
          const bool bad = *r.age != aoi_conditional(run.cfg, r.cycle, *r.failures_since_success);
          ++run.bridge_checked_all;
          run.bridge_bad_all += bad;
          if (r.cycle < kBridgeCycles) {
            ++run.bridge_checked;
            run.bridge_bad += bad;
            if (bad && run.first_bridge.empty())
              run.first_bridge = fmt::format("{} k={} l={} age={}", describe(run.cfg), r.cycle,
                                             *r.failures_since_success, *r.age);
          }
          ++run.post_warm;
          run.exceed_90 += *r.age > run.bound_90;
          run.exceed_99 += *r.age > run.bound_99;
        }
        const auto period = run.cfg.periods.cycle_period();
        const auto batch = period * ceil_div(kMinBatchCycles, period);
        run.estimate = batch_mean_estimate(trace, static_cast<std::int64_t>(trace.warm_up_length()), batch);
        const auto e = expected_exact_extended(run.cfg, kExpectationTol);
        run.exact_truncated = e.value;
        run.tail = e.tail_bound;
        run.closed = expected_exact_extended_closed(run.cfg);
        run.band = expected_approx_extended(run.cfg);
        out.push_back(std::move(run));
      }
    }
    return out;
  }();
  return runs;
}

Outcome bridge_identity() {
  std::int64_t checked = 0, bad = 0, checked_all = 0, bad_all = 0;
  std::string first;
  for (const auto& r : stochastic_runs()) {
    checked += r.bridge_checked;
    bad += r.bridge_bad;
    checked_all += r.bridge_checked_all;
    bad_all += r.bridge_bad_all;
    if (first.empty() && !r.first_bridge.empty()) first = " first " + r.first_bridge;
  }
  return {bad == 0 && bad_all == 0,
          fmt::format("{} runs: {} records in the first {} cycles, {} mismatches; {} records over {} cycles, {} "
                      "mismatches{}",
                      stochastic_runs().size(), checked, kBridgeCycles, bad, checked_all, kLongCycles, bad_all, first)};
}

Outcome long_run_expectation() {
  std::int64_t outside_se = 0, outside_band = 0, truncation_bad = 0;
  double worst_z = 0;
  std::string worst, band_fail;
  for (const auto& r : stochastic_runs()) {
    const double exact = to_double(r.exact_truncated);
    const double z = std::abs(r.estimate.mean - exact) / r.estimate.standard_error;
    if (z > worst_z) {
      worst_z = z;
      worst = fmt::format("{} seed={} sim={:.5f} exact={:.5f} se={:.5f}", describe(r.cfg), r.seed, r.estimate.mean,
                          exact, r.estimate.standard_error);
    }
    if (z > kSigmaMultiplier) ++outside_se;
    if (!(r.exact_truncated <= r.closed && r.closed <= r.exact_truncated + r.tail)) ++truncation_bad;
    if (!r.band.contains(r.closed) && outside_band++ == 0) band_fail = " band miss " + describe(r.cfg);
  }
  return {outside_se == 0 && outside_band == 0 && truncation_bad == 0,
          fmt::format("{} runs: {} beyond {} SE (worst z={:.2f}: {}); {} outside band (exact); {} truncation "
                      "inconsistencies{}",
                      stochastic_runs().size(), outside_se, kSigmaMultiplier, worst_z, worst, outside_band,
                      truncation_bad, band_fail)};
}

Outcome probabilistic_max() {
  std::int64_t failures = 0;
  double worst_margin = -1e9;
  std::string worst;
  for (const auto& r : stochastic_runs()) {
    const double n = static_cast<double>(r.post_warm);
    for (const auto& [sigma, exceed, bound] :
         {std::tuple{0.9, r.exceed_90, r.bound_90}, std::tuple{0.99, r.exceed_99, r.bound_99}}) {
      const double fraction = static_cast<double>(exceed) / n;
      const double limit = (1 - sigma) + kSigmaMultiplier * std::sqrt(sigma * (1 - sigma) / n);
      if (fraction > limit) ++failures;
      if (fraction - limit > worst_margin) {
        worst_margin = fraction - limit;
        worst = fmt::format("{} sigma={} bound={} exceed={:.5f} limit={:.5f}", describe(r.cfg), sigma, bound,
                            fraction, limit);
      }
    }
  }
  return {failures == 0, fmt::format("{} (run, sigma) pairs, {} over limit; closest: {}",
                                     2 * stochastic_runs().size(), failures, worst)};
}

Outcome sweep_reproduction() {
  const auto grid = load_grid(std::string(CLOCKAOI_SOURCE_DIR) + "/grids/desk.json");
  SweepOptions eight;
  eight.jobs = 8;
  const auto t0 = Clock::now();
  const auto result = run_sweep(grid, eight);
  const double seconds8 = std::chrono::duration<double>(Clock::now() - t0).count();
  SweepOptions one;
  one.jobs = 1;
  const bool identical = render_sweep_outputs(result) == render_sweep_outputs(run_sweep(grid, one));
  const auto& h = result.global;
  const double within = h.fraction_within(kSweepMassLo, kSweepMassHi);
  const bool ok = identical && h.mean >= kSweepMeanLo && h.mean <= kSweepMeanHi && within >= kSweepMassFraction &&
                  result.skipped == 0 && seconds8 < 300;
  return {ok, fmt::format("{} configs, mean {:.4f}, {:.2f}% within [{}, {}], q01 {:.4f}, q99 {:.4f}, jobs=8 run "
                          "{:.1f} s, jobs 1 vs 8 identical: {}",
                          h.count_total, h.mean, 100 * within, kSweepMassLo, kSweepMassHi, h.q01, h.q99, seconds8,
                          identical ? "yes" : "no")};
}

Outcome modular_properties() {
  std::int64_t bad = 0;
  for (std::int64_t X = 1; X <= 200; ++X)
    for (std::int64_t Y = 1; Y <= 200; ++Y) {
      if (std::gcd(X, Y) != 1) continue;
      Multiset expected;
      expected.add(ArithmeticProgression(0, 1, Y));
      bad += residue_orbit(X, Y) != expected;
    }
  for (std::int64_t X = 1; X <= 20; ++X)
    for (std::int64_t Y = 1; Y <= 20; ++Y) {
      std::vector<std::pair<std::int64_t, std::int64_t>> seen;
      for (std::int64_t t = 0; t < std::lcm(X, Y); ++t) seen.emplace_back(t % X + 1, t % Y + 1);
      std::sort(seen.begin(), seen.end());
      auto classes = pairing_classes(X, Y);
      std::sort(classes.begin(), classes.end());
      bad += classes != seen;
    }
  for (std::int64_t x = 1; x <= 20; ++x)
    for (std::int64_t X = 1; X <= 20; ++X)
      for (std::int64_t y = -400; y <= 400; ++y)
        for (bool negate : {false, true}) {
          Multiset brute;
          for (std::int64_t i = 0; i < X; ++i) brute.add(floor_mod((negate ? -y : y) + i * x, X * x));
          Multiset got;
          got.add(ap_reduce_mod(y, x, X, negate));
          bad += got != brute;
        }
  return {bad == 0, fmt::format("residue orbits up to 200, pairings up to 20, progression reductions |y| <= 400: "
                                "{} violations",
                                bad)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "basic_distribution_exhaustive", 30, basic_distribution_exhaustive},
      {2, "exact_mean_identity", 30, exact_mean_identity},
      {3, "basic_band_and_bounds", 60, basic_bounds},
      {4, "reference_case", 1, reference_case},
      {5, "conditional_distribution_exhaustive", 60, conditional_distribution_exhaustive},
      {6, "simulator_equivalence", 120, simulator_equivalence},
      {7, "bridge_identity", 600, bridge_identity},
      {8, "long_run_expectation", 600, long_run_expectation},
      {9, "probabilistic_max", 600, probabilistic_max},
      {10, "sweep_reproduction", 300, sweep_reproduction},
      {11, "modular_properties", 10, modular_properties},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool in_budget = seconds <= c.budget_seconds;
    const bool passed = o.passed && in_budget;
    failed += !passed;
    std::printf("%s %2d %s: %s [%.1f s, budget %.0f s%s]\n", passed ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), seconds, c.budget_seconds, in_budget ? "" : ", OVER BUDGET");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
