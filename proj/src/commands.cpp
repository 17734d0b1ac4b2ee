#include "clockaoi/commands.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "clockaoi/errors.hpp"

namespace clockaoi {

namespace {

using nlohmann::json;

void put_rational(json& obj, const std::string& key, const Rational& q) {
  obj[key] = to_fraction_string(q);
  obj[key + "_float"] = to_double(q);
}

json progressions_json(const AoiDistribution& dist) {
  json out = json::array();
  for (const auto& ap : dist.progressions) out.push_back({ap.start, ap.step, ap.count});
  return out;
}

json distribution_json(const AoiDistribution& dist) {
  json out;
  out["cardinality"] = dist.values.total();
  out["min"] = dist.values.min();
  out["max"] = dist.values.max();
  put_rational(out, "mean", dist.mean());
  out["progressions"] = progressions_json(dist);
  return out;
}

// Compares an analytic multiset against a brute-force one.
CheckResult compare_multisets(const std::string& name, const Multiset& brute, const Multiset& analytic) {
  if (brute == analytic) return {name, true, fmt::format("{} values match", brute.total())};
  std::map<std::int64_t, std::pair<std::int64_t, std::int64_t>> diff;
  for (const auto& [v, c] : brute.entries()) diff[v].first = c;
  for (const auto& [v, c] : analytic.entries()) diff[v].second = c;
  for (const auto& [v, counts] : diff)
    if (counts.first != counts.second)
      return {name, false,
              fmt::format("value {}: expected multiplicity {}, got {}", v, counts.first, counts.second)};
  return {name, false, "multisets differ"};
}

AoiDistribution shifted(AoiDistribution dist, std::int64_t offset) {
  if (offset == 0) return dist;
  AoiDistribution out;
  out.period = dist.period;
  for (auto ap : dist.progressions) {
    ap.start += offset;
    out.values.add(ap);
    out.progressions.push_back(ap);
  }
  return out;
}

std::vector<CheckResult> verify_basic(const SystemConfig& cfg, const VerifyOptions& options) {
  const auto& d = cfg.periods;
  const std::int64_t period = d.cycle_period();
  std::vector<CheckResult> checks;

  Multiset brute;
  for (std::int64_t k = 1; k <= period; ++k) brute.add(aoi_basic(d, k));
  const AoiDistribution dist = shifted(distribution_basic(d), options.corrupt_offset);
  checks.push_back(compare_multisets("basic_multiset", brute, dist.values));

  {
    CheckResult c{"periodicity", true, fmt::format("period {} cycles", period)};
    for (std::int64_t k = 0; k <= period && c.passed; ++k) {
      const auto x = aoi_basic(d, k), y = aoi_basic(d, k + period);
      if (x != y) c = {"periodicity", false, fmt::format("k={}: expected {}, got {}", k + period, x, y)};
    }
    checks.push_back(c);
  }

  const Rational brute_mean = make_rational(brute.sum(), brute.total());
  const Rational exact = expected_exact_basic(d);
  checks.push_back({"exact_mean_identity", exact == brute_mean,
                    fmt::format("closed form {}, brute force {}", to_fraction_string(exact),
                                to_fraction_string(brute_mean))});

  const BandedValue band = expected_approx_basic(d);
  checks.push_back({"approximation_band", band.contains(exact),
                    fmt::format("{} in [{}, {}]", to_fraction_string(exact), to_fraction_string(band.lower()),
                                to_fraction_string(band.upper()))});

  const auto bound = max_bound_basic(d);
  checks.push_back({"max_bound", brute.max() <= bound, fmt::format("observed {} <= bound {}", brute.max(), bound)});

  try {
    const Rational rel_bound = rel_error_bound_basic(d);
    const Rational rel = exact > 0 ? Rational(abs(exact - band.center) / exact) : Rational(0);
    checks.push_back({"relative_error_bound", exact == 0 || rel <= rel_bound,
                      fmt::format("{} <= {}", to_fraction_string(rel), to_fraction_string(rel_bound))});
  } catch (const UnboundedError&) {
    checks.push_back({"relative_error_bound", true, "not applicable: relative error is unbounded"});
  }

  {
    const std::int64_t cycles = options.cycles > 0 ? options.cycles : std::max<std::int64_t>(period + 1, 10'000);
    BasicSimulator sim(d);
    CheckResult c{"simulator_equivalence", true, fmt::format("{} cycles", cycles)};
    for (std::int64_t k = 0; k < cycles; ++k) {
      const auto rec = sim.next();
      const auto expected = aoi_basic(d, k);
      if (!rec.age || *rec.age != expected) {
        c = {"simulator_equivalence", false,
             fmt::format("k={}: expected {}, got {}", k, expected, rec.age ? std::to_string(*rec.age) : "undefined")};
        break;
      }
    }
    checks.push_back(c);
  }
  return checks;
}

std::vector<CheckResult> verify_extended(const SystemConfig& cfg, const VerifyOptions& options) {
  const auto& d = cfg.periods;
  const std::int64_t period = d.cycle_period();
  std::vector<CheckResult> checks;

  for (std::int64_t l = 0; l <= options.l_max; ++l) {
    Multiset brute;
    for (std::int64_t k = 1; k <= period; ++k) brute.add(aoi_conditional(cfg, k, l));
    const AoiDistribution dist = shifted(distribution_conditional(cfg, l), options.corrupt_offset);
    checks.push_back(compare_multisets(fmt::format("conditional_multiset[l={}]", l), brute, dist.values));
  }

  {
    CheckResult c{"periodicity", true, fmt::format("period {} cycles", period)};
    for (std::int64_t k = 0; k <= period && c.passed; ++k) {
      const auto x = aoi_conditional(cfg, k, 0), y = aoi_conditional(cfg, k + period, 0);
      if (x != y) c = {"periodicity", false, fmt::format("k={}: expected {}, got {}", k + period, x, y)};
    }
    checks.push_back(c);
  }

  {
    const auto bound = max_bound_extended_deterministic(cfg);
    const auto observed = distribution_conditional(cfg, 0).values.max();
    checks.push_back({"max_bound[l=0]", observed <= bound, fmt::format("observed {} <= bound {}", observed, bound)});
  }

  const BandedValue band = expected_approx_extended(cfg);
  const Rational exact = expected_exact_extended_closed(cfg);
  {
    const auto truncated = expected_exact_extended(cfg, make_rational(1, std::int64_t{1} << 40));
    const bool ok = truncated.value <= exact && exact <= truncated.value + truncated.tail_bound;
    checks.push_back({"series_truncation", ok,
                      fmt::format("closed form {} within truncated sum {} + {} ({} terms)", to_double(exact),
                                  to_double(truncated.value), to_double(truncated.tail_bound), truncated.terms_used)});
  }
  checks.push_back({"approximation_band", band.contains(exact),
                    fmt::format("{} in [{}, {}]", to_fraction_string(exact), to_fraction_string(band.lower()),
                                to_fraction_string(band.upper()))});
  {
    const Rational rel_bound = rel_error_bound_extended(cfg);
    const Rational rel = abs(exact - band.center) / exact;
    checks.push_back({"relative_error_bound", rel <= rel_bound,
                      fmt::format("{} <= {}", to_fraction_string(rel), to_fraction_string(rel_bound))});
  }

  {
    const std::int64_t warm = ceil_div(cfg.delta_b + cfg.delta_n + d.generation_period + d.network_period + 2,
                                       d.processing_period) + 1;
    const std::int64_t cycles =
        options.cycles > 0 ? options.cycles : std::max<std::int64_t>(10 * period, 10'000) + warm;
    ExtendedSimulator sim(cfg, options.rng);
    std::int64_t checked = 0;
    CheckResult c{"simulator_bridge", true, ""};
    for (std::int64_t k = 0; k < cycles; ++k) {
      const auto rec = sim.next();
      if (rec.warm_up()) continue;
      const auto l = rec.failures_since_success.value_or(0);
      const auto expected = aoi_conditional(cfg, k, l);
      ++checked;
      if (*rec.age != expected) {
        c = {"simulator_bridge", false, fmt::format("k={} (l={}): expected {}, got {}", k, l, expected, *rec.age)};
        break;
      }
    }
    if (c.passed) c.detail = fmt::format("{} post-warm-up cycles of {}", checked, cycles);
    if (c.passed && checked == 0) c = {"simulator_bridge", false, "no post-warm-up cycles"};
    checks.push_back(c);
  }
  return checks;
}

}  // namespace

SystemConfig build_config(const ConfigArgs& args) {
  const PeriodDecomposition d = decompose(args.a_period, args.b_period, args.n_period);
  const Model model = parse_model(args.model);
  Rational p;
  try {
    p = parse_rational(args.p);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("--p: ") + e.what());
  }
  if (model == Model::basic) {
    if (args.delta_b != 0 || args.delta_n != 0 || p != 1)
      throw ConfigError("basic model requires delta_B = delta_N = 0 and p = 1 (use --model extended)");
    return make_basic_config(d);
  }
  return make_extended_config(d, args.delta_b, args.delta_n, p);
}

nlohmann::json analyze_report(const SystemConfig& cfg, const std::optional<Rational>& sigma, const Rational& tol) {
  validate(cfg);
  const auto& d = cfg.periods;
  json report;

  json config{{"model", to_string(cfg.model)},
              {"a_period", d.processing_period},
              {"b_period", d.generation_period},
              {"n_period", d.network_period},
              {"delta_b", cfg.delta_b},
              {"delta_n", cfg.delta_n}};
  put_rational(config, "p", cfg.success_probability);
  report["config"] = config;

  report["decomposition"] = {{"A_prime", d.processing_period}, {"B_prime", d.generation_period},
                             {"N_prime", d.network_period},    {"A", d.processing_cofactor},
                             {"B", d.generation_cofactor},     {"N", d.network_cofactor},
                             {"a", d.gcd_gen_net},             {"b", d.gcd_proc_gen},
                             {"n", d.gcd_proc_net},            {"cycle_period", d.cycle_period()}};

  if (cfg.model == Model::basic) {
    const AoiDistribution dist = distribution_basic(d);
    report["distribution"] = distribution_json(dist);

    json expected;
    put_rational(expected, "exact", expected_exact_basic(d));
    report["expected"] = expected;

    const BandedValue band = expected_approx_basic(d);
    json approx;
    put_rational(approx, "center", band.center);
    put_rational(approx, "half_width", band.half_width);
    report["approximation"] = approx;

    json bounds;
    try {
      put_rational(bounds, "relative_error", rel_error_bound_basic(d));
    } catch (const UnboundedError&) {
      bounds["relative_error"] = nullptr;
      bounds["relative_error_unbounded"] = true;
    }
    report["error_bounds"] = bounds;

    report["max_bounds"] = {{"deterministic", max_bound_basic(d)}, {"observed_max", dist.values.max()}};
    return report;
  }

  const AoiDistribution dist = distribution_conditional(cfg, 0);
  json dist_json = distribution_json(dist);
  dist_json["l"] = 0;
  report["distribution"] = dist_json;
  report["K"] = freshness_offset_K(cfg);

  const auto expectation = expected_exact_extended(cfg, tol);
  json expected;
  put_rational(expected, "exact", expectation.value);
  put_rational(expected, "tail_bound", expectation.tail_bound);
  put_rational(expected, "closed_form", expected_exact_extended_closed(cfg));
  expected["terms_used"] = expectation.terms_used;
  report["expected"] = expected;

  const BandedValue band = expected_approx_extended(cfg);
  json approx;
  put_rational(approx, "center", band.center);
  put_rational(approx, "half_width", band.half_width);
  report["approximation"] = approx;

  json bounds;
  put_rational(bounds, "relative_error", rel_error_bound_extended(cfg));
  report["error_bounds"] = bounds;

  json max_bounds{{"deterministic", max_bound_extended_deterministic(cfg)}, {"observed_max_l0", dist.values.max()}};
  if (sigma) {
    put_rational(max_bounds, "sigma", *sigma);
    max_bounds["probabilistic"] = max_bound_prob(cfg, *sigma);
  }
  report["max_bounds"] = max_bounds;
  return report;
}

std::vector<CheckResult> run_verify(const SystemConfig& cfg, const VerifyOptions& options) {
  validate(cfg);
  if (options.l_max < 0) throw std::invalid_argument("l_max must be nonnegative");
  return cfg.model == Model::basic ? verify_basic(cfg, options) : verify_extended(cfg, options);
}

}  // namespace clockaoi
