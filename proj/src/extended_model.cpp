#include "clockaoi/extended_model.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "clockaoi/errors.hpp"

namespace clockaoi {

namespace {

constexpr std::int64_t kMaxGeometricTerms = 1'000'000;

void require_extended(const SystemConfig& cfg, const char* what) {
  if (cfg.model != Model::extended)
    throw std::invalid_argument(std::string(what) + ": requires an extended-model configuration");
}

Rational failure_probability(const SystemConfig& cfg) { return Rational(1) - cfg.success_probability; }

// (1-p)/p * N'
Rational retransmission_term(const SystemConfig& cfg) {
  const Rational& p = cfg.success_probability;
  return (Rational(1) - p) / p * cfg.periods.network_period;
}

Rational pow_rational(const Rational& base, unsigned long exponent) {
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), exponent);
  return Rational(num, den);
}

}  // namespace

std::string to_string(Model m) { return m == Model::basic ? "basic" : "extended"; }

Model parse_model(const std::string& name) {
  if (name == "basic") return Model::basic;
  if (name == "extended") return Model::extended;
  throw ConfigError("unknown model '" + name + "' (expected basic or extended)");
}

SystemConfig make_basic_config(const PeriodDecomposition& d) {
  SystemConfig cfg;
  cfg.periods = d;
  cfg.model = Model::basic;
  return cfg;
}

SystemConfig make_extended_config(const PeriodDecomposition& d, std::int64_t delta_b, std::int64_t delta_n,
                                  const Rational& p) {
  SystemConfig cfg;
  cfg.periods = d;
  cfg.delta_b = delta_b;
  cfg.delta_n = delta_n;
  cfg.success_probability = p;
  cfg.model = Model::extended;
  validate(cfg);
  return cfg;
}

void validate(const SystemConfig& cfg) {
  const auto& d = cfg.periods;
  if (decompose(d.processing_period, d.generation_period, d.network_period) != d)
    throw ConfigError("period decomposition is inconsistent with A', B', N'");
  if (cfg.model == Model::basic) {
    if (cfg.delta_b != 0 || cfg.delta_n != 0 || cfg.success_probability != 1)
      throw ConfigError("basic model requires delta_B = delta_N = 0 and p = 1");
    return;
  }
  if (cfg.delta_b < 0 || cfg.delta_n < 0) throw ConfigError("phase shifts delta_B, delta_N must be nonnegative");
  if (cfg.success_probability <= 0 || cfg.success_probability > 1)
    throw ConfigError("success probability p must lie in (0, 1], got " + to_fraction_string(cfg.success_probability));
}

std::int64_t aoi_conditional(const SystemConfig& cfg, std::int64_t k, std::int64_t l) {
  require_extended(cfg, "aoi_conditional");
  if (k < 0 || l < 0) throw std::invalid_argument("aoi_conditional: k and l must be nonnegative");
  const auto& d = cfg.periods;
  const std::int64_t t = checked_mul(k, d.processing_period);
  const std::int64_t lN = checked_mul(l, d.network_period);
  const std::int64_t since_tx = floor_mod(t - cfg.delta_n - 1, d.network_period);
  const std::int64_t gen_phase = floor_mod(checked_sub(t - cfg.delta_b - 2, lN), d.generation_period);
  return 2 + lN + since_tx + floor_mod(gen_phase - since_tx, d.generation_period);
}

std::int64_t c_extended(const SystemConfig& cfg, std::int64_t i, std::int64_t j, std::int64_t l) {
  require_extended(cfg, "c_extended");
  const auto& d = cfg.periods;
  const std::int64_t a = d.gcd_gen_net, b = d.gcd_proc_gen, n = d.gcd_proc_net;
  if (i < 0 || i >= a) throw std::out_of_range("c_extended: i must lie in [0, a)");
  if (j < 0 || j >= d.network_cofactor) throw std::out_of_range("c_extended: j must lie in [0, N)");
  if (l < 0) throw std::invalid_argument("c_extended: l must be nonnegative");
  const std::int64_t ab = a * b, an = a * n;
  const std::int64_t iA = checked_mul(i, d.processing_period);
  const std::int64_t lN = checked_mul(l, d.network_period);
  const std::int64_t gen_rem = floor_mod(checked_sub(iA - cfg.delta_b - 2, lN), ab);
  const std::int64_t net_rem = floor_mod(iA - cfg.delta_n - 1, an);
  return 2 + lN + gen_rem + ceil_div(net_rem - gen_rem + checked_mul(j, an), ab) * ab;
}

AoiDistribution distribution_conditional(const SystemConfig& cfg, std::int64_t l) {
  const auto& d = cfg.periods;
  const std::int64_t ab = d.gcd_gen_net * d.gcd_proc_gen;
  AoiDistribution dist;
  dist.period = d.cycle_period();
  for (std::int64_t i = 0; i < d.gcd_gen_net; ++i) {
    for (std::int64_t j = 0; j < d.network_cofactor; ++j) {
      ArithmeticProgression ap(c_extended(cfg, i, j, l), ab, d.generation_cofactor);
      dist.values.add(ap);
      dist.progressions.push_back(ap);
    }
  }
  return dist;
}

Rational conditional_mean(const SystemConfig& cfg, std::int64_t l) {
  const auto& d = cfg.periods;
  const std::int64_t a = d.gcd_gen_net, b = d.gcd_proc_gen, B = d.generation_cofactor, N = d.network_cofactor;
  // mean of <c, ab, B> is c + (B-1)ab/2
  std::int64_t c_sum = 0;
  for (std::int64_t i = 0; i < a; ++i)
    for (std::int64_t j = 0; j < N; ++j) c_sum = checked_add(c_sum, c_extended(cfg, i, j, l));
  return make_rational(c_sum, a * N) + make_rational((B - 1) * a * b, 2);
}

std::int64_t freshness_offset_K(const SystemConfig& cfg) {
  require_extended(cfg, "freshness_offset_K");
  return 2 + comp_mod(cfg.delta_n + 1, cfg.periods.gcd_proc_net);
}

BandedValue expected_approx_extended(const SystemConfig& cfg) {
  require_extended(cfg, "expected_approx_extended");
  validate(cfg);
  const auto& d = cfg.periods;
  Rational center = make_rational(d.generation_period + d.network_period - d.gcd_proc_net, 2);
  center += freshness_offset_K(cfg);
  center += retransmission_term(cfg);
  return {center, make_rational(d.gcd_gen_net * d.gcd_proc_gen, 2)};
}

GeometricExpectation expected_exact_extended(const SystemConfig& cfg, const Rational& tol) {
  require_extended(cfg, "expected_exact_extended");
  validate(cfg);
  if (tol <= 0) throw std::domain_error("expected_exact_extended: tol must be positive");
  const auto& d = cfg.periods;
  const Rational& p = cfg.success_probability;

  if (p == 1) return {conditional_mean(cfg, 0), Rational(0), 1};

  const Rational q = failure_probability(cfg);
  const std::int64_t Np = d.network_period;
  // Upper bound on the l-independent part of every conditional age.
  const std::int64_t c0 = 2 + (Np - 1) + (d.generation_period - 1);
  const Rational q_over_p = q / p;

  // mean^[l] - lN' depends on l only through lN' mod ab.
  const std::int64_t ab = d.gcd_gen_net * d.gcd_proc_gen;
  std::vector<std::optional<Rational>> offset_cache(static_cast<std::size_t>(ab));

  GeometricExpectation out;
  Rational q_pow = 1;  // (1-p)^l
  for (std::int64_t l = 0;; ++l) {
    if (l >= kMaxGeometricTerms)
      throw std::runtime_error("expected_exact_extended: geometric series did not reach tolerance within 10^6 terms");
    auto& cached = offset_cache[static_cast<std::size_t>(l % ab)];
    if (!cached) cached = conditional_mean(cfg, l) - Rational(checked_mul(l, Np));
    out.value += p * q_pow * (*cached + Rational(checked_mul(l, Np)));
    q_pow *= q;

    // sum_{m >= L} p q^m (c0 + m N') = q^L (c0 + N' L + N' q/p), with L = l + 1
    const std::int64_t L = l + 1;
    Rational tail = q_pow * (Rational(c0) + Rational(checked_mul(Np, L)) + q_over_p * Np);
    if (tail < tol) {
      out.tail_bound = tail;
      out.terms_used = L;
      return out;
    }
  }
}

Rational expected_exact_extended_closed(const SystemConfig& cfg) {
  require_extended(cfg, "expected_exact_extended_closed");
  validate(cfg);
  const Rational& p = cfg.success_probability;
  if (p == 1) return conditional_mean(cfg, 0);

  const auto& d = cfg.periods;
  const Rational q = failure_probability(cfg);
  const std::int64_t Np = d.network_period;
  const std::int64_t ab = d.gcd_gen_net * d.gcd_proc_gen;
  Rational periodic_part = 0;
  Rational q_pow = 1;
  for (std::int64_t s = 0; s < ab; ++s) {
    periodic_part += q_pow * (conditional_mean(cfg, s) - Rational(checked_mul(s, Np)));
    q_pow *= q;
  }
  Rational out = Rational(Np) * q / p + p * periodic_part / (Rational(1) - q_pow);
  out.canonicalize();
  return out;
}

Rational rel_error_bound_extended(const SystemConfig& cfg) {
  require_extended(cfg, "rel_error_bound_extended");
  validate(cfg);
  const auto& d = cfg.periods;
  const std::int64_t a = d.gcd_gen_net, b = d.gcd_proc_gen, n = d.gcd_proc_net;
  const std::int64_t B = d.generation_cofactor, N = d.network_cofactor;
  Rational denom((B - 1) * a * b + n * (a * N - 1));
  denom += 2 * (Rational(freshness_offset_K(cfg)) + retransmission_term(cfg));
  return Rational(a * b) / denom;
}

std::int64_t max_bound_extended_deterministic(const SystemConfig& cfg) {
  const auto& d = cfg.periods;
  return d.generation_period + d.network_period - d.gcd_proc_net + freshness_offset_K(cfg);
}

std::int64_t max_bound_prob(const SystemConfig& cfg, const Rational& sigma) {
  require_extended(cfg, "max_bound_prob");
  validate(cfg);
  if (sigma <= 0 || sigma >= 1) throw std::domain_error("max_bound_prob: sigma must lie in (0, 1)");
  const std::int64_t base = max_bound_extended_deterministic(cfg);
  const Rational& p = cfg.success_probability;
  if (p == 1) return base;

  // ceil(r) for r = ln(1-sigma)/ln(1-p) is the smallest m >= 1 with (1-p)^m <= 1-sigma.
  const Rational q = failure_probability(cfg);
  const Rational miss = Rational(1) - sigma;
  const long double r = std::log(static_cast<long double>(miss.get_d())) /
                        std::log1p(-static_cast<long double>(p.get_d()));
  const long double margin = 1e-9L * std::max(1.0L, r);
  auto lo = static_cast<std::int64_t>(std::ceil(r - margin));
  auto hi = static_cast<std::int64_t>(std::ceil(r + margin));
  lo = std::max<std::int64_t>(lo, 1);
  hi = std::max<std::int64_t>(hi, 1);

  std::int64_t m = hi;
  if (lo != hi) {
    // Near an integer: settle exactly when the powers stay small, otherwise keep
    // the outward-rounded value.
    const auto bits = mpz_sizeinbase(q.get_den_mpz_t(), 2) + mpz_sizeinbase(q.get_num_mpz_t(), 2);
    if (static_cast<long double>(bits) * static_cast<long double>(hi) < 4.0e6L) {
      m = hi;
      while (m > 1 && pow_rational(q, static_cast<unsigned long>(m - 1)) <= miss) --m;
      while (pow_rational(q, static_cast<unsigned long>(m)) > miss) ++m;
    }
  }
  return checked_add(base, checked_mul(cfg.periods.network_period, m - 1));
}

}  // namespace clockaoi
