#include "clockaoi/basic_model.hpp"

#include <numeric>
#include <string>

#include "clockaoi/errors.hpp"

namespace clockaoi {

std::int64_t PeriodDecomposition::cycle_period() const {
  return checked_mul(checked_mul(gcd_gen_net, generation_cofactor), network_cofactor);
}

PeriodDecomposition decompose(std::int64_t Ap, std::int64_t Bp, std::int64_t Np) {
  if (Ap < 1 || Bp < 1 || Np < 1)
    throw ConfigError("periods must be positive integers (got A'=" + std::to_string(Ap) +
                      ", B'=" + std::to_string(Bp) + ", N'=" + std::to_string(Np) + ")");
  const std::int64_t common = std::gcd(Ap, std::gcd(Bp, Np));
  if (common != 1)
    throw ConfigError("periods A'=" + std::to_string(Ap) + ", B'=" + std::to_string(Bp) +
                      ", N'=" + std::to_string(Np) + " share common divisor " + std::to_string(common) +
                      "; gcd(A', B', N') must be 1 (rescale the time axis by " + std::to_string(common) + ")");

  PeriodDecomposition d;
  d.processing_period = Ap;
  d.generation_period = Bp;
  d.network_period = Np;
  d.gcd_gen_net = std::gcd(Bp, Np);
  d.gcd_proc_gen = std::gcd(Ap, Bp);
  d.gcd_proc_net = std::gcd(Ap, Np);
  d.processing_cofactor = Ap / (d.gcd_proc_gen * d.gcd_proc_net);
  d.generation_cofactor = Bp / (d.gcd_proc_gen * d.gcd_gen_net);
  d.network_cofactor = Np / (d.gcd_proc_net * d.gcd_gen_net);

  // Pairwise gcds are coprime because no divisor is common to all three periods,
  // so the products divide exactly; verify the factorization anyway.
  if (d.processing_cofactor * d.gcd_proc_gen * d.gcd_proc_net != Ap ||
      d.generation_cofactor * d.gcd_proc_gen * d.gcd_gen_net != Bp ||
      d.network_cofactor * d.gcd_proc_net * d.gcd_gen_net != Np)
    throw ConfigError("periods do not factor as A'=Abn, B'=Bba, N'=Nna");
  return d;
}

Rational AoiDistribution::mean() const {
  if (values.empty()) throw std::domain_error("mean of empty distribution");
  return make_rational(values.sum(), values.total());
}

std::int64_t aoi_basic(const PeriodDecomposition& d, std::int64_t k) {
  if (k < 0) throw std::invalid_argument("aoi_basic: cycle index must be nonnegative");
  const std::int64_t t = checked_mul(k, d.processing_period);
  const std::int64_t since_tx = floor_mod(t, d.network_period);
  return since_tx + floor_mod(floor_mod(t, d.generation_period) - since_tx, d.generation_period);
}

std::int64_t c_basic(const PeriodDecomposition& d, std::int64_t i, std::int64_t j) {
  const std::int64_t a = d.gcd_gen_net, b = d.gcd_proc_gen, n = d.gcd_proc_net;
  if (i < 0 || i >= a) throw std::out_of_range("c_basic: i must lie in [0, a)");
  if (j < 0 || j >= d.network_cofactor) throw std::out_of_range("c_basic: j must lie in [0, N)");
  const std::int64_t ab = a * b, an = a * n;
  const std::int64_t iA = checked_mul(i, d.processing_period);
  const std::int64_t rem_ab = floor_mod(iA, ab);
  return rem_ab + ceil_div(floor_mod(iA, an) - rem_ab + checked_mul(j, an), ab) * ab;
}

AoiDistribution distribution_basic(const PeriodDecomposition& d) {
  const std::int64_t ab = d.gcd_gen_net * d.gcd_proc_gen;
  AoiDistribution dist;
  dist.period = d.cycle_period();
  dist.progressions.reserve(static_cast<std::size_t>(d.gcd_gen_net * d.network_cofactor));
  for (std::int64_t i = 0; i < d.gcd_gen_net; ++i) {
    for (std::int64_t j = 0; j < d.network_cofactor; ++j) {
      ArithmeticProgression ap(c_basic(d, i, j), ab, d.generation_cofactor);
      dist.values.add(ap);
      dist.progressions.push_back(ap);
    }
  }
  return dist;
}

Rational expected_exact_basic(const PeriodDecomposition& d) {
  const std::int64_t a = d.gcd_gen_net, b = d.gcd_proc_gen, n = d.gcd_proc_net;
  const std::int64_t N = d.network_cofactor;
  const std::int64_t N_mod_b = floor_mod(N, b);

  // sum_{i<a} sum_{j < N mod b} ((j - floor(ib/a)) n mod b)
  std::int64_t residue_sum = 0;
  for (std::int64_t i = 0; i < a; ++i) {
    const std::int64_t shift = floor_div(i * b, a);
    for (std::int64_t j = 0; j < N_mod_b; ++j) residue_sum += floor_mod((j - shift) * n, b);
  }

  Rational bracket = make_rational(a * (b + 1), 2) * floor_div(N, b);
  bracket += ceil_div(N_mod_b * a, b);
  bracket += make_rational(residue_sum, b);

  Rational head = make_rational(d.generation_period + d.network_period - n + a * b, 2);
  return head - make_rational(b, N) * bracket;
}

BandedValue expected_approx_basic(const PeriodDecomposition& d) {
  const std::int64_t ab = d.gcd_gen_net * d.gcd_proc_gen;
  return {make_rational(d.generation_period + d.network_period - d.gcd_proc_net, 2), make_rational(ab, 2)};
}

Rational rel_error_bound_basic(const PeriodDecomposition& d) {
  const std::int64_t a = d.gcd_gen_net, b = d.gcd_proc_gen, n = d.gcd_proc_net;
  const std::int64_t B = d.generation_cofactor, N = d.network_cofactor;
  const std::int64_t denom = (B - 1) * a * b + n * (a * N - 1);
  if (denom <= 0)
    throw UnboundedError("relative error is unbounded: B = 1 and aN = 1 make the AoI sequence identically zero");
  return make_rational(a * b, denom);
}

std::int64_t max_bound_basic(const PeriodDecomposition& d) {
  return d.generation_period + d.network_period - d.gcd_proc_net;
}

}  // namespace clockaoi
