#include "clockaoi/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace clockaoi {

namespace {

std::uint64_t to_u64(const mpz_class& z, const char* what) {
  if (z < 0 || mpz_sizeinbase(z.get_mpz_t(), 2) > 64)
    throw std::invalid_argument(std::string("BernoulliStream: ") + what + " of p must fit in 64 bits");
  return static_cast<std::uint64_t>(mpz_get_ui(z.get_mpz_t()));
}

}  // namespace

std::size_t Trace::warm_up_length() const {
  auto it = std::find_if(records.begin(), records.end(), [](const TraceRecord& r) { return !r.warm_up(); });
  return static_cast<std::size_t>(it - records.begin());
}

BernoulliStream::BernoulliStream(const RngSpec& rng, const Rational& p)
    : engine_(rng.seed), num_(to_u64(p.get_num(), "numerator")), den_(to_u64(p.get_den(), "denominator")) {
  static_assert(sizeof(unsigned long) == 8, "64-bit unsigned long required");
  if (rng.algorithm_id != "mt19937_64")
    throw std::invalid_argument("unsupported rng algorithm '" + rng.algorithm_id + "' (expected mt19937_64)");
  if (p < 0 || p > 1) throw std::domain_error("BernoulliStream: p must lie in [0, 1]");
}

bool BernoulliStream::draw() {
  const unsigned __int128 u = engine_();
  return u * den_ < (static_cast<unsigned __int128>(num_) << 64);
}

BasicSimulator::BasicSimulator(const PeriodDecomposition& d) : d_(d) {}

TraceRecord BasicSimulator::next() {
  const std::int64_t t = checked_mul(cycle_, d_.processing_period);
  // Everything is instantaneous: generation, then transmission, then the read.
  while (std::min(next_gen_, next_tx_) <= t) {
    const std::int64_t u = std::min(next_gen_, next_tx_);
    if (next_gen_ == u) {
      latest_generated_ = u;
      next_gen_ += d_.generation_period;
    }
    if (next_tx_ == u) {
      if (latest_generated_) delivered_ = latest_generated_;
      next_tx_ += d_.network_period;
    }
  }
  TraceRecord rec{cycle_, t, std::nullopt, 0};
  if (delivered_) rec.age = t - *delivered_;
  ++cycle_;
  return rec;
}

ExtendedSimulator::ExtendedSimulator(const SystemConfig& cfg, const RngSpec& rng)
    : cfg_(cfg), channel_(rng, cfg.success_probability), next_gen_(cfg.delta_b), next_tx_(cfg.delta_n) {
  if (cfg.model != Model::extended) throw std::invalid_argument("ExtendedSimulator: requires an extended-model config");
  validate(cfg);
}

void ExtendedSimulator::settle(std::int64_t slot) {
  if (generating_ && *generating_ + 1 <= slot) {
    network_fresh_ = generating_;
    generating_.reset();
  }
  if (in_flight_ && in_flight_ready_ <= slot) {
    delivered_ = in_flight_;
    in_flight_.reset();
  }
}

void ExtendedSimulator::advance_to(std::int64_t read_slot) {
  const auto& d = cfg_.periods;
  while (std::min(next_gen_, next_tx_) < read_slot) {
    const std::int64_t u = std::min(next_gen_, next_tx_);
    settle(u);
    if (next_gen_ == u) {
      generating_ = u;
      next_gen_ += d.generation_period;
    }
    if (next_tx_ == u) {
      // One draw per transmission slot, even with nothing to send.
      if (channel_.draw()) {
        failures_ = 0;
        if (network_fresh_) {
          in_flight_ = network_fresh_;
          in_flight_ready_ = u + 1;
        }
      } else if (failures_) {
        ++*failures_;
      }
      next_tx_ += d.network_period;
    }
  }
  settle(read_slot);
}

TraceRecord ExtendedSimulator::next() {
  const std::int64_t t = checked_mul(cycle_, cfg_.periods.processing_period);
  advance_to(t);
  TraceRecord rec{cycle_, t, std::nullopt, std::nullopt};
  if (delivered_) {
    rec.age = t - *delivered_;
    rec.failures_since_success = failures_;
  }
  ++cycle_;
  return rec;
}

Trace simulate_basic(const PeriodDecomposition& d, std::int64_t cycles) {
  if (cycles < 1) throw std::invalid_argument("simulate_basic: cycles must be positive");
  BasicSimulator sim(d);
  Trace tr;
  tr.records.reserve(static_cast<std::size_t>(cycles));
  for (std::int64_t k = 0; k < cycles; ++k) tr.records.push_back(sim.next());
  return tr;
}

Trace simulate_extended(const SystemConfig& cfg, std::int64_t cycles, const RngSpec& rng) {
  if (cycles < 1) throw std::invalid_argument("simulate_extended: cycles must be positive");
  ExtendedSimulator sim(cfg, rng);
  Trace tr;
  tr.records.reserve(static_cast<std::size_t>(cycles));
  for (std::int64_t k = 0; k < cycles; ++k) tr.records.push_back(sim.next());
  return tr;
}

namespace {

std::span<const TraceRecord> window_of(const Trace& tr, std::int64_t from_cycle, std::int64_t window) {
  if (window <= 0) throw std::domain_error("empirical window must be nonempty");
  if (from_cycle < 0) throw std::out_of_range("from_cycle must be nonnegative");
  const auto size = static_cast<std::int64_t>(tr.records.size());
  if (from_cycle > size || window > size - from_cycle)
    throw std::out_of_range("empirical window extends past the end of the trace");
  std::span<const TraceRecord> out(tr.records.data() + from_cycle, static_cast<std::size_t>(window));
  for (const auto& r : out)
    if (r.warm_up())
      throw std::invalid_argument("empirical window contains warm-up cycle " + std::to_string(r.cycle));
  return out;
}

}  // namespace

AoiDistribution empirical_distribution(const Trace& tr, std::int64_t from_cycle, std::int64_t window) {
  AoiDistribution dist;
  dist.period = window;
  for (const auto& r : window_of(tr, from_cycle, window)) dist.values.add(*r.age);
  return dist;
}

Rational empirical_mean(const Trace& tr, std::int64_t from_cycle, std::int64_t window) {
  std::int64_t sum = 0;
  for (const auto& r : window_of(tr, from_cycle, window)) sum = checked_add(sum, *r.age);
  return make_rational(sum, window);
}

MeanEstimate batch_mean_estimate(const Trace& tr, std::int64_t from_cycle, std::int64_t batch_length) {
  if (batch_length < 1) throw std::invalid_argument("batch_length must be positive");
  const auto size = static_cast<std::int64_t>(tr.records.size());
  const std::int64_t batches = from_cycle < size ? (size - from_cycle) / batch_length : 0;
  if (batches < 2) throw std::domain_error("batch_mean_estimate: need at least two whole batches");
  auto records = window_of(tr, from_cycle, batches * batch_length);

  std::vector<double> means(static_cast<std::size_t>(batches));
  for (std::int64_t b = 0; b < batches; ++b) {
    std::int64_t sum = 0;
    for (std::int64_t k = 0; k < batch_length; ++k) sum += *records[static_cast<std::size_t>(b * batch_length + k)].age;
    means[static_cast<std::size_t>(b)] = static_cast<double>(sum) / static_cast<double>(batch_length);
  }
  double grand = 0;
  for (double m : means) grand += m;
  grand /= static_cast<double>(batches);
  double ss = 0;
  for (double m : means) ss += (m - grand) * (m - grand);
  const double variance = ss / static_cast<double>(batches - 1);

  return {grand, std::sqrt(variance / static_cast<double>(batches)), batches * batch_length, batches};
}

void write_trace_csv(std::ostream& os, const Trace& tr) {
  os << "k,t,age,l\n";
  for (const auto& r : tr.records) {
    os << r.cycle << ',' << r.slot << ',';
    if (!r.warm_up()) {
      os << *r.age << ',';
      if (r.failures_since_success) os << *r.failures_since_success;
    } else {
      os << ',';
    }
    os << '\n';
  }
}

}  // namespace clockaoi
