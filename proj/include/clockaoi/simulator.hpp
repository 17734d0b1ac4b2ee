#pragma once

// Slot-level simulation of the two-agent clocked system.
//
// Within one slot t the extended simulator applies, in order:
//   1. an update whose generation began at t-1 becomes available to the network
//   2. a successful transmission from t-1 becomes usable by agent A
//   3. agent A reads (t = kA')
//   4. agent B starts generating (t >= delta_B, (t - delta_B) mod B' = 0)
//   5. the network transmits (t >= delta_N, (t - delta_N) mod N' = 0)
// The simulation only visits slots where one of these events fires, which is
// equivalent to stepping every slot.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "clockaoi/basic_model.hpp"
#include "clockaoi/extended_model.hpp"

namespace clockaoi {

struct TraceRecord {
  std::int64_t cycle = 0;
  std::int64_t slot = 0;
  /// Empty while no update has been delivered yet (warm-up).
  std::optional<std::int64_t> age;
  /// Transmission slots since the last successful one; empty before the first success.
  std::optional<std::int64_t> failures_since_success;

  bool warm_up() const { return !age.has_value(); }
};

struct Trace {
  std::vector<TraceRecord> records;

  /// Index of the first record with a defined age, or records.size().
  std::size_t warm_up_length() const;
};

/// Seeded pseudorandom stream. The only supported algorithm is "mt19937_64",
/// whose output sequence is fixed by the C++ standard.
struct RngSpec {
  std::uint64_t seed = 0;
  std::string algorithm_id = "mt19937_64";
};

/// Bernoulli(p) draws for rational p, decided exactly on the raw 64-bit output
/// (success iff u * den < num * 2^64) so streams are identical on every platform.
class BernoulliStream {
public:
  BernoulliStream(const RngSpec& rng, const Rational& p);
  bool draw();

private:
  std::mt19937_64 engine_;
  std::uint64_t num_;
  std::uint64_t den_;
};

/// Generates records of the basic model one processing cycle at a time.
class BasicSimulator {
public:
  explicit BasicSimulator(const PeriodDecomposition& d);
  TraceRecord next();

private:
  PeriodDecomposition d_;
  std::int64_t cycle_ = 0;
  std::int64_t next_gen_ = 0;
  std::int64_t next_tx_ = 0;
  std::optional<std::int64_t> latest_generated_;
  std::optional<std::int64_t> delivered_;
};

/// Generates records of the extended model one processing cycle at a time.
class ExtendedSimulator {
public:
  ExtendedSimulator(const SystemConfig& cfg, const RngSpec& rng);
  TraceRecord next();

private:
  void advance_to(std::int64_t read_slot);
  void settle(std::int64_t slot);

  SystemConfig cfg_;
  BernoulliStream channel_;
  std::int64_t cycle_ = 0;
  std::int64_t next_gen_;
  std::int64_t next_tx_;
  std::optional<std::int64_t> generating_;    // timestamp, available one slot later
  std::optional<std::int64_t> network_fresh_;  // freshest update the network may send
  std::optional<std::int64_t> in_flight_;     // timestamp, usable one slot after sending
  std::int64_t in_flight_ready_ = 0;
  std::optional<std::int64_t> delivered_;
  std::optional<std::int64_t> failures_;
};

Trace simulate_basic(const PeriodDecomposition& d, std::int64_t cycles);
Trace simulate_extended(const SystemConfig& cfg, std::int64_t cycles, const RngSpec& rng);

/// Ages of records [from_cycle, from_cycle + window). Throws std::out_of_range
/// past the end of the trace and std::invalid_argument if a warm-up record is
/// inside the window.
AoiDistribution empirical_distribution(const Trace& tr, std::int64_t from_cycle, std::int64_t window);
Rational empirical_mean(const Trace& tr, std::int64_t from_cycle, std::int64_t window);

/// Mean with a batch-means standard error for autocorrelated ages.
struct MeanEstimate {
  double mean = 0;
  double standard_error = 0;
  std::int64_t samples = 0;
  std::int64_t batches = 0;
};

/// Uses floor((size - from_cycle) / batch_length) whole batches starting at from_cycle.
MeanEstimate batch_mean_estimate(const Trace& tr, std::int64_t from_cycle, std::int64_t batch_length);

/// CSV with header "k,t,age,l"; warm-up rows leave age and l empty.
void write_trace_csv(std::ostream& os, const Trace& tr);

}  // namespace clockaoi
