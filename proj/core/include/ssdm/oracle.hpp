#pragma once

// Sampling separation oracle. At call s it draws N_s scenarios and either
// returns a separator of the query from the implementable set or gets stuck.

#include <cstdint>
#include <variant>

#include "ssdm/geometry.hpp"
#include "ssdm/model.hpp"

namespace ssdm {

struct FixedSchedule {
  std::size_t M = 1;  // number of oracle calls the sample size is sized for
};
struct AdaptiveSchedule {};
using SampleSchedule = std::variant<FixedSchedule, AdaptiveSchedule>;

struct OracleConfig {
  double epsilon = 0.05;
  double delta = 0.01;
  SampleSchedule schedule = AdaptiveSchedule{};
  std::uint64_t seed = 1;
  unsigned threads = 1;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

/// Call counter (starts at 1, never reset) and the root of the sample streams.
struct OracleState {
  std::uint64_t s = 1;
  std::uint64_t root_seed = 1;

  explicit OracleState(std::uint64_t seed = 1) : root_seed(seed) {}
};

/// floor(a) + 1: the smallest integer strictly greater than a.
std::size_t strict_ceiling(double a);

/// Fixed: strict_ceiling(ln(M / delta) / epsilon).
/// Adaptive: strict_ceiling(ln(kappa_s / delta) / epsilon) with kappa_s = s^2 pi^2 / 6.
std::size_t sample_size(const OracleConfig& config, std::uint64_t s);

enum class SeparatorSource { YMembership, Stage };

struct SeparatorFound {
  Separator separator;
  SeparatorSource source = SeparatorSource::Stage;
  std::size_t stage = 0;         // 0 for Y membership
  std::size_t samples_used = 0;  // scenarios drawn up to the failing one
};

struct Stuck {
  std::size_t samples_used = 0;
};

using QueryOutcome = std::variant<SeparatorFound, Stuck>;

/// One oracle call at y; increments state.s exactly once.
QueryOutcome query(OracleState& state, const OracleConfig& config, const SemiStochasticModel& model,
                   std::span<const double> y);

/// What the engines talk to.
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual QueryOutcome query(const Vec& y) = 0;
  /// Index the next query will carry.
  virtual std::uint64_t next_call() const = 0;
  /// Scenarios drawn at the next query (0 if not sampling).
  virtual std::size_t next_sample_size() const { return 0; }
};

class SamplingOracle final : public Oracle {
 public:
  SamplingOracle(const SemiStochasticModel& model, const OracleConfig& config, OracleState& state)
      : model_(model), config_(config), state_(state) {}

  QueryOutcome query(const Vec& y) override { return ssdm::query(state_, config_, model_, y); }
  std::uint64_t next_call() const override { return state_.s; }
  std::size_t next_sample_size() const override { return sample_size(config_, state_.s); }

 private:
  const SemiStochasticModel& model_;
  const OracleConfig& config_;
  OracleState& state_;
};

}  // namespace ssdm
