#pragma once

// Minimizing a linear objective over the implementable decisions by
// bisection on the objective level, one engine run per level.

#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "ssdm/engines.hpp"
#include "ssdm/model.hpp"
#include "ssdm/oracle.hpp"

namespace ssdm {

enum class EngineKind { BundleLevel, Ellipsoid };

struct BisectionConfig {
  Vec objective;
  double tolerance = 0.05;  // optimality tolerance on the objective
  double stability = 0.1;   // inscribed-ball radius the per-step budget is sized for
  EngineKind engine = EngineKind::BundleLevel;
  OracleConfig oracle;
  /// Replaces the per-step call budget derived from the ball and stability.
  std::optional<std::size_t> step_budget;

  /// Throws std::invalid_argument or DimensionMismatch.
  void validate(std::size_t n) const;
};

enum class StepOutcome { Candidate, Infeasible, Exhausted };

const char* to_string(StepOutcome o) noexcept;

struct BisectionStep {
  std::size_t k = 0;
  double target = 0.0;
  StepOutcome outcome = StepOutcome::Exhausted;
  double lo = 0.0;  // localizer before the step
  double hi = 0.0;
  std::size_t calls = 0;  // oracle calls so far, all steps
  std::vector<IterationRecord> iterations;
};

struct Solved {
  Vec y;
  double bound = 0.0;  // smallest productive target
};
struct Failed {};

struct BisectionOutcome {
  std::variant<Solved, Failed> result;
  std::vector<BisectionStep> steps;
  std::size_t calls = 0;
  std::size_t samples = 0;
};

/// (min, max) of f^T y over Y. Throws UnboundedObjective or BadInstance (empty Y).
std::pair<double, double> objective_range(const SemiStochasticModel& model, std::span<const double> f);

/// Number of steps: strict_ceiling(log2(width / tolerance)).
std::size_t bisection_steps(double width, double tolerance);

BisectionOutcome minimize(const SemiStochasticModel& model, const BisectionConfig& config);

}  // namespace ssdm
