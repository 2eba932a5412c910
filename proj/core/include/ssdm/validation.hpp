#pragma once

// Monte Carlo validation of a decision on fresh scenarios drawn from the
// Validate stream, which never overlaps the streams used while solving.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ssdm/inventory.hpp"
#include "ssdm/model.hpp"

namespace ssdm {

struct CostStats {
  double min = 0.0;
  double mean = 0.0;
  double median = 0.0;  // midpoint of the two middle values for even counts
  double max = 0.0;
};

/// Throws std::invalid_argument on an empty sample.
CostStats summarize(std::vector<double> values);

struct ValidationReport {
  std::size_t n_scenarios = 0;
  std::size_t n_failures = 0;
  double failure_rate = 0.0;
  std::optional<CostStats> cost;      // over feasible scenarios; empty when there are none
  std::optional<double> bound;        // the decision's total budget
  std::optional<double> mean_excess;  // mean of (cost - hindsight) / hindsight
  std::size_t bound_violations = 0;   // feasible scenarios with cost > bound + 1e-6
  std::size_t hindsight_failures = 0; // scenarios whose hindsight problem is infeasible
};

struct ScenarioResult {
  bool feasible = false;
  double cost = 0.0;       // NaN when infeasible
  double hindsight = 0.0;  // NaN when not computed
};

/// Maps a scenario to the decision used on it (rules may look at the data).
using DecisionMap = std::function<Vec(const Scenario&)>;

/// Greedy policy and hindsight cost on n scenarios. Relative excess is only
/// averaged over scenarios with positive hindsight cost.
ValidationReport validate_inventory(const InventoryInstance& inst, const DecisionMap& decision, std::size_t n,
                                    std::uint64_t seed, unsigned threads = 1,
                                    std::vector<ScenarioResult>* per_scenario = nullptr);

/// Failure rate only: y fails on a scenario when some stage has no local decision.
ValidationReport validate_model(const SemiStochasticModel& model, std::span<const double> y, std::size_t n,
                                std::uint64_t seed, unsigned threads = 1,
                                std::vector<ScenarioResult>* per_scenario = nullptr);

std::string dump_report(const ValidationReport& report);
/// scenario,feasible,cost,hindsight
void write_costs_csv(std::ostream& out, const std::vector<ScenarioResult>& results);

}  // namespace ssdm
