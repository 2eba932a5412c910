#pragma once

// Multi-product inventory with per-stage level bands and budgets as the
// here-and-now decision and replenishment orders as the local decisions.

#include <optional>
#include <vector>

#include "ssdm/geometry.hpp"
#include "ssdm/model.hpp"
#include "ssdm/rng.hpp"

namespace ssdm {

/// Per-stage uncertain data: demand, ordering cost, holding cost,
/// backlog penalty, revenue (each one entry per product).
struct StageData {
  Vec demand;
  Vec order_cost;
  Vec holding_cost;
  Vec backlog_penalty;
  Vec revenue;
};

struct InventoryInstance {
  std::size_t products = 0;
  std::size_t stages = 0;
  Vec z0;
  std::vector<Vec> z_lo, z_hi;  // per stage
  std::vector<Vec> x_lo, x_hi;  // per stage order box
  Vec storage;                  // space per unit, >= 0
  double capacity = 0.0;
  Vec cost_cap;                 // hard cap on each stage's expenses
  Vec budget_lo, budget_hi;     // range of each stage budget
  double total_lo = 0.0, total_hi = 0.0;
  std::vector<StageData> nominal;
  double ratio_lo = 0.7, ratio_hi = 1.3;

  /// Throws BadInstance.
  void validate() const;
};

/// Flat layout of the decision: [lower_1; upper_1; budget_1; ...; lower_K; upper_K; budget_K; total].
struct InventoryLayout {
  std::size_t d = 0;
  std::size_t K = 0;

  std::size_t dim() const noexcept { return K * (2 * d + 1) + 1; }
  std::size_t lower(std::size_t t) const noexcept { return (t - 1) * (2 * d + 1); }
  std::size_t upper(std::size_t t) const noexcept { return lower(t) + d; }
  std::size_t budget(std::size_t t) const noexcept { return lower(t) + 2 * d; }
  std::size_t total() const noexcept { return K * (2 * d + 1); }
};

InventoryLayout layout_of(const InventoryInstance& inst);

/// Length of one stage's data block: 5 d.
std::size_t stage_data_size(const InventoryInstance& inst);

/// Data block of stage t in a scenario entry (the last block of the prefix).
StageData unpack_stage(const InventoryInstance& inst, std::span<const double> block);

/// Stage t <= K: rows in (y, x_t, [upper+; lower-]). Stage K + 1: all stages
/// with orders chi_1..chi_K plus the total-cost row.
StagePolyhedron inventory_stage(const InventoryInstance& inst, std::size_t t, std::span<const double> xi_t);

PolyhedralRep inventory_Y(const InventoryInstance& inst);

/// K + 1 stages; stage t <= K sees the prefix of the first t data blocks,
/// stage K + 1 sees all of them.
SemiStochasticModel build_model(const InventoryInstance& inst);

/// Each data component uniform in [ratio_lo, ratio_hi] times its nominal,
/// independent across components and stages.
Scenario sample_scenario(const InventoryInstance& inst, Rng& rng);

/// Scenario with every component at its nominal value.
Scenario nominal_scenario(const InventoryInstance& inst);

struct PolicyRun {
  std::vector<Vec> orders;    // x_t for the stages reached
  std::vector<Vec> levels;    // z_t
  Vec stage_costs;            // realized expenses of each stage
  Vec budget_costs;           // left side of the stage budget row (bands instead of levels)
  double total_cost = 0.0;    // sum of stage_costs
  bool feasible = true;
  std::optional<std::size_t> failed_stage;
};

/// Slack allowed when the summed stage budgets are compared with the total budget.
inline constexpr double kTotalBudgetTol = 1e-6;

/// At each stage the cheapest order admitted by the stage constraints. The
/// run fails at stage K + 1 when the stage budgets used exceed the total.
PolicyRun greedy_local_policy(const InventoryInstance& inst, std::span<const double> y, const Scenario& scenario);

/// Hindsight-optimal total cost over the whole horizon. Throws ClairvoyantInfeasible.
double utopian_cost(const InventoryInstance& inst, const Scenario& scenario, bool enforce_cost_caps = true);

/// d = 4, K = 12, levels in [0, 1], seasonal nominals, no revenue.
InventoryInstance default_instance();

}  // namespace ssdm
