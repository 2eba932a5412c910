#include "ssdm/validation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "ssdm/errors.hpp"
#include "ssdm/io.hpp"
#include "ssdm/parallel.hpp"

namespace ssdm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kBoundTol = 1e-6;

ValidationReport aggregate(const std::vector<ScenarioResult>& results) {
  ValidationReport rep;
  rep.n_scenarios = results.size();
  std::vector<double> costs;
  double excess_sum = 0.0;
  std::size_t excess_n = 0;
  for (const auto& r : results) {
    if (!r.feasible) {
      ++rep.n_failures;
      continue;
    }
    if (std::isnan(r.cost)) continue;
    costs.push_back(r.cost);
    if (r.hindsight > 0.0) {
      excess_sum += (r.cost - r.hindsight) / r.hindsight;
      ++excess_n;
    }
  }
  for (const auto& r : results) rep.hindsight_failures += r.feasible && std::isnan(r.hindsight) && !std::isnan(r.cost);
  rep.failure_rate = rep.n_scenarios == 0 ? 0.0 : static_cast<double>(rep.n_failures) / static_cast<double>(rep.n_scenarios);
  if (!costs.empty()) rep.cost = summarize(std::move(costs));
  if (excess_n > 0) rep.mean_excess = excess_sum / static_cast<double>(excess_n);
  return rep;
}

}  // namespace

CostStats summarize(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("summarize: no values");
  std::sort(v.begin(), v.end());
  CostStats s;
  s.min = v.front();
  s.max = v.back();
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  const std::size_t m = v.size() / 2;
  s.median = v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
  return s;
}

ValidationReport validate_inventory(const InventoryInstance& inst, const DecisionMap& decision, std::size_t n,
                                    std::uint64_t seed, unsigned threads, std::vector<ScenarioResult>* per_scenario) {
  inst.validate();
  const auto L = layout_of(inst);
  const SemiStochasticModel model = build_model(inst);
  std::vector<ScenarioResult> results(n);
  // The bound is the total budget; rules may make it scenario dependent, so
  // each scenario is checked against its own and the report keeps the first.
  std::vector<double> bounds(n, kNaN);
  parallel_for(n, threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, StreamTag::Validate, 0, i));
    const Scenario sc = sample_scenario(inst, rng);
    const Vec y = decision(sc);
    if (y.size() != L.dim()) throw DimensionMismatch("validate: decision dimension");
    bounds[i] = y[L.total()];
    ScenarioResult r{false, kNaN, kNaN};
    if (std::holds_alternative<InY>(membership_or_separator(model, y))) {
      const PolicyRun run = greedy_local_policy(inst, y, sc);
      r.feasible = run.feasible;
      if (run.feasible) {
        r.cost = run.total_cost;
        try {
          r.hindsight = utopian_cost(inst, sc);
        } catch (const ClairvoyantInfeasible&) {
          r.hindsight = kNaN;
        }
      }
    }
    results[i] = r;
  });
  ValidationReport rep = aggregate(results);
  if (n > 0) rep.bound = bounds[0];
  for (std::size_t i = 0; i < n; ++i) {
    if (results[i].feasible && results[i].cost > bounds[i] + kBoundTol) ++rep.bound_violations;
  }
  if (per_scenario) *per_scenario = std::move(results);
  return rep;
}

ValidationReport validate_model(const SemiStochasticModel& model, std::span<const double> y, std::size_t n,
                                std::uint64_t seed, unsigned threads, std::vector<ScenarioResult>* per_scenario) {
  if (y.size() != model.dim()) throw DimensionMismatch("validate: decision dimension");
  const bool in_Y = std::holds_alternative<InY>(membership_or_separator(model, y));
  std::vector<ScenarioResult> results(n);
  parallel_for(n, threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, StreamTag::Validate, 0, i));
    const Scenario sc = model.sample(rng);
    results[i] = ScenarioResult{in_Y && !first_infeasible_stage(model, sc, y), kNaN, kNaN};
  });
  ValidationReport rep = aggregate(results);
  if (per_scenario) *per_scenario = std::move(results);
  return rep;
}

std::string dump_report(const ValidationReport& r) {
  using nlohmann::json;
  auto opt = [](std::optional<double> v) { return v ? json(*v) : json(nullptr); };
  json doc{{"format_version", kFormatVersion},
           {"kind", "validation"},
           {"n_scenarios", r.n_scenarios},
           {"n_failures", r.n_failures},
           {"failure_rate", r.failure_rate},
           {"bound", opt(r.bound)},
           {"mean_excess", opt(r.mean_excess)},
           {"bound_violations", r.bound_violations},
           {"hindsight_failures", r.hindsight_failures}};
  if (r.cost) {
    doc["cost"] = {{"min", r.cost->min}, {"mean", r.cost->mean}, {"median", r.cost->median}, {"max", r.cost->max}};
  } else {
    doc["cost"] = nullptr;
  }
  return doc.dump(2) + "\n";
}

void write_costs_csv(std::ostream& out, const std::vector<ScenarioResult>& results) {
  out << "scenario,feasible,cost,hindsight\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    out << fmt::format("{},{},{},{}\n", i, r.feasible ? 1 : 0, format_double(r.cost), format_double(r.hindsight));
  }
}

}  // namespace ssdm
