#pragma once

// Semi-stochastic model: a static set Y of strategic decisions, K stage sets
// Z^t built from the data xi_t revealed at stage t, and a scenario sampler.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "ssdm/geometry.hpp"
#include "ssdm/lp.hpp"
#include "ssdm/rng.hpp"

namespace ssdm {

/// Per-stage data xi_1..xi_K. By convention xi_t already contains whatever of
/// xi_1..xi_{t-1} the stage builder needs.
struct Scenario {
  std::vector<Vec> stages;

  std::size_t size() const noexcept { return stages.size(); }
  /// 1-based access.
  const Vec& stage(std::size_t t) const { return stages.at(t - 1); }
};

using StageBuilder = std::function<StagePolyhedron(std::size_t t, std::span<const double> xi_t)>;
using ScenarioSampler = std::function<Scenario(Rng&)>;

class SemiStochasticModel {
 public:
  /// Throws DimensionMismatch on malformed blocks and BadInstance when Y is empty.
  SemiStochasticModel(std::size_t n, std::size_t stages, PolyhedralRep Y, StageBuilder builder,
                      ScenarioSampler sampler, Vec box_lo, Vec box_hi);

  std::size_t dim() const noexcept { return n_; }
  std::size_t stages() const noexcept { return stages_; }
  const PolyhedralRep& Y() const noexcept { return Y_; }
  const Vec& box_lo() const noexcept { return box_lo_; }
  const Vec& box_hi() const noexcept { return box_hi_; }
  /// Ball around the box; contains Y.
  Ball ball() const { return bounding_ball(box_lo_, box_hi_); }

  /// Stage polyhedron for (t, xi_t); checks its shape against the model.
  StagePolyhedron stage(std::size_t t, std::span<const double> xi_t) const;
  Scenario sample(Rng& rng) const;

  /// Copy with Y replaced. Emptiness of the new Y is allowed; the oracle
  /// then separates every query from it.
  SemiStochasticModel with_Y(PolyhedralRep Y) const;

 private:
  SemiStochasticModel() = default;

  std::size_t n_ = 0;
  std::size_t stages_ = 0;
  PolyhedralRep Y_;
  StageBuilder builder_;
  ScenarioSampler sampler_;
  Vec box_lo_;
  Vec box_hi_;
};

struct StageFeasible {
  Vec x;
};

struct StageInfeasible {
  std::size_t t = 0;
  Vec farkas;  // one weight per stage row, L1-normalized
};

using StageCheck = std::variant<StageFeasible, StageInfeasible>;

/// Is there (x, w) with B x + C w <= d - A y for stage (t, xi_t)?
StageCheck stage_feasible(const SemiStochasticModel& model, std::size_t t, std::span<const double> xi_t,
                          std::span<const double> y);
StageCheck stage_feasible(const StagePolyhedron& stage, std::size_t t, std::span<const double> y);

/// f(y) = (g^T y - gamma) / ||g|| with g = A^T lambda, gamma = lambda^T d.
/// Throws ModelContractViolation when g vanishes (the stage set itself would be empty).
Separator separator_from_infeasibility(const StagePolyhedron& stage, std::span<const double> y,
                                       std::span<const double> farkas);
Separator separator_from_infeasibility(const SemiStochasticModel& model, std::size_t t,
                                       std::span<const double> xi_t, std::span<const double> y,
                                       std::span<const double> farkas);

struct InY {};
using Membership = std::variant<InY, Separator>;

Membership membership_or_separator(const SemiStochasticModel& model, std::span<const double> y);

/// First stage (ascending) of the scenario at which y has no local decision.
std::optional<StageInfeasible> first_infeasible_stage(const SemiStochasticModel& model, const Scenario& scenario,
                                                      std::span<const double> y);

/// Fraction of n_samples scenarios with an infeasible stage; 1 when y is not in Y.
double epsilon_hat(const SemiStochasticModel& model, std::span<const double> y, std::size_t n_samples,
                   std::uint64_t seed, unsigned threads = 1);

}  // namespace ssdm
