#include "ssdm/model.hpp"

#include <fmt/format.h>

#include "ssdm/errors.hpp"
#include "ssdm/parallel.hpp"

namespace ssdm {

SemiStochasticModel::SemiStochasticModel(std::size_t n, std::size_t stages, PolyhedralRep Y, StageBuilder builder,
                                         ScenarioSampler sampler, Vec box_lo, Vec box_hi)
    : n_(n),
      stages_(stages),
      Y_(std::move(Y)),
      builder_(std::move(builder)),
      sampler_(std::move(sampler)),
      box_lo_(std::move(box_lo)),
      box_hi_(std::move(box_hi)) {
  Y_.validate();
  if (Y_.dim() != n_) throw DimensionMismatch(fmt::format("model: Y has {} columns, expected {}", Y_.dim(), n_));
  if (box_lo_.size() != n_ || box_hi_.size() != n_) throw DimensionMismatch("model: box dimension");
  if (stages_ == 0) throw DimensionMismatch("model: at least one stage is required");
  if (!builder_ || !sampler_) throw DimensionMismatch("model: missing stage builder or sampler");
  bounding_ball(box_lo_, box_hi_);  // validates the box

  // Y is nonempty: {(y, w) : A y + C w <= d} has a point.
  Mat G(Y_.rows(), n_ + Y_.aux_dim());
  for (std::size_t i = 0; i < Y_.rows(); ++i) {
    for (std::size_t j = 0; j < n_; ++j) G(i, j) = Y_.A(i, j);
    for (std::size_t j = 0; j < Y_.aux_dim(); ++j) G(i, n_ + j) = Y_.C(i, j);
  }
  if (std::holds_alternative<LpInfeasible>(lp_feasible_folded(G, Y_.d))) {
    throw BadInstance("model: the set of strategic decisions is empty");
  }
}

StagePolyhedron SemiStochasticModel::stage(std::size_t t, std::span<const double> xi_t) const {
  if (t < 1 || t > stages_) throw DimensionMismatch(fmt::format("stage index {} outside 1..{}", t, stages_));
  StagePolyhedron P = builder_(t, xi_t);
  P.validate();
  if (P.y_dim() != n_) {
    throw DimensionMismatch(fmt::format("stage {}: A has {} columns, expected {}", t, P.y_dim(), n_));
  }
  return P;
}

Scenario SemiStochasticModel::sample(Rng& rng) const {
  Scenario s = sampler_(rng);
  if (s.size() != stages_) {
    throw ModelContractViolation(fmt::format("sampler produced {} stages, expected {}", s.size(), stages_));
  }
  return s;
}

SemiStochasticModel SemiStochasticModel::with_Y(PolyhedralRep Y) const {
  Y.validate();
  if (Y.dim() != n_) throw DimensionMismatch("with_Y: dimension");
  SemiStochasticModel out;
  out.n_ = n_;
  out.stages_ = stages_;
  out.Y_ = std::move(Y);
  out.builder_ = builder_;
  out.sampler_ = sampler_;
  out.box_lo_ = box_lo_;
  out.box_hi_ = box_hi_;
  return out;
}

StageCheck stage_feasible(const StagePolyhedron& P, std::size_t t, std::span<const double> y) {
  if (y.size() != P.y_dim()) throw DimensionMismatch("stage_feasible: y dimension");
  const std::size_t nx = P.x_dim();
  const std::size_t nw = P.w_dim();
  Mat G(P.rows(), nx + nw);
  Vec h = P.d;
  for (std::size_t i = 0; i < P.rows(); ++i) {
    h[i] -= dot(P.A.row(i), y);
    for (std::size_t j = 0; j < nx; ++j) G(i, j) = P.B(i, j);
    for (std::size_t j = 0; j < nw; ++j) G(i, nx + j) = P.C(i, j);
  }
  auto res = lp_feasible_folded(G, h);
  if (auto* ok = std::get_if<LpFeasible>(&res)) {
    ok->z.resize(nx);
    return StageFeasible{std::move(ok->z)};
  }
  return StageInfeasible{t, std::move(std::get<LpInfeasible>(res).row_multipliers)};
}

StageCheck stage_feasible(const SemiStochasticModel& model, std::size_t t, std::span<const double> xi_t,
                          std::span<const double> y) {
  return stage_feasible(model.stage(t, xi_t), t, y);
}

Separator separator_from_infeasibility(const StagePolyhedron& P, std::span<const double> y,
                                       std::span<const double> farkas) {
  if (farkas.size() != P.rows()) throw DimensionMismatch("separator_from_infeasibility: certificate length");
  if (y.size() != P.y_dim()) throw DimensionMismatch("separator_from_infeasibility: y dimension");
  const Vec g = matvec_transposed(P.A, farkas);
  const double gamma = dot(farkas, P.d);
  if (norm2(g) <= 1e-12) {
    throw ModelContractViolation("certificate does not involve y: the stage set itself is empty");
  }
  return normalize_separator(g, gamma);
}

Separator separator_from_infeasibility(const SemiStochasticModel& model, std::size_t t,
                                       std::span<const double> xi_t, std::span<const double> y,
                                       std::span<const double> farkas) {
  return separator_from_infeasibility(model.stage(t, xi_t), y, farkas);
}

Membership membership_or_separator(const SemiStochasticModel& model, std::span<const double> y) {
  const auto& Y = model.Y();
  if (y.size() != model.dim()) throw DimensionMismatch("membership: y dimension");
  Vec h = Y.d;
  for (std::size_t i = 0; i < Y.rows(); ++i) h[i] -= dot(Y.A.row(i), y);
  auto res = lp_feasible_folded(Y.C, h);
  if (std::holds_alternative<LpFeasible>(res)) return InY{};
  const auto& lambda = std::get<LpInfeasible>(res).row_multipliers;
  const Vec g = matvec_transposed(Y.A, lambda);
  if (norm2(g) <= 1e-12) throw ModelContractViolation("certificate does not involve y: Y is empty");
  return normalize_separator(g, dot(lambda, Y.d));
}

std::optional<StageInfeasible> first_infeasible_stage(const SemiStochasticModel& model, const Scenario& scenario,
                                                      std::span<const double> y) {
  for (std::size_t t = 1; t <= model.stages(); ++t) {
    auto res = stage_feasible(model, t, scenario.stage(t), y);
    if (auto* bad = std::get_if<StageInfeasible>(&res)) return std::move(*bad);
  }
  return std::nullopt;
}

double epsilon_hat(const SemiStochasticModel& model, std::span<const double> y, std::size_t n_samples,
                   std::uint64_t seed, unsigned threads) {
  if (n_samples == 0) throw DimensionMismatch("epsilon_hat: n_samples must be positive");
  if (!std::holds_alternative<InY>(membership_or_separator(model, y))) return 1.0;
  std::vector<char> failed(n_samples, 0);
  parallel_for(n_samples, threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, StreamTag::Estimate, 0, i));
    const Scenario s = model.sample(rng);
    failed[i] = first_infeasible_stage(model, s, y).has_value() ? 1 : 0;
  });
  std::size_t count = 0;
  for (char f : failed) count += static_cast<std::size_t>(f);
  return static_cast<double>(count) / static_cast<double>(n_samples);
}

}  // namespace ssdm
