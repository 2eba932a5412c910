#include "ssdm/bisection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ssdm/errors.hpp"
#include "ssdm/lp.hpp"

namespace ssdm {

void BisectionConfig::validate(std::size_t n) const {
  if (objective.size() != n) throw DimensionMismatch("bisection: objective has the wrong dimension");
  if (!all_finite(objective) || !(norm2(objective) > 0.0)) {
    throw std::invalid_argument("bisection: objective must be finite and nonzero");
  }
  if (!(tolerance > 0.0)) throw std::invalid_argument("bisection: tolerance must be positive");
  if (!(stability > 0.0)) throw std::invalid_argument("bisection: stability must be positive");
  if (step_budget && *step_budget < 1) throw std::invalid_argument("bisection: step budget must be positive");
  oracle.validate();
}

const char* to_string(StepOutcome o) noexcept {
  switch (o) {
    case StepOutcome::Candidate: return "A";
    case StepOutcome::Infeasible: return "B";
    case StepOutcome::Exhausted: return "C";
  }
  return "?";
}

std::pair<double, double> objective_range(const SemiStochasticModel& model, std::span<const double> f) {
  const auto& Y = model.Y();
  const std::size_t n = Y.dim();
  const std::size_t m = Y.aux_dim();
  if (f.size() != n) throw DimensionMismatch("objective_range: objective dimension");
  LinearProgram lp;
  lp.G = Mat(Y.rows(), n + m);
  for (std::size_t i = 0; i < Y.rows(); ++i) {
    for (std::size_t j = 0; j < n; ++j) lp.G(i, j) = Y.A(i, j);
    for (std::size_t j = 0; j < m; ++j) lp.G(i, n + j) = Y.C(i, j);
  }
  lp.h = Y.d;
  double ends[2];
  for (int side = 0; side < 2; ++side) {
    const double sgn = side == 0 ? 1.0 : -1.0;
    lp.c.assign(n + m, 0.0);
    for (std::size_t j = 0; j < n; ++j) lp.c[j] = sgn * f[j];
    auto out = solve_lp(lp);
    if (std::holds_alternative<LpUnbounded>(out)) throw UnboundedObjective("objective is unbounded over Y");
    if (std::holds_alternative<LpInfeasible>(out)) throw BadInstance("Y is empty");
    ends[side] = sgn * std::get<LpOptimal>(out).value;
  }
  return {ends[0], std::max(ends[0], ends[1])};
}

std::size_t bisection_steps(double width, double tolerance) {
  if (!(width > 0.0) || !(tolerance > 0.0)) throw std::invalid_argument("bisection_steps: width and tolerance must be positive");
  return strict_ceiling(std::log2(width / tolerance));
}

BisectionOutcome minimize(const SemiStochasticModel& model, const BisectionConfig& config) {
  const std::size_t n = model.dim();
  config.validate(n);
  auto [lo, hi] = objective_range(model, config.objective);
  if (!(hi > lo)) throw std::invalid_argument("bisection: objective is constant over Y");
  const std::size_t L = bisection_steps(hi - lo, config.tolerance);

  const Ball ball = model.ball();
  std::size_t budget;
  if (config.step_budget) {
    budget = *config.step_budget;
  } else if (config.engine == EngineKind::BundleLevel) {
    budget = bl_budget(ball.radius, config.stability);
  } else {
    budget = ellipsoid_budget(n, ball.radius, config.stability);
  }

  BisectionOutcome out;
  out.result = Failed{};
  OracleState state(config.oracle.seed);
  for (std::size_t k = 1; k <= L; ++k) {
    const double target = 0.5 * (lo + hi);
    const SemiStochasticModel step_model = model.with_Y(model.Y().with_row(config.objective, target));
    SamplingOracle oracle(step_model, config.oracle, state);
    EngineResult run = config.engine == EngineKind::BundleLevel ? run_bl(oracle, ball, budget)
                                                                : run_ellipsoid(oracle, ball, config.stability, budget);
    BisectionStep step;
    step.k = k;
    step.target = target;
    step.lo = lo;
    step.hi = hi;
    step.calls = state.s - 1;
    step.iterations = std::move(run.log);
    out.samples += run.samples;
    if (auto* c = std::get_if<Candidate>(&run.outcome)) {
      step.outcome = StepOutcome::Candidate;
      out.result = Solved{std::move(c->y), target};
      hi = target;
    } else {
      step.outcome = std::holds_alternative<InfeasibleCertificate>(run.outcome) ? StepOutcome::Infeasible
                                                                                : StepOutcome::Exhausted;
      lo = target;
    }
    out.steps.push_back(std::move(step));
  }
  out.calls = state.s - 1;
  return out;
}

}  // namespace ssdm
