#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "toy_models.hpp"
#include "ssdm/bisection.hpp"
#include "ssdm/errors.hpp"

using namespace ssdm;

namespace {

// Y_* = {y in [0, 1] : y >= a}
SemiStochasticModel cutoff_model(double a) { return toy::cut_model({0.0}, {1.0}, {{-1.0}}, {-a}); }

}  // namespace

TEST_CASE("objective_range examples") {
  auto square = toy::cut_model({0.0, 0.0}, {1.0, 1.0}, {{1.0, 0.0}}, {5.0});
  auto [lo, hi] = objective_range(square, Vec{1.0, 1.0});
  CHECK(lo == doctest::Approx(0.0));
  CHECK(hi == doctest::Approx(2.0));

  auto point = toy::cut_model({0.3, 0.3}, {0.3, 0.3}, {{1.0, 0.0}}, {5.0});
  auto [plo, phi] = objective_range(point, Vec{1.0, -2.0});
  CHECK(plo == doctest::Approx(-0.3));
  CHECK(phi == doctest::Approx(-0.3));

  // cross-polytope {|y1| + |y2| <= 1} through y = sum of signed parts w
  PolyhedralRep cross{Mat(0, 2), Mat(0, 2), {}};
  std::vector<Vec> rows;
  Vec d;
  for (int i = 0; i < 2; ++i) {
    Vec r(4, 0.0);
    r[i] = 1.0;
    r[2 + i] = -1.0;
    rows.push_back(r);  // y_i <= w_i
    d.push_back(0.0);
    r[i] = -1.0;
    rows.push_back(r);  // -y_i <= w_i
    d.push_back(0.0);
  }
  rows.push_back({0.0, 0.0, 1.0, 1.0});
  d.push_back(1.0);
  Mat full = Mat::from_rows(rows, 4);
  cross.A = Mat(rows.size(), 2);
  cross.C = Mat(rows.size(), 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      cross.A(i, j) = full(i, j);
      cross.C(i, j) = full(i, 2 + j);
    }
  }
  cross.d = d;
  auto model = square.with_Y(cross);
  auto [clo, chi] = objective_range(model, Vec{1.0, 0.0});
  CHECK(clo == doctest::Approx(-1.0));
  CHECK(chi == doctest::Approx(1.0));

  PolyhedralRep half{Mat::from_rows({{1.0, 0.0}}), Mat(1, 0), {1.0}};
  CHECK_THROWS_AS(objective_range(square.with_Y(half), Vec{1.0, 0.0}), UnboundedObjective);
}

TEST_CASE("step count") {
  CHECK(bisection_steps(2.0, 0.25) == 4);
  CHECK(bisection_steps(40.0, 0.05) == 10);
  CHECK(bisection_steps(1.0, 0.3) == 2);
  CHECK_THROWS_AS(bisection_steps(0.0, 0.1), std::invalid_argument);
}

TEST_CASE("one-dimensional toy reaches the analytic optimum") {
  auto model = cutoff_model(0.5);
  BisectionConfig cfg;
  cfg.objective = {1.0};
  cfg.tolerance = 0.01;
  cfg.stability = 0.001;
  for (EngineKind engine : {EngineKind::BundleLevel, EngineKind::Ellipsoid}) {
    cfg.engine = engine;
    auto out = minimize(model, cfg);
    REQUIRE(std::holds_alternative<Solved>(out.result));
    const auto& s = std::get<Solved>(out.result);
    CHECK(s.y[0] >= 0.5 - 1e-9);
    CHECK(s.y[0] <= 0.5 + cfg.tolerance);
    CHECK(s.y[0] <= s.bound + 1e-8);
    CHECK(out.steps.size() == bisection_steps(1.0, cfg.tolerance));
  }
}

TEST_CASE("localizer halves and certificates hold") {
  std::mt19937_64 gen(5);
  std::vector<Vec> g;
  Vec beta;
  toy::tangent_cuts(Vec{0.1, -0.2}, 0.3, 4, gen, g, beta);
  auto model = toy::cut_model({-1.0, -1.0}, {1.0, 1.0}, g, beta);
  BisectionConfig cfg;
  cfg.objective = {1.0, 2.0};
  cfg.tolerance = 0.02;
  cfg.stability = 0.05;
  auto out = minimize(model, cfg);
  const double width0 = out.steps.front().hi - out.steps.front().lo;
  CHECK(width0 == doctest::Approx(6.0));
  double best = std::numeric_limits<double>::infinity();
  std::size_t prev_calls = 0;
  for (const auto& st : out.steps) {
    CHECK(st.hi - st.lo == doctest::Approx(std::ldexp(width0, 1 - static_cast<int>(st.k))).epsilon(1e-12));
    CHECK(st.target == 0.5 * (st.lo + st.hi));
    CHECK(st.calls > prev_calls);
    prev_calls = st.calls;
    if (st.outcome == StepOutcome::Candidate) best = std::min(best, st.target);
  }
  REQUIRE(std::holds_alternative<Solved>(out.result));
  const auto& s = std::get<Solved>(out.result);
  CHECK(s.bound == best);
  CHECK(dot(cfg.objective, s.y) <= s.bound + 1e-8);
  for (std::size_t r = 0; r < g.size(); ++r) CHECK(dot(g[r], s.y) <= beta[r] + 1e-7);
  CHECK(out.calls == out.steps.back().calls);
}

TEST_CASE("empty implementable set fails every step") {
  // two stages that contradict each other
  auto model = toy::cut_model({-1.0}, {1.0}, {{-1.0}, {1.0}}, {-0.5, -0.5}, true);
  BisectionConfig cfg;
  cfg.objective = {1.0};
  cfg.tolerance = 0.1;
  cfg.stability = 0.1;
  auto out = minimize(model, cfg);
  CHECK(std::holds_alternative<Failed>(out.result));
  CHECK(out.steps.size() == 5);
  for (const auto& st : out.steps) CHECK(st.outcome != StepOutcome::Candidate);
}

TEST_CASE("statistical guarantee on cutoff instances") {
  // Y_* cut by {c y <= s} has inscribed radius (s - s_min)/(2|c|), so the
  // smallest level with radius >= rho is s_min + 2 rho |c|.
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> ua(0.2, 0.7), uc(0.5, 2.0);
  const double rho = 0.02;
  const double tol = 0.05;
  int ok = 0;
  const int runs = 50;
  for (int r = 0; r < runs; ++r) {
    const double a = ua(gen);
    const double c = uc(gen);
    auto model = cutoff_model(a);
    BisectionConfig cfg;
    cfg.objective = {c};
    cfg.tolerance = tol;
    cfg.stability = rho;
    cfg.oracle.delta = 0.1;
    cfg.oracle.seed = static_cast<std::uint64_t>(r + 1);
    auto out = minimize(model, cfg);
    if (const auto* s = std::get_if<Solved>(&out.result)) {
      const double s_star = c * a + 2.0 * rho * c;
      if (c * s->y[0] <= s_star + tol) ++ok;
    }
  }
  CHECK(ok >= 45);
}

TEST_CASE("config validation") {
  auto model = cutoff_model(0.5);
  BisectionConfig cfg;
  cfg.objective = {0.0};
  CHECK_THROWS_AS(minimize(model, cfg), std::invalid_argument);
  cfg.objective = {1.0, 1.0};
  CHECK_THROWS_AS(minimize(model, cfg), DimensionMismatch);
  cfg.objective = {1.0};
  cfg.tolerance = 0.0;
  CHECK_THROWS_AS(minimize(model, cfg), std::invalid_argument);
}
