#include "doctest.h"

#include <cmath>
#include <random>

#include "inventory_fixtures.hpp"
#include "ssdm/errors.hpp"
#include "ssdm/inventory.hpp"
#include "ssdm/remodeling.hpp"
#include "toy_models.hpp"

using namespace ssdm;

namespace {

// Needs y >= xi, xi in {1, 2}; Y = [-3, 3]; the decision is fixed after xi.
BlockModel lower_bound_model() {
  BlockModel bm;
  bm.n = 1;
  bm.stages = 1;
  bm.blocks = {{}, {0}};
  bm.Y = toy::box_rep({-3.0}, {3.0});
  bm.builder = [](std::size_t, std::span<const double> xi) {
    return StagePolyhedron{Mat::from_rows({{-1.0}}), Mat(1, 0), Mat(1, 0), {-xi[0]}};
  };
  bm.sampler = [](Rng& rng) { return Scenario{{Vec{rng.uniform01() < 0.5 ? 1.0 : 2.0}}}; };
  bm.xi_dims = {1};
  bm.box_lo = {-3.0};
  bm.box_hi = {3.0};
  return bm;
}

Scenario lifted_scenario(Scenario sc) {
  sc.stages.push_back(sc.stages.back());
  return sc;
}

bool feasible_on(const SemiStochasticModel& model, std::span<const double> y, const Scenario& sc) {
  return std::holds_alternative<InY>(membership_or_separator(model, y)) && !first_infeasible_stage(model, sc, y);
}

// Rule values of y(xi) must lie in Y and pass every original stage.
bool rule_feasible_on(const BlockModel& bm, const Vec& y, const Scenario& sc) {
  return feasible_on(bm.as_model(), y, sc);
}

InventoryInstance small_inventory() {
  auto inst = fixtures::single_product(3, 1.5);
  inst.ratio_lo = 0.7;
  inst.ratio_hi = 1.3;
  inst.nominal[1].holding_cost = {0.1};
  inst.nominal[2].backlog_penalty = {1.0};
  return inst;
}

DecisionBasis demand_basis(const BlockModel& bm, const InventoryInstance& inst) {
  DecisionBasis basis = constant_basis(bm);
  const std::size_t per_stage = stage_data_size(inst);
  for (std::size_t t = 1; t <= inst.stages; ++t) {
    for (std::size_t i = 0; i < inst.products; ++i) basis[t].xi_indices.push_back((t - 1) * per_stage + i);
  }
  return basis;
}

Vec random_in(std::mt19937_64& gen, const ChiBox& box) {
  Vec v(box.lo.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = std::uniform_real_distribution<double>(box.lo[j], box.hi[j])(gen);
  return v;
}

}  // namespace

TEST_CASE("affine rule beats every constant decision on the two-scenario toy") {
  const BlockModel bm = lower_bound_model();
  DecisionBasis basis = constant_basis(bm);
  basis[1].xi_indices = {0};
  const ChiBox box = default_chi_box(bm, basis);
  const auto lifted = lift(bm, basis, box);
  REQUIRE(lifted.dim() == 2);
  REQUIRE(lifted.stages() == 2);

  const Scenario low{{Vec{1.0}}}, high{{Vec{2.0}}};
  // y(xi) = xi: feasible on both, coefficient norm 1.
  const Vec rule{0.0, 1.0};
  CHECK(feasible_on(lifted, rule, lifted_scenario(low)));
  CHECK(feasible_on(lifted, rule, lifted_scenario(high)));
  CHECK(materialize(bm, basis, rule, low)[0] == doctest::Approx(1.0));
  // The cheapest constant needs y = 2 (norm 2); anything below fails the high scenario.
  const auto plain = bm.as_model();
  CHECK(feasible_on(plain, Vec{2.0}, high));
  CHECK_FALSE(feasible_on(plain, Vec{1.99}, high));
  CHECK(norm2(rule) < 2.0);
  // The rule is not an embedded constant.
  CHECK(rule != embed_constant(bm, basis, Vec{1.0}));
}

TEST_CASE("embedded constant decisions keep their feasibility") {
  const auto inst = small_inventory();
  const BlockModel bm = inventory_block_model(inst);
  const auto plain = bm.as_model();
  std::mt19937_64 gen(3);
  Rng rng(11);
  for (const bool affine : {false, true}) {
    const DecisionBasis basis = affine ? demand_basis(bm, inst) : constant_basis(bm);
    const auto lifted = lift(bm, basis, default_chi_box(bm, basis));
    int feasible = 0;
    for (int k = 0; k < 60; ++k) {
      Vec y = k == 0 ? fixtures::pinned_decision(inst) : Vec(bm.n);
      if (k > 0) {
        for (std::size_t j = 0; j < bm.n; ++j) {
          y[j] = std::uniform_real_distribution<double>(bm.box_lo[j], bm.box_hi[j])(gen);
        }
      }
      const Vec chi = embed_constant(bm, basis, y);
      const Scenario sc = sample_scenario(inst, rng);
      const bool orig = feasible_on(plain, y, sc);
      CHECK(orig == feasible_on(lifted, chi, lifted_scenario(sc)));
      CHECK(materialize(bm, basis, chi, sc) == y);
      feasible += orig;
    }
    CHECK(feasible >= 1);
  }
}

TEST_CASE("lifted feasibility matches feasibility of the rule's decision") {
  const auto inst = small_inventory();
  const BlockModel bm = inventory_block_model(inst);
  const DecisionBasis basis = demand_basis(bm, inst);
  const ChiBox box = default_chi_box(bm, basis, 2.0);
  const auto lifted = lift(bm, basis, box);
  std::mt19937_64 gen(5);
  Rng rng(17);
  const Vec pinned = embed_constant(bm, basis, fixtures::pinned_decision(inst));
  int feasible = 0, infeasible = 0;
  for (int k = 0; k < 200; ++k) {
    // Convex mix of a random coefficient vector and the pinned decision, so both answers occur.
    Vec chi = random_in(gen, box);
    const double w = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
    for (std::size_t j = 0; j < chi.size(); ++j) chi[j] = w * chi[j] + (1.0 - w) * pinned[j];
    REQUIRE(std::holds_alternative<InY>(membership_or_separator(lifted, chi)));
    const Scenario sc = sample_scenario(inst, rng);
    const bool a = !first_infeasible_stage(lifted, lifted_scenario(sc), chi);
    const bool b = rule_feasible_on(bm, materialize(bm, basis, chi, sc), sc);
    CHECK(a == b);
    (a ? feasible : infeasible) += 1;
  }
  CHECK(feasible > 0);
  CHECK(infeasible > 0);
}

TEST_CASE("lifted stage rows are the original rows at the rule's decision") {
  const auto inst = small_inventory();
  const BlockModel bm = inventory_block_model(inst);
  const DecisionBasis basis = demand_basis(bm, inst);
  const ChiBox box = default_chi_box(bm, basis);
  const auto lifted = lift(bm, basis, box);
  std::mt19937_64 gen(9);
  Rng rng(23);
  for (int k = 0; k < 20; ++k) {
    const Vec chi = random_in(gen, box);
    const Scenario sc = lifted_scenario(sample_scenario(inst, rng));
    const Vec y = materialize(bm, basis, chi, sc);
    for (std::size_t t = 1; t <= lifted.stages(); ++t) {
      const auto Pl = lifted.stage(t, sc.stage(t));
      const Mat& A = t <= bm.stages ? bm.builder(t, sc.stage(t)).A : bm.Y.A;
      const Vec lhs = matvec(Pl.A, chi), rhs = matvec(A, y);
      REQUIRE(lhs.size() == rhs.size());
      for (std::size_t r = 0; r < lhs.size(); ++r) CHECK(lhs[r] == doctest::Approx(rhs[r]).epsilon(1e-12));
    }
  }
}

TEST_CASE("rules only see data revealed so far") {
  const auto inst = small_inventory();
  const BlockModel bm = inventory_block_model(inst);
  const DecisionBasis basis = demand_basis(bm, inst);
  const ChiBox box = default_chi_box(bm, basis);
  std::mt19937_64 gen(13);
  Rng rng(29);
  const std::size_t per_stage = stage_data_size(inst);
  for (int k = 0; k < 20; ++k) {
    const Vec chi = random_in(gen, box);
    const Scenario a = sample_scenario(inst, rng);
    const Scenario b = sample_scenario(inst, rng);
    for (std::size_t t = 1; t <= inst.stages; ++t) {
      // Scenario sharing the first t stages of a, then following b.
      Scenario mix = b;
      for (std::size_t u = 1; u <= mix.size(); ++u) {
        for (std::size_t j = 0; j < std::min(t, u) * per_stage; ++j) mix.stages[u - 1][j] = a.stage(u)[j];
      }
      const Vec ya = materialize(bm, basis, chi, a), ym = materialize(bm, basis, chi, mix);
      for (std::size_t s = 0; s <= t; ++s) {
        for (std::size_t j : bm.blocks[s]) CHECK(ya[j] == ym[j]);
      }
    }
  }
}

TEST_CASE("remodeling rejects malformed bases and boxes") {
  BlockModel bm = lower_bound_model();
  DecisionBasis basis = constant_basis(bm);
  basis[0].xi_indices = {0};
  CHECK_THROWS_AS(coefficient_layout(bm, basis), BasisDimensionMismatch);
  basis = constant_basis(bm);
  basis[1].xi_indices = {1};
  CHECK_THROWS_AS(coefficient_layout(bm, basis), BasisDimensionMismatch);
  CHECK_THROWS_AS(lift(bm, basis, ChiBox{}), BasisDimensionMismatch);
  basis = constant_basis(bm);
  CHECK_THROWS_AS(lift(bm, basis, ChiBox{}), UnboundedChi);
  CHECK_THROWS_AS(lift(bm, basis, ChiBox{{-INFINITY}, {1.0}}), UnboundedChi);

  basis[1].custom_count = 2;
  basis[1].custom = [](std::span<const double> xi) { return Vec{xi[0]}; };
  const auto lifted = lift(bm, basis, default_chi_box(bm, basis));
  Rng rng(1);
  const Scenario sc = lifted_scenario(bm.sampler(rng));
  CHECK_THROWS_AS(lifted.stage(1, sc.stage(1)), BasisDimensionMismatch);

  // A stage that touches a block fixed after it.
  BlockModel late = lower_bound_model();
  late.n = 2;
  late.blocks = {{}, {0, 1}};
  late.Y = toy::box_rep({-3.0, -3.0}, {3.0, 3.0});
  late.box_lo = {-3.0, -3.0};
  late.box_hi = {3.0, 3.0};
  late.stages = 1;
  late.blocks = {{0}, {1}};
  late.builder = [](std::size_t, std::span<const double> xi) {
    return StagePolyhedron{Mat::from_rows({{0.0, -1.0}}), Mat(1, 0), Mat(1, 0), {-xi[0]}};
  };
  DecisionBasis lb = constant_basis(late);
  auto lm = lift(late, lb, default_chi_box(late, lb));
  CHECK_NOTHROW(lm.stage(1, Vec{1.0}));

  late.stages = 2;
  late.blocks = {{}, {0}, {1}};
  late.xi_dims = {1, 1};
  late.sampler = [](Rng&) { return Scenario{{Vec{1.0}, Vec{1.0}}}; };
  lb = constant_basis(late);
  lm = lift(late, lb, default_chi_box(late, lb));
  CHECK_THROWS_AS(lm.stage(1, Vec{1.0}), ModelContractViolation);

  BlockModel overlap = lower_bound_model();
  overlap.blocks = {{0}, {0}};
  CHECK_THROWS_AS(overlap.validate(), DimensionMismatch);
}
