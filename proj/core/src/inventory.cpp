#include "ssdm/inventory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ssdm/errors.hpp"
#include "ssdm/lp.hpp"

namespace ssdm {

namespace {

void check_len(const Vec& v, std::size_t d, const char* what) {
  if (v.size() != d) throw BadInstance(std::string("inventory: wrong length of ") + what);
  if (!all_finite(v)) throw BadInstance(std::string("inventory: non-finite entry in ") + what);
}

void check_nonneg(const Vec& v, const char* what) {
  for (double x : v) {
    if (x < 0.0) throw BadInstance(std::string("inventory: negative entry in ") + what);
  }
}

double budget_top(const InventoryInstance& inst, std::size_t t) {
  return std::min(inst.budget_hi[t - 1], inst.cost_cap[t - 1]);
}

// Writes the rows of one stage (balance, order box, epigraph, budget) into P
// starting at row r. Order and epigraph columns are placed at x_off and w_off.
// Returns the next free row.
std::size_t emit_stage_rows(const InventoryInstance& inst, const InventoryLayout& L, std::size_t t,
                            const StageData& eta, StagePolyhedron& P, std::size_t r, std::size_t x_off,
                            std::size_t w_off) {
  const std::size_t d = L.d;
  const std::size_t up = w_off;      // upper-band positive part
  const std::size_t lm = w_off + d;  // lower-band negative part
  for (std::size_t i = 0; i < d; ++i) {
    // lower_{t-1} + x - demand >= lower_t
    P.A(r, L.lower(t) + i) = 1.0;
    P.B(r, x_off + i) = -1.0;
    P.d[r] = -eta.demand[i];
    if (t > 1) P.A(r, L.lower(t - 1) + i) = -1.0;
    else P.d[r] += inst.z0[i];
    ++r;
    // upper_{t-1} + x - demand <= upper_t
    P.A(r, L.upper(t) + i) = -1.0;
    P.B(r, x_off + i) = 1.0;
    P.d[r] = eta.demand[i];
    if (t > 1) P.A(r, L.upper(t - 1) + i) = 1.0;
    else P.d[r] -= inst.z0[i];
    ++r;
    P.B(r, x_off + i) = 1.0;
    P.d[r++] = inst.x_hi[t - 1][i];
    P.B(r, x_off + i) = -1.0;
    P.d[r++] = -inst.x_lo[t - 1][i];
    P.A(r, L.upper(t) + i) = 1.0;
    P.C(r++, up + i) = -1.0;
    P.C(r++, up + i) = -1.0;
    P.A(r, L.lower(t) + i) = -1.0;
    P.C(r++, lm + i) = -1.0;
    P.C(r++, lm + i) = -1.0;
  }
  // stage budget
  for (std::size_t i = 0; i < d; ++i) {
    P.B(r, x_off + i) = eta.order_cost[i];
    P.C(r, up + i) = eta.holding_cost[i];
    P.C(r, lm + i) = eta.backlog_penalty[i];
  }
  P.A(r, L.budget(t)) = -1.0;
  P.d[r] = dot(eta.revenue, eta.demand);
  return r + 1;
}

constexpr std::size_t kRowsPerProduct = 8;

}  // namespace

void InventoryInstance::validate() const {
  const std::size_t d = products;
  const std::size_t K = stages;
  if (d == 0 || K == 0) throw BadInstance("inventory: need at least one product and one stage");
  check_len(z0, d, "z0");
  if (z_lo.size() != K || z_hi.size() != K || x_lo.size() != K || x_hi.size() != K || nominal.size() != K) {
    throw BadInstance("inventory: per-stage lists must have one entry per stage");
  }
  for (std::size_t t = 0; t < K; ++t) {
    check_len(z_lo[t], d, "z_lo");
    check_len(z_hi[t], d, "z_hi");
    check_len(x_lo[t], d, "x_lo");
    check_len(x_hi[t], d, "x_hi");
    for (std::size_t i = 0; i < d; ++i) {
      if (z_lo[t][i] > z_hi[t][i]) throw BadInstance("inventory: level bounds out of order");
      if (x_lo[t][i] > x_hi[t][i]) throw BadInstance("inventory: order bounds out of order");
    }
    const auto& n = nominal[t];
    check_len(n.demand, d, "demand");
    check_len(n.order_cost, d, "order_cost");
    check_len(n.holding_cost, d, "holding_cost");
    check_len(n.backlog_penalty, d, "backlog_penalty");
    check_len(n.revenue, d, "revenue");
    for (double v : n.demand) {
      if (!(v > 0.0)) throw BadInstance("inventory: nominal demands must be positive");
    }
    check_nonneg(n.order_cost, "order_cost");
    check_nonneg(n.holding_cost, "holding_cost");
    check_nonneg(n.backlog_penalty, "backlog_penalty");
    check_nonneg(n.revenue, "revenue");
  }
  check_len(storage, d, "storage");
  check_nonneg(storage, "storage");
  if (!std::isfinite(capacity) || capacity < 0.0) throw BadInstance("inventory: capacity must be nonnegative");
  check_len(cost_cap, K, "cost_cap");
  check_len(budget_lo, K, "budget_lo");
  check_len(budget_hi, K, "budget_hi");
  for (std::size_t t = 0; t < K; ++t) {
    if (budget_lo[t] > std::min(budget_hi[t], cost_cap[t])) throw BadInstance("inventory: stage budget range is empty");
  }
  if (!std::isfinite(total_lo) || !std::isfinite(total_hi) || total_lo > total_hi) {
    throw BadInstance("inventory: total budget range is empty");
  }
  if (!(ratio_lo >= 0.0) || !(ratio_lo <= ratio_hi) || !std::isfinite(ratio_hi)) {
    throw BadInstance("inventory: uncertainty ratios must satisfy 0 <= lo <= hi");
  }
}

InventoryLayout layout_of(const InventoryInstance& inst) { return {inst.products, inst.stages}; }

std::size_t stage_data_size(const InventoryInstance& inst) { return 5 * inst.products; }

StageData unpack_stage(const InventoryInstance& inst, std::span<const double> block) {
  const std::size_t d = inst.products;
  if (block.size() != 5 * d) throw DimensionMismatch("unpack_stage: block size");
  auto part = [&](std::size_t k) { return Vec(block.begin() + k * d, block.begin() + (k + 1) * d); };
  return StageData{part(0), part(1), part(2), part(3), part(4)};
}

StagePolyhedron inventory_stage(const InventoryInstance& inst, std::size_t t, std::span<const double> xi_t) {
  const auto L = layout_of(inst);
  const std::size_t d = L.d;
  const std::size_t K = L.K;
  const std::size_t block = stage_data_size(inst);
  if (t < 1 || t > K + 1) throw std::out_of_range("inventory_stage: stage index");
  const std::size_t blocks = std::min(t, K);
  if (xi_t.size() != blocks * block) throw DimensionMismatch("inventory_stage: data prefix size");
  const std::size_t n = L.dim();

  if (t <= K) {
    const std::size_t rows = kRowsPerProduct * d + 1;
    StagePolyhedron P{Mat(rows, n), Mat(rows, d), Mat(rows, 2 * d), Vec(rows, 0.0)};
    const StageData eta = unpack_stage(inst, xi_t.subspan((t - 1) * block, block));
    emit_stage_rows(inst, L, t, eta, P, 0, 0, 0);
    return P;
  }

  const std::size_t rows = K * (kRowsPerProduct * d + 1) + 1;
  StagePolyhedron P{Mat(rows, n), Mat(rows, d * K), Mat(rows, 2 * d * K), Vec(rows, 0.0)};
  std::size_t r = 0;
  std::vector<StageData> etas;
  for (std::size_t s = 1; s <= K; ++s) {
    etas.push_back(unpack_stage(inst, xi_t.subspan((s - 1) * block, block)));
    r = emit_stage_rows(inst, L, s, etas.back(), P, r, (s - 1) * d, (s - 1) * 2 * d);
  }
  // total-cost row
  for (std::size_t s = 1; s <= K; ++s) {
    const auto& eta = etas[s - 1];
    for (std::size_t i = 0; i < d; ++i) {
      P.B(r, (s - 1) * d + i) = eta.order_cost[i];
      P.C(r, (s - 1) * 2 * d + i) = eta.holding_cost[i];
      P.C(r, (s - 1) * 2 * d + d + i) = eta.backlog_penalty[i];
    }
    P.d[r] += dot(eta.revenue, eta.demand);
  }
  P.A(r, L.total()) = -1.0;
  return P;
}

PolyhedralRep inventory_Y(const InventoryInstance& inst) {
  const auto L = layout_of(inst);
  const std::size_t d = L.d;
  const std::size_t K = L.K;
  const std::size_t n = L.dim();
  const std::size_t rows = K * (5 * d + 3) + 2;
  PolyhedralRep Y{Mat(rows, n), Mat(rows, d * K), Vec(rows, 0.0)};
  std::size_t r = 0;
  for (std::size_t t = 1; t <= K; ++t) {
    const std::size_t v = (t - 1) * d;  // positive part of the upper band
    for (std::size_t i = 0; i < d; ++i) {
      Y.A(r, L.lower(t) + i) = -1.0;
      Y.d[r++] = -inst.z_lo[t - 1][i];
      Y.A(r, L.lower(t) + i) = 1.0;
      Y.A(r++, L.upper(t) + i) = -1.0;
      Y.A(r, L.upper(t) + i) = 1.0;
      Y.d[r++] = inst.z_hi[t - 1][i];
      Y.A(r, L.upper(t) + i) = 1.0;
      Y.C(r++, v + i) = -1.0;
      Y.C(r++, v + i) = -1.0;
    }
    for (std::size_t i = 0; i < d; ++i) Y.C(r, v + i) = inst.storage[i];
    Y.d[r++] = inst.capacity;
    Y.A(r, L.budget(t)) = 1.0;
    Y.d[r++] = budget_top(inst, t);
    Y.A(r, L.budget(t)) = -1.0;
    Y.d[r++] = -inst.budget_lo[t - 1];
  }
  Y.A(r, L.total()) = 1.0;
  Y.d[r++] = inst.total_hi;
  Y.A(r, L.total()) = -1.0;
  Y.d[r++] = -inst.total_lo;
  return Y;
}

SemiStochasticModel build_model(const InventoryInstance& inst) {
  inst.validate();
  const auto L = layout_of(inst);
  Vec lo(L.dim()), hi(L.dim());
  for (std::size_t t = 1; t <= L.K; ++t) {
    for (std::size_t i = 0; i < L.d; ++i) {
      lo[L.lower(t) + i] = lo[L.upper(t) + i] = inst.z_lo[t - 1][i];
      hi[L.lower(t) + i] = hi[L.upper(t) + i] = inst.z_hi[t - 1][i];
    }
    lo[L.budget(t)] = inst.budget_lo[t - 1];
    hi[L.budget(t)] = budget_top(inst, t);
  }
  lo[L.total()] = inst.total_lo;
  hi[L.total()] = inst.total_hi;
  auto builder = [inst](std::size_t t, std::span<const double> xi) { return inventory_stage(inst, t, xi); };
  auto sampler = [inst](Rng& rng) { return sample_scenario(inst, rng); };
  return SemiStochasticModel(L.dim(), L.K + 1, inventory_Y(inst), builder, sampler, lo, hi);
}

namespace {

Scenario assemble(const std::vector<Vec>& blocks) {
  Scenario sc;
  Vec prefix;
  for (const auto& b : blocks) {
    prefix.insert(prefix.end(), b.begin(), b.end());
    sc.stages.push_back(prefix);
  }
  sc.stages.push_back(prefix);
  return sc;
}

Vec flatten(const StageData& s) {
  Vec out;
  for (const Vec* v : {&s.demand, &s.order_cost, &s.holding_cost, &s.backlog_penalty, &s.revenue}) {
    out.insert(out.end(), v->begin(), v->end());
  }
  return out;
}

}  // namespace

Scenario sample_scenario(const InventoryInstance& inst, Rng& rng) {
  std::vector<Vec> blocks;
  for (const auto& nom : inst.nominal) {
    Vec b = flatten(nom);
    for (auto& v : b) v = rng.uniform(inst.ratio_lo * v, inst.ratio_hi * v);
    blocks.push_back(std::move(b));
  }
  return assemble(blocks);
}

Scenario nominal_scenario(const InventoryInstance& inst) {
  std::vector<Vec> blocks;
  for (const auto& nom : inst.nominal) blocks.push_back(flatten(nom));
  return assemble(blocks);
}

PolicyRun greedy_local_policy(const InventoryInstance& inst, std::span<const double> y, const Scenario& scenario) {
  const auto L = layout_of(inst);
  const std::size_t d = L.d;
  if (y.size() != L.dim()) throw DimensionMismatch("greedy_local_policy: decision dimension");
  if (scenario.size() < L.K) throw DimensionMismatch("greedy_local_policy: scenario too short");
  const std::size_t block = stage_data_size(inst);
  PolicyRun run;
  Vec z = inst.z0;
  for (std::size_t t = 1; t <= L.K; ++t) {
    const auto& xi = scenario.stage(t);
    const StageData eta = unpack_stage(inst, std::span<const double>(xi).subspan((t - 1) * block, block));
    const StagePolyhedron P = inventory_stage(inst, t, xi);
    LinearProgram lp;
    lp.G = Mat(P.rows(), 3 * d);
    for (std::size_t r = 0; r < P.rows(); ++r) {
      for (std::size_t j = 0; j < d; ++j) lp.G(r, j) = P.B(r, j);
      for (std::size_t j = 0; j < 2 * d; ++j) lp.G(r, d + j) = P.C(r, j);
    }
    lp.h = P.d;
    const Vec Ay = matvec(P.A, y);
    for (std::size_t r = 0; r < P.rows(); ++r) lp.h[r] -= Ay[r];
    lp.c = eta.order_cost;
    lp.c.insert(lp.c.end(), eta.holding_cost.begin(), eta.holding_cost.end());
    lp.c.insert(lp.c.end(), eta.backlog_penalty.begin(), eta.backlog_penalty.end());
    auto out = solve_lp(lp);
    if (std::holds_alternative<LpInfeasible>(out)) {
      run.feasible = false;
      run.failed_stage = t;
      return run;
    }
    if (std::holds_alternative<LpUnbounded>(out)) throw NumericalFailure("greedy_local_policy: unbounded stage LP");
    const auto& opt = std::get<LpOptimal>(out);
    Vec x(opt.z.begin(), opt.z.begin() + static_cast<std::ptrdiff_t>(d));
    double realized = dot(eta.order_cost, x) - dot(eta.revenue, eta.demand);
    double banded = realized;
    for (std::size_t i = 0; i < d; ++i) {
      z[i] += x[i] - eta.demand[i];
      realized += eta.holding_cost[i] * std::max(z[i], 0.0) + eta.backlog_penalty[i] * std::max(-z[i], 0.0);
      banded += eta.holding_cost[i] * std::max(y[L.upper(t) + i], 0.0) +
                eta.backlog_penalty[i] * std::max(-y[L.lower(t) + i], 0.0);
    }
    run.orders.push_back(std::move(x));
    run.levels.push_back(z);
    run.stage_costs.push_back(realized);
    run.budget_costs.push_back(banded);
    run.total_cost += realized;
  }
  // Final stage: the greedy orders are the cheapest per stage, so the total
  // budget is attainable exactly when their summed budget costs fit in it.
  double banded_total = 0.0;
  for (double c : run.budget_costs) banded_total += c;
  if (banded_total > y[L.total()] + kTotalBudgetTol) {
    run.feasible = false;
    run.failed_stage = L.K + 1;
  }
  return run;
}

double utopian_cost(const InventoryInstance& inst, const Scenario& scenario, bool enforce_cost_caps) {
  const std::size_t d = inst.products;
  const std::size_t K = inst.stages;
  if (scenario.size() < K) throw DimensionMismatch("utopian_cost: scenario too short");
  const std::size_t block = stage_data_size(inst);
  const std::size_t nv = 3 * d * K;
  auto xcol = [&](std::size_t t, std::size_t i) { return (t - 1) * 3 * d + i; };
  auto pcol = [&](std::size_t t, std::size_t i) { return (t - 1) * 3 * d + d + i; };
  auto mcol = [&](std::size_t t, std::size_t i) { return (t - 1) * 3 * d + 2 * d + i; };

  const auto& last = scenario.stage(K);
  std::vector<StageData> etas;
  for (std::size_t t = 1; t <= K; ++t) {
    etas.push_back(unpack_stage(inst, std::span<const double>(last).subspan((t - 1) * block, block)));
  }

  std::vector<Vec> rows;
  Vec h;
  LinearProgram lp;
  lp.c.assign(nv, 0.0);
  lp.lo.assign(nv, 0.0);
  lp.hi.assign(nv, std::numeric_limits<double>::infinity());
  double constant = 0.0;
  for (std::size_t t = 1; t <= K; ++t) {
    const auto& eta = etas[t - 1];
    constant -= dot(eta.revenue, eta.demand);
    for (std::size_t i = 0; i < d; ++i) {
      lp.lo[xcol(t, i)] = inst.x_lo[t - 1][i];
      lp.hi[xcol(t, i)] = inst.x_hi[t - 1][i];
      lp.c[xcol(t, i)] = eta.order_cost[i];
      lp.c[pcol(t, i)] = eta.holding_cost[i];
      lp.c[mcol(t, i)] = eta.backlog_penalty[i];
      // level_t - level_{t-1} - x = -demand, as two inequalities
      Vec row(nv, 0.0);
      row[pcol(t, i)] = 1.0;
      row[mcol(t, i)] = -1.0;
      row[xcol(t, i)] = -1.0;
      double rhs = -eta.demand[i];
      if (t > 1) {
        row[pcol(t - 1, i)] = -1.0;
        row[mcol(t - 1, i)] = 1.0;
      } else {
        rhs += inst.z0[i];
      }
      rows.push_back(row);
      h.push_back(rhs);
      for (auto& v : row) v = -v;
      rows.push_back(std::move(row));
      h.push_back(-rhs);
      // level bounds
      Vec lev(nv, 0.0);
      lev[pcol(t, i)] = 1.0;
      lev[mcol(t, i)] = -1.0;
      rows.push_back(lev);
      h.push_back(inst.z_hi[t - 1][i]);
      for (auto& v : lev) v = -v;
      rows.push_back(std::move(lev));
      h.push_back(-inst.z_lo[t - 1][i]);
    }
    Vec store(nv, 0.0);
    for (std::size_t i = 0; i < d; ++i) store[pcol(t, i)] = inst.storage[i];
    rows.push_back(std::move(store));
    h.push_back(inst.capacity);
    if (enforce_cost_caps) {
      Vec cap(nv, 0.0);
      for (std::size_t i = 0; i < d; ++i) {
        cap[xcol(t, i)] = eta.order_cost[i];
        cap[pcol(t, i)] = eta.holding_cost[i];
        cap[mcol(t, i)] = eta.backlog_penalty[i];
      }
      rows.push_back(std::move(cap));
      h.push_back(inst.cost_cap[t - 1] + dot(eta.revenue, eta.demand));
    }
  }
  lp.G = Mat::from_rows(rows, nv);
  lp.h = std::move(h);
  auto out = solve_lp(lp);
  if (std::holds_alternative<LpInfeasible>(out)) throw ClairvoyantInfeasible("utopian_cost: no feasible orders in hindsight");
  if (std::holds_alternative<LpUnbounded>(out)) throw NumericalFailure("utopian_cost: unbounded LP");
  return std::get<LpOptimal>(out).value + constant;
}

InventoryInstance default_instance() {
  constexpr std::size_t d = 4;
  constexpr std::size_t K = 12;
  const Vec demand_base{0.50, 0.40, 0.60, 0.45};
  const Vec order_base{1.00, 0.80, 1.20, 0.90};
  const Vec holding_base{0.10, 0.08, 0.12, 0.10};
  const Vec phase{0.0, 1.5, 3.0, 4.5};

  InventoryInstance inst;
  inst.products = d;
  inst.stages = K;
  inst.z0 = Vec(d, 0.5);
  inst.storage = Vec(d, 1.0);
  inst.capacity = 2.5;
  for (std::size_t t = 1; t <= K; ++t) {
    inst.z_lo.push_back(Vec(d, 0.0));
    inst.z_hi.push_back(Vec(d, 1.0));
    inst.x_lo.push_back(Vec(d, 0.0));
    inst.x_hi.push_back(Vec(d, 1.5));
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(t - 1) / static_cast<double>(K);
    StageData s;
    for (std::size_t i = 0; i < d; ++i) {
      s.demand.push_back(demand_base[i] * (1.0 + 0.3 * std::sin(angle + phase[i])));
      s.order_cost.push_back(order_base[i] * (1.0 + 0.1 * std::cos(angle + phase[i])));
      s.holding_cost.push_back(holding_base[i]);
      s.backlog_penalty.push_back(2.0 * order_base[i]);
      s.revenue.push_back(0.0);
    }
    inst.nominal.push_back(std::move(s));
  }
  inst.cost_cap = Vec(K, 5.0);
  inst.budget_lo = Vec(K, 0.0);
  inst.budget_hi = Vec(K, 5.0);
  inst.total_lo = 0.0;
  inst.total_hi = 40.0;
  return inst;
}

}  // namespace ssdm
