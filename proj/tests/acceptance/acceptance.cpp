// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fails.
// Usage: ssdm_acceptance [criterion numbers...]

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "inventory_fixtures.hpp"
#include "ssdm/bisection.hpp"
#include "ssdm/engines.hpp"
#include "ssdm/io.hpp"
#include "ssdm/lp.hpp"
#include "ssdm/oracle.hpp"
#include "ssdm/remodeling.hpp"
#include "ssdm/validation.hpp"
#include "toy_models.hpp"

using namespace ssdm;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;
  std::function<Verdict()> run;
};

Vec normal_vec(std::mt19937_64& gen, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Vec v(n);
  for (auto& x : v) x = nd(gen);
  return v;
}

// ---------------------------------------------------------------- 1

Verdict separator_contract() {
  constexpr int kPairs = 500;
  constexpr int kFeasiblePoints = 100;
  std::mt19937_64 gen(101);
  std::uniform_int_distribution<std::size_t> dim(1, 10), locals(0, 3);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int pairs = 0, bad_value = 0, bad_norm = 0, bad_valid = 0;
  while (pairs < kPairs) {
    const std::size_t n = dim(gen), p = locals(gen);
    const std::size_t m = n + 1 + std::uniform_int_distribution<std::size_t>(0, n + 1)(gen);
    StagePolyhedron P{Mat(m, n), Mat(m, p), Mat(m, 0), Vec(m)};
    const Vec y0 = normal_vec(gen, n, 0.5), x0 = normal_vec(gen, p, 0.5);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) P.A(i, j) = normal_vec(gen, 1)[0];
      for (std::size_t j = 0; j < p; ++j) P.B(i, j) = normal_vec(gen, 1)[0];
    }
    const Vec Ay = matvec(P.A, y0), Bx = matvec(P.B, x0);
    for (std::size_t i = 0; i < m; ++i) P.d[i] = Ay[i] + Bx[i] + u01(gen);
    Vec y = y0;
    axpy(3.0, normal_vec(gen, n), y);
    const auto res = stage_feasible(P, 1, y);
    const auto* inf = std::get_if<StageInfeasible>(&res);
    if (!inf) continue;
    ++pairs;
    const Separator f = separator_from_infeasibility(P, y, inf->farkas);
    bad_value += f(y) < -1e-8;
    bad_norm += std::abs(norm2(f.a()) - 1.0) > 1e-9;
    // Feasible points: LP vertices for random objectives, and mixes with y0.
    LinearProgram lp;
    lp.G = Mat(m, n + p);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) lp.G(i, j) = P.A(i, j);
      for (std::size_t j = 0; j < p; ++j) lp.G(i, n + j) = P.B(i, j);
    }
    lp.h = P.d;
    lp.lo = Vec(n + p, -10.0);
    lp.hi = Vec(n + p, 10.0);
    for (int k = 0; k < kFeasiblePoints; ++k) {
      lp.c = normal_vec(gen, n + p);
      const auto out = solve_lp(lp);
      const auto* opt = std::get_if<LpOptimal>(&out);
      if (!opt) {
        ++bad_valid;
        continue;
      }
      Vec pt(opt->z.begin(), opt->z.begin() + static_cast<std::ptrdiff_t>(n));
      if (k % 2) {
        const double w = u01(gen);
        for (std::size_t j = 0; j < n; ++j) pt[j] = w * pt[j] + (1.0 - w) * y0[j];
      }
      bad_valid += f(pt) > 1e-8;
    }
  }
  return {bad_value == 0 && bad_norm == 0 && bad_valid == 0,
          fmt::format("{} pairs; violations: f(y) {}, norm {}, feasible points {}", pairs, bad_value, bad_norm,
                      bad_valid)};
}

// ---------------------------------------------------------------- 2

// Solves the square system M z = b by Gaussian elimination; false if nearly singular.
bool solve_square(std::vector<std::vector<double>> M, Vec b, Vec& z) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
    }
    if (std::abs(M[piv][col]) < 1e-10) return false;
    std::swap(M[piv], M[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = M[r][col] / M[col][col];
      for (std::size_t c = col; c < n; ++c) M[r][c] -= f * M[col][c];
      b[r] -= f * b[col];
    }
  }
  z.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= M[i][c] * z[c];
    z[i] = s / M[i][i];
  }
  return true;
}

void for_each_subset(std::size_t m, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> idx(k);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t start) {
    if (pos == k) {
      fn(idx);
      return;
    }
    for (std::size_t i = start; i < m; ++i) {
      idx[pos] = i;
      rec(pos + 1, i + 1);
    }
  };
  rec(0, 0);
}

enum class Status { Optimal, Infeasible, Unbounded };

// min c^T z s.t. G z <= h with G of full column rank: vertices and extreme rays.
std::pair<Status, double> brute_force_lp(const Mat& G, const Vec& h, const Vec& c, std::mt19937_64& gen) {
  const std::size_t m = G.rows(), n = G.cols();
  auto row = [&](std::size_t i) { return std::vector<double>(G.row(i).begin(), G.row(i).end()); };
  double best = std::numeric_limits<double>::infinity();
  bool feasible = false;
  for_each_subset(m, n, [&](const std::vector<std::size_t>& S) {
    std::vector<std::vector<double>> M;
    Vec b;
    for (std::size_t i : S) {
      M.push_back(row(i));
      b.push_back(h[i]);
    }
    Vec z;
    if (!solve_square(M, b, z)) return;
    const Vec Gz = matvec(G, z);
    for (std::size_t i = 0; i < m; ++i) {
      if (Gz[i] > h[i] + 1e-9 * (1.0 + std::abs(h[i]))) return;
    }
    feasible = true;
    best = std::min(best, dot(c, z));
  });
  if (!feasible) return {Status::Infeasible, 0.0};
  bool unbounded = false;
  for_each_subset(m, n - 1, [&](const std::vector<std::size_t>& T) {
    std::vector<std::vector<double>> M;
    for (std::size_t i : T) M.push_back(row(i));
    M.push_back(normal_vec(gen, n));
    Vec b(n, 0.0);
    b[n - 1] = 1.0;
    Vec r;
    if (!solve_square(M, b, r)) return;
    const double len = norm2(r);
    for (double sgn : {1.0, -1.0}) {
      const Vec d = sgn / len * r;
      const Vec Gd = matvec(G, d);
      bool in_cone = true;
      for (double v : Gd) in_cone = in_cone && v <= 1e-9;
      if (in_cone && dot(c, d) < -1e-9) unbounded = true;
    }
  });
  if (unbounded) return {Status::Unbounded, 0.0};
  return {Status::Optimal, best};
}

Verdict lp_equivalence() {
  std::mt19937_64 gen(202);
  int counts[3] = {0, 0, 0};
  int status_mismatch = 0, value_mismatch = 0;
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 5)(gen);
    const std::size_t m = std::uniform_int_distribution<std::size_t>(n, 8)(gen);
    LinearProgram lp;
    lp.G = Mat(m, n);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) lp.G(i, j) = normal_vec(gen, 1)[0];
    }
    if (k % 3 == 0) {
      lp.h = normal_vec(gen, m);
    } else {
      const Vec z0 = normal_vec(gen, n);
      lp.h = matvec(lp.G, z0);
      for (auto& v : lp.h) v += std::uniform_real_distribution<double>(0.0, 1.0)(gen);
    }
    lp.c = normal_vec(gen, n);
    const auto [status, value] = brute_force_lp(lp.G, lp.h, lp.c, gen);
    ++counts[static_cast<int>(status)];
    const auto out = solve_lp(lp);
    const Status got = std::holds_alternative<LpOptimal>(out)     ? Status::Optimal
                       : std::holds_alternative<LpInfeasible>(out) ? Status::Infeasible
                                                                   : Status::Unbounded;
    if (got != status) {
      ++status_mismatch;
      continue;
    }
    if (status == Status::Optimal) {
      const double err = std::abs(std::get<LpOptimal>(out).value - value);
      worst = std::max(worst, err);
      value_mismatch += err > 1e-7;
    }
  }
  return {status_mismatch == 0 && value_mismatch == 0,
          fmt::format("200 LPs ({} optimal, {} infeasible, {} unbounded); status mismatches {}, value mismatches {}, "
                      "worst value error {:.2e}",
                      counts[0], counts[1], counts[2], status_mismatch, value_mismatch, worst)};
}

// ---------------------------------------------------------------- 3

Verdict bundle_level_bound() {
  std::mt19937_64 gen(303);
  int over_budget = 0, not_monotone = 0, above_level = 0, not_found = 0;
  std::size_t max_calls = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t n = 2 + static_cast<std::size_t>(inst % 5);
    const double rho = std::uniform_real_distribution<double>(0.15, 0.35)(gen);
    Vec c(n);
    for (auto& v : c) v = std::uniform_real_distribution<double>(-0.4, 0.4)(gen);
    std::vector<Vec> g;
    Vec beta;
    toy::tangent_cuts(c, rho, 2 * n, gen, g, beta);
    const auto model = toy::cut_model(Vec(n, -1.0), Vec(n, 1.0), g, beta);
    OracleConfig cfg;
    OracleState state(static_cast<std::uint64_t>(inst) + 1);
    SamplingOracle oracle(model, cfg, state);
    const Ball ball = model.ball();
    const double bound = 32.0 * ball.radius * ball.radius / (rho * rho) + 1.0;
    const auto res = run_bl(oracle, ball, bl_budget(ball.radius, rho));
    const auto* cand = std::get_if<Candidate>(&res.outcome);
    if (!cand) {
      ++not_found;
      continue;
    }
    max_calls = std::max(max_calls, cand->calls);
    over_budget += static_cast<double>(cand->calls) > bound;
    double prev = -std::numeric_limits<double>::infinity();
    bool mono = true, below = true;
    for (const auto& rec : res.log) {
      if (std::isnan(rec.delta)) continue;
      mono = mono && rec.delta >= prev - 1e-9;
      below = below && rec.delta <= -rho + 1e-6;
      prev = rec.delta;
    }
    not_monotone += !mono;
    above_level += !below;
  }
  return {over_budget == 0 && not_monotone == 0 && above_level == 0 && not_found == 0,
          fmt::format("50 instances; no candidate {}, over the call bound {}, non-monotone {}, level above -rho {}; "
                      "most calls {}",
                      not_found, over_budget, not_monotone, above_level, max_calls)};
}

// ---------------------------------------------------------------- 4

Verdict infeasibility_certificate() {
  std::mt19937_64 gen(404);
  int wrong = 0;
  double smallest = std::numeric_limits<double>::infinity();
  for (int inst = 0; inst < 20; ++inst) {
    const std::size_t n = 2 + static_cast<std::size_t>(inst % 4);
    Vec g = normal_vec(gen, n);
    g = (1.0 / norm2(g)) * g;
    const double beta = std::uniform_real_distribution<double>(-0.3, 0.3)(gen);
    const double gap = std::uniform_real_distribution<double>(0.05, 0.4)(gen);
    std::vector<Vec> cuts{g, -1.0 * g};
    Vec rhs{beta, -(beta + gap)};
    for (int r = 0; r < 3; ++r) {
      Vec a = normal_vec(gen, n);
      cuts.push_back((1.0 / norm2(a)) * a);
      rhs.push_back(0.8);
    }
    const auto model = toy::cut_model(Vec(n, -1.0), Vec(n, 1.0), cuts, rhs, inst % 2 == 1);
    OracleConfig cfg;
    OracleState state(static_cast<std::uint64_t>(inst) + 1);
    SamplingOracle oracle(model, cfg, state);
    const Ball ball = model.ball();
    const auto res = run_bl(oracle, ball, bl_budget(ball.radius, 0.05));
    const auto* cert = std::get_if<InfeasibleCertificate>(&res.outcome);
    if (!cert || cert->delta_R < -1e-8) {
      ++wrong;
      continue;
    }
    smallest = std::min(smallest, cert->delta_R);
  }
  return {wrong == 0, fmt::format("20 empty instances; missed {}, smallest delta_R {:.4g}", wrong, smallest)};
}

// ---------------------------------------------------------------- 5

Verdict sample_schedule() {
  OracleConfig fixed;
  fixed.epsilon = 0.05;
  fixed.delta = 0.01;
  fixed.schedule = FixedSchedule{129};
  OracleConfig adaptive = fixed;
  adaptive.schedule = AdaptiveSchedule{};
  const std::size_t a = sample_size(fixed, 1), b = sample_size(adaptive, 1), c = sample_size(adaptive, 10);
  return {a == 190 && b == 103 && c == 195, fmt::format("fixed M=129: {}; adaptive s=1: {}; s=10: {}", a, b, c)};
}

// ---------------------------------------------------------------- 6

Verdict reliability() {
  constexpr int kRuns = 100;
  const double limit = 0.1 + 3.0 * std::sqrt(0.1 * 0.9 / kRuns);
  // Y = [0, 1], xi uniform on [0, 0.5], y fails when xi > y: true failure probability max(0, 1 - 2y).
  const auto model = toy::threshold_model(0.0, 1.0, 0.0, 0.5);
  int bad = 0, failed = 0;
  double worst = 0.0;
  for (int run = 0; run < kRuns; ++run) {
    BisectionConfig cfg;
    cfg.objective = {1.0};
    cfg.tolerance = 0.02;
    cfg.stability = 0.05;
    cfg.oracle.epsilon = 0.2;
    cfg.oracle.delta = 0.1;
    cfg.oracle.seed = 6000 + static_cast<std::uint64_t>(run);
    const auto out = minimize(model, cfg);
    const auto* s = std::get_if<Solved>(&out.result);
    if (!s) {
      ++failed;
      continue;
    }
    const double eps_true = std::max(0.0, 1.0 - 2.0 * s->y[0]);
    worst = std::max(worst, eps_true);
    bad += eps_true > 0.2;
  }
  const double frac = static_cast<double>(bad) / kRuns;
  return {frac <= limit, fmt::format("{} runs, {} without output; fraction with true failure probability > 0.2: {:.3f} "
                                     "(limit {:.3f}); worst {:.4f}",
                                     kRuns, failed, frac, limit, worst)};
}

// ---------------------------------------------------------------- 7

Verdict bisection_guarantee() {
  constexpr int kRuns = 50;
  constexpr double kTol = 0.1;
  constexpr std::size_t kSides = 6;
  const double circum = 1.0 / std::cos(std::numbers::pi / kSides);
  int within = 0, above_bound = 0, failed = 0;
  for (int run = 0; run < kRuns; ++run) {
    // Regular hexagon with inradius 1, rotated; minimize the first coordinate.
    const double theta = 2.0 * std::numbers::pi * run / kRuns;
    std::vector<Vec> g;
    Vec beta;
    double s_star = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < kSides; ++k) {
      const double a = theta + 2.0 * std::numbers::pi * static_cast<double>(k) / kSides;
      g.push_back({std::cos(a), std::sin(a)});
      beta.push_back(1.0);
      s_star = std::min(s_star, circum * std::cos(a + std::numbers::pi / kSides));
    }
    const auto model = toy::cut_model({-2.0, -2.0}, {2.0, 2.0}, g, beta);
    BisectionConfig cfg;
    cfg.objective = {1.0, 0.0};
    cfg.tolerance = kTol;
    cfg.stability = 0.1;
    cfg.oracle.seed = 7000 + static_cast<std::uint64_t>(run);
    const auto out = minimize(model, cfg);
    const auto* s = std::get_if<Solved>(&out.result);
    if (!s) {
      ++failed;
      continue;
    }
    const double value = s->y[0];
    within += value <= s_star + kTol + 1e-6;
    above_bound += value > s->bound + 1e-9;
  }
  const double frac = static_cast<double>(within) / kRuns;
  return {frac >= 0.9 && above_bound == 0,
          fmt::format("{} runs, {} failed; within s* + tolerance: {:.2f} (need 0.90); above the productive target: {}",
                      kRuns, failed, frac, above_bound)};
}

// ---------------------------------------------------------------- 8

Verdict inventory_end_to_end() {
  const InventoryInstance inst = default_instance();
  const auto model = build_model(inst);
  const auto L = layout_of(inst);
  BisectionConfig cfg;
  cfg.objective = Vec(L.dim(), 0.0);
  cfg.objective[L.total()] = 1.0;
  cfg.tolerance = 0.05;
  cfg.stability = 0.5;
  cfg.step_budget = 300;
  cfg.oracle.epsilon = 0.05;
  cfg.oracle.delta = 0.01;
  cfg.oracle.seed = 8;
  const auto range = objective_range(model, cfg.objective);
  const std::size_t steps = bisection_steps(range.second - range.first, cfg.tolerance);
  const auto out = minimize(model, cfg);
  const auto* s = std::get_if<Solved>(&out.result);
  if (!s) return {false, "bisection found no implementable target"};
  const Vec y = s->y;
  const auto rep = validate_inventory(inst, [&](const Scenario&) { return y; }, 1000, 8, 0);
  const double limit = 0.05 + 3.0 * std::sqrt(0.05 * 0.95 / 1000.0);
  const bool ok = steps == 10 && out.steps.size() == 10 && rep.failure_rate <= limit && rep.bound_violations == 0;
  return {ok, fmt::format("{} steps, bound {:.4f}, omega {:.4f}; failure rate {:.3f} (limit {:.3f}); cost min {:.4f} "
                          "mean {:.4f} median {:.4f} max {:.4f}; over omega {}; mean excess over hindsight {:.1f}%",
                          out.steps.size(), s->bound, y[L.total()], rep.failure_rate, limit,
                          rep.cost ? rep.cost->min : NAN, rep.cost ? rep.cost->mean : NAN,
                          rep.cost ? rep.cost->median : NAN, rep.cost ? rep.cost->max : NAN, rep.bound_violations,
                          rep.mean_excess ? 100.0 * *rep.mean_excess : NAN)};
}

// ---------------------------------------------------------------- 9

bool feasible_on(const SemiStochasticModel& model, std::span<const double> y, const Scenario& sc) {
  return std::holds_alternative<InY>(membership_or_separator(model, y)) && !first_infeasible_stage(model, sc, y);
}

Verdict remodeling() {
  std::mt19937_64 gen(909);
  int agree = 0, feasible = 0;
  for (int k = 0; k < 100; ++k) {
    const auto inst = fixtures::random_instance(gen, 1 + k % 3, 2 + k % 3);
    const BlockModel bm = inventory_block_model(inst);
    const DecisionBasis basis = constant_basis(bm);
    const auto lifted = lift(bm, basis, default_chi_box(bm, basis));
    const auto plain = bm.as_model();
    const Vec y = k % 2 ? fixtures::random_decision(gen, inst) : fixtures::drifting_decision(gen, inst);
    Rng rng(static_cast<std::uint64_t>(k) + 1);
    const Scenario sc = sample_scenario(inst, rng);
    Scenario lsc = sc;
    lsc.stages.push_back(lsc.stages.back());
    const bool a = feasible_on(plain, y, sc);
    const bool b = feasible_on(lifted, embed_constant(bm, basis, y), lsc);
    agree += a == b;
    feasible += a;
  }

  // y >= xi with xi in {1, 2}: a rule y = xi passes both scenarios, a constant needs y >= 2.
  BlockModel toy;
  toy.n = 1;
  toy.stages = 1;
  toy.blocks = {{}, {0}};
  toy.Y = toy::box_rep({-3.0}, {3.0});
  toy.builder = [](std::size_t, std::span<const double> xi) {
    return StagePolyhedron{Mat::from_rows({{-1.0}}), Mat(1, 0), Mat(1, 0), {-xi[0]}};
  };
  toy.sampler = [](Rng& rng) { return Scenario{{Vec{rng.uniform01() < 0.5 ? 1.0 : 2.0}}}; };
  toy.xi_dims = {1};
  toy.box_lo = {-3.0};
  toy.box_hi = {3.0};
  DecisionBasis affine = constant_basis(toy);
  affine[1].xi_indices = {0};
  const auto lifted = lift(toy, affine, default_chi_box(toy, affine));
  const Scenario lo{{Vec{1.0}, Vec{1.0}}}, hi{{Vec{2.0}, Vec{2.0}}};
  auto both = [&](const Vec& chi) { return feasible_on(lifted, chi, lo) && feasible_on(lifted, chi, hi); };
  const bool rule_ok = both({0.0, 1.0});
  const bool const_edge = both(embed_constant(toy, affine, Vec{2.0})) && !both(embed_constant(toy, affine, Vec{1.99}));
  const bool ok = agree == 100 && feasible > 0 && feasible < 100 && rule_ok && const_edge;
  return {ok, fmt::format("constant lift agrees on {}/100 triples ({} feasible); rule y = xi feasible on both "
                          "scenarios: {}; constants need y >= 2: {}",
                          agree, feasible, rule_ok ? "yes" : "no", const_edge ? "yes" : "no")};
}

// ---------------------------------------------------------------- 10

int run_cli(const std::string& args) {
  const std::string cmd = fmt::format("SSDM_LOG=off \"{}\" {}", SSDM_CLI_PATH, args);
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::vector<std::pair<std::string, std::string>> artifacts(const fs::path& dir) {
  std::set<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) names.insert(e.path().filename().string());
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& n : names) out.emplace_back(n, read_file(dir / n));
  return out;
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / "ssdm_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  auto inst = fixtures::single_product(3, 1.2);
  inst.ratio_lo = 0.5;
  inst.ratio_hi = 1.5;
  save_instance(root / "inventory.json", Instance{inst, std::nullopt});
  save_decision(root / "pinned.json", Decision{fixtures::pinned_decision(inst), "constant", std::nullopt});
  const std::string data = SSDM_DATA_DIR;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"solve", fmt::format("solve --instance {}/threshold.json --seed 17", data)},
      {"minimize", fmt::format("minimize --instance {}/threshold.json --kappa-opt 0.05 --seed 17", data)},
      {"validate", fmt::format("validate --instance {} --decision {} --samples 300 --seed 17",
                               (root / "inventory.json").string(), (root / "pinned.json").string())},
      {"rules", fmt::format("minimize --instance {} --rules demand --budget 40 --seed 17",
                            (root / "inventory.json").string())},
  };
  int differing = 0, files = 0, bad_exit = 0;
  for (const auto& [name, args] : commands) {
    std::vector<std::vector<std::pair<std::string, std::string>>> runs;
    for (const char* threads : {"1", "1", "4"}) {
      const fs::path out = root / fmt::format("{}_{}_{}", name, threads, runs.size());
      const int code = run_cli(fmt::format("{} --threads {} --out-dir {}", args, threads, out.string()));
      bad_exit += code < 0 || code == 1;
      runs.push_back(fs::exists(out) ? artifacts(out) : decltype(artifacts(out)){});
    }
    files += static_cast<int>(runs[0].size());
    differing += runs[0].empty() || runs[0] != runs[1] || runs[0] != runs[2];
  }
  return {differing == 0 && bad_exit == 0,
          fmt::format("{} commands x 3 runs (1, 1, 4 threads), {} artifacts per set; commands with differences {}, "
                      "error exits {}",
                      commands.size(), files, differing, bad_exit)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "separator contract", 60, separator_contract},
      {2, "LP matches vertex enumeration", 30, lp_equivalence},
      {3, "bundle-level call bound and level invariants", 120, bundle_level_bound},
      {4, "infeasibility certificate", 30, infeasibility_certificate},
      {5, "sample schedule", 1, sample_schedule},
      {6, "reliability on the threshold model", 300, reliability},
      {7, "bisection optimality on a 2-D polygon", 300, bisection_guarantee},
      {8, "inventory end to end", 900, inventory_end_to_end},
      {9, "remodeling", 60, remodeling},
      {10, "determinism of CLI artifacts", 300, determinism},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.time_limit_s;
    const bool pass = v.pass && in_time;
    failures += !pass;
    fmt::print("{} {:>2} {}: {} [{:.1f} s of {:.0f} s]\n", pass ? "PASS" : "FAIL", c.id, c.name, v.detail, secs,
               c.time_limit_s);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
