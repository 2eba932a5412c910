#include "commands.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <json.hpp>
#include <sstream>

#include "ssdm/bisection.hpp"
#include "ssdm/engines.hpp"
#include "ssdm/errors.hpp"
#include "ssdm/io.hpp"
#include "ssdm/remodeling.hpp"
#include "ssdm/validation.hpp"

namespace ssdm::cli {

namespace {

using nlohmann::json;

// Model as seen by the engines, plus what is needed to map its points back.
struct Prepared {
  Instance instance;
  std::optional<SemiStochasticModel> model;
  std::optional<BlockModel> blocks;  // set when rules are in use
  DecisionBasis basis;
};

DecisionBasis demand_rules(const BlockModel& bm, const InventoryInstance& inst) {
  DecisionBasis basis = constant_basis(bm);
  const std::size_t per_stage = stage_data_size(inst);
  for (std::size_t t = 1; t <= inst.stages; ++t) {
    for (std::size_t i = 0; i < inst.products; ++i) basis[t].xi_indices.push_back((t - 1) * per_stage + i);
  }
  return basis;
}

double largest_demand(const InventoryInstance& inst) {
  double m = 0.0;
  for (const auto& s : inst.nominal) {
    for (double v : s.demand) m = std::max(m, v * inst.ratio_hi);
  }
  return m > 0.0 ? m : 1.0;
}

Prepared prepare(const RunConfig& c, Instance instance) {
  Prepared p{std::move(instance), std::nullopt, std::nullopt, {}};
  if (const auto* inv = std::get_if<InventoryInstance>(&p.instance.data)) {
    if (c.rules == "constant") {
      p.model = build_model(*inv);
    } else {
      p.blocks = inventory_block_model(*inv);
      p.basis = demand_rules(*p.blocks, *inv);
      p.model = lift(*p.blocks, p.basis, default_chi_box(*p.blocks, p.basis, largest_demand(*inv)));
    }
  } else {
    if (c.rules != "constant") throw std::invalid_argument("decision rules are only available for inventory instances");
    p.model = build_model(std::get<PolyhedralInstance>(p.instance.data));
  }
  spdlog::info("model: {} decision variables, {} stages", p.model->dim(), p.model->stages());
  return p;
}

Prepared prepare(const RunConfig& c) {
  spdlog::info("loading {}", c.instance.string());
  return prepare(c, load_instance(c.instance));
}

OracleConfig oracle_config(const RunConfig& c, std::size_t calls_planned) {
  OracleConfig oc;
  oc.epsilon = c.epsilon;
  oc.delta = c.delta;
  oc.seed = c.seed;
  oc.threads = c.threads;
  if (c.schedule == "fixed") {
    oc.schedule = FixedSchedule{calls_planned};
  } else {
    oc.schedule = AdaptiveSchedule{};
  }
  return oc;
}

EngineKind engine_kind(const RunConfig& c) { return c.engine == "bl" ? EngineKind::BundleLevel : EngineKind::Ellipsoid; }

Vec objective_of(const Prepared& p) {
  if (p.blocks) {
    if (p.instance.objective) throw std::invalid_argument("an explicit objective cannot be combined with decision rules");
    // The total budget is block 0's constant coefficient.
    Vec f(p.model->dim(), 0.0);
    f[coefficient_layout(*p.blocks, p.basis).index(0, 0, 0)] = 1.0;
    return f;
  }
  if (p.instance.objective) return *p.instance.objective;
  if (const auto* inv = std::get_if<InventoryInstance>(&p.instance.data)) {
    Vec f(p.model->dim(), 0.0);
    f[layout_of(*inv).total()] = 1.0;
    return f;
  }
  throw std::invalid_argument("minimize needs an \"objective\" in the instance file");
}

json config_json(const RunConfig& c) {
  json j{{"epsilon", c.epsilon}, {"delta", c.delta},   {"rho", c.rho},     {"kappa", c.kappa},
         {"engine", c.engine},   {"schedule", c.schedule}, {"rules", c.rules}, {"seed", c.seed}};
  j["budget"] = c.budget ? json(*c.budget) : json(nullptr);
  return j;
}

template <class Fn>
void write_csv(const std::filesystem::path& path, Fn&& fn) {
  std::ostringstream out;
  fn(out);
  write_file(path, out.str());
  spdlog::info("wrote {}", path.string());
}

void write_json(const std::filesystem::path& path, const json& doc) {
  write_file(path, doc.dump(2) + "\n");
  spdlog::info("wrote {}", path.string());
}

void write_decision(const RunConfig& c, const Prepared& p, Decision d) {
  d.rules = c.rules;
  save_decision(c.out_dir / "decision.json", d);
  spdlog::info("wrote {}", (c.out_dir / "decision.json").string());
  if (const auto* inv = std::get_if<InventoryInstance>(&p.instance.data); inv && !p.blocks) {
    write_csv(c.out_dir / "bands.csv", [&](std::ostream& o) { write_bands_csv(o, *inv, d.y); });
  }
}

int minimize_prepared(const RunConfig& c, const Prepared& p) {
  BisectionConfig bc;
  bc.objective = objective_of(p);
  bc.tolerance = c.kappa;
  bc.stability = c.rho;
  bc.engine = engine_kind(c);
  bc.step_budget = c.budget;
  const Ball ball = p.model->ball();
  const std::size_t per_step =
      c.budget ? *c.budget
               : (bc.engine == EngineKind::BundleLevel ? bl_budget(ball.radius, c.rho)
                                                        : ellipsoid_budget(ball.dim(), ball.radius, c.rho));
  bc.oracle = oracle_config(c, per_step);
  spdlog::info("minimize: tolerance {}, per-step budget {}", c.kappa, per_step);
  const BisectionOutcome out = minimize(*p.model, bc);

  write_csv(c.out_dir / "bisection.csv", [&](std::ostream& o) { write_bisection_csv(o, out.steps); });
  write_csv(c.out_dir / "iterations.csv", [&](std::ostream& o) { write_step_iterations_csv(o, out.steps); });
  json summary{{"format_version", kFormatVersion}, {"kind", "summary"},      {"command", "minimize"},
               {"config", config_json(c)},         {"steps", out.steps.size()}, {"calls", out.calls},
               {"samples", out.samples},           {"per_step_budget", per_step}};
  int code = kOk;
  if (const auto* s = std::get_if<Solved>(&out.result)) {
    summary["outcome"] = "solved";
    summary["bound"] = s->bound;
    summary["objective_value"] = dot(bc.objective, s->y);
    write_decision(c, p, Decision{s->y, c.rules, s->bound});
    spdlog::info("bound {} after {} steps", s->bound, out.steps.size());
  } else {
    summary["outcome"] = "failed";
    code = kFailed;
    spdlog::warn("no productive step");
  }
  write_json(c.out_dir / "summary.json", summary);
  return code;
}

int validate_prepared(const RunConfig& c, const Prepared& p, const Decision& d) {
  if (d.rules != c.rules) {
    throw std::invalid_argument(fmt::format("decision uses rules \"{}\" but --rules is \"{}\"", d.rules, c.rules));
  }
  if (d.y.size() != p.model->dim()) {
    throw DimensionMismatch(fmt::format("decision has {} entries, the model expects {}", d.y.size(), p.model->dim()));
  }
  std::vector<ScenarioResult> per;
  ValidationReport rep;
  if (const auto* inv = std::get_if<InventoryInstance>(&p.instance.data)) {
    DecisionMap map;
    if (p.blocks) {
      if (!std::holds_alternative<InY>(membership_or_separator(*p.model, d.y))) {
        throw std::invalid_argument("rule coefficients lie outside their box");
      }
      map = [&](const Scenario& sc) { return materialize(*p.blocks, p.basis, d.y, sc); };
    } else {
      map = [&](const Scenario&) { return d.y; };
    }
    rep = validate_inventory(*inv, map, c.samples, c.seed, c.threads, &per);
  } else {
    rep = validate_model(*p.model, d.y, c.samples, c.seed, c.threads, &per);
  }
  write_file(c.out_dir / "validation.json", dump_report(rep));
  spdlog::info("wrote {}", (c.out_dir / "validation.json").string());
  write_csv(c.out_dir / "costs.csv", [&](std::ostream& o) { write_costs_csv(o, per); });
  spdlog::info("failure rate {} ({} of {})", rep.failure_rate, rep.n_failures, rep.n_scenarios);
  if (rep.cost) {
    spdlog::info("cost min {} mean {} median {} max {}", rep.cost->min, rep.cost->mean, rep.cost->median,
                 rep.cost->max);
  }
  if (rep.bound_violations > 0) spdlog::warn("{} scenarios exceed the total budget", rep.bound_violations);
  return kOk;
}

}  // namespace

void RunConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("--epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("--delta must lie in (0, 1)");
  if (!(rho > 0.0)) throw std::invalid_argument("--rho must be positive");
  if (!(kappa > 0.0)) throw std::invalid_argument("--kappa-opt must be positive");
  if (engine != "bl" && engine != "ellipsoid") throw std::invalid_argument("--engine must be bl or ellipsoid");
  if (schedule != "fixed" && schedule != "adaptive") throw std::invalid_argument("--schedule must be fixed or adaptive");
  if (rules != "constant" && rules != "demand") throw std::invalid_argument("--rules must be constant or demand");
  if (budget && *budget == 0) throw std::invalid_argument("--budget must be positive");
  if (samples == 0) throw std::invalid_argument("--samples must be positive");
  if (command != "demo-inventory" && instance.empty()) throw std::invalid_argument("--instance is required");
  if (command == "validate" && decision.empty()) throw std::invalid_argument("--decision is required");
}

int cmd_solve(const RunConfig& c) {
  const Prepared p = prepare(c);
  const Ball ball = p.model->ball();
  const bool bl = c.engine == "bl";
  const std::size_t budget =
      c.budget ? *c.budget : (bl ? bl_budget(ball.radius, c.rho) : ellipsoid_budget(ball.dim(), ball.radius, c.rho));
  const OracleConfig oc = oracle_config(c, budget);
  oc.validate();
  OracleState state(c.seed);
  SamplingOracle oracle(*p.model, oc, state);
  spdlog::info("solve: {} engine, budget {}", c.engine, budget);
  const EngineResult res = bl ? run_bl(oracle, ball, budget) : run_ellipsoid(oracle, ball, c.rho, budget);

  write_csv(c.out_dir / "iterations.csv", [&](std::ostream& o) { write_iterations_csv(o, res.log); });
  json summary{{"format_version", kFormatVersion}, {"kind", "summary"},  {"command", "solve"},
               {"config", config_json(c)},         {"budget", budget},   {"samples", res.samples}};
  int code = kOk;
  if (const auto* cand = std::get_if<Candidate>(&res.outcome)) {
    summary["outcome"] = "candidate";
    summary["calls"] = cand->calls;
    write_decision(c, p, Decision{cand->y, c.rules, std::nullopt});
    spdlog::info("candidate after {} calls", cand->calls);
  } else if (const auto* inf = std::get_if<InfeasibleCertificate>(&res.outcome)) {
    summary["outcome"] = "infeasible";
    summary["calls"] = inf->calls;
    summary["delta_R"] = inf->delta_R;
    code = kInfeasible;
    spdlog::warn("infeasible: min-max value {} over the starting ball", inf->delta_R);
  } else {
    const auto& ex = std::get<BudgetExhausted>(res.outcome);
    summary["outcome"] = "budget_exhausted";
    summary["calls"] = ex.calls;
    summary["last_delta"] = ex.last_delta;
    code = kExhausted;
    spdlog::warn("budget of {} calls exhausted", ex.calls);
  }
  write_json(c.out_dir / "summary.json", summary);
  return code;
}

int cmd_minimize(const RunConfig& c) { return minimize_prepared(c, prepare(c)); }

int cmd_validate(const RunConfig& c) {
  const Prepared p = prepare(c);
  return validate_prepared(c, p, load_decision(c.decision));
}

int cmd_demo_inventory(const RunConfig& c) {
  const Instance inst{default_instance(), std::nullopt};
  save_instance(c.out_dir / "instance.json", inst);
  write_csv(c.out_dir / "nominals.csv",
            [&](std::ostream& o) { write_nominals_csv(o, std::get<InventoryInstance>(inst.data)); });
  const Prepared p = prepare(c, inst);
  const int code = minimize_prepared(c, p);
  if (code != kOk) return code;
  return validate_prepared(c, p, load_decision(c.out_dir / "decision.json"));
}

int dispatch(const RunConfig& c) {
  try {
    c.validate();
    if (c.command == "solve") return cmd_solve(c);
    if (c.command == "minimize") return cmd_minimize(c);
    if (c.command == "validate") return cmd_validate(c);
    if (c.command == "demo-inventory") return cmd_demo_inventory(c);
    throw std::invalid_argument(fmt::format("unknown command \"{}\"", c.command));
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kError;
  }
}

}  // namespace ssdm::cli
