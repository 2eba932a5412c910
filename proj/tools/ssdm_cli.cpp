#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdlib>

#include "commands.hpp"

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("ssdm");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("SSDM_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only accept real names.
    if (level != spdlog::level::off || std::string_view(env) == "off") spdlog::set_level(level);
  }
}

void add_common(CLI::App* sub, ssdm::cli::RunConfig& c, bool needs_instance) {
  auto* inst = sub->add_option("--instance", c.instance, "Instance JSON file");
  if (needs_instance) inst->required()->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "Root seed")->capture_default_str();
  sub->add_option("--threads", c.threads, "Worker threads (0: all cores)")->capture_default_str();
  sub->add_option("--out-dir", c.out_dir, "Directory for artifacts")->capture_default_str();
  sub->add_option("--rules", c.rules, "Decision rules for inventory: constant or demand")
      ->check(CLI::IsMember({"constant", "demand"}))
      ->capture_default_str();
}

void add_search(CLI::App* sub, ssdm::cli::RunConfig& c) {
  sub->add_option("--epsilon", c.epsilon, "Tolerated failure probability")->capture_default_str();
  sub->add_option("--delta", c.delta, "Tolerated probability of an unreliable answer")->capture_default_str();
  sub->add_option("--rho", c.rho, "Inscribed radius the call budget is sized for")->capture_default_str();
  sub->add_option("--engine", c.engine, "bl or ellipsoid")->check(CLI::IsMember({"bl", "ellipsoid"}))->capture_default_str();
  sub->add_option("--schedule", c.schedule, "Sample sizes: fixed or adaptive")
      ->check(CLI::IsMember({"fixed", "adaptive"}))
      ->capture_default_str();
  sub->add_option("--budget", c.budget, "Oracle calls per engine run (overrides the formula)");
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Strategic decisions under sampled uncertainty"};
  app.require_subcommand(1);
  ssdm::cli::RunConfig c;

  auto* solve = app.add_subcommand("solve", "Search for a decision that passes the sampling oracle");
  add_common(solve, c, true);
  add_search(solve, c);

  auto* minimize = app.add_subcommand("minimize", "Minimize the instance objective by bisection");
  add_common(minimize, c, true);
  add_search(minimize, c);
  minimize->add_option("--kappa-opt", c.kappa, "Optimality tolerance")->capture_default_str();

  auto* validate = app.add_subcommand("validate", "Monte Carlo check of a decision on fresh scenarios");
  add_common(validate, c, true);
  validate->add_option("--decision", c.decision, "Decision JSON file")->required()->check(CLI::ExistingFile);
  validate->add_option("--samples", c.samples, "Number of scenarios")->capture_default_str();

  auto* demo = app.add_subcommand("demo-inventory", "Write, minimize and validate the default inventory instance");
  add_common(demo, c, false);
  add_search(demo, c);
  demo->add_option("--kappa-opt", c.kappa, "Optimality tolerance")->capture_default_str();
  demo->add_option("--samples", c.samples, "Validation scenarios")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ssdm::cli::kError;
  }
  c.command = app.get_subcommands().front()->get_name();
  if (c.command == "demo-inventory" && !c.budget) c.budget = 300;
  return ssdm::cli::dispatch(c);
}
