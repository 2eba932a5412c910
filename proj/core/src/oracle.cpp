#include "ssdm/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ssdm/errors.hpp"
#include "ssdm/parallel.hpp"

namespace ssdm {

void OracleConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (const auto* fixed = std::get_if<FixedSchedule>(&schedule); fixed && fixed->M < 1) {
    throw std::invalid_argument("fixed schedule needs M >= 1");
  }
}

std::size_t strict_ceiling(double a) { return static_cast<std::size_t>(std::floor(a)) + 1; }

std::size_t sample_size(const OracleConfig& config, std::uint64_t s) {
  if (s < 1) throw std::invalid_argument("sample_size: call index starts at 1");
  double kappa;
  if (const auto* fixed = std::get_if<FixedSchedule>(&config.schedule)) {
    kappa = static_cast<double>(fixed->M);
  } else {
    const double sd = static_cast<double>(s);
    kappa = sd * sd * std::numbers::pi * std::numbers::pi / 6.0;
  }
  return strict_ceiling(std::log(kappa / config.delta) / config.epsilon);
}

QueryOutcome query(OracleState& state, const OracleConfig& config, const SemiStochasticModel& model,
                   std::span<const double> y) {
  const std::uint64_t call = state.s++;
  if (!all_finite(y)) throw DimensionMismatch("query: y must be finite");

  auto member = membership_or_separator(model, y);
  if (auto* f = std::get_if<Separator>(&member)) {
    return SeparatorFound{std::move(*f), SeparatorSource::YMembership, 0, 0};
  }

  const std::size_t N = sample_size(config, call);
  struct Hit {
    std::size_t stage;
    Separator separator;
  };
  auto hit = first_hit<Hit>(N, config.threads, [&](std::size_t i) -> std::optional<Hit> {
    Rng rng(derive_seed(state.root_seed, StreamTag::Solve, call, i));
    const Scenario scenario = model.sample(rng);
    for (std::size_t t = 1; t <= model.stages(); ++t) {
      const auto P = model.stage(t, scenario.stage(t));
      auto res = stage_feasible(P, t, y);
      if (auto* bad = std::get_if<StageInfeasible>(&res)) {
        return Hit{t, separator_from_infeasibility(P, y, bad->farkas)};
      }
    }
    return std::nullopt;
  });
  if (!hit) return Stuck{N};
  return SeparatorFound{std::move(hit->second.separator), SeparatorSource::Stage, hit->second.stage, hit->first + 1};
}

}  // namespace ssdm
