#pragma once

// Cutting schemes that drive an oracle to a point where it gets stuck:
// bundle-level and central-cut ellipsoid.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ssdm/ball_programs.hpp"
#include "ssdm/geometry.hpp"
#include "ssdm/oracle.hpp"

namespace ssdm {

/// One oracle call as seen by an engine. delta is NaN when not computed.
struct IterationRecord {
  std::uint64_t s = 0;
  double delta = 0.0;
  std::size_t samples = 0;
  std::string outcome;  // "stuck", "cut-Y" or "cut-<stage>"
};

struct Candidate {
  Vec y;
  std::size_t calls = 0;
  std::size_t samples = 0;
};

struct InfeasibleCertificate {
  double delta_R = 0.0;  // min over the ball of the bundle max, >= -1e-8
  Bundle bundle;
  std::size_t calls = 0;
};

struct BudgetExhausted {
  std::size_t calls = 0;
  double last_delta = 0.0;  // NaN when never computed
};

using EngineOutcome = std::variant<Candidate, InfeasibleCertificate, BudgetExhausted>;

struct EngineResult {
  EngineOutcome outcome;
  std::vector<IterationRecord> log;
  std::size_t samples = 0;  // scenarios drawn over the whole run
};

/// Threshold on the min-max value above which the engines report infeasibility.
inline constexpr double kInfeasibleDelta = -1e-8;

/// ceil(32 R^2 / rho^2) + 1
std::size_t bl_budget(double R, double rho);
/// ceil(2 n^2 ln(1 + R / rho))
std::size_t ellipsoid_budget(std::size_t n, double R, double rho);

EngineResult run_bl(Oracle& oracle, const Ball& ball, std::size_t budget);

EngineResult run_ellipsoid(Oracle& oracle, const Ball& ball, double rho,
                           std::optional<std::size_t> budget_override = std::nullopt);

/// {y : (y - center)^T shape^{-1} (y - center) <= 1}
struct EllipsoidState {
  Vec center;
  Mat shape;
};

/// Smallest ellipsoid containing the half {a^T (y - center) <= 0}.
/// Throws ShapeDegenerate when the shape cannot be kept positive definite.
void ellipsoid_cut(EllipsoidState& E, const Vec& a);

/// log det of a symmetric positive definite matrix.
double log_det_spd(const Mat& m);

}  // namespace ssdm
