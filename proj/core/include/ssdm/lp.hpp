#pragma once

// Dense bounded-variable primal simplex.
//
// Canonical form:   minimize c^T z   s.t.  G z <= h,  lo <= z <= hi
// (lo/hi entries may be -inf/+inf; empty lo/hi vectors mean "free").
//
// Infeasibility is reported with a Farkas certificate: multipliers
// lambda >= 0 on the rows of G and signed multipliers nu on the variable
// bounds (nu_j > 0 weights z_j <= hi_j, nu_j < 0 weights -z_j <= -lo_j), such
// that lambda^T G + nu = 0 and
//     lambda^T h + sum_{nu_j>0} nu_j hi_j + sum_{nu_j<0} nu_j lo_j < 0.
// The pair is normalized so that ||lambda||_1 + ||nu||_1 = 1.

#include <cstddef>
#include <variant>

#include "ssdm/geometry.hpp"

namespace ssdm {

struct LinearProgram {
  Vec c;
  Mat G;
  Vec h;
  Vec lo;  // empty => all -inf
  Vec hi;  // empty => all +inf

  std::size_t num_vars() const noexcept { return G.cols(); }
  std::size_t num_rows() const noexcept { return G.rows(); }
};

struct LpOptimal {
  Vec z;
  double value = 0.0;
};

struct LpInfeasible {
  Vec row_multipliers;    // lambda, one per row of G
  Vec bound_multipliers;  // nu, one per variable
  /// lambda^T h + folded bound terms after normalization (strictly negative).
  double margin = 0.0;
};

struct LpUnbounded {
  Vec ray;
};

using LpOutcome = std::variant<LpOptimal, LpInfeasible, LpUnbounded>;

struct LpFeasible {
  Vec z;
};

using FeasibilityOutcome = std::variant<LpFeasible, LpInfeasible>;

/// Relative feasibility tolerance used throughout: 1e-8 * (1 + ||h||_inf).
double feasibility_tolerance(std::span<const double> h);

/// Solves the LP. Throws NumericalFailure after 50 * (rows + cols) pivots and
/// DimensionMismatch on malformed input.
LpOutcome solve_lp(const LinearProgram& lp);

/// Phase one only on {z free : G z <= h}.
FeasibilityOutcome lp_feasible(const Mat& G, const Vec& h);

/// Phase one only on {G z <= h, lo <= z <= hi}.
FeasibilityOutcome lp_feasible(const Mat& G, const Vec& h, const Vec& lo, const Vec& hi);

/// Same answer as lp_feasible(G, h), but rows with a single nonzero are turned
/// into variable bounds first. The certificate is reported on the rows of G
/// only (bound_multipliers are zero).
FeasibilityOutcome lp_feasible_folded(const Mat& G, const Vec& h);

}  // namespace ssdm
