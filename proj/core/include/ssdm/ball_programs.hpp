#pragma once

// Convex subproblems of the bundle-level engine:
//   min over a ball of the max of a bundle of unit-gradient affine functions,
//   and Euclidean projection onto {y in ball : max_r f_r(y) <= level}.

#include <optional>
#include <vector>

#include "ssdm/geometry.hpp"

namespace ssdm {

/// Separators collected so far, in insertion order.
class Bundle {
 public:
  void add(Separator f) { cuts_.push_back(std::move(f)); }
  std::size_t size() const noexcept { return cuts_.size(); }
  bool empty() const noexcept { return cuts_.empty(); }
  const Separator& operator[](std::size_t r) const { return cuts_[r]; }
  auto begin() const noexcept { return cuts_.begin(); }
  auto end() const noexcept { return cuts_.end(); }

  /// max_r f_r(y); -inf for an empty bundle.
  double value(std::span<const double> y) const;

 private:
  std::vector<Separator> cuts_;
};

struct MinMaxResult {
  double delta = 0.0;       // max_r f_r(argmin)
  Vec argmin;               // a point of the ball
  double dual_value = 0.0;  // certified lower bound from simplex weights
  Vec weights;              // those weights (sum to 1)
};

/// min over the ball of max_r f_r. Throws EmptyBundle.
MinMaxResult min_max_over_ball(const Bundle& bundle, const Ball& ball);

/// Metric projection of y_prev onto {y in ball : max_r f_r(y) <= level}.
/// Throws EmptyLevelSet when that set is empty.
Vec project_to_level(const Vec& y_prev, const Bundle& bundle, double level, const Ball& ball);

/// Euclidean projection of p onto {y : N y <= b} (rows of N are the normals).
struct HalfspaceProjection {
  Vec y;
  Vec multipliers;  // p - y = N^T multipliers, multipliers >= 0
};

/// Dual active-set method for the projection QP; nullopt when the system is infeasible.
std::optional<HalfspaceProjection> project_onto_halfspaces(const Vec& p, const Mat& N, const Vec& b);

}  // namespace ssdm
