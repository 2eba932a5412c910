#pragma once

// Replacing here-and-now blocks of the decision by decision rules that are
// linear in coefficients and may depend on the data already revealed.

#include <functional>
#include <vector>

#include "ssdm/geometry.hpp"
#include "ssdm/inventory.hpp"
#include "ssdm/model.hpp"

namespace ssdm {

/// A model whose decision splits into blocks 0..K (block s is fixed at time
/// s) and whose stage t only involves blocks 0..t.
struct BlockModel {
  std::size_t n = 0;
  std::size_t stages = 0;                      // K
  std::vector<std::vector<std::size_t>> blocks;  // K + 1 index lists partitioning [0, n)
  PolyhedralRep Y;
  StageBuilder builder;                        // stage rows over the full decision
  ScenarioSampler sampler;                     // K stage entries
  std::vector<std::size_t> xi_dims;            // length of stage t's data; earlier data is its prefix
  Vec box_lo, box_hi;

  /// Throws DimensionMismatch or ModelContractViolation.
  void validate() const;
  SemiStochasticModel as_model() const;
};

/// Scalar features of one block's data: 1, xi_s[k] for k in xi_indices, then
/// the custom features. The block's rule is sum_r feature_r(xi_s) * chi_{s,r}.
struct BlockBasis {
  std::vector<std::size_t> xi_indices;
  std::function<Vec(std::span<const double>)> custom;
  std::size_t custom_count = 0;

  std::size_t size() const noexcept { return 1 + xi_indices.size() + custom_count; }
  /// Throws BasisDimensionMismatch.
  Vec features(std::span<const double> xi_s) const;
};

using DecisionBasis = std::vector<BlockBasis>;

/// Every block constant.
DecisionBasis constant_basis(const BlockModel& bm);

/// Coefficient index map: coefficient of feature r for coordinate i of block s
/// sits at offset(s) + r * |block s| + i.
struct CoefficientLayout {
  std::vector<std::size_t> offsets;  // K + 2 entries
  std::vector<std::size_t> block_sizes;
  std::size_t dim() const noexcept { return offsets.back(); }
  std::size_t index(std::size_t s, std::size_t r, std::size_t i) const noexcept {
    return offsets[s] + r * block_sizes[s] + i;
  }
};

CoefficientLayout coefficient_layout(const BlockModel& bm, const DecisionBasis& basis);

struct ChiBox {
  Vec lo, hi;
};

/// Constant coefficients get the block's box; the others get
/// +-(box width) / feature_scale.
ChiBox default_chi_box(const BlockModel& bm, const DecisionBasis& basis, double feature_scale = 1.0);

/// Model over the coefficients. Stages 1..K are the original stages with the
/// rules substituted; stage K + 1 (no local decision) asks the rule values to
/// lie in Y. Throws BasisDimensionMismatch or UnboundedChi.
SemiStochasticModel lift(const BlockModel& bm, const DecisionBasis& basis, const ChiBox& box);

/// Coefficients reproducing a fixed decision (constant rules).
Vec embed_constant(const BlockModel& bm, const DecisionBasis& basis, std::span<const double> y);

/// Decision produced by the rules on a scenario (stage entries 1..K used).
Vec materialize(const BlockModel& bm, const DecisionBasis& basis, std::span<const double> chi,
                const Scenario& scenario);

/// The inventory as a block model: block 0 is the total budget, block t the
/// bands and budget of stage t, and the final stage (block K + 1, empty)
/// carries the total-cost rows.
BlockModel inventory_block_model(const InventoryInstance& inst);

}  // namespace ssdm
