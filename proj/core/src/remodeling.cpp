#include "ssdm/remodeling.hpp"

#include <algorithm>
#include <cmath>

#include "ssdm/errors.hpp"

namespace ssdm {

namespace {

std::span<const double> prefix(const BlockModel& bm, std::size_t s, std::span<const double> xi_t) {
  if (s == 0) return {};
  const std::size_t len = bm.xi_dims[s - 1];
  if (len > xi_t.size()) throw DimensionMismatch("remodeling: stage data shorter than an earlier stage's");
  return xi_t.first(len);
}

// Columns of A (over y) rewritten over the coefficients for blocks 0..last.
Mat substitute(const BlockModel& bm, const DecisionBasis& basis, const CoefficientLayout& L, const Mat& A,
               std::size_t last, std::span<const double> xi) {
  Mat out(A.rows(), L.dim());
  for (std::size_t s = 0; s <= last && s < bm.blocks.size(); ++s) {
    const auto& block = bm.blocks[s];
    if (block.empty()) continue;
    const Vec phi = basis[s].features(prefix(bm, s, xi));
    for (std::size_t r = 0; r < phi.size(); ++r) {
      if (phi[r] == 0.0) continue;
      for (std::size_t i = 0; i < block.size(); ++i) {
        const std::size_t col = L.index(s, r, i);
        for (std::size_t row = 0; row < A.rows(); ++row) out(row, col) += phi[r] * A(row, block[i]);
      }
    }
  }
  return out;
}

void check_basis(const BlockModel& bm, const DecisionBasis& basis) {
  if (basis.size() != bm.blocks.size()) throw BasisDimensionMismatch("basis needs one entry per block");
  if (!basis[0].xi_indices.empty() || basis[0].custom_count != 0) {
    throw BasisDimensionMismatch("block 0 is fixed before any data is revealed; its rule must be constant");
  }
  for (std::size_t s = 1; s < basis.size(); ++s) {
    for (std::size_t k : basis[s].xi_indices) {
      if (k >= bm.xi_dims[s - 1]) throw BasisDimensionMismatch("basis refers to data beyond its stage");
    }
    if (basis[s].custom_count > 0 && !basis[s].custom) throw BasisDimensionMismatch("custom feature count without a function");
  }
}

}  // namespace

void BlockModel::validate() const {
  if (blocks.size() != stages + 1) throw DimensionMismatch("block model: need K + 1 blocks");
  if (xi_dims.size() != stages) throw DimensionMismatch("block model: need one data length per stage");
  std::vector<char> seen(n, 0);
  for (const auto& b : blocks) {
    for (std::size_t j : b) {
      if (j >= n || seen[j]) throw DimensionMismatch("block model: blocks must partition the decision");
      seen[j] = 1;
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw DimensionMismatch("block model: blocks must cover the decision");
  for (std::size_t t = 1; t < stages; ++t) {
    if (xi_dims[t] < xi_dims[t - 1]) throw DimensionMismatch("block model: stage data must grow");
  }
  Y.validate();
  if (Y.dim() != n) throw DimensionMismatch("block model: Y dimension");
}

SemiStochasticModel BlockModel::as_model() const {
  validate();
  return SemiStochasticModel(n, stages, Y, builder, sampler, box_lo, box_hi);
}

Vec BlockBasis::features(std::span<const double> xi_s) const {
  Vec phi;
  phi.reserve(size());
  phi.push_back(1.0);
  for (std::size_t k : xi_indices) {
    if (k >= xi_s.size()) throw BasisDimensionMismatch("basis index beyond the block's data");
    phi.push_back(xi_s[k]);
  }
  if (custom_count > 0) {
    const Vec extra = custom(xi_s);
    if (extra.size() != custom_count) throw BasisDimensionMismatch("custom features returned the wrong count");
    phi.insert(phi.end(), extra.begin(), extra.end());
  }
  return phi;
}

DecisionBasis constant_basis(const BlockModel& bm) { return DecisionBasis(bm.blocks.size()); }

CoefficientLayout coefficient_layout(const BlockModel& bm, const DecisionBasis& basis) {
  check_basis(bm, basis);
  CoefficientLayout L;
  L.offsets.push_back(0);
  for (std::size_t s = 0; s < bm.blocks.size(); ++s) {
    L.block_sizes.push_back(bm.blocks[s].size());
    L.offsets.push_back(L.offsets.back() + basis[s].size() * bm.blocks[s].size());
  }
  return L;
}

ChiBox default_chi_box(const BlockModel& bm, const DecisionBasis& basis, double feature_scale) {
  if (!(feature_scale > 0.0)) throw std::invalid_argument("default_chi_box: feature_scale must be positive");
  const auto L = coefficient_layout(bm, basis);
  ChiBox box{Vec(L.dim()), Vec(L.dim())};
  for (std::size_t s = 0; s < bm.blocks.size(); ++s) {
    for (std::size_t i = 0; i < bm.blocks[s].size(); ++i) {
      const std::size_t j = bm.blocks[s][i];
      const double width = bm.box_hi[j] - bm.box_lo[j];
      box.lo[L.index(s, 0, i)] = bm.box_lo[j];
      box.hi[L.index(s, 0, i)] = bm.box_hi[j];
      for (std::size_t r = 1; r < basis[s].size(); ++r) {
        box.lo[L.index(s, r, i)] = -width / feature_scale;
        box.hi[L.index(s, r, i)] = width / feature_scale;
      }
    }
  }
  return box;
}

SemiStochasticModel lift(const BlockModel& bm, const DecisionBasis& basis, const ChiBox& box) {
  bm.validate();
  const auto L = coefficient_layout(bm, basis);
  const std::size_t nc = L.dim();
  if (box.lo.size() != nc || box.hi.size() != nc) throw UnboundedChi("lift: coefficient box missing or of the wrong size");
  for (std::size_t j = 0; j < nc; ++j) {
    if (!std::isfinite(box.lo[j]) || !std::isfinite(box.hi[j])) throw UnboundedChi("lift: coefficient box must be finite");
    if (box.lo[j] > box.hi[j]) throw BadBox("lift: coefficient box out of order");
  }

  // Columns of y outside blocks 0..t, per stage.
  std::vector<std::vector<std::size_t>> later(bm.stages + 1);
  for (std::size_t t = 1; t <= bm.stages; ++t) {
    for (std::size_t s = t + 1; s < bm.blocks.size(); ++s) {
      later[t].insert(later[t].end(), bm.blocks[s].begin(), bm.blocks[s].end());
    }
  }

  const BlockModel orig = bm;
  const DecisionBasis bas = basis;
  const std::size_t K = bm.stages;
  auto builder = [orig, bas, L, later, K](std::size_t t, std::span<const double> xi) {
    if (t <= K) {
      const StagePolyhedron P = orig.builder(t, xi);
      for (std::size_t j : later[t]) {
        for (std::size_t row = 0; row < P.rows(); ++row) {
          if (P.A(row, j) != 0.0) throw ModelContractViolation("lift: stage involves a block fixed later");
        }
      }
      return StagePolyhedron{substitute(orig, bas, L, P.A, t, xi), P.B, P.C, P.d};
    }
    const auto& Y = orig.Y;
    return StagePolyhedron{substitute(orig, bas, L, Y.A, K, xi), Mat(Y.rows(), 0), Y.C, Y.d};
  };
  auto sampler = [orig](Rng& rng) {
    Scenario sc = orig.sampler(rng);
    sc.stages.push_back(sc.stages.back());
    return sc;
  };

  // Y over the coefficients is the box.
  PolyhedralRep Ybar{Mat(2 * nc, nc), Mat(2 * nc, 0), Vec(2 * nc)};
  for (std::size_t j = 0; j < nc; ++j) {
    Ybar.A(2 * j, j) = 1.0;
    Ybar.d[2 * j] = box.hi[j];
    Ybar.A(2 * j + 1, j) = -1.0;
    Ybar.d[2 * j + 1] = -box.lo[j];
  }
  return SemiStochasticModel(nc, K + 1, std::move(Ybar), builder, sampler, box.lo, box.hi);
}

Vec embed_constant(const BlockModel& bm, const DecisionBasis& basis, std::span<const double> y) {
  const auto L = coefficient_layout(bm, basis);
  if (y.size() != bm.n) throw DimensionMismatch("embed_constant: decision dimension");
  Vec chi(L.dim(), 0.0);
  for (std::size_t s = 0; s < bm.blocks.size(); ++s) {
    for (std::size_t i = 0; i < bm.blocks[s].size(); ++i) chi[L.index(s, 0, i)] = y[bm.blocks[s][i]];
  }
  return chi;
}

Vec materialize(const BlockModel& bm, const DecisionBasis& basis, std::span<const double> chi,
                const Scenario& scenario) {
  const auto L = coefficient_layout(bm, basis);
  if (chi.size() != L.dim()) throw DimensionMismatch("materialize: coefficient dimension");
  if (scenario.size() < bm.stages) throw DimensionMismatch("materialize: scenario too short");
  const std::span<const double> last = scenario.stage(bm.stages);
  Vec y(bm.n, 0.0);
  for (std::size_t s = 0; s < bm.blocks.size(); ++s) {
    if (bm.blocks[s].empty()) continue;
    const Vec phi = basis[s].features(prefix(bm, s, last));
    for (std::size_t i = 0; i < bm.blocks[s].size(); ++i) {
      double v = 0.0;
      for (std::size_t r = 0; r < phi.size(); ++r) v += phi[r] * chi[L.index(s, r, i)];
      y[bm.blocks[s][i]] = v;
    }
  }
  return y;
}

BlockModel inventory_block_model(const InventoryInstance& inst) {
  const SemiStochasticModel model = build_model(inst);
  const auto lay = layout_of(inst);
  BlockModel bm;
  bm.n = lay.dim();
  bm.stages = lay.K + 1;
  bm.blocks.push_back({lay.total()});
  for (std::size_t t = 1; t <= lay.K; ++t) {
    std::vector<std::size_t> b;
    for (std::size_t j = lay.lower(t); j < lay.budget(t) + 1; ++j) b.push_back(j);
    bm.blocks.push_back(std::move(b));
  }
  bm.blocks.emplace_back();
  bm.Y = model.Y();
  bm.builder = [inst](std::size_t t, std::span<const double> xi) { return inventory_stage(inst, t, xi); };
  bm.sampler = [inst](Rng& rng) { return sample_scenario(inst, rng); };
  for (std::size_t t = 1; t <= lay.K; ++t) bm.xi_dims.push_back(t * stage_data_size(inst));
  bm.xi_dims.push_back(lay.K * stage_data_size(inst));
  bm.box_lo = model.box_lo();
  bm.box_hi = model.box_hi();
  return bm;
}

}  // namespace ssdm
