#include "ssdm/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fmt/format.h>
#include <limits>

#include "ssdm/errors.hpp"

namespace ssdm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kOptimalityTol = 1e-9;
constexpr double kRatioTieTol = 1e-12;
constexpr std::size_t kNoRow = static_cast<std::size_t>(-1);

enum class Status : std::uint8_t { Basic, AtLower, AtUpper, Free, Fixed };

// Full-tableau bounded simplex. Columns are laid out as
// [structural (n) | slack (m) | artificial (k)]; row i reads
//   sum_j T(i, j) x_j = const,
// with the basic column of row i holding a unit entry.
class Tableau {
 public:
  explicit Tableau(const LinearProgram& lp) : lp_(lp), m_(lp.num_rows()), n_(lp.num_vars()) {
    const Vec& lo = lp.lo;
    const Vec& hi = lp.hi;
    Vec x0(n_, 0.0);
    lb_.assign(n_ + m_, 0.0);
    ub_.assign(n_ + m_, kInf);
    for (std::size_t j = 0; j < n_; ++j) {
      lb_[j] = lo.empty() ? -kInf : lo[j];
      ub_[j] = hi.empty() ? kInf : hi[j];
      if (std::isfinite(lb_[j])) {
        x0[j] = lb_[j];
      } else if (std::isfinite(ub_[j])) {
        x0[j] = ub_[j];
      }
    }
    Vec resid(m_);
    std::size_t n_art = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      resid[i] = lp.h[i] - dot(lp.G.row(i), x0);
      if (resid[i] < 0.0) ++n_art;
    }
    cols_ = n_ + m_ + n_art;
    lb_.resize(cols_, 0.0);
    ub_.resize(cols_, kInf);
    T_.assign(m_ * cols_, 0.0);
    x_.assign(cols_, 0.0);
    status_.assign(cols_, Status::AtLower);
    basis_.assign(m_, 0);
    row_of_.assign(cols_, kNoRow);

    for (std::size_t j = 0; j < n_; ++j) {
      x_[j] = x0[j];
      if (lb_[j] == ub_[j]) {
        status_[j] = Status::Fixed;
      } else if (std::isfinite(lb_[j])) {
        status_[j] = Status::AtLower;
      } else if (std::isfinite(ub_[j])) {
        status_[j] = Status::AtUpper;
      } else {
        status_[j] = Status::Free;
      }
    }

    std::size_t art = n_ + m_;
    for (std::size_t i = 0; i < m_; ++i) {
      double* row = &T_[i * cols_];
      const auto g = lp.G.row(i);
      if (resid[i] >= 0.0) {
        std::copy(g.begin(), g.end(), row);
        row[n_ + i] = 1.0;
        set_basic(i, n_ + i, resid[i]);
      } else {
        for (std::size_t j = 0; j < n_; ++j) row[j] = -g[j];
        row[n_ + i] = -1.0;
        row[art] = 1.0;
        x_[n_ + i] = 0.0;
        status_[n_ + i] = Status::AtLower;
        set_basic(i, art, -resid[i]);
        ++art;
      }
    }
    max_iterations_ = 50 * (m_ + n_) + 50;
  }

  /// Returns true when the system is feasible within tolerance.
  bool phase_one() {
    cost_.assign(cols_, 0.0);
    for (std::size_t j = n_ + m_; j < cols_; ++j) cost_[j] = 1.0;
    compute_reduced_costs();
    run(/*allow_unbounded=*/false);
    double infeasibility = 0.0;
    for (std::size_t j = n_ + m_; j < cols_; ++j) infeasibility += x_[j];
    return infeasibility <= feasibility_tolerance(lp_.h);
  }

  LpInfeasible farkas() const {
    LpInfeasible out;
    out.row_multipliers.assign(m_, 0.0);
    out.bound_multipliers.assign(n_, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double v = std::max(d_[n_ + i], 0.0);
      out.row_multipliers[i] = v;
      total += v;
    }
    for (std::size_t j = 0; j < n_; ++j) {
      double v = 0.0;
      switch (status_[j]) {
        case Status::AtLower: v = -std::max(d_[j], 0.0); break;
        case Status::AtUpper: v = -std::min(d_[j], 0.0); break;
        case Status::Fixed: v = -d_[j]; break;
        default: break;
      }
      out.bound_multipliers[j] = v;
      total += std::abs(v);
    }
    if (total > 0.0) {
      for (double& v : out.row_multipliers) v /= total;
      for (double& v : out.bound_multipliers) v /= total;
    }
    double margin = dot(out.row_multipliers, lp_.h);
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = out.bound_multipliers[j];
      if (v > 0.0) margin += v * ub_[j];
      if (v < 0.0) margin += v * lb_[j];
    }
    out.margin = margin;
    return out;
  }

  LpOutcome phase_two() {
    for (std::size_t j = n_ + m_; j < cols_; ++j) {
      ub_[j] = 0.0;
      if (status_[j] != Status::Basic) {
        status_[j] = Status::Fixed;
        x_[j] = 0.0;
      }
    }
    cost_.assign(cols_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) cost_[j] = lp_.c[j];
    compute_reduced_costs();
    if (!run(/*allow_unbounded=*/true)) {
      LpUnbounded u;
      u.ray.assign(n_, 0.0);
      if (ray_col_ < n_) u.ray[ray_col_] = ray_dir_;
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] < n_) u.ray[basis_[i]] = -T_[i * cols_ + ray_col_] * ray_dir_;
      }
      return u;
    }
    LpOptimal opt;
    opt.z = structural();
    opt.value = dot(lp_.c, opt.z);
    return opt;
  }

  Vec structural() const {
    Vec z(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
    // Drift guard: nonbasic values sit exactly on bounds, clamp basics into them.
    for (std::size_t j = 0; j < n_; ++j) z[j] = std::clamp(z[j], lb_[j], ub_[j]);
    return z;
  }

 private:
  void set_basic(std::size_t row, std::size_t col, double value) {
    basis_[row] = col;
    row_of_[col] = row;
    status_[col] = Status::Basic;
    x_[col] = value;
  }

  void compute_reduced_costs() {
    d_ = cost_;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = cost_[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &T_[i * cols_];
      for (std::size_t j = 0; j < cols_; ++j) d_[j] -= cb * row[j];
    }
  }

  // Bland: lowest-index eligible column.
  bool choose_entering(std::size_t& col, double& dir) const {
    for (std::size_t j = 0; j < cols_; ++j) {
      const double dj = d_[j];
      switch (status_[j]) {
        case Status::AtLower:
          if (dj < -kOptimalityTol) { col = j; dir = 1.0; return true; }
          break;
        case Status::AtUpper:
          if (dj > kOptimalityTol) { col = j; dir = -1.0; return true; }
          break;
        case Status::Free:
          if (std::abs(dj) > kOptimalityTol) { col = j; dir = dj < 0.0 ? 1.0 : -1.0; return true; }
          break;
        default:
          break;
      }
    }
    return false;
  }

  // Bounded-variable ratio test; leave == kNoRow means a bound flip (or no block at all when theta is inf).
  double ratio_test(std::size_t q, double dir, double pivot_tol, std::size_t& leave) const {
    double theta = (std::isfinite(lb_[q]) && std::isfinite(ub_[q])) ? ub_[q] - lb_[q] : kInf;
    leave = kNoRow;
    for (std::size_t i = 0; i < m_; ++i) {
      const double alpha = T_[i * cols_ + q] * dir;
      const std::size_t b = basis_[i];
      double t;
      if (alpha > pivot_tol && std::isfinite(lb_[b])) {
        t = (x_[b] - lb_[b]) / alpha;
      } else if (alpha < -pivot_tol && std::isfinite(ub_[b])) {
        t = (ub_[b] - x_[b]) / -alpha;
      } else {
        continue;
      }
      t = std::max(t, 0.0);
      if (!std::isfinite(theta) || t < theta - kRatioTieTol * (1.0 + theta)) {
        theta = t;
        leave = i;
      } else if (leave != kNoRow && std::abs(t - theta) <= kRatioTieTol * (1.0 + theta) && b < basis_[leave]) {
        leave = i;
      }
    }
    return theta;
  }

  // Returns false when an unbounded direction was found.
  bool run(bool allow_unbounded) {
    std::size_t q = 0;
    double dir = 0.0;
    while (choose_entering(q, dir)) {
      if (++iterations_ > max_iterations_) {
        throw NumericalFailure(fmt::format("simplex exceeded {} pivots ({} rows, {} cols)",
                                           max_iterations_, m_, n_));
      }
      if (iterations_ % 64 == 0) {
        compute_reduced_costs();
        if (!choose_entering(q, dir)) break;
      }
      std::size_t leave = kNoRow;
      double theta = ratio_test(q, dir, kPivotTol, leave);
      if (!std::isfinite(theta)) {
        // Drifted reduced costs or tiny column entries can fake a ray: refresh and retry.
        compute_reduced_costs();
        if (!choose_entering(q, dir)) break;
        theta = ratio_test(q, dir, kPivotTol, leave);
        if (!std::isfinite(theta) && !allow_unbounded) theta = ratio_test(q, dir, 1e-14, leave);
      }
      if (!std::isfinite(theta)) {
        if (!allow_unbounded) throw NumericalFailure("phase one reported an unbounded direction");
        ray_col_ = q;
        ray_dir_ = dir;
        return false;
      }
      const double step = dir * theta;
      if (step != 0.0) {
        x_[q] += step;
        for (std::size_t i = 0; i < m_; ++i) {
          const double a = T_[i * cols_ + q];
          if (a != 0.0) x_[basis_[i]] -= a * step;
        }
      }
      if (leave == kNoRow) {
        // Bound flip.
        status_[q] = dir > 0.0 ? Status::AtUpper : Status::AtLower;
        x_[q] = dir > 0.0 ? ub_[q] : lb_[q];
        continue;
      }
      const std::size_t out_col = basis_[leave];
      const double alpha = T_[leave * cols_ + q] * dir;
      if (lb_[out_col] == ub_[out_col]) {
        status_[out_col] = Status::Fixed;
        x_[out_col] = lb_[out_col];
      } else if (alpha > 0.0) {
        status_[out_col] = Status::AtLower;
        x_[out_col] = lb_[out_col];
      } else {
        status_[out_col] = Status::AtUpper;
        x_[out_col] = ub_[out_col];
      }
      row_of_[out_col] = kNoRow;
      pivot(leave, q);
      set_basic(leave, q, x_[q]);
    }
    return true;
  }

  void pivot(std::size_t r, std::size_t q) {
    double* prow = &T_[r * cols_];
    const double inv = 1.0 / prow[q];
    for (std::size_t j = 0; j < cols_; ++j) prow[j] *= inv;
    prow[q] = 1.0;
    nz_.clear();
    for (std::size_t j = 0; j < cols_; ++j) {
      if (prow[j] != 0.0) nz_.push_back(j);
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &T_[i * cols_];
      const double f = row[q];
      if (f == 0.0) continue;
      for (std::size_t j : nz_) row[j] -= f * prow[j];
      row[q] = 0.0;
    }
    const double f = d_[q];
    if (f != 0.0) {
      for (std::size_t j : nz_) d_[j] -= f * prow[j];
      d_[q] = 0.0;
    }
  }

  const LinearProgram& lp_;
  std::size_t m_;
  std::size_t n_;
  std::size_t cols_ = 0;
  std::vector<double> T_;
  std::vector<double> cost_;
  std::vector<double> d_;
  std::vector<double> x_;
  std::vector<double> lb_;
  std::vector<double> ub_;
  std::vector<Status> status_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> row_of_;
  std::vector<std::size_t> nz_;
  std::size_t iterations_ = 0;
  std::size_t max_iterations_ = 0;
  std::size_t ray_col_ = 0;
  double ray_dir_ = 0.0;
};

void check_shape(const LinearProgram& lp) {
  const auto m = lp.G.rows();
  const auto n = lp.G.cols();
  if (lp.h.size() != m) throw DimensionMismatch("LP: h does not match the rows of G");
  if (!lp.c.empty() && lp.c.size() != n) throw DimensionMismatch("LP: objective length");
  if (!lp.lo.empty() && lp.lo.size() != n) throw DimensionMismatch("LP: lower bound length");
  if (!lp.hi.empty() && lp.hi.size() != n) throw DimensionMismatch("LP: upper bound length");
  if (!all_finite(lp.c)) throw DimensionMismatch("LP: objective must be finite");
  for (std::size_t j = 0; j < lp.lo.size(); ++j) {
    if (!lp.hi.empty() && lp.lo[j] > lp.hi[j]) {
      // Crossed bounds: the solver would report infeasibility through the
      // bound multipliers only if it could represent them; treat as malformed.
      throw DimensionMismatch(fmt::format("LP: crossed bounds on variable {}", j));
    }
  }
}

}  // namespace

double feasibility_tolerance(std::span<const double> h) { return 1e-8 * (1.0 + norm_inf(h)); }

LpOutcome solve_lp(const LinearProgram& lp) {
  check_shape(lp);
  LinearProgram full = lp;
  if (full.c.empty()) full.c.assign(lp.num_vars(), 0.0);
  Tableau tab(full);
  if (!tab.phase_one()) return tab.farkas();
  return tab.phase_two();
}

FeasibilityOutcome lp_feasible(const Mat& G, const Vec& h) { return lp_feasible(G, h, {}, {}); }

FeasibilityOutcome lp_feasible(const Mat& G, const Vec& h, const Vec& lo, const Vec& hi) {
  LinearProgram lp{Vec(G.cols(), 0.0), G, h, lo, hi};
  check_shape(lp);
  Tableau tab(lp);
  if (!tab.phase_one()) return tab.farkas();
  return LpFeasible{tab.structural()};
}

FeasibilityOutcome lp_feasible_folded(const Mat& G, const Vec& h) {
  const std::size_t m = G.rows();
  const std::size_t n = G.cols();
  if (h.size() != m) throw DimensionMismatch("lp_feasible_folded: h does not match the rows of G");
  const double tol = feasibility_tolerance(h);

  auto single_row = [&](std::size_t i) {
    LpInfeasible out;
    out.row_multipliers.assign(m, 0.0);
    out.bound_multipliers.assign(n, 0.0);
    out.row_multipliers[i] = 1.0;
    out.margin = h[i];
    return out;
  };

  Vec lo(n, -kInf), hi(n, kInf);
  std::vector<std::size_t> lo_row(n, kNoRow), hi_row(n, kNoRow);
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < m; ++i) {
    const auto g = G.row(i);
    std::size_t nz = 0, col = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (g[j] != 0.0) {
        ++nz;
        col = j;
      }
    }
    if (nz == 0) {
      if (h[i] < -tol) return single_row(i);
      continue;
    }
    if (nz > 1) {
      kept.push_back(i);
      continue;
    }
    const double bound = h[i] / g[col];
    if (g[col] > 0.0) {
      if (bound < hi[col]) {
        hi[col] = bound;
        hi_row[col] = i;
      }
    } else if (bound > lo[col]) {
      lo[col] = bound;
      lo_row[col] = i;
    }
  }

  auto finish = [&](Vec lambda) {
    double total = 0.0;
    for (double v : lambda) total += v;
    LpInfeasible out;
    for (double& v : lambda) v /= total;
    out.margin = dot(lambda, h);
    out.row_multipliers = std::move(lambda);
    out.bound_multipliers.assign(n, 0.0);
    return out;
  };

  for (std::size_t j = 0; j < n; ++j) {
    if (lo[j] <= hi[j]) continue;
    if (lo[j] - hi[j] > tol) {
      Vec lambda(m, 0.0);
      lambda[hi_row[j]] += 1.0 / std::abs(G(hi_row[j], j));
      lambda[lo_row[j]] += 1.0 / std::abs(G(lo_row[j], j));
      return finish(std::move(lambda));
    }
    hi[j] = lo[j];
  }

  Mat Gk(kept.size(), n);
  Vec hk(kept.size());
  for (std::size_t k = 0; k < kept.size(); ++k) {
    std::copy(G.row(kept[k]).begin(), G.row(kept[k]).end(), Gk.row(k).begin());
    hk[k] = h[kept[k]];
  }
  auto res = lp_feasible(Gk, hk, lo, hi);
  if (auto* feas = std::get_if<LpFeasible>(&res)) return *feas;

  const auto& cert = std::get<LpInfeasible>(res);
  Vec lambda(m, 0.0);
  for (std::size_t k = 0; k < kept.size(); ++k) lambda[kept[k]] = cert.row_multipliers[k];
  for (std::size_t j = 0; j < n; ++j) {
    const double v = cert.bound_multipliers[j];
    if (v > 0.0 && hi_row[j] != kNoRow) lambda[hi_row[j]] += v / std::abs(G(hi_row[j], j));
    if (v < 0.0 && lo_row[j] != kNoRow) lambda[lo_row[j]] += -v / std::abs(G(lo_row[j], j));
  }
  return finish(std::move(lambda));
}

}  // namespace ssdm
