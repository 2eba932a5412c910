#include "ssdm/ball_programs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssdm/errors.hpp"
#include "ssdm/lp.hpp"

namespace ssdm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Orthogonal factorization of the active normals for the dual active-set
// projection: N_A^T = Q [R; 0] with Q (n x n) orthogonal and R (k x k) upper
// triangular, kept up to date by Givens rotations.
class ActiveFactor {
 public:
  explicit ActiveFactor(std::size_t n) : n_(n), q_(n * n, 0.0), r_(n * n, 0.0) {
    for (std::size_t i = 0; i < n; ++i) q_[i * n + i] = 1.0;
  }

  std::size_t size() const noexcept { return k_; }

  // d = Q^T v
  Vec rotate(std::span<const double> v) const {
    Vec d(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      const double* col = &q_[j * n_];
      double s = 0.0;
      for (std::size_t i = 0; i < n_; ++i) s += col[i] * v[i];
      d[j] = s;
    }
    return d;
  }

  // Component of v orthogonal to the active normals, from d = Q^T v.
  Vec orthogonal_part(const Vec& d) const {
    Vec z(n_, 0.0);
    for (std::size_t j = k_; j < n_; ++j) {
      if (d[j] != 0.0) axpy(d[j], std::span<const double>(&q_[j * n_], n_), z);
    }
    return z;
  }

  // Solves R r = d[0..k).
  Vec solve_r(const Vec& d) const {
    Vec r(k_);
    for (std::size_t i = k_; i-- > 0;) {
      double s = d[i];
      for (std::size_t j = i + 1; j < k_; ++j) s -= at(i, j) * r[j];
      r[i] = s / at(i, i);
    }
    return r;
  }

  // Appends a normal given d = Q^T n_new.
  void append(Vec d) {
    for (std::size_t j = n_ - 1; j > k_; --j) {
      if (d[j] == 0.0) continue;
      double c, s;
      givens(d[j - 1], d[j], c, s);
      d[j - 1] = c * d[j - 1] + s * d[j];
      d[j] = 0.0;
      rotate_columns(j - 1, j, c, s);
    }
    for (std::size_t i = 0; i <= k_; ++i) at(i, k_) = d[i];
    ++k_;
  }

  // Removes active column j and restores the triangular shape.
  void remove(std::size_t j) {
    for (std::size_t c = j; c + 1 < k_; ++c) {
      for (std::size_t i = 0; i <= c + 1; ++i) at(i, c) = at(i, c + 1);
    }
    for (std::size_t i = 0; i < k_; ++i) at(i, k_ - 1) = 0.0;
    --k_;
    for (std::size_t i = j; i < k_; ++i) {
      const double a = at(i, i), b = at(i + 1, i);
      if (b == 0.0) continue;
      double c, s;
      givens(a, b, c, s);
      for (std::size_t col = i; col < k_; ++col) {
        const double x = at(i, col), y = at(i + 1, col);
        at(i, col) = c * x + s * y;
        at(i + 1, col) = -s * x + c * y;
      }
      at(i + 1, i) = 0.0;
      rotate_columns(i, i + 1, c, s);
    }
  }

 private:
  double& at(std::size_t i, std::size_t j) { return r_[j * n_ + i]; }
  double at(std::size_t i, std::size_t j) const { return r_[j * n_ + i]; }

  static void givens(double a, double b, double& c, double& s) {
    const double h = std::hypot(a, b);
    c = a / h;
    s = b / h;
  }

  // Q <- Q G^T on columns (i, j), matching the row rotation applied to R.
  void rotate_columns(std::size_t i, std::size_t j, double c, double s) {
    double* qi = &q_[i * n_];
    double* qj = &q_[j * n_];
    for (std::size_t t = 0; t < n_; ++t) {
      const double x = qi[t], y = qj[t];
      qi[t] = c * x + s * y;
      qj[t] = -s * x + c * y;
    }
  }

  std::size_t n_;
  std::size_t k_ = 0;
  Vec q_;  // column-major
  Vec r_;  // column-major, leading k x k block used
};

}  // namespace

double Bundle::value(std::span<const double> y) const {
  double v = -kInf;
  for (const auto& f : cuts_) v = std::max(v, f(y));
  return v;
}

std::optional<HalfspaceProjection> project_onto_halfspaces(const Vec& p, const Mat& N, const Vec& b) {
  const std::size_t m = N.rows();
  const std::size_t n = p.size();
  if (N.cols() != n || b.size() != m) throw DimensionMismatch("project_onto_halfspaces: shape");

  Vec norms(m);
  for (std::size_t i = 0; i < m; ++i) norms[i] = norm2(N.row(i));

  Vec y = p;
  std::vector<std::size_t> act;
  Vec u;  // multipliers of the active rows
  std::vector<char> is_active(m, 0);
  ActiveFactor fac(n);

  const std::size_t cap = 20 * (m + n) + 100;
  std::size_t iter = 0;
  for (;;) {
    // Most violated inactive row, normalized.
    std::size_t q = m;
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (is_active[i] || norms[i] == 0.0) {
        if (norms[i] == 0.0 && b[i] < -1e-10 * (1.0 + std::abs(b[i]))) return std::nullopt;
        continue;
      }
      const double viol = dot(N.row(i), y) - b[i];
      if (viol <= 1e-11 * (1.0 + std::abs(b[i]))) continue;
      const double score = viol / norms[i];
      if (score > worst) {
        worst = score;
        q = i;
      }
    }
    if (q == m) break;

    const auto nq = N.row(q);
    double uq = 0.0;
    for (;;) {
      if (++iter > cap) throw NumericalFailure("project_onto_halfspaces: iteration cap");
      const std::size_t k = act.size();
      const Vec d = fac.rotate(nq);
      const Vec r = fac.solve_r(d);
      Vec z = fac.orthogonal_part(d);
      for (auto& x : z) x = -x;
      const double zz = dot(z, z);

      double t1 = kInf;
      std::size_t drop = k;
      for (std::size_t j = 0; j < k; ++j) {
        if (r[j] > 1e-12) {
          const double t = u[j] / r[j];
          if (t < t1) {
            t1 = t;
            drop = j;
          }
        }
      }
      const double viol = dot(nq, y) - b[q];
      // n_q numerically inside the span of the active rows
      const bool moves = zz > 1e-18 * norms[q] * norms[q];
      const double t2 = moves ? std::max(viol, 0.0) / zz : kInf;
      if (!moves && drop == k) return std::nullopt;

      const double t = std::min(t1, t2);
      if (moves) axpy(t, z, y);
      for (std::size_t j = 0; j < k; ++j) u[j] -= t * r[j];
      uq += t;

      if (t2 <= t1) {
        act.push_back(q);
        u.push_back(uq);
        is_active[q] = 1;
        fac.append(d);
        break;
      }
      is_active[act[drop]] = 0;
      act.erase(act.begin() + static_cast<std::ptrdiff_t>(drop));
      u.erase(u.begin() + static_cast<std::ptrdiff_t>(drop));
      fac.remove(drop);
    }
  }

  HalfspaceProjection out{std::move(y), Vec(m, 0.0)};
  for (std::size_t j = 0; j < act.size(); ++j) out.multipliers[act[j]] = std::max(u[j], 0.0);
  return out;
}

namespace {

struct BundleRows {
  Mat N;
  Vec alpha;        // alpha_r
  Vec alpha_shift;  // alpha_r + a_r^T c
};

BundleRows bundle_rows(const Bundle& bundle, const Ball& ball) {
  BundleRows out;
  out.N = Mat(bundle.size(), ball.dim());
  for (std::size_t r = 0; r < bundle.size(); ++r) {
    const auto& f = bundle[r];
    if (f.dim() != ball.dim()) throw DimensionMismatch("bundle/ball dimension");
    std::copy(f.a().begin(), f.a().end(), out.N.row(r).begin());
    out.alpha.push_back(f.alpha());
    out.alpha_shift.push_back(f.alpha() + dot(f.a(), ball.center));
  }
  return out;
}

Vec level_rhs(const Vec& alpha, double level) {
  Vec b(alpha.size());
  for (std::size_t r = 0; r < alpha.size(); ++r) b[r] = level - alpha[r];
  return b;
}

// sum_r w_r alpha'_r - R || sum_r w_r a_r ||, a lower bound on the min-max value.
double dual_objective(const BundleRows& rows, const Vec& w, double R) {
  const Vec u = matvec_transposed(rows.N, w);
  return dot(w, rows.alpha_shift) - R * norm2(u);
}

}  // namespace

MinMaxResult min_max_over_ball(const Bundle& bundle, const Ball& ball) {
  if (bundle.empty()) throw EmptyBundle("min_max_over_ball: empty bundle");
  const auto rows = bundle_rows(bundle, ball);
  const std::size_t m = bundle.size();
  const Vec& c = ball.center;
  const double R = ball.radius;

  MinMaxResult best;
  best.argmin = c;
  best.delta = bundle.value(c);

  // Single-cut weights give the first certificate: max_r alpha'_r - R.
  const auto top = static_cast<std::size_t>(
      std::max_element(rows.alpha_shift.begin(), rows.alpha_shift.end()) - rows.alpha_shift.begin());
  best.weights.assign(m, 0.0);
  best.weights[top] = 1.0;
  best.dual_value = rows.alpha_shift[top] - R;
  double lower = best.dual_value;

  auto offer_weights = [&](Vec w) {
    double s = 0.0;
    for (double x : w) s += x;
    if (s <= 0.0) return;
    for (auto& x : w) x /= s;
    const double v = dual_objective(rows, w, R);
    if (v > best.dual_value) {
      best.dual_value = v;
      best.weights = std::move(w);
    }
    lower = std::max(lower, best.dual_value);
  };
  auto offer_point = [&](Vec y) {
    const double dist = norm2(y - c);
    if (dist > R) {
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = c[i] + (y[i] - c[i]) * (R / dist);
    }
    const double v = bundle.value(y);
    if (v < best.delta) {
      best.delta = v;
      best.argmin = std::move(y);
    }
  };
  auto done = [&] { return best.delta - lower <= 1e-10 * (1.0 + R + std::abs(best.delta)); };

  // Newton on the level: d(tau) = dist(c, {max_r f_r <= tau}) is convex and
  // nonincreasing; its Newton step from the left equals the dual value of the
  // normalized projection multipliers, so every iterate is certified.
  double tau = lower;
  for (int it = 0; it < 60 && !done(); ++it) {
    const auto proj = project_onto_halfspaces(c, rows.N, level_rhs(rows.alpha, tau));
    double next;
    if (!proj) {
      const auto cert = lp_feasible(rows.N, level_rhs(rows.alpha, tau));
      if (const auto* ok = std::get_if<LpFeasible>(&cert)) {
        // level set degenerate at this tau; leave the rest to the bisection
        offer_point(ok->z);
        break;
      }
      offer_weights(std::get<LpInfeasible>(cert).row_multipliers);
      next = best.dual_value;
    } else {
      const double d = norm2(proj->y - c);
      if (d <= R * (1.0 + 1e-12) + 1e-14) {
        offer_point(proj->y);
        lower = std::max(lower, tau);
        break;
      }
      offer_weights(proj->multipliers);
      Vec ys(c);
      axpy(R / d, proj->y - c, ys);
      offer_point(std::move(ys));
      lower = std::max(lower, tau);
      next = best.dual_value;
    }
    if (next - tau <= 1e-6 * (best.delta - tau)) break;
    tau = next;
  }

  // Safeguard: bisection on the level using exact projections.
  const double floor_tol = 1e-12 * (1.0 + R);
  for (int it = 0; it < 200 && !done(); ++it) {
    const double mid = 0.5 * (lower + best.delta);
    const Vec b = level_rhs(rows.alpha, mid);
    const auto proj = project_onto_halfspaces(c, rows.N, b);
    if (!proj) {
      const auto cert = lp_feasible(rows.N, b);
      if (const auto* bad = std::get_if<LpInfeasible>(&cert)) {
        offer_weights(bad->row_multipliers);
        lower = std::max(lower, mid);
        continue;
      }
      const Vec& z = std::get<LpFeasible>(cert).z;
      offer_point(z);
      if (norm2(z - c) > R || bundle.value(z) > mid + floor_tol) break;
      continue;
    }
    const double d = norm2(proj->y - c);
    if (d > R) {
      offer_weights(proj->multipliers);
      lower = std::max(lower, mid);
      Vec ys(c);
      axpy(R / d, proj->y - c, ys);
      offer_point(std::move(ys));
    } else {
      offer_point(proj->y);
      if (bundle.value(proj->y) > mid + floor_tol) break;  // numerical floor reached
    }
  }
  return best;
}

Vec project_to_level(const Vec& y_prev, const Bundle& bundle, double level, const Ball& ball) {
  if (bundle.empty()) throw EmptyBundle("project_to_level: empty bundle");
  if (y_prev.size() != ball.dim()) throw DimensionMismatch("project_to_level: y_prev");
  const auto rows = bundle_rows(bundle, ball);
  const Vec b = level_rhs(rows.alpha, level);
  const Vec& c = ball.center;
  const double R = ball.radius;
  const double slack = R * 1e-12 + 1e-14;

  const auto direct = project_onto_halfspaces(y_prev, rows.N, b);
  if (!direct) throw EmptyLevelSet("project_to_level: level set is empty");
  if (norm2(direct->y - c) <= R + slack) return direct->y;

  const auto from_center = project_onto_halfspaces(c, rows.N, b);
  if (!from_center || norm2(from_center->y - c) > R * (1.0 + 1e-9) + 1e-12) {
    throw EmptyLevelSet("project_to_level: level set misses the ball");
  }

  // The ball multiplier mu enters as a shift of the projected point toward the
  // center; bisect t = mu / (1 + mu) on [0, 1].
  double lo = 0.0, hi = 1.0;
  Vec q_hi = from_center->y;
  Vec p(y_prev.size());
  while (hi - lo > 1e-10) {
    const double t = 0.5 * (lo + hi);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = (1.0 - t) * y_prev[i] + t * c[i];
    const auto q = project_onto_halfspaces(p, rows.N, b);
    if (!q) throw EmptyLevelSet("project_to_level: level set is empty");
    if (norm2(q->y - c) <= R + slack) {
      hi = t;
      q_hi = q->y;
    } else {
      lo = t;
    }
  }
  return q_hi;
}

}  // namespace ssdm
