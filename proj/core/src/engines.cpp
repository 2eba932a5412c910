#include "ssdm/engines.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "ssdm/errors.hpp"

namespace ssdm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string outcome_label(const SeparatorFound& f) {
  return f.source == SeparatorSource::YMembership ? std::string("cut-Y") : fmt::format("cut-{}", f.stage);
}

std::size_t samples_of(const QueryOutcome& q) {
  if (const auto* f = std::get_if<SeparatorFound>(&q)) return f->samples_used;
  return std::get<Stuck>(q).samples_used;
}

Eigen::MatrixXd to_eigen(const Mat& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
  }
  return out;
}

void from_eigen(const Eigen::MatrixXd& e, Mat& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
}

// Symmetrizes and, if Cholesky fails, floors the spectrum at 1e-14.
void repair_shape(Mat& P) {
  const std::size_t n = P.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) P(i, j) = P(j, i) = 0.5 * (P(i, j) + P(j, i));
  }
  Eigen::MatrixXd E = to_eigen(P);
  if (!E.allFinite()) throw ShapeDegenerate("ellipsoid shape has non-finite entries");
  Eigen::LLT<Eigen::MatrixXd> llt(E);
  if (llt.info() == Eigen::Success) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(E);
  if (eig.info() != Eigen::Success) throw ShapeDegenerate("ellipsoid shape eigendecomposition failed");
  Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(1e-14);
  E = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
  E = 0.5 * (E + E.transpose());
  if (Eigen::LLT<Eigen::MatrixXd>(E).info() != Eigen::Success) {
    throw ShapeDegenerate("ellipsoid shape lost positive definiteness");
  }
  from_eigen(E, P);
}

}  // namespace

std::size_t bl_budget(double R, double rho) {
  if (!(rho > 0.0) || !(R > 0.0)) throw std::invalid_argument("bl_budget: R and rho must be positive");
  return static_cast<std::size_t>(std::ceil(32.0 * R * R / (rho * rho) - 1e-9)) + 1;
}

std::size_t ellipsoid_budget(std::size_t n, double R, double rho) {
  if (!(rho > 0.0) || !(R > 0.0)) throw std::invalid_argument("ellipsoid_budget: R and rho must be positive");
  const double nd = static_cast<double>(n);
  return static_cast<std::size_t>(std::ceil(2.0 * nd * nd * std::log1p(R / rho) - 1e-9));
}

EngineResult run_bl(Oracle& oracle, const Ball& ball, std::size_t budget) {
  if (budget < 1) throw std::invalid_argument("run_bl: budget must be positive");
  EngineResult res;
  Bundle bundle;
  Vec y = ball.center;
  double last_delta = kNaN;
  for (std::size_t calls = 1; calls <= budget; ++calls) {
    const std::uint64_t s = oracle.next_call();
    auto q = oracle.query(y);
    res.samples += samples_of(q);
    if (auto* st = std::get_if<Stuck>(&q)) {
      res.log.push_back({s, last_delta, st->samples_used, "stuck"});
      res.outcome = Candidate{y, calls, res.samples};
      return res;
    }
    auto& cut = std::get<SeparatorFound>(q);
    const std::string label = outcome_label(cut);
    bundle.add(std::move(cut.separator));
    const auto mm = min_max_over_ball(bundle, ball);
    last_delta = mm.delta;
    res.log.push_back({s, mm.delta, cut.samples_used, label});
    if (mm.delta >= kInfeasibleDelta) {
      res.outcome = InfeasibleCertificate{mm.delta, std::move(bundle), calls};
      return res;
    }
    y = project_to_level(y, bundle, 0.5 * mm.delta, ball);
  }
  res.outcome = BudgetExhausted{budget, last_delta};
  return res;
}

void ellipsoid_cut(EllipsoidState& E, const Vec& a) {
  const std::size_t n = E.center.size();
  if (a.size() != n || E.shape.rows() != n || E.shape.cols() != n) throw DimensionMismatch("ellipsoid_cut: shape");
  Vec Pa = matvec(E.shape, a);
  double aPa = dot(a, Pa);
  if (!(aPa > 0.0)) {
    repair_shape(E.shape);
    Pa = matvec(E.shape, a);
    aPa = dot(a, Pa);
    if (!(aPa > 0.0)) throw ShapeDegenerate("ellipsoid_cut: a^T P a is not positive");
  }
  const double nd = static_cast<double>(n);
  const double inv = 1.0 / std::sqrt(aPa);
  Vec b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = Pa[i] * inv;
  axpy(-1.0 / (nd + 1.0), b, E.center);
  if (n == 1) {
    E.shape(0, 0) *= 0.25;
    return;
  }
  const double scale = nd * nd / (nd * nd - 1.0);
  const double w = 2.0 / (nd + 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) E.shape(i, j) = scale * (E.shape(i, j) - w * b[i] * b[j]);
  }
  repair_shape(E.shape);
}

double log_det_spd(const Mat& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(to_eigen(m));
  if (llt.info() != Eigen::Success) throw ShapeDegenerate("log_det_spd: not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  return 2.0 * L.diagonal().array().log().sum();
}

EngineResult run_ellipsoid(Oracle& oracle, const Ball& ball, double rho, std::optional<std::size_t> budget_override) {
  const std::size_t n = ball.dim();
  const std::size_t budget = budget_override ? *budget_override : ellipsoid_budget(n, ball.radius, rho);
  if (budget < 1) throw std::invalid_argument("run_ellipsoid: budget must be positive");
  EngineResult res;
  EllipsoidState E{ball.center, Mat(n, n)};
  for (std::size_t i = 0; i < n; ++i) E.shape(i, i) = ball.radius * ball.radius;
  Bundle bundle;
  for (std::size_t calls = 1; calls <= budget; ++calls) {
    const std::uint64_t s = oracle.next_call();
    auto q = oracle.query(E.center);
    res.samples += samples_of(q);
    if (auto* st = std::get_if<Stuck>(&q)) {
      res.log.push_back({s, kNaN, st->samples_used, "stuck"});
      res.outcome = Candidate{E.center, calls, res.samples};
      return res;
    }
    auto& cut = std::get<SeparatorFound>(q);
    res.log.push_back({s, kNaN, cut.samples_used, outcome_label(cut)});
    ellipsoid_cut(E, cut.separator.a());
    bundle.add(std::move(cut.separator));
  }
  // No stuck point within the budget. The min-max value over the ball is
  // reported for diagnosis; the outcome stays BudgetExhausted.
  const auto mm = min_max_over_ball(bundle, ball);
  res.outcome = BudgetExhausted{budget, mm.delta};
  return res;
}

}  // namespace ssdm
