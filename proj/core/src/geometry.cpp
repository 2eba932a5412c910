#include "ssdm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "ssdm/errors.hpp"

namespace ssdm {

namespace {
constexpr double kZeroGradient = 1e-12;
constexpr double kMinRadius = 1e-9;
}  // namespace

Mat Mat::from_rows(const std::vector<Vec>& rows, std::size_t cols_if_empty) {
  if (rows.empty()) return Mat(0, cols_if_empty);
  Mat m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) {
      throw DimensionMismatch(fmt::format("row {} has {} entries, expected {}", i,
                                          rows[i].size(), m.cols()));
    }
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

void Mat::append_row(std::span<const double> r) {
  if (rows_ == 0 && cols_ == 0) cols_ = r.size();
  if (r.size() != cols_) {
    throw DimensionMismatch(fmt::format("append_row: {} entries, expected {}", r.size(), cols_));
  }
  data_.insert(data_.end(), r.begin(), r.end());
  ++rows_;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

double norm1(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += std::abs(v);
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vec operator-(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec operator+(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec operator*(double s, const Vec& a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

Vec matvec(const Mat& m, std::span<const double> v) {
  Vec r(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) r[i] = dot(m.row(i), v);
  return r;
}

Vec matvec_transposed(const Mat& m, std::span<const double> v) {
  Vec r(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (v[i] != 0.0) axpy(v[i], m.row(i), r);
  }
  return r;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void PolyhedralRep::validate() const {
  if (A.rows() != d.size() || C.rows() != d.size()) {
    throw DimensionMismatch(fmt::format("polyhedral rep: A has {} rows, C {} rows, d {} entries",
                                        A.rows(), C.rows(), d.size()));
  }
}

PolyhedralRep PolyhedralRep::with_row(std::span<const double> g, double rhs) const {
  if (g.size() != dim()) throw DimensionMismatch("with_row: gradient dimension");
  PolyhedralRep out = *this;
  out.A.append_row(g);
  const Vec zeros(aux_dim(), 0.0);
  out.C.append_row(zeros);
  out.d.push_back(rhs);
  return out;
}

void StagePolyhedron::validate() const {
  const auto m = d.size();
  if (A.rows() != m || B.rows() != m || C.rows() != m) {
    throw DimensionMismatch(fmt::format(
        "stage polyhedron: A {} rows, B {} rows, C {} rows, d {} entries", A.rows(), B.rows(),
        C.rows(), m));
  }
}

Separator::Separator(Vec a, double alpha) : a_(std::move(a)), alpha_(alpha) {
  const double n = norm2(a_);
  if (!(n > kZeroGradient)) throw ZeroGradient("separator gradient vanishes");
  for (double& v : a_) v /= n;
  alpha_ /= n;
}

Separator normalize_separator(const Vec& g, double gamma) { return Separator(g, -gamma); }

bool Ball::contains(std::span<const double> y, double tol) const {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - center[i]) * (y[i] - center[i]);
  return std::sqrt(s) <= radius + tol;
}

Ball bounding_ball(const Vec& box_lo, const Vec& box_hi) {
  if (box_lo.size() != box_hi.size()) throw BadBox("box bounds differ in dimension");
  Ball b;
  b.center.resize(box_lo.size());
  double r2 = 0.0;
  for (std::size_t i = 0; i < box_lo.size(); ++i) {
    if (!std::isfinite(box_lo[i]) || !std::isfinite(box_hi[i]) || box_lo[i] > box_hi[i]) {
      throw BadBox(fmt::format("bad box coordinate {}: [{}, {}]", i, box_lo[i], box_hi[i]));
    }
    b.center[i] = 0.5 * (box_lo[i] + box_hi[i]);
    const double h = 0.5 * (box_hi[i] - box_lo[i]);
    r2 += h * h;
  }
  b.radius = std::max(std::sqrt(r2), kMinRadius);
  return b;
}

}  // namespace ssdm
