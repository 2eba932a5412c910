#pragma once

// Dense linear-algebra primitives and the polyhedral objects every other
// module is phrased in: lifted polyhedra, stage polyhedra, unit-gradient
// separators and Euclidean balls.

#include <cstddef>
#include <span>
#include <vector>

namespace ssdm {

using Vec = std::vector<double>;

/// Row-major dense matrix.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  /// Builds from a list of equally long rows. An empty list gives a 0 x cols matrix.
  static Mat from_rows(const std::vector<Vec>& rows, std::size_t cols_if_empty = 0);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  /// Appends one row; its length must equal cols() (or set cols() when the matrix is 0 x 0).
  void append_row(std::span<const double> r);

  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const Mat&, const Mat&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);
double norm1(std::span<const double> a);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
Vec operator-(const Vec& a, const Vec& b);
Vec operator+(const Vec& a, const Vec& b);
Vec operator*(double s, const Vec& a);
/// M * v
Vec matvec(const Mat& m, std::span<const double> v);
/// M^T * v
Vec matvec_transposed(const Mat& m, std::span<const double> v);
bool all_finite(std::span<const double> v);

/// {y : exists w, A y + C w <= d}
struct PolyhedralRep {
  Mat A;
  Mat C;
  Vec d;

  std::size_t rows() const noexcept { return d.size(); }
  std::size_t dim() const noexcept { return A.cols(); }
  std::size_t aux_dim() const noexcept { return C.cols(); }

  /// Throws DimensionMismatch when the blocks disagree.
  void validate() const;

  /// Adds the row g^T y <= rhs (zero in the auxiliary block).
  PolyhedralRep with_row(std::span<const double> g, double rhs) const;
};

/// Stage set {(y, x) : exists w, A y + B x + C w <= d}.
struct StagePolyhedron {
  Mat A;  // rows x n
  Mat B;  // rows x nu (local decision)
  Mat C;  // rows x N  (auxiliary)
  Vec d;

  std::size_t rows() const noexcept { return d.size(); }
  std::size_t y_dim() const noexcept { return A.cols(); }
  std::size_t x_dim() const noexcept { return B.cols(); }
  std::size_t w_dim() const noexcept { return C.cols(); }

  void validate() const;
};

/// Affine function f(y) = a^T y + alpha with ||a||_2 = 1.
class Separator {
 public:
  /// Re-normalizes (a, alpha) jointly so that ||a||_2 = 1. Throws ZeroGradient on a ~ 0.
  Separator(Vec a, double alpha);

  const Vec& a() const noexcept { return a_; }
  double alpha() const noexcept { return alpha_; }
  std::size_t dim() const noexcept { return a_.size(); }
  double operator()(std::span<const double> y) const { return dot(a_, y) + alpha_; }

 private:
  Vec a_;
  double alpha_;
};

/// Returns f(y) = (g^T y - gamma) / ||g||_2.
Separator normalize_separator(const Vec& g, double gamma);

struct Ball {
  Vec center;
  double radius = 1.0;

  std::size_t dim() const noexcept { return center.size(); }
  bool contains(std::span<const double> y, double tol = 0.0) const;
};

/// Smallest ball around the box midpoint containing the box; radius floored at 1e-9.
Ball bounding_ball(const Vec& box_lo, const Vec& box_hi);

}  // namespace ssdm
