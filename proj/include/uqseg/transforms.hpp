#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "uqseg/ndimage.hpp"
#include "uqseg/transform_params.hpp"

namespace uqseg {

/// Homogeneous (dim+1)x(dim+1) matrix in index coordinates (axis 0 first).
///
/// Warps interpret it as a pull-back: output index -> input index. The
/// matrix built from TransformParams is therefore the inverse of the point
/// map that moves image content.
class AffineMatrix {
public:
  static constexpr std::size_t kMaxSide = 4;

  explicit AffineMatrix(std::size_t dim = 2);
  static AffineMatrix identity(std::size_t dim) { return AffineMatrix(dim); }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t side() const noexcept { return dim_ + 1; }

  double operator()(std::size_t r, std::size_t c) const { return m_[r * kMaxSide + c]; }
  double &operator()(std::size_t r, std::size_t c) { return m_[r * kMaxSide + c]; }

  /// Maps a point (length dim) through the affine part.
  void apply(std::span<const double> in, std::span<double> out) const;

  double determinant() const;

  friend AffineMatrix operator*(const AffineMatrix &a, const AffineMatrix &b);

  /// Max elementwise |a - b|.
  friend double max_abs_diff(const AffineMatrix &a, const AffineMatrix &b);

private:
  std::size_t dim_;
  std::array<double, kMaxSide * kMaxSide> m_{};
};

/// Forward transform of `p` about the image center for `shape`: scale, then
/// rotation (3D: about x, y, z in that order, x being the last axis), then
/// flips, then translation.
AffineMatrix affine_from_params(const TransformParams &p, const Shape &shape);

/// Gauss-Jordan inverse with partial pivoting. Throws SingularMatrixError
/// when |det| <= 1e-12.
AffineMatrix invert(const AffineMatrix &a);

/// Linear interpolation; samples outside [0, n-1] on any axis get `fill`.
FloatImage warp_image(const FloatImage &image, const AffineMatrix &a, float fill = 0.0f);

/// Nearest-neighbour; samples outside the grid become label 0.
LabelMap warp_labels(const LabelMap &labels, const AffineMatrix &a);

} // namespace uqseg
