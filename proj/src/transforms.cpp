#include "uqseg/transforms.hpp"

#include <cmath>
#include <string>

#include "uqseg/kernels.hpp"

namespace uqseg {

TransformParams TransformParams::identity(std::size_t dim) {
  TransformParams p;
  p.dim = dim;
  p.flips.assign(dim, false);
  p.rotation.assign(dim == 2 ? 1 : 3, 0.0);
  p.scale = 1.0;
  p.translation.assign(dim, 0.0);
  return p;
}

void TransformParams::validate() const {
  if (dim != 2 && dim != 3)
    throw InvalidParameterError("transform dim must be 2 or 3");
  if (flips.size() != dim || translation.size() != dim)
    throw InvalidParameterError("flips/translation must have one entry per axis");
  if (rotation.size() != (dim == 2 ? 1u : 3u))
    throw InvalidParameterError("rotation needs 1 angle in 2D and 3 angles in 3D");
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw InvalidParameterError("scale must be positive, got " + std::to_string(scale));
  for (double r : rotation)
    if (!std::isfinite(r))
      throw InvalidParameterError("rotation angles must be finite");
  for (double t : translation)
    if (!std::isfinite(t))
      throw InvalidParameterError("translation must be finite");
}

bool TransformParams::is_spatial_identity() const {
  for (bool f : flips)
    if (f)
      return false;
  for (double r : rotation)
    if (r != 0.0)
      return false;
  for (double t : translation)
    if (t != 0.0)
      return false;
  return scale == 1.0;
}

AffineMatrix::AffineMatrix(std::size_t dim) : dim_(dim) {
  if (dim < 1 || dim > 3)
    throw InvalidParameterError("affine dim must be 1..3");
  for (std::size_t i = 0; i < side(); ++i)
    (*this)(i, i) = 1.0;
}

void AffineMatrix::apply(std::span<const double> in, std::span<double> out) const {
  for (std::size_t r = 0; r < dim_; ++r) {
    double acc = (*this)(r, dim_);
    for (std::size_t c = 0; c < dim_; ++c)
      acc += (*this)(r, c) * in[c];
    out[r] = acc;
  }
}

AffineMatrix operator*(const AffineMatrix &a, const AffineMatrix &b) {
  if (a.dim() != b.dim())
    throw ShapeError("affine product: dimension mismatch");
  AffineMatrix out(a.dim());
  for (std::size_t r = 0; r < a.side(); ++r)
    for (std::size_t c = 0; c < a.side(); ++c) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.side(); ++k)
        acc += a(r, k) * b(k, c);
      out(r, c) = acc;
    }
  return out;
}

double max_abs_diff(const AffineMatrix &a, const AffineMatrix &b) {
  double worst = 0.0;
  for (std::size_t r = 0; r < a.side(); ++r)
    for (std::size_t c = 0; c < a.side(); ++c)
      worst = std::max(worst, std::abs(a(r, c) - b(r, c)));
  return worst;
}

namespace {

using Square = std::array<std::array<double, AffineMatrix::kMaxSide>, AffineMatrix::kMaxSide>;

Square to_square(const AffineMatrix &a) {
  Square m{};
  for (std::size_t r = 0; r < a.side(); ++r)
    for (std::size_t c = 0; c < a.side(); ++c)
      m[r][c] = a(r, c);
  return m;
}

// Linear part of the rotation in index coordinates (axis 0 first). Angles
// are about x, y, z with x the last array axis; applied x first.
std::array<std::array<double, 3>, 3> rotation_in_index_space(const TransformParams &p) {
  std::array<std::array<double, 3>, 3> idx{};
  if (p.dim == 2) {
    const double c = std::cos(p.rotation[0]);
    const double s = std::sin(p.rotation[0]);
    // Counter-clockwise in (x = axis 1, y = axis 0).
    idx[0] = {c, s, 0.0};
    idx[1] = {-s, c, 0.0};
    return idx;
  }
  using M3 = std::array<std::array<double, 3>, 3>;
  auto mul = [](const M3 &a, const M3 &b) {
    M3 out{};
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        for (int k = 0; k < 3; ++k)
          out[r][c] += a[r][k] * b[k][c];
    return out;
  };
  const double cx = std::cos(p.rotation[0]), sx = std::sin(p.rotation[0]);
  const double cy = std::cos(p.rotation[1]), sy = std::sin(p.rotation[1]);
  const double cz = std::cos(p.rotation[2]), sz = std::sin(p.rotation[2]);
  const M3 rx{{{1, 0, 0}, {0, cx, -sx}, {0, sx, cx}}};
  const M3 ry{{{cy, 0, sy}, {0, 1, 0}, {-sy, 0, cy}}};
  const M3 rz{{{cz, -sz, 0}, {sz, cz, 0}, {0, 0, 1}}};
  const M3 xyz = mul(rz, mul(ry, rx));
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      idx[r][c] = xyz[2 - r][2 - c];
  return idx;
}

} // namespace

double AffineMatrix::determinant() const {
  Square m = to_square(*this);
  const std::size_t n = side();
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col]))
        pivot = r;
    if (m[pivot][col] == 0.0)
      return 0.0;
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < n; ++c)
        m[r][c] -= f * m[col][c];
    }
  }
  return det;
}

AffineMatrix invert(const AffineMatrix &a) {
  if (!(std::abs(a.determinant()) > 1e-12))
    throw SingularMatrixError("affine matrix is singular");
  const std::size_t n = a.side();
  Square m = to_square(a);
  Square inv{};
  for (std::size_t i = 0; i < n; ++i)
    inv[i][i] = 1.0;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col]))
        pivot = r;
    std::swap(m[pivot], m[col]);
    std::swap(inv[pivot], inv[col]);
    const double d = m[col][col];
    for (std::size_t c = 0; c < n; ++c) {
      m[col][c] /= d;
      inv[col][c] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col] == 0.0)
        continue;
      const double f = m[r][col];
      for (std::size_t c = 0; c < n; ++c) {
        m[r][c] -= f * m[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }

  AffineMatrix out(a.dim());
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      out(r, c) = inv[r][c];
  // The homogeneous row is exact by construction.
  for (std::size_t c = 0; c < a.dim(); ++c)
    out(a.dim(), c) = 0.0;
  out(a.dim(), a.dim()) = 1.0;
  return out;
}

AffineMatrix affine_from_params(const TransformParams &p, const Shape &shape) {
  p.validate();
  if (p.dim != shape.size())
    throw ShapeError("transform dim " + std::to_string(p.dim) + " does not match shape " +
                     shape_string(shape));
  if (p.is_spatial_identity())
    return AffineMatrix::identity(p.dim);

  const auto rot = rotation_in_index_space(p);
  const std::size_t d = p.dim;

  // Point map moving content: x' = F R s (x - c) + c + t.
  AffineMatrix forward(d);
  for (std::size_t r = 0; r < d; ++r) {
    const double flip = p.flips[r] ? -1.0 : 1.0;
    for (std::size_t c = 0; c < d; ++c)
      forward(r, c) = flip * rot[r][c] * p.scale;
  }
  for (std::size_t r = 0; r < d; ++r) {
    double shift = 0.0;
    for (std::size_t c = 0; c < d; ++c)
      shift += forward(r, c) * (0.5 * static_cast<double>(shape[c] - 1));
    forward(r, d) = 0.5 * static_cast<double>(shape[r] - 1) - shift + p.translation[r];
  }
  // Warps pull back from output to input.
  return invert(forward);
}

FloatImage warp_image(const FloatImage &image, const AffineMatrix &a, float fill) {
  require_spatial(image.shape(), "warp_image");
  if (image.dim() != a.dim())
    throw ShapeError("warp_image: image is " + std::to_string(image.dim()) +
                     "D but the transform is " + std::to_string(a.dim()) + "D");
  return parallel::warp_linear(image, a, fill);
}

LabelMap warp_labels(const LabelMap &labels, const AffineMatrix &a) {
  require_spatial(labels.shape(), "warp_labels");
  if (labels.dim() != a.dim())
    throw ShapeError("warp_labels: labels are " + std::to_string(labels.dim()) +
                     "D but the transform is " + std::to_string(a.dim()) + "D");
  return parallel::warp_nearest(labels, a);
}

} // namespace uqseg
