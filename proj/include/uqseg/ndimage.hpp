#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "uqseg/errors.hpp"

namespace uqseg {

using Shape = std::vector<std::size_t>;
using Spacing = std::vector<double>;

inline std::size_t element_count(const Shape &shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>{});
}

std::string shape_string(const Shape &shape);

/// Dense row-major array with per-axis physical spacing (mm).
///
/// Spatial code works on rank 2 and 3; rank 4 only appears for class
/// probability stacks of volumes (leading class axis).
template <typename T> class Image {
public:
  using value_type = T;

  Image() = default;

  explicit Image(Shape shape, T fill = T{}, Spacing spacing = {})
      : shape_(std::move(shape)), spacing_(std::move(spacing)),
        data_(element_count(shape_), fill) {
    validate();
  }

  Image(Shape shape, std::vector<T> data, Spacing spacing = {})
      : shape_(std::move(shape)), spacing_(std::move(spacing)),
        data_(std::move(data)) {
    validate();
  }

  std::size_t dim() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  const Shape &shape() const noexcept { return shape_; }
  const Spacing &spacing() const noexcept { return spacing_; }

  std::span<const T> data() const noexcept { return data_; }
  std::span<T> data() noexcept { return data_; }
  const std::vector<T> &values() const noexcept { return data_; }

  T operator[](std::size_t i) const { return data_[i]; }
  T &operator[](std::size_t i) { return data_[i]; }

  T at(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
  T &at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
  T at(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  T &at(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }

  double voxel_volume() const {
    return std::accumulate(spacing_.begin(), spacing_.end(), 1.0,
                           std::multiplies<>{});
  }

  void set_spacing(Spacing spacing) {
    spacing_ = std::move(spacing);
    validate_spacing();
  }

  /// Same shape and spacing, new buffer.
  template <typename U> Image<U> like(U fill = U{}) const {
    return Image<U>(shape_, fill, spacing_);
  }

  friend bool operator==(const Image &a, const Image &b) {
    return a.shape_ == b.shape_ && a.spacing_ == b.spacing_ && a.data_ == b.data_;
  }

private:
  void validate() {
    if (shape_.empty() || shape_.size() > 4)
      throw ShapeError("image rank must be 1..4, got " +
                       std::to_string(shape_.size()));
    for (auto extent : shape_)
      if (extent == 0)
        throw ShapeError("image extents must be positive: " + shape_string(shape_));
    if (data_.size() != element_count(shape_))
      throw ShapeError("buffer length " + std::to_string(data_.size()) +
                       " does not match shape " + shape_string(shape_));
    if (spacing_.empty())
      spacing_.assign(shape_.size(), 1.0);
    validate_spacing();
  }

  void validate_spacing() const {
    if (spacing_.size() != shape_.size())
      throw ShapeError("spacing length does not match image rank");
    for (double s : spacing_)
      if (!(s > 0.0))
        throw ShapeError("spacing entries must be positive");
  }

  Shape shape_;
  Spacing spacing_;
  std::vector<T> data_;
};

using FloatImage = Image<float>;
using LabelMap = Image<std::uint8_t>;
using Tensor = std::variant<FloatImage, LabelMap>;

/// Throws ShapeError unless the image is 2D or 3D.
void require_spatial(const Shape &shape, const char *what);

/// Z-score normalization with population standard deviation.
/// Throws DegenerateInputError for constant images.
FloatImage znormalize(const FloatImage &image);

} // namespace uqseg
