#include "uqseg/ndimage.hpp"

#include <cmath>

namespace uqseg {

std::string shape_string(const Shape &shape) {
  std::string out = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0)
      out += ", ";
    out += std::to_string(shape[i]);
  }
  if (shape.size() == 1)
    out += ",";
  out += ")";
  return out;
}

void require_spatial(const Shape &shape, const char *what) {
  if (shape.size() != 2 && shape.size() != 3)
    throw ShapeError(std::string(what) + ": expected a 2D or 3D image, got shape " +
                     shape_string(shape));
}

FloatImage znormalize(const FloatImage &image) {
  const auto values = image.data();
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (float v : values)
    sum += v;
  const double mean = sum / n;
  double sq = 0.0;
  for (float v : values) {
    const double d = v - mean;
    sq += d * d;
  }
  const double stddev = std::sqrt(sq / n);
  if (!(stddev > 0.0) || !std::isfinite(stddev))
    throw DegenerateInputError("znormalize: image has zero intensity variance");

  FloatImage out = image.like<float>();
  auto dst = out.data();
  for (std::size_t i = 0; i < values.size(); ++i)
    dst[i] = static_cast<float>((values[i] - mean) / stddev);
  return out;
}

} // namespace uqseg
