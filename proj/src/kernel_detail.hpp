#pragma once

// Per-element routines shared by the OpenMP kernels and their serial
// references. Keeping the arithmetic in one place is what makes the two
// loop structures bit-identical.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>

#include "uqseg/transforms.hpp"

namespace uqseg::detail {

inline constexpr double kSnapTolerance = 1e-9;

struct Grid {
  std::size_t dim = 0;
  std::array<std::size_t, 3> extent{1, 1, 1};
  std::array<std::size_t, 3> stride{0, 0, 0};

  explicit Grid(const Shape &shape) : dim(shape.size()) {
    std::size_t s = 1;
    for (std::size_t k = dim; k-- > 0;) {
      extent[k] = shape[k];
      stride[k] = s;
      s *= shape[k];
    }
  }

  std::array<double, 3> index_of(std::size_t flat) const {
    std::array<double, 3> idx{};
    for (std::size_t k = 0; k < dim; ++k) {
      idx[k] = static_cast<double>(flat / stride[k]);
      flat %= stride[k];
    }
    return idx;
  }
};

inline double snap(double c) {
  const double r = std::nearbyint(c);
  return std::abs(c - r) < kSnapTolerance ? r : c;
}

inline std::array<double, 3> pull_back(const AffineMatrix &m, const Grid &g,
                                       std::size_t flat) {
  const auto out = g.index_of(flat);
  std::array<double, 3> in{};
  for (std::size_t r = 0; r < g.dim; ++r) {
    double acc = m(r, g.dim);
    for (std::size_t c = 0; c < g.dim; ++c)
      acc += m(r, c) * out[c];
    in[r] = snap(acc);
  }
  return in;
}

inline float sample_linear(std::span<const float> src, const Grid &g,
                           const std::array<double, 3> &at, float fill) {
  std::array<std::size_t, 3> lo{}, hi{};
  std::array<double, 3> frac{};
  for (std::size_t k = 0; k < g.dim; ++k) {
    const double c = at[k];
    const double last = static_cast<double>(g.extent[k] - 1);
    if (!(c >= 0.0 && c <= last))
      return fill;
    const double f = std::floor(c);
    lo[k] = static_cast<std::size_t>(f);
    frac[k] = c - f;
    hi[k] = lo[k] + 1 < g.extent[k] ? lo[k] + 1 : lo[k];
  }
  double value = 0.0;
  const std::size_t corners = std::size_t{1} << g.dim;
  for (std::size_t corner = 0; corner < corners; ++corner) {
    double w = 1.0;
    std::size_t offset = 0;
    for (std::size_t k = 0; k < g.dim; ++k) {
      const bool upper = (corner >> (g.dim - 1 - k)) & 1u;
      w *= upper ? frac[k] : 1.0 - frac[k];
      offset += (upper ? hi[k] : lo[k]) * g.stride[k];
    }
    if (w != 0.0)
      value += w * static_cast<double>(src[offset]);
  }
  return static_cast<float>(value);
}

inline std::uint8_t sample_nearest(std::span<const std::uint8_t> src, const Grid &g,
                                   const std::array<double, 3> &at) {
  std::size_t offset = 0;
  for (std::size_t k = 0; k < g.dim; ++k) {
    const double r = std::floor(at[k] + 0.5);
    if (!(r >= 0.0 && r < static_cast<double>(g.extent[k])))
      return 0;
    offset += static_cast<std::size_t>(r) * g.stride[k];
  }
  return src[offset];
}

/// -sum p ln p over the label histogram of one pixel; 0 ln 0 := 0.
inline float entropy_from_counts(std::span<const std::uint16_t> counts, std::size_t n) {
  const double inv = 1.0 / static_cast<double>(n);
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0)
      continue;
    const double p = static_cast<double>(c) * inv;
    h -= p * std::log(p);
  }
  return h > 0.0 ? static_cast<float>(h) : 0.0f;
}

/// Smallest label among those with the highest count.
inline std::uint8_t mode_from_counts(std::span<const std::uint16_t> counts) {
  std::size_t best = 0;
  for (std::size_t m = 1; m < counts.size(); ++m)
    if (counts[m] > counts[best])
      best = m;
  return static_cast<std::uint8_t>(best);
}

} // namespace uqseg::detail
