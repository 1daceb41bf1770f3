#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace uqseg {

/// One concrete draw of the acquisition parameters: spatial transform plus
/// the seed of the additive noise field.
struct TransformParams {
  std::size_t dim = 2;
  std::vector<bool> flips;          // per axis
  std::vector<double> rotation;     // 1 angle (2D) or x,y,z angles (3D), radians
  double scale = 1.0;
  std::vector<double> translation;  // per axis, pixels
  std::uint64_t noise_seed = 0;

  static TransformParams identity(std::size_t dim);

  /// Throws InvalidParameterError on inconsistent sizes, scale <= 0 or
  /// non-finite angles.
  void validate() const;

  bool is_spatial_identity() const;

  friend bool operator==(const TransformParams &, const TransformParams &) = default;
};

} // namespace uqseg
