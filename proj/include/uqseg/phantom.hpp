#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "uqseg/acquisition.hpp"
#include "uqseg/manifest.hpp"
#include "uqseg/ndimage.hpp"

namespace uqseg {

/// Ellipse (2D) or ellipsoid (3D) phantom. semi_axes are fractions of the
/// side length, one per axis in the object's canonical pose.
struct PhantomSpec {
  std::size_t dim = 2;
  std::size_t size = 64;
  std::vector<double> semi_axes{0.30, 0.12};
  double fg_intensity = 1.0;
  double bg_intensity = 0.0;
  double noise_std = 0.05;
  AugmentationPrior pose_prior = uniform_rotation(2);

  /// Rotation U(0, 2pi), everything else fixed.
  static AugmentationPrior uniform_rotation(std::size_t dim);
  static PhantomSpec standard(std::size_t dim);

  void validate() const;
};

struct Phantom {
  FloatImage image;   // z-normalized
  LabelMap gt;
  TransformParams pose;
};

/// Intensities before z-normalization.
Phantom render_phantom(const PhantomSpec &spec, std::uint64_t seed);

Phantom make_phantom(const PhantomSpec &spec, std::uint64_t seed);

/// Writes case_NNN_image.npy / case_NNN_label.npy and manifest.json into
/// `out_dir`; case i uses seed derive_seed(seed, i).
DatasetManifest make_dataset(const PhantomSpec &spec, std::size_t n,
                             const std::filesystem::path &out_dir, std::uint64_t seed);

} // namespace uqseg
