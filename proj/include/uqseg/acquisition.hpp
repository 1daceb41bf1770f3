#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "uqseg/ndimage.hpp"
#include "uqseg/transform_params.hpp"

namespace uqseg {

using Rng = std::mt19937_64;

/// Seed for stream `index` under `master`; SplitMix64 finalizer over both.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Priors over the spatial parameters and the additive noise field.
struct AugmentationPrior {
  std::vector<double> flip_prob;                          // per axis, in [0, 1]
  std::array<double, 2> rotation_range{0.0, 0.0};         // radians, per angle
  std::array<double, 2> scale_range{1.0, 1.0};
  std::vector<std::array<double, 2>> translation_range;   // per axis, pixels
  double noise_mean = 0.0;
  double noise_std = 0.0;

  std::size_t dim() const noexcept { return flip_prob.size(); }

  /// Throws InvalidParameterError on out-of-range entries.
  void validate() const;

  /// Point mass at the identity transform with zero noise.
  static AugmentationPrior degenerate(std::size_t dim);

  /// Flip 0.5 per axis, rotation U(0, 2pi), scale U(0.8, 1.2), noise N(0, 0.05).
  static AugmentationPrior standard(std::size_t dim);

  static AugmentationPrior from_json(std::string_view text);
  static AugmentationPrior load(const std::filesystem::path &path);
  std::string to_json() const;
};

/// Draws flips, angles, scale, translation, then a noise seed, in that order.
TransformParams sample_params(const AugmentationPrior &prior, Rng &rng);

/// i.i.d. N(noise_mean, noise_std) field determined by `seed`.
FloatImage sample_noise(const AugmentationPrior &prior, const Shape &shape, std::uint64_t seed);

/// Observed image to one latent draw: inverse-warp of (X - e).
FloatImage to_latent(const FloatImage &observed, const TransformParams &p,
                     const AugmentationPrior &prior);

/// Latent-frame labels back to the observed frame; labels never get noise.
LabelMap from_latent(const LabelMap &latent_labels, const TransformParams &p);

/// Generative direction used for training-time augmentation: warp, then add e.
FloatImage acquire(const FloatImage &latent, const TransformParams &p,
                   const AugmentationPrior &prior);

} // namespace uqseg
