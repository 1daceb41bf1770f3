#pragma once

// Data-parallel inner loops. `uqseg::parallel` holds the OpenMP kernels the
// library uses; `uqseg::serial` holds single-threaded references with the
// same signatures and per-element arithmetic. The two must agree bit for bit.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "uqseg/ndimage.hpp"
#include "uqseg/transforms.hpp"

namespace uqseg {

/// Per-pixel label histogram over N samples, pixel-major with `num_labels`
/// counters per pixel.
struct VoteTally {
  Shape shape;
  Spacing spacing;
  std::size_t num_labels = 0;
  std::size_t num_samples = 0;
  std::vector<std::uint16_t> counts;

  std::span<const std::uint16_t> pixel(std::size_t i) const {
    return std::span<const std::uint16_t>(counts).subspan(i * num_labels, num_labels);
  }
};

struct OverlapCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  friend bool operator==(const OverlapCounts &, const OverlapCounts &) = default;
};

// Kernel contracts (both namespaces):
//  tally_votes      num_labels must exceed every label value in the samples.
//  threshold        label = image > tau, AND inside a centred box when
//                   half_widths is non-empty.
//  surface          1 where a nonzero voxel has a face neighbour that is zero
//                   or outside the grid.
//  squared_distance squared spacing-scaled distance from every voxel to the
//                   nearest nonzero site; +inf when there are no sites.

namespace parallel {
FloatImage warp_linear(const FloatImage &image, const AffineMatrix &a, float fill);
LabelMap warp_nearest(const LabelMap &labels, const AffineMatrix &a);
VoteTally tally_votes(std::span<const LabelMap> samples, std::size_t num_labels);
LabelMap mode_map(const VoteTally &tally);
FloatImage entropy_map(const VoteTally &tally);
FloatImage mean_map(std::span<const FloatImage> maps);
LabelMap threshold(const FloatImage &image, double tau, std::span<const double> half_widths);
OverlapCounts overlap(const LabelMap &pred, const LabelMap &gt, std::uint8_t label);
std::vector<std::uint8_t> surface(const LabelMap &mask);
std::vector<double> squared_distance(std::span<const std::uint8_t> sites, const Shape &shape,
                                     const Spacing &spacing);
} // namespace parallel

namespace serial {
FloatImage warp_linear(const FloatImage &image, const AffineMatrix &a, float fill);
LabelMap warp_nearest(const LabelMap &labels, const AffineMatrix &a);
VoteTally tally_votes(std::span<const LabelMap> samples, std::size_t num_labels);
LabelMap mode_map(const VoteTally &tally);
FloatImage entropy_map(const VoteTally &tally);
FloatImage mean_map(std::span<const FloatImage> maps);
LabelMap threshold(const FloatImage &image, double tau, std::span<const double> half_widths);
OverlapCounts overlap(const LabelMap &pred, const LabelMap &gt, std::uint8_t label);
std::vector<std::uint8_t> surface(const LabelMap &mask);
std::vector<double> squared_distance(std::span<const std::uint8_t> sites, const Shape &shape,
                                     const Spacing &spacing);
} // namespace serial

} // namespace uqseg
