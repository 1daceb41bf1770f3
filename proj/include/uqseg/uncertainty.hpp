#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uqseg/mc_inference.hpp"

namespace uqseg {

/// Per-pixel entropy (nats) of the label frequencies across samples.
FloatImage pixel_entropy(const SampleSet &s);

/// Structure volume per sample: voxel count of `label` times voxel volume.
std::vector<double> label_volumes(const SampleSet &s, const Spacing &spacing,
                                  std::uint8_t label = 1);

/// Population moments of a volume list and their coefficient of variation.
struct VolumeStats {
  std::vector<double> volumes;
  double mean = 0.0;
  double stddev = 0.0;
  double vvc = 0.0;
};

/// Throws UndefinedVvcError when the mean volume is zero.
VolumeStats volume_stats(std::span<const double> volumes);

VolumeStats structure_stats(const SampleSet &s, const Spacing &spacing, std::uint8_t label = 1);

struct UncertaintyReport {
  FloatImage entropy_map;
  std::vector<double> volumes;
  double volume_mean = 0.0;
  double volume_std = 0.0;
  std::optional<double> vvc;  // absent when the structure never appears

  /// {"volumes":[...],"volume_mean":..,"volume_std":..,"vvc":..|null}
  std::string to_json() const;
};

/// Entropy map plus volume statistics; VVC left empty instead of throwing.
UncertaintyReport make_report(const SampleSet &s, const Spacing &spacing, std::uint8_t label = 1);

} // namespace uqseg
