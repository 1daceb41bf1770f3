#include "uqseg/uncertainty.hpp"

#include <cmath>

#include <json.hpp>

namespace uqseg {

FloatImage pixel_entropy(const SampleSet &s) { return parallel::entropy_map(tally(s)); }

std::vector<double> label_volumes(const SampleSet &s, const Spacing &spacing,
                                  std::uint8_t label) {
  std::vector<double> volumes;
  volumes.reserve(s.size());
  for (const auto &sample : s.samples) {
    if (spacing.size() != sample.dim())
      throw ShapeError("spacing has " + std::to_string(spacing.size()) + " entries for a " +
                       std::to_string(sample.dim()) + "D sample");
    double voxel = 1.0;
    for (double sp : spacing)
      voxel *= sp;
    std::size_t count = 0;
    for (auto v : sample.data())
      count += v == label;
    volumes.push_back(static_cast<double>(count) * voxel);
  }
  return volumes;
}

VolumeStats volume_stats(std::span<const double> volumes) {
  if (volumes.empty())
    throw ConfigurationError("volume_stats: no volumes");
  VolumeStats st;
  st.volumes.assign(volumes.begin(), volumes.end());
  const double n = static_cast<double>(volumes.size());
  // Deviations from the first volume, so equal volumes give exactly zero spread.
  const double ref = volumes.front();
  double shift = 0.0;
  for (double v : volumes)
    shift += v - ref;
  shift /= n;
  st.mean = ref + shift;
  double sq = 0.0;
  for (double v : volumes)
    sq += (v - ref - shift) * (v - ref - shift);
  st.stddev = std::sqrt(sq / n);
  if (!(st.mean > 0.0))
    throw UndefinedVvcError();
  st.vvc = st.stddev / st.mean;
  return st;
}

VolumeStats structure_stats(const SampleSet &s, const Spacing &spacing, std::uint8_t label) {
  const auto volumes = label_volumes(s, spacing, label);
  return volume_stats(volumes);
}

std::string UncertaintyReport::to_json() const {
  nlohmann::json doc;
  doc["volumes"] = volumes;
  doc["volume_mean"] = volume_mean;
  doc["volume_std"] = volume_std;
  doc["vvc"] = vvc ? nlohmann::json(*vvc) : nlohmann::json(nullptr);
  return doc.dump();
}

UncertaintyReport make_report(const SampleSet &s, const Spacing &spacing, std::uint8_t label) {
  UncertaintyReport r;
  r.entropy_map = pixel_entropy(s);
  r.volumes = label_volumes(s, spacing, label);
  try {
    const auto st = volume_stats(r.volumes);
    r.volume_mean = st.mean;
    r.volume_std = st.stddev;
    r.vvc = st.vvc;
  } catch (const UndefinedVvcError &) {
    r.volume_mean = 0.0;
    r.volume_std = 0.0;
  }
  return r;
}

} // namespace uqseg
