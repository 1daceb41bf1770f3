#include "uqseg/kernels.hpp"

#include <limits>

#include "edt_detail.hpp"
#include "kernel_detail.hpp"

namespace uqseg::serial {

FloatImage warp_linear(const FloatImage &image, const AffineMatrix &a, float fill) {
  const detail::Grid grid(image.shape());
  FloatImage out = image.like<float>();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i)
    dst[i] = detail::sample_linear(image.data(), grid, detail::pull_back(a, grid, i), fill);
  return out;
}

LabelMap warp_nearest(const LabelMap &labels, const AffineMatrix &a) {
  const detail::Grid grid(labels.shape());
  LabelMap out = labels.like<std::uint8_t>();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i)
    dst[i] = detail::sample_nearest(labels.data(), grid, detail::pull_back(a, grid, i));
  return out;
}

VoteTally tally_votes(std::span<const LabelMap> samples, std::size_t num_labels) {
  VoteTally tally;
  tally.shape = samples.front().shape();
  tally.spacing = samples.front().spacing();
  tally.num_labels = num_labels;
  tally.num_samples = samples.size();
  tally.counts.assign(samples.front().size() * num_labels, 0);
  for (const auto &s : samples) {
    const auto values = s.data();
    for (std::size_t i = 0; i < values.size(); ++i)
      ++tally.counts[i * num_labels + values[i]];
  }
  return tally;
}

LabelMap mode_map(const VoteTally &tally) {
  LabelMap out(tally.shape, std::uint8_t{0}, tally.spacing);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = detail::mode_from_counts(tally.pixel(i));
  return out;
}

FloatImage entropy_map(const VoteTally &tally) {
  FloatImage out(tally.shape, 0.0f, tally.spacing);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = detail::entropy_from_counts(tally.pixel(i), tally.num_samples);
  return out;
}

FloatImage mean_map(std::span<const FloatImage> maps) {
  FloatImage out = maps.front().like<float>();
  const double inv = 1.0 / static_cast<double>(maps.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double sum = 0.0;
    for (const auto &m : maps)
      sum += m[i];
    out[i] = static_cast<float>(sum * inv);
  }
  return out;
}

LabelMap threshold(const FloatImage &image, double tau, std::span<const double> half_widths) {
  const detail::Grid grid(image.shape());
  LabelMap out = image.like<std::uint8_t>();
  for (std::size_t i = 0; i < out.size(); ++i) {
    bool on = static_cast<double>(image[i]) > tau;
    if (on && !half_widths.empty()) {
      const auto idx = grid.index_of(i);
      for (std::size_t k = 0; k < grid.dim; ++k) {
        const double center = 0.5 * static_cast<double>(grid.extent[k] - 1);
        if (std::abs(idx[k] - center) > half_widths[k])
          on = false;
      }
    }
    out[i] = on ? 1 : 0;
  }
  return out;
}

OverlapCounts overlap(const LabelMap &pred, const LabelMap &gt, std::uint8_t label) {
  OverlapCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] == label;
    const bool g = gt[i] == label;
    c.tp += p && g;
    c.fp += p && !g;
    c.fn += !p && g;
  }
  return c;
}

std::vector<std::uint8_t> surface(const LabelMap &mask) {
  const detail::Grid grid(mask.shape());
  std::vector<std::uint8_t> out(mask.size(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] == 0)
      continue;
    const auto idx = grid.index_of(i);
    bool edge = false;
    for (std::size_t k = 0; k < grid.dim && !edge; ++k) {
      const auto pos = static_cast<std::size_t>(idx[k]);
      if (pos == 0 || pos + 1 == grid.extent[k])
        edge = true;
      else if (mask[i - grid.stride[k]] == 0 || mask[i + grid.stride[k]] == 0)
        edge = true;
    }
    out[i] = edge ? 1 : 0;
  }
  return out;
}

std::vector<double> squared_distance(std::span<const std::uint8_t> sites, const Shape &shape,
                                     const Spacing &spacing) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const detail::Grid grid(shape);
  std::vector<double> dist(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i)
    dist[i] = sites[i] ? 0.0 : inf;

  detail::EnvelopeScratch scratch;
  for (std::size_t axis = 0; axis < grid.dim; ++axis) {
    const std::size_t n = grid.extent[axis];
    const std::size_t stride = grid.stride[axis];
    scratch.resize(n);
    const std::size_t lines = sites.size() / n;
    for (std::size_t line = 0; line < lines; ++line) {
      // Start offset of the line: split `line` into the parts above and
      // below `axis`.
      const std::size_t start = (line / stride) * stride * n + line % stride;
      for (std::size_t p = 0; p < n; ++p)
        scratch.f[p] = dist[start + p * stride];
      detail::squared_distance_line(scratch, n, spacing[axis]);
      for (std::size_t p = 0; p < n; ++p)
        dist[start + p * stride] = scratch.d[p];
    }
  }
  return dist;
}

} // namespace uqseg::serial
