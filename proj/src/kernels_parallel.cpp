#include "uqseg/kernels.hpp"

#include <limits>

#include "edt_detail.hpp"
#include "kernel_detail.hpp"

namespace uqseg::parallel {

namespace {
// Signed loop bounds keep the pragmas portable to older OpenMP runtimes.
inline std::ptrdiff_t ssize(std::size_t n) { return static_cast<std::ptrdiff_t>(n); }
} // namespace

FloatImage warp_linear(const FloatImage &image, const AffineMatrix &a, float fill) {
  const detail::Grid grid(image.shape());
  FloatImage out = image.like<float>();
  auto dst = out.data();
  const auto src = image.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < ssize(dst.size()); ++i) {
    const auto at = detail::pull_back(a, grid, static_cast<std::size_t>(i));
    dst[i] = detail::sample_linear(src, grid, at, fill);
  }
  return out;
}

LabelMap warp_nearest(const LabelMap &labels, const AffineMatrix &a) {
  const detail::Grid grid(labels.shape());
  LabelMap out = labels.like<std::uint8_t>();
  auto dst = out.data();
  const auto src = labels.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < ssize(dst.size()); ++i)
    dst[i] = detail::sample_nearest(src, grid, detail::pull_back(a, grid, static_cast<std::size_t>(i)));
  return out;
}

VoteTally tally_votes(std::span<const LabelMap> samples, std::size_t num_labels) {
  VoteTally tally;
  tally.shape = samples.front().shape();
  tally.spacing = samples.front().spacing();
  tally.num_labels = num_labels;
  tally.num_samples = samples.size();
  const std::size_t pixels = samples.front().size();
  tally.counts.assign(pixels * num_labels, 0);
  auto *counts = tally.counts.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < ssize(pixels); ++i)
    for (const auto &s : samples)
      ++counts[static_cast<std::size_t>(i) * num_labels + s[static_cast<std::size_t>(i)]];
  return tally;
}

LabelMap mode_map(const VoteTally &tally) {
  LabelMap out(tally.shape, std::uint8_t{0}, tally.spacing);
  auto dst = out.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < ssize(dst.size()); ++i)
    dst[i] = detail::mode_from_counts(tally.pixel(static_cast<std::size_t>(i)));
  return out;
}

FloatImage entropy_map(const VoteTally &tally) {
  FloatImage out(tally.shape, 0.0f, tally.spacing);
  auto dst = out.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < ssize(dst.size()); ++i)
    dst[i] = detail::entropy_from_counts(tally.pixel(static_cast<std::size_t>(i)),
                                         tally.num_samples);
  return out;
}

FloatImage mean_map(std::span<const FloatImage> maps) {
  FloatImage out = maps.front().like<float>();
  auto dst = out.data();
  const double inv = 1.0 / static_cast<double>(maps.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < ssize(dst.size()); ++i) {
    double sum = 0.0;
    for (const auto &m : maps)
      sum += m[static_cast<std::size_t>(i)];
    dst[i] = static_cast<float>(sum * inv);
  }
  return out;
}

LabelMap threshold(const FloatImage &image, double tau, std::span<const double> half_widths) {
  const detail::Grid grid(image.shape());
  LabelMap out = image.like<std::uint8_t>();
  auto dst = out.data();
  const auto src = image.data();
  const bool boxed = !half_widths.empty();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < ssize(dst.size()); ++i) {
    bool on = static_cast<double>(src[i]) > tau;
    if (on && boxed) {
      const auto idx = grid.index_of(static_cast<std::size_t>(i));
      for (std::size_t k = 0; k < grid.dim; ++k) {
        const double center = 0.5 * static_cast<double>(grid.extent[k] - 1);
        on = on && std::abs(idx[k] - center) <= half_widths[k];
      }
    }
    dst[i] = on ? 1 : 0;
  }
  return out;
}

OverlapCounts overlap(const LabelMap &pred, const LabelMap &gt, std::uint8_t label) {
  std::uint64_t tp = 0, fp = 0, fn = 0;
  const auto p = pred.data();
  const auto g = gt.data();
#pragma omp parallel for schedule(static) reduction(+ : tp, fp, fn)
  for (std::ptrdiff_t i = 0; i < ssize(p.size()); ++i) {
    const bool in_p = p[i] == label;
    const bool in_g = g[i] == label;
    tp += in_p && in_g;
    fp += in_p && !in_g;
    fn += !in_p && in_g;
  }
  return {tp, fp, fn};
}

std::vector<std::uint8_t> surface(const LabelMap &mask) {
  const detail::Grid grid(mask.shape());
  std::vector<std::uint8_t> out(mask.size(), 0);
  const auto m = mask.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t si = 0; si < ssize(m.size()); ++si) {
    const auto i = static_cast<std::size_t>(si);
    if (m[i] == 0)
      continue;
    const auto idx = grid.index_of(i);
    bool edge = false;
    for (std::size_t k = 0; k < grid.dim; ++k) {
      const auto pos = static_cast<std::size_t>(idx[k]);
      edge = edge || pos == 0 || pos + 1 == grid.extent[k] ||
             m[i - grid.stride[k]] == 0 || m[i + grid.stride[k]] == 0;
      if (edge)
        break;
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
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < ssize(sites.size()); ++i)
    dist[i] = sites[i] ? 0.0 : inf;

  for (std::size_t axis = 0; axis < grid.dim; ++axis) {
    const std::size_t n = grid.extent[axis];
    const std::size_t stride = grid.stride[axis];
    const std::size_t lines = sites.size() / n;
    const double step = spacing[axis];
#pragma omp parallel
    {
      detail::EnvelopeScratch scratch;
      scratch.resize(n);
#pragma omp for schedule(static)
      for (std::ptrdiff_t sl = 0; sl < ssize(lines); ++sl) {
        const auto line = static_cast<std::size_t>(sl);
        const std::size_t start = (line / stride) * stride * n + line % stride;
        for (std::size_t p = 0; p < n; ++p)
          scratch.f[p] = dist[start + p * stride];
        detail::squared_distance_line(scratch, n, step);
        for (std::size_t p = 0; p < n; ++p)
          dist[start + p * stride] = scratch.d[p];
      }
    }
  }
  return dist;
}

} // namespace uqseg::parallel
