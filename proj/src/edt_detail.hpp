#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace uqseg::detail {

/// Scratch buffers for one 1D lower-envelope pass.
struct EnvelopeScratch {
  std::vector<double> f, d, z;
  std::vector<std::size_t> v;

  void resize(std::size_t n) {
    f.resize(n);
    d.resize(n);
    z.resize(n + 1);
    v.resize(n);
  }
};

/// 1D squared distance transform over a line with step `step` (mm):
/// d[p] = min_q f[q] + (step * (p - q))^2, +inf entries are ignored.
inline void squared_distance_line(EnvelopeScratch &s, std::size_t n, double step) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const auto &f = s.f;
  auto &d = s.d;
  auto &v = s.v;
  auto &z = s.z;
  auto lifted = [&](std::size_t q) {
    const double x = step * static_cast<double>(q);
    return f[q] + x * x;
  };

  std::size_t first = 0;
  while (first < n && f[first] == inf)
    ++first;
  if (first == n) {
    for (std::size_t p = 0; p < n; ++p)
      d[p] = inf;
    return;
  }

  std::size_t k = 0;
  v[0] = first;
  z[0] = -inf;
  z[1] = inf;
  for (std::size_t q = first + 1; q < n; ++q) {
    if (f[q] == inf)
      continue;
    // z[0] is -inf, so the envelope never pops its first parabola here.
    double cross = 0.0;
    for (;;) {
      const std::size_t r = v[k];
      cross = (lifted(q) - lifted(r)) /
              (2.0 * step * step * static_cast<double>(q - r));
      if (cross > z[k])
        break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = cross;
    z[k + 1] = inf;
  }

  k = 0;
  for (std::size_t p = 0; p < n; ++p) {
    while (z[k + 1] < static_cast<double>(p))
      ++k;
    const double dx = step * (static_cast<double>(p) - static_cast<double>(v[k]));
    d[p] = f[v[k]] + dx * dx;
  }
}

} // namespace uqseg::detail
