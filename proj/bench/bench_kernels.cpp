// Serial reference vs OpenMP kernels on representative sizes.
//
//   bench_kernels [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <vector>

#include <omp.h>

#include "uqseg/acquisition.hpp"
#include "uqseg/kernels.hpp"
#include "uqseg/mc_inference.hpp"
#include "uqseg/phantom.hpp"

using namespace uqseg;

namespace {

double best_of(int repeats, const std::function<void()> &fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char *name, int repeats, const std::function<void()> &serial,
         const std::function<void()> &parallel) {
  const double s = best_of(repeats, serial), p = best_of(repeats, parallel);
  std::printf("%-28s %10.2f %10.2f %8.2fx\n", name, s, p, s / p);
}

FloatImage noise_image(const Shape &shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> n(0.0f, 1.0f);
  FloatImage img(shape, 0.0f);
  for (auto &v : img.data())
    v = n(rng);
  return img;
}

} // namespace

int main(int argc, char **argv) {
  const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 5;
  std::printf("threads: %d, best of %d runs (ms)\n", omp_get_max_threads(), repeats);
  std::printf("%-28s %10s %10s %9s\n", "kernel", "serial", "parallel", "speedup");

  Rng rng(1);
  for (const Shape &shape : {Shape{256, 256}, Shape{96, 96, 96}}) {
    const auto img = noise_image(shape, 2);
    LabelMap labels(shape, std::uint8_t{0});
    for (std::size_t i = 0; i < labels.size(); ++i)
      labels[i] = img[i] > 0.3f;
    const auto a = affine_from_params(sample_params(AugmentationPrior::standard(shape.size()), rng), shape);
    const char *tag = shape.size() == 2 ? "2D 256^2" : "3D 96^3";
    char name[64];

    std::snprintf(name, sizeof name, "warp_linear %s", tag);
    row(name, repeats, [&] { serial::warp_linear(img, a, 0.0f); }, [&] { parallel::warp_linear(img, a, 0.0f); });
    std::snprintf(name, sizeof name, "warp_nearest %s", tag);
    row(name, repeats, [&] { serial::warp_nearest(labels, a); }, [&] { parallel::warp_nearest(labels, a); });

    std::vector<LabelMap> samples;
    for (int n = 0; n < 40; ++n)
      samples.push_back(parallel::warp_nearest(
          labels, affine_from_params(sample_params(AugmentationPrior::standard(shape.size()), rng), shape)));
    std::snprintf(name, sizeof name, "tally+entropy N=40 %s", tag);
    row(name, repeats, [&] { serial::entropy_map(serial::tally_votes(samples, 2)); },
        [&] { parallel::entropy_map(parallel::tally_votes(samples, 2)); });

    const Spacing spacing(shape.size(), 1.0);
    const auto surf = serial::surface(labels);
    std::snprintf(name, sizeof name, "squared_distance %s", tag);
    row(name, repeats, [&] { serial::squared_distance(surf, shape, spacing); },
        [&] { parallel::squared_distance(surf, shape, spacing); });
  }

  // End to end: 3D TTA with the library's (parallel) kernels, serial vs
  // concurrent samples.
  const auto ph = make_phantom(PhantomSpec::standard(3), 3);
  const auto spec = PredictorSpec::biased_model(0.5, {10, 5, 4});
  const auto prior = AugmentationPrior::standard(3);
  row("tta 3D 32^3 N=40 samples", repeats,
      [&] { run_tta(spec, ph.image, prior, 40, 42, {.max_parallel = 1}); },
      [&] { run_tta(spec, ph.image, prior, 40, 42, {.max_parallel = static_cast<std::size_t>(omp_get_max_threads())}); });
  return 0;
}
