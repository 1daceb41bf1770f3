#include "uqseg/phantom.hpp"

#include <algorithm>
#include <array>
#include <exception>
#include <cstdio>
#include <numbers>

#include "uqseg/npy.hpp"
#include "uqseg/transforms.hpp"

namespace uqseg {

namespace fs = std::filesystem;

AugmentationPrior PhantomSpec::uniform_rotation(std::size_t dim) {
  AugmentationPrior p = AugmentationPrior::degenerate(dim);
  p.rotation_range = {0.0, 2.0 * std::numbers::pi};
  return p;
}

PhantomSpec PhantomSpec::standard(std::size_t dim) {
  PhantomSpec s;
  s.dim = dim;
  s.size = dim == 2 ? 64 : 32;
  s.semi_axes = dim == 2 ? std::vector<double>{0.30, 0.12} : std::vector<double>{0.30, 0.15, 0.12};
  s.pose_prior = uniform_rotation(dim);
  return s;
}

void PhantomSpec::validate() const {
  if (dim != 2 && dim != 3)
    throw InvalidParameterError("phantom dim must be 2 or 3");
  if (size < 16)
    throw InvalidParameterError("phantom size must be >= 16");
  if (semi_axes.size() != dim)
    throw InvalidParameterError("phantom needs one semi-axis per dimension");
  pose_prior.validate();
  if (pose_prior.dim() != dim)
    throw InvalidParameterError("phantom pose prior dimension mismatch");
  for (double a : semi_axes) {
    if (!(a > 0.0 && a < 0.5))
      throw InvalidParameterError("phantom semi-axes must lie in (0, 0.5)");
    // The posed object has to stay inside the field of view.
    if (!(a * pose_prior.scale_range[1] < 0.5))
      throw InvalidParameterError("phantom does not fit the field of view at maximum scale");
  }
  if (!(noise_std >= 0.0))
    throw InvalidParameterError("phantom noise_std must be >= 0");
}

Phantom render_phantom(const PhantomSpec &spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  const TransformParams pose = sample_params(spec.pose_prior, rng);
  const Shape shape(spec.dim, spec.size);
  const AffineMatrix to_canonical = affine_from_params(pose, shape);

  LabelMap gt(shape, std::uint8_t{0});
  const double center = 0.5 * static_cast<double>(spec.size - 1);
  std::vector<double> radius(spec.dim);
  for (std::size_t k = 0; k < spec.dim; ++k)
    radius[k] = spec.semi_axes[k] * static_cast<double>(spec.size);

  std::array<double, 3> out{}, in{};
  for (std::size_t i = 0; i < gt.size(); ++i) {
    std::size_t rem = i;
    for (std::size_t k = spec.dim; k-- > 0;) {
      out[k] = static_cast<double>(rem % spec.size);
      rem /= spec.size;
    }
    to_canonical.apply(std::span<const double>(out.data(), spec.dim),
                       std::span<double>(in.data(), spec.dim));
    double r2 = 0.0;
    for (std::size_t k = 0; k < spec.dim; ++k) {
      const double u = (in[k] - center) / radius[k];
      r2 += u * u;
    }
    gt[i] = r2 <= 1.0 ? 1 : 0;
  }

  FloatImage image(shape, 0.0f);
  Rng noise_rng(pose.noise_seed);
  std::normal_distribution<double> normal(0.0, spec.noise_std > 0.0 ? spec.noise_std : 1.0);
  for (std::size_t i = 0; i < image.size(); ++i) {
    double v = gt[i] ? spec.fg_intensity : spec.bg_intensity;
    if (spec.noise_std > 0.0)
      v += normal(noise_rng);
    image[i] = static_cast<float>(v);
  }
  return {std::move(image), std::move(gt), pose};
}

Phantom make_phantom(const PhantomSpec &spec, std::uint64_t seed) {
  Phantom p = render_phantom(spec, seed);
  p.image = znormalize(p.image);
  return p;
}

DatasetManifest make_dataset(const PhantomSpec &spec, std::size_t n, const fs::path &out_dir,
                             std::uint64_t seed) {
  spec.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec)
    throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

  DatasetManifest manifest;
  manifest.cases.resize(n);
  std::vector<std::exception_ptr> failures(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t si = 0; si < count; ++si) {
    const auto i = static_cast<std::size_t>(si);
    try {
      char id[32];
      std::snprintf(id, sizeof id, "case_%03zu", i);
      const Phantom ph = make_phantom(spec, derive_seed(seed, i));
      ManifestCase c;
      c.id = id;
      c.image_path = out_dir / (c.id + "_image.npy");
      c.label_path = out_dir / (c.id + "_label.npy");
      c.spacing = ph.image.spacing();
      npy::write_atomic(ph.image, c.image_path);
      npy::write_atomic(ph.gt, *c.label_path);
      manifest.cases[i] = std::move(c);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (auto &f : failures)
    if (f)
      std::rethrow_exception(f);
  manifest.save(out_dir / "manifest.json");
  return manifest;
}

} // namespace uqseg
