#include "uqseg/acquisition.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "uqseg/transforms.hpp"

namespace uqseg {

using nlohmann::json;

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  return mix(mix(master) ^ (index + 0x632be59bd9b4e019ull));
}

void AugmentationPrior::validate() const {
  const std::size_t d = dim();
  if (d != 2 && d != 3)
    throw InvalidParameterError("prior: flip_prob must have 2 or 3 entries");
  for (double f : flip_prob)
    if (!(f >= 0.0 && f <= 1.0))
      throw InvalidParameterError("prior: flip_prob entries must lie in [0, 1]");
  if (!(rotation_range[0] <= rotation_range[1]) || !std::isfinite(rotation_range[0]) ||
      !std::isfinite(rotation_range[1]))
    throw InvalidParameterError("prior: rotation_range must satisfy r0 <= r1");
  if (!(scale_range[0] > 0.0) || !(scale_range[0] <= scale_range[1]) ||
      !std::isfinite(scale_range[1]))
    throw InvalidParameterError("prior: scale_range must satisfy 0 < s0 <= s1");
  if (translation_range.size() != d)
    throw InvalidParameterError("prior: translation_range needs one [lo, hi] per axis");
  for (const auto &t : translation_range)
    if (!(t[0] <= t[1]) || !std::isfinite(t[0]) || !std::isfinite(t[1]))
      throw InvalidParameterError("prior: translation_range entries must satisfy lo <= hi");
  if (!std::isfinite(noise_mean))
    throw InvalidParameterError("prior: noise_mean must be finite");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std))
    throw InvalidParameterError("prior: noise_std must be >= 0");
}

AugmentationPrior AugmentationPrior::degenerate(std::size_t dim) {
  AugmentationPrior p;
  p.flip_prob.assign(dim, 0.0);
  p.translation_range.assign(dim, {0.0, 0.0});
  p.validate();
  return p;
}

AugmentationPrior AugmentationPrior::standard(std::size_t dim) {
  AugmentationPrior p;
  p.flip_prob.assign(dim, 0.5);
  p.rotation_range = {0.0, 2.0 * std::numbers::pi};
  p.scale_range = {0.8, 1.2};
  p.translation_range.assign(dim, {0.0, 0.0});
  p.noise_mean = 0.0;
  p.noise_std = 0.05;
  p.validate();
  return p;
}

AugmentationPrior AugmentationPrior::from_json(std::string_view text) {
  AugmentationPrior p;
  try {
    const json doc = json::parse(text);
    p.flip_prob = doc.at("flip_prob").get<std::vector<double>>();
    p.rotation_range = doc.at("rotation_range").get<std::array<double, 2>>();
    p.scale_range = doc.at("scale_range").get<std::array<double, 2>>();
    p.noise_mean = doc.value("noise_mean", 0.0);
    p.noise_std = doc.value("noise_std", 0.0);
    if (doc.contains("translation_range"))
      p.translation_range = doc["translation_range"].get<std::vector<std::array<double, 2>>>();
    else
      p.translation_range.assign(p.flip_prob.size(), {0.0, 0.0});
  } catch (const json::exception &e) {
    throw InvalidParameterError(std::string("prior JSON: ") + e.what());
  }
  p.validate();
  return p;
}

AugmentationPrior AugmentationPrior::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open prior file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return from_json(buffer.str());
  } catch (const InvalidParameterError &e) {
    throw InvalidParameterError(path.string() + ": " + e.what());
  }
}

std::string AugmentationPrior::to_json() const {
  json doc;
  doc["flip_prob"] = flip_prob;
  doc["rotation_range"] = rotation_range;
  doc["scale_range"] = scale_range;
  doc["translation_range"] = translation_range;
  doc["noise_mean"] = noise_mean;
  doc["noise_std"] = noise_std;
  return doc.dump();
}

TransformParams sample_params(const AugmentationPrior &prior, Rng &rng) {
  const std::size_t d = prior.dim();
  TransformParams p = TransformParams::identity(d);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  for (std::size_t k = 0; k < d; ++k)
    p.flips[k] = unit(rng) < prior.flip_prob[k];
  for (auto &angle : p.rotation)
    angle = uniform(prior.rotation_range[0], prior.rotation_range[1]);
  p.scale = uniform(prior.scale_range[0], prior.scale_range[1]);
  for (std::size_t k = 0; k < d; ++k)
    p.translation[k] = uniform(prior.translation_range[k][0], prior.translation_range[k][1]);
  p.noise_seed = rng();
  return p;
}

FloatImage sample_noise(const AugmentationPrior &prior, const Shape &shape, std::uint64_t seed) {
  FloatImage field(shape, static_cast<float>(prior.noise_mean));
  if (prior.noise_std == 0.0)
    return field;
  Rng rng(seed);
  std::normal_distribution<double> normal(prior.noise_mean, prior.noise_std);
  for (auto &v : field.data())
    v = static_cast<float>(normal(rng));
  return field;
}

FloatImage to_latent(const FloatImage &observed, const TransformParams &p,
                     const AugmentationPrior &prior) {
  const FloatImage noise = sample_noise(prior, observed.shape(), p.noise_seed);
  FloatImage denoised = observed;
  auto dst = denoised.data();
  const auto e = noise.data();
  for (std::size_t i = 0; i < dst.size(); ++i)
    dst[i] -= e[i];
  if (p.is_spatial_identity())
    return denoised;
  return warp_image(denoised, invert(affine_from_params(p, observed.shape())));
}

LabelMap from_latent(const LabelMap &latent_labels, const TransformParams &p) {
  if (p.is_spatial_identity())
    return latent_labels;
  return warp_labels(latent_labels, affine_from_params(p, latent_labels.shape()));
}

FloatImage acquire(const FloatImage &latent, const TransformParams &p,
                   const AugmentationPrior &prior) {
  FloatImage observed = p.is_spatial_identity()
                            ? latent
                            : warp_image(latent, affine_from_params(p, latent.shape()));
  const FloatImage noise = sample_noise(prior, latent.shape(), p.noise_seed);
  auto dst = observed.data();
  const auto e = noise.data();
  for (std::size_t i = 0; i < dst.size(); ++i)
    dst[i] += e[i];
  return observed;
}

} // namespace uqseg
