#include "uqseg/mc_inference.hpp"

#include <algorithm>
#include <exception>

#include "uqseg/transforms.hpp"

namespace uqseg {

std::string_view method_name(Method m) {
  switch (m) {
  case Method::baseline:
    return "baseline";
  case Method::tta:
    return "tta";
  case Method::ttd:
    return "ttd";
  case Method::ttad:
    return "ttad";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (auto m : {Method::baseline, Method::tta, Method::ttd, Method::ttad})
    if (method_name(m) == name)
      return m;
  throw ConfigurationError("unknown method '" + std::string(name) +
                           "' (expected baseline, tta, ttd or ttad)");
}

std::uint64_t transform_seed(std::uint64_t master_seed, std::size_t n) {
  return derive_seed(derive_seed(master_seed, n), 0);
}

std::uint64_t predictor_seed(std::uint64_t master_seed, std::size_t n) {
  return derive_seed(derive_seed(master_seed, n), 1);
}

namespace {

struct Draw {
  bool transform = false;
  bool stochastic = false;
};

// Evaluates samples 0..n-1, possibly concurrently, and stores them by index.
SampleSet run_samples(Method mode, Draw draw, const PredictorSpec &spec,
                      const FloatImage &image, const AugmentationPrior *prior, std::size_t n,
                      std::uint64_t master_seed, const EngineOptions &options) {
  if (n == 0)
    throw ConfigurationError("number of samples must be >= 1");
  if (prior) {
    prior->validate();
    if (prior->dim() != image.dim())
      throw ConfigurationError("prior is " + std::to_string(prior->dim()) +
                               "D but the image is " + std::to_string(image.dim()) + "D");
  }

  SampleSet out;
  out.mode = mode;
  out.master_seed = master_seed;
  out.num_classes = spec.num_classes;
  out.samples.resize(n);
  out.records.resize(n);
  std::vector<std::exception_ptr> failures(n);

  auto one = [&](std::size_t i) {
    SampleRecord record;
    record.predictor_seed = draw.stochastic ? predictor_seed(master_seed, i) : 0;
    if (draw.transform) {
      Rng rng(transform_seed(master_seed, i));
      const TransformParams params = sample_params(*prior, rng);
      const FloatImage latent = to_latent(image, params, *prior);
      const LabelMap latent_labels = predict_labels(spec, latent, record.predictor_seed);
      out.samples[i] = from_latent(latent_labels, params);
      record.params = params;
    } else {
      out.samples[i] = predict_labels(spec, image, record.predictor_seed);
      if (mode == Method::baseline)
        record.params = TransformParams::identity(image.dim());
    }
    out.records[i] = std::move(record);
  };

  const std::size_t threads =
      spec.concurrent_safe() ? std::clamp<std::size_t>(options.max_parallel, 1, n) : 1;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads) if (threads > 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      one(static_cast<std::size_t>(i));
    } catch (...) {
      failures[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!failures[i])
      continue;
    std::string what = "unknown error";
    try {
      std::rethrow_exception(failures[i]);
    } catch (const std::exception &e) {
      what = e.what();
    } catch (...) {
    }
    throw SampleError(i, what, failures[i]);
  }
  return out;
}

} // namespace

void check_method(Method method, const PredictorSpec &spec, std::size_t n) {
  spec.validate();
  if (n == 0)
    throw ConfigurationError("number of samples must be >= 1");
  if (method == Method::ttd && !spec.stochastic && n > 1)
    throw ConfigurationError("ttd needs a stochastic predictor; with '" + spec.to_string() +
                             "' all samples would be identical");
  if (method == Method::ttad && !spec.stochastic)
    throw ConfigurationError("ttad needs a stochastic predictor, got '" + spec.to_string() +
                             "'");
}

SampleSet run_baseline(const PredictorSpec &spec, const FloatImage &image) {
  check_method(Method::baseline, spec, 1);
  return run_samples(Method::baseline, {}, spec, image, nullptr, 1, 0, {});
}

SampleSet run_tta(const PredictorSpec &spec, const FloatImage &image,
                  const AugmentationPrior &prior, std::size_t n, std::uint64_t master_seed,
                  const EngineOptions &options) {
  check_method(Method::tta, spec, n);
  return run_samples(Method::tta, {.transform = true, .stochastic = false}, spec, image, &prior,
                     n, master_seed, options);
}

SampleSet run_ttd(const PredictorSpec &spec, const FloatImage &image, std::size_t n,
                  std::uint64_t master_seed, const EngineOptions &options) {
  check_method(Method::ttd, spec, n);
  return run_samples(Method::ttd, {.transform = false, .stochastic = true}, spec, image, nullptr,
                     n, master_seed, options);
}

SampleSet run_ttad(const PredictorSpec &spec, const FloatImage &image,
                   const AugmentationPrior &prior, std::size_t n, std::uint64_t master_seed,
                   const EngineOptions &options) {
  check_method(Method::ttad, spec, n);
  return run_samples(Method::ttad, {.transform = true, .stochastic = true}, spec, image, &prior,
                     n, master_seed, options);
}

SampleSet run_method(Method method, const PredictorSpec &spec, const FloatImage &image,
                     const AugmentationPrior &prior, std::size_t n, std::uint64_t master_seed,
                     const EngineOptions &options) {
  switch (method) {
  case Method::baseline:
    return run_baseline(spec, image);
  case Method::tta:
    return run_tta(spec, image, prior, n, master_seed, options);
  case Method::ttd:
    return run_ttd(spec, image, n, master_seed, options);
  case Method::ttad:
    return run_ttad(spec, image, prior, n, master_seed, options);
  }
  throw ConfigurationError("unknown method");
}

VoteTally tally(const SampleSet &s) {
  if (s.samples.empty())
    throw ConfigurationError("empty sample set");
  const Shape &shape = s.samples.front().shape();
  std::size_t labels = std::max<std::size_t>(s.num_classes, 2);
  for (const auto &sample : s.samples) {
    if (sample.shape() != shape)
      throw ShapeError("sample set mixes shapes " + shape_string(shape) + " and " +
                       shape_string(sample.shape()));
    if (!sample.values().empty()) {
      const auto top = *std::max_element(sample.values().begin(), sample.values().end());
      labels = std::max<std::size_t>(labels, std::size_t{top} + 1);
    }
  }
  return parallel::tally_votes(s.samples, labels);
}

LabelMap aggregate_mode(const SampleSet &s) { return parallel::mode_map(tally(s)); }

FloatImage aggregate_mean(std::span<const FloatImage> maps) {
  if (maps.empty())
    throw ShapeError("aggregate_mean: no maps");
  for (const auto &m : maps)
    if (m.shape() != maps.front().shape())
      throw ShapeError("aggregate_mean: shape mismatch " + shape_string(maps.front().shape()) +
                       " vs " + shape_string(m.shape()));
  return parallel::mean_map(maps);
}

} // namespace uqseg
