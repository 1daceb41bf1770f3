#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uqseg/acquisition.hpp"
#include "uqseg/kernels.hpp"
#include "uqseg/ndimage.hpp"
#include "uqseg/predictor.hpp"
#include "uqseg/transform_params.hpp"

namespace uqseg {

enum class Method { baseline, tta, ttd, ttad };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);

struct SampleRecord {
  std::optional<TransformParams> params; // absent when no transform was drawn
  std::uint64_t predictor_seed = 0;
};

/// The N Monte Carlo label predictions of one image, in sample-index order.
struct SampleSet {
  Method mode = Method::baseline;
  std::vector<LabelMap> samples;
  std::vector<SampleRecord> records;
  std::uint64_t master_seed = 0;
  std::size_t num_classes = 2;

  std::size_t size() const noexcept { return samples.size(); }
};

struct EngineOptions {
  /// Upper bound on concurrently evaluated samples. Predictors that are not
  /// safe to call concurrently always run one at a time.
  std::size_t max_parallel = 1;
};

/// Per-sample seed streams: the transform draw and the predictor seed of
/// sample n never share a generator.
std::uint64_t transform_seed(std::uint64_t master_seed, std::size_t n);
std::uint64_t predictor_seed(std::uint64_t master_seed, std::size_t n);

SampleSet run_baseline(const PredictorSpec &spec, const FloatImage &image);

SampleSet run_tta(const PredictorSpec &spec, const FloatImage &image,
                  const AugmentationPrior &prior, std::size_t n, std::uint64_t master_seed,
                  const EngineOptions &options = {});

SampleSet run_ttd(const PredictorSpec &spec, const FloatImage &image, std::size_t n,
                  std::uint64_t master_seed, const EngineOptions &options = {});

SampleSet run_ttad(const PredictorSpec &spec, const FloatImage &image,
                   const AugmentationPrior &prior, std::size_t n, std::uint64_t master_seed,
                   const EngineOptions &options = {});

/// Dispatches on `method`; baseline ignores prior, n and seed.
SampleSet run_method(Method method, const PredictorSpec &spec, const FloatImage &image,
                     const AugmentationPrior &prior, std::size_t n, std::uint64_t master_seed,
                     const EngineOptions &options = {});

/// Throws ConfigurationError when `method` cannot run with `spec`.
void check_method(Method method, const PredictorSpec &spec, std::size_t n);

VoteTally tally(const SampleSet &s);

/// Majority vote; ties go to the smallest label.
LabelMap aggregate_mode(const SampleSet &s);

/// Elementwise arithmetic mean.
FloatImage aggregate_mean(std::span<const FloatImage> maps);

} // namespace uqseg
