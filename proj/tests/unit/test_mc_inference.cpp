#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "oracles.hpp"
#include "test_paths.hpp"
#include "uqseg/mc_inference.hpp"
#include "uqseg/phantom.hpp"
#include "uqseg/uncertainty.hpp"

using namespace uqseg;

namespace {

const std::string kMock = UQSEG_MOCK_PREDICTOR;

bool same_samples(const SampleSet &a, const SampleSet &b) {
  if (a.size() != b.size())
    return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a.samples[i] == b.samples[i]))
      return false;
  return true;
}

bool same_records(const SampleSet &a, const SampleSet &b) {
  if (a.records.size() != b.records.size())
    return false;
  for (std::size_t i = 0; i < a.records.size(); ++i)
    if (a.records[i].params != b.records[i].params ||
        a.records[i].predictor_seed != b.records[i].predictor_seed)
      return false;
  return true;
}

double pearson(const FloatImage &a, const FloatImage &b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  // A constant map shares no variation with anything.
  return saa > 0 && sbb > 0 ? sab / std::sqrt(saa * sbb) : 0.0;
}

Phantom rotated_phantom(std::uint64_t seed) { return make_phantom(PhantomSpec::standard(2), seed); }

SampleSet votes(std::initializer_list<std::uint8_t> per_sample) {
  SampleSet s;
  for (auto v : per_sample)
    s.samples.emplace_back(Shape{1, 1}, v);
  s.records.resize(s.samples.size());
  return s;
}

} // namespace

TEST_CASE("baseline") {
  const auto d = oracle::disk(16, 7, 8, 4);
  FloatImage img(d.shape(), 0.0f);
  for (std::size_t i = 0; i < d.size(); ++i)
    img[i] = d[i];
  const auto s = run_baseline(PredictorSpec::threshold_model(0.5), img);
  REQUIRE(s.size() == 1);
  CHECK(s.samples[0] == d);
  CHECK(s.mode == Method::baseline);
  REQUIRE(s.records[0].params.has_value());
  CHECK(s.records[0].params->is_spatial_identity());
  CHECK(s.records[0].predictor_seed == 0);
}

TEST_CASE("reduction lattice") {
  const auto ph = rotated_phantom(8);
  const auto biased = PredictorSpec::biased_model(0.5, {19, 8});
  const auto degenerate = AugmentationPrior::degenerate(2);
  const auto baseline = run_baseline(biased, ph.image);

  SUBCASE("degenerate prior TTA repeats the baseline") {
    const auto tta = run_tta(biased, ph.image, degenerate, 12, 42);
    for (const auto &y : tta.samples)
      CHECK(y == baseline.samples[0]);
    CHECK(same_samples(run_tta(biased, ph.image, degenerate, 1, 42), baseline));
  }
  SUBCASE("zero predictor noise makes TTAD equal TTA") {
    const auto prior = AugmentationPrior::standard(2);
    const auto still = PredictorSpec::stochastic_model(0.5, 0.0, {19, 8});
    CHECK(same_samples(run_ttad(still, ph.image, prior, 10, 7), run_tta(biased, ph.image, prior, 10, 7)));
  }
  SUBCASE("degenerate prior makes TTAD equal TTD") {
    const auto noisy = PredictorSpec::stochastic_model(0.5, 0.1, {19, 8});
    const auto ttad = run_ttad(noisy, ph.image, degenerate, 10, 3);
    const auto ttd = run_ttd(noisy, ph.image, 10, 3);
    CHECK(same_samples(ttad, ttd));
    for (std::size_t i = 0; i < ttd.size(); ++i)
      CHECK(ttad.records[i].predictor_seed == ttd.records[i].predictor_seed);
  }
  SUBCASE("zero-variance TTD collapses") {
    const auto ttd = run_ttd(PredictorSpec::stochastic_model(0.5, 0.0), ph.image, 6, 1);
    for (const auto &y : ttd.samples)
      CHECK(y == ttd.samples[0]);
  }
}

TEST_CASE("exact equivariance under lattice transforms") {
  const auto ph = rotated_phantom(2);
  const auto spec = PredictorSpec::threshold_model(0.5);
  const auto baseline = run_baseline(spec, ph.image).samples[0];
  for (double angle : {0.0, std::numbers::pi / 2, std::numbers::pi, 1.5 * std::numbers::pi}) {
    auto prior = AugmentationPrior::degenerate(2);
    prior.flip_prob = {0.5, 0.5};
    prior.rotation_range = {angle, angle};
    const auto s = run_tta(spec, ph.image, prior, 16, 11);
    for (const auto &y : s.samples)
      CHECK(y == baseline);
    for (float h : pixel_entropy(s).data())
      CHECK(h == 0.0f);
  }
}

TEST_CASE("configuration guard") {
  const FloatImage img({8, 8}, 0.0f);
  const auto det = PredictorSpec::threshold_model(0.5);
  const auto prior = AugmentationPrior::standard(2);
  CHECK_THROWS_AS(run_ttd(det, img, 5, 0), ConfigurationError);
  CHECK_NOTHROW(run_ttd(det, img, 1, 0));
  CHECK_THROWS_AS(run_ttad(det, img, prior, 5, 0), ConfigurationError);
  CHECK_THROWS_AS(run_tta(det, img, prior, 0, 0), ConfigurationError);
  CHECK_THROWS_AS(run_tta(det, img, AugmentationPrior::standard(3), 2, 0), ConfigurationError);
  CHECK_NOTHROW(run_tta(det, img, prior, 2, 0));
}

TEST_CASE("determinism and parallel independence") {
  const auto ph = rotated_phantom(4);
  const auto spec = PredictorSpec::stochastic_model(0.5, 0.05, {19, 8});
  const auto prior = AugmentationPrior::standard(2);
  const auto ref = run_ttad(spec, ph.image, prior, 20, 42);
  for (std::size_t p : {1u, 3u, 8u, 64u}) {
    const auto s = run_ttad(spec, ph.image, prior, 20, 42, {.max_parallel = p});
    CHECK(same_samples(s, ref));
    CHECK(same_records(s, ref));
  }
  CHECK_FALSE(same_samples(run_ttad(spec, ph.image, prior, 20, 43), ref));

  // Transform and predictor streams are distinct.
  for (std::size_t i = 0; i < 20; ++i)
    CHECK(transform_seed(42, i) != predictor_seed(42, i));
}

TEST_CASE("aggregate_mode") {
  CHECK(aggregate_mode(votes({1, 1, 0}))[0] == 1);
  CHECK(aggregate_mode(votes({0, 1}))[0] == 0);
  CHECK(aggregate_mode(votes({2, 3, 3, 2}))[0] == 2);
  CHECK(aggregate_mode(votes({4}))[0] == 4);
  const auto ph = rotated_phantom(5);
  SampleSet same;
  for (int i = 0; i < 5; ++i)
    same.samples.push_back(ph.gt);
  CHECK(aggregate_mode(same) == ph.gt);
  CHECK_THROWS(aggregate_mode(SampleSet{}));
}

TEST_CASE("aggregate_mean") {
  const FloatImage zeros({3, 3}, 0.0f), ones({3, 3}, 1.0f);
  const std::vector<FloatImage> two{zeros, ones};
  CHECK(aggregate_mean(two) == FloatImage({3, 3}, 0.5f));
  const std::vector<FloatImage> one{ones};
  CHECK(aggregate_mean(one) == ones);
  const std::vector<FloatImage> bad{zeros, FloatImage({3, 4}, 0.0f)};
  CHECK_THROWS_AS(aggregate_mean(bad), ShapeError);

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::vector<FloatImage> stacks;
  for (int n = 0; n < 7; ++n) {
    FloatImage p({3, 4, 4}, 0.0f);
    for (std::size_t i = 0; i < 16; ++i) {
      const float a = u(rng), b = u(rng), c = u(rng), s = a + b + c;
      p[i] = a / s;
      p[16 + i] = b / s;
      p[32 + i] = c / s;
    }
    stacks.push_back(std::move(p));
  }
  const auto mean = aggregate_mean(stacks);
  for (std::size_t i = 0; i < 16; ++i)
    CHECK(std::abs(mean[i] + mean[16 + i] + mean[32 + i] - 1.0f) <= 1e-4f);
}

TEST_CASE("TTD disagreement stays near the threshold level set") {
  const auto blob = oracle::gaussian_blob(64, 10.0);
  const double sigma = 0.1;
  const auto s = run_ttd(PredictorSpec::stochastic_model(0.5, sigma), blob, 20, 42);
  const auto h = pixel_entropy(s);
  std::size_t band = 0;
  for (std::size_t i = 0; i < blob.size(); ++i) {
    if (h[i] > 0.0f) {
      ++band;
      CHECK(std::abs(blob[i] - 0.5) <= 4 * sigma);
    }
  }
  CHECK(band > 0);
}

TEST_CASE("hybrid entropy follows the aleatoric map") {
  double to_aleatoric = 0, to_epistemic = 0;
  for (std::uint64_t c = 0; c < 5; ++c) {
    const auto ph = rotated_phantom(100 + c);
    const auto prior = AugmentationPrior::standard(2);
    const auto biased = PredictorSpec::biased_model(0.5, {19, 8});
    // Wide enough that the piecewise-constant phantom shows some epistemic spread.
    const auto dropout = PredictorSpec::stochastic_model(0.5, 0.5, {19, 8});
    const auto a = pixel_entropy(run_tta(biased, ph.image, prior, 20, 42));
    const auto e = pixel_entropy(run_ttd(dropout, ph.image, 20, 42));
    const auto hyb = pixel_entropy(run_ttad(dropout, ph.image, prior, 20, 42));
    to_aleatoric += pearson(hyb, a);
    to_epistemic += pearson(hyb, e);
  }
  MESSAGE("mean corr(hybrid, aleatoric) " << to_aleatoric / 5 << ", corr(hybrid, epistemic) "
                                          << to_epistemic / 5);
  CHECK(to_aleatoric > to_epistemic);
}

TEST_CASE("a failed sample aborts the run with its index") {
  const auto ph = rotated_phantom(1);
  const std::uint64_t master = 42;
  const std::string bad = std::to_string(predictor_seed(master, 3));
  const auto spec = PredictorSpec::parse(
      "extern,stochastic,stateless:if [ {seed} = " + bad + " ]; then echo boom >&2; exit 9; fi; '" +
      kMock + "' --input {input} --output {output} --seed {seed}");
  for (std::size_t p : {1u, 4u}) {
    try {
      run_ttd(spec, ph.image, 6, master, {.max_parallel = p});
      FAIL("expected SampleError");
    } catch (const SampleError &e) {
      CHECK(e.index() == 3);
      CHECK(std::string(e.what()).find("boom") != std::string::npos);
      CHECK_THROWS_AS(std::rethrow_exception(e.cause()), PredictorError);
    }
  }
}

TEST_CASE("stateful external predictors run one at a time") {
  const auto ph = rotated_phantom(1);
  const auto lock = test_scratch_dir("exclusive");
  const auto spec = PredictorSpec::parse("extern,stochastic:'" + kMock +
                                         "' --input {input} --output {output} --seed {seed}"
                                         " --mode exclusive --lock-dir '" +
                                         lock.string() + "'");
  CHECK_NOTHROW(run_ttd(spec, ph.image, 8, 1, {.max_parallel = 4}));
}
