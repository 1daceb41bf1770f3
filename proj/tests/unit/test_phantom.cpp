#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "test_paths.hpp"
#include "uqseg/npy.hpp"
#include "uqseg/phantom.hpp"

using namespace uqseg;
namespace fs = std::filesystem;

namespace {

std::size_t foreground(const LabelMap &m) {
  std::size_t c = 0;
  for (auto v : m.data())
    c += v;
  return c;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PhantomSpec circle_spec() {
  PhantomSpec s = PhantomSpec::standard(2);
  s.semi_axes = {0.25, 0.25};
  s.pose_prior = AugmentationPrior::degenerate(2);
  return s;
}

} // namespace

TEST_CASE("phantom rasterization") {
  SUBCASE("circle of radius 16 in 64x64") {
    const auto ph = make_phantom(circle_spec(), 1);
    const double expected = std::numbers::pi * 16.0 * 16.0;
    const double count = static_cast<double>(foreground(ph.gt));
    MESSAGE("circle pixel count " << count);
    CHECK(std::abs(count - expected) <= 0.03 * expected);
  }
  SUBCASE("noise-free raw image equals the mask") {
    auto spec = PhantomSpec::standard(2);
    spec.noise_std = 0.0;
    const auto ph = render_phantom(spec, 4);
    for (std::size_t i = 0; i < ph.gt.size(); ++i)
      CHECK(ph.image[i] == static_cast<float>(ph.gt[i]));
  }
  SUBCASE("deterministic per seed, pose varies across seeds") {
    const auto spec = PhantomSpec::standard(2);
    const auto a = make_phantom(spec, 9), b = make_phantom(spec, 9), c = make_phantom(spec, 10);
    CHECK(a.image == b.image);
    CHECK(a.gt == b.gt);
    CHECK(a.pose == b.pose);
    CHECK_FALSE(a.pose == c.pose);
  }
  SUBCASE("3D ellipsoid fits and is normalized") {
    const auto ph = make_phantom(PhantomSpec::standard(3), 2);
    CHECK(ph.gt.shape() == Shape{32, 32, 32});
    const double frac = static_cast<double>(foreground(ph.gt)) / static_cast<double>(ph.gt.size());
    CHECK(frac > 0.0);
    CHECK(frac < 0.5);
  }
  SUBCASE("foreground is brighter than background") {
    const auto ph = make_phantom(PhantomSpec::standard(2), 5);
    double fg = 0, bg = 0;
    std::size_t nf = 0, nb = 0;
    for (std::size_t i = 0; i < ph.gt.size(); ++i)
      if (ph.gt[i]) {
        fg += ph.image[i];
        ++nf;
      } else {
        bg += ph.image[i];
        ++nb;
      }
    CHECK(fg / static_cast<double>(nf) > bg / static_cast<double>(nb));
  }
  SUBCASE("validation") {
    auto s = PhantomSpec::standard(2);
    s.size = 8;
    CHECK_THROWS_AS(s.validate(), InvalidParameterError);
    s = PhantomSpec::standard(2);
    s.semi_axes = {0.6, 0.1};
    CHECK_THROWS_AS(s.validate(), InvalidParameterError);
    s = PhantomSpec::standard(2);
    s.pose_prior.scale_range = {1.0, 1.8};
    CHECK_THROWS_AS(s.validate(), InvalidParameterError);
  }
}

TEST_CASE("make_dataset") {
  const auto spec = PhantomSpec::standard(2);
  SUBCASE("empty") {
    const auto dir = test_scratch_dir("empty");
    const auto m = make_dataset(spec, 0, dir, 1);
    CHECK(m.cases.empty());
    CHECK(DatasetManifest::load(dir / "manifest.json").cases.empty());
  }
  SUBCASE("five cases, bit-identical regeneration") {
    const auto a = test_scratch_dir("five_a");
    const auto b = test_scratch_dir("five_b");
    make_dataset(spec, 5, a, 77);
    make_dataset(spec, 5, b, 77);
    std::size_t npy = 0;
    for (const auto &e : fs::directory_iterator(a))
      if (e.path().extension() == ".npy") {
        ++npy;
        CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
      }
    CHECK(npy == 10);
    const auto m = DatasetManifest::load(a / "manifest.json");
    REQUIRE(m.cases.size() == 5);
    CHECK(m.cases[0].id == "case_000");
    CHECK(npy::read_labels(*m.cases[4].label_path) == make_phantom(spec, derive_seed(77, 4)).gt);
  }
}
