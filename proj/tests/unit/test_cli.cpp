#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "test_paths.hpp"
#include "uqseg/manifest.hpp"
#include "uqseg/npy.hpp"

using namespace uqseg;
namespace fs = std::filesystem;

namespace {

const std::string kMock = UQSEG_MOCK_PREDICTOR;
const std::string kBinary = UQSEG_CLI_BINARY;

struct Result {
  int code;
  std::string out, err;
};

Result uqseg_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Relative path -> contents for every regular file under `root`.
std::map<std::string, std::string> tree(const fs::path &root) {
  std::map<std::string, std::string> files;
  for (const auto &e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file())
      files[fs::relative(e.path(), root).string()] = slurp(e.path());
  return files;
}

nlohmann::json read_json(const fs::path &p) { return nlohmann::json::parse(slurp(p)); }

std::size_t count_lines(const std::string &s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

/// A small phantom dataset shared by the tests in this file.
const fs::path &dataset() {
  static const fs::path dir = [] {
    const auto d = test_scratch_dir("data");
    const auto r = uqseg_run({"synth", "--out-dir", d.string(), "--n", "3", "--seed", "5"});
    REQUIRE(r.code == 0);
    return d;
  }();
  return dir;
}

std::string case_image(int i) { return (dataset() / ("case_00" + std::to_string(i) + "_image.npy")).string(); }
std::string case_label(int i) { return (dataset() / ("case_00" + std::to_string(i) + "_label.npy")).string(); }
std::string manifest() { return (dataset() / "manifest.json").string(); }

const std::string kBiased = "builtin:biased:0.5:19,8";

} // namespace

TEST_CASE("synth") {
  const auto files = tree(dataset());
  CHECK(files.count("manifest.json") == 1);
  CHECK(files.count("case_002_label.npy") == 1);
  CHECK(DatasetManifest::load(manifest()).cases.size() == 3);
  const auto again = test_scratch_dir("synth_again");
  REQUIRE(uqseg_run({"synth", "--out-dir", again.string(), "--n", "3", "--seed", "5"}).code == 0);
  CHECK(slurp(again / "case_001_image.npy") == slurp(dataset() / "case_001_image.npy"));
}

TEST_CASE("predict baseline writes no vvc") {
  const auto out = test_scratch_dir("baseline");
  const auto r = uqseg_run({"predict", "--image", case_image(0), "--out-dir", out.string(),
                            "--method", "baseline", "--predictor", kBiased});
  REQUIRE(r.code == 0);
  const auto stats = read_json(out / "stats.json");
  CHECK(stats["n_samples"] == 1);
  CHECK_FALSE(stats.contains("vvc"));
  CHECK(stats["method"] == "baseline");
  CHECK(stats["flags"]["--predictor"] == kBiased);
  CHECK(fs::exists(out / "pred.npy"));
  CHECK(fs::exists(out / "entropy.npy"));
  CHECK_FALSE(fs::exists(out / "samples"));
}

TEST_CASE("predict tta is reproducible and independent of max-parallel") {
  // Identical flags include the output directory, so rerun into the same one.
  const auto a = test_scratch_dir("tta_a");
  const auto c = test_scratch_dir("tta_c");
  auto args = [&](const fs::path &dir, const std::string &par) {
    return std::vector<std::string>{"predict", "--image", case_image(1), "--out-dir", dir.string(),
                                    "--method", "tta", "--n", "20", "--seed", "42", "--predictor",
                                    kBiased, "--keep-samples", "--max-parallel", par};
  };
  REQUIRE(uqseg_run(args(a, "1")).code == 0);
  const auto first = tree(a);
  REQUIRE(uqseg_run(args(a, "1")).code == 0);
  CHECK(tree(a) == first);
  CHECK(first.size() == 3 + 21);  // pred, entropy, stats, 20 samples, records
  REQUIRE(uqseg_run(args(c, "4")).code == 0);
  const auto tc = tree(c);
  REQUIRE(uqseg_run(args(c, "4")).code == 0);
  CHECK(tree(c) == tc);
  // Across --max-parallel only the echoed flags in stats.json differ.
  for (const auto &[name, bytes] : first)
    if (name != "stats.json")
      CHECK(bytes == tc.at(name));
  auto sa = read_json(a / "stats.json"), sc = read_json(c / "stats.json");
  CHECK(sa["volumes"] == sc["volumes"]);
  CHECK(sa["n_samples"] == 20);
  CHECK(sa["seed"] == 42);
  CHECK(sa["vvc"].is_number());
  CHECK(sa["volumes"].size() == 20);
}

TEST_CASE("configuration guard: ttad needs a stochastic predictor") {
  const auto out = test_scratch_dir("guard");
  const auto bad = uqseg_run({"predict", "--image", case_image(0), "--out-dir", out.string(),
                              "--method", "ttad", "--predictor", "builtin:threshold:0.5"});
  CHECK(bad.code != 0);
  CHECK(count_lines(bad.err) == 1);
  CHECK(bad.err.find("ttad") != std::string::npos);
  const auto good = uqseg_run({"predict", "--image", case_image(0), "--out-dir", out.string(),
                               "--method", "tta", "--n", "3", "--predictor", "builtin:threshold:0.5"});
  CHECK(good.code == 0);
}

TEST_CASE("diagnostics name the offending flag or file") {
  const auto out = test_scratch_dir("diag");
  auto r = uqseg_run({"predict", "--image", "/no/such.npy", "--out-dir", out.string()});
  CHECK(r.code != 0);
  CHECK(r.err.find("--image '/no/such.npy'") != std::string::npos);
  r = uqseg_run({"predict", "--image", case_image(0), "--out-dir", out.string(), "--predictor",
                 "builtin:wat"});
  CHECK(r.err.find("--predictor") != std::string::npos);
  r = uqseg_run({"predict", "--image", case_image(0), "--out-dir", out.string(), "--prior",
                 "/no/prior.json"});
  CHECK(r.err.find("--prior '/no/prior.json'") != std::string::npos);
  r = uqseg_run({"predict", "--image", case_image(0), "--out-dir", out.string(), "--method", "magic"});
  CHECK(r.err.find("--method") != std::string::npos);
  r = uqseg_run({"predict", "--out-dir", out.string(), "--bogus"});
  CHECK(r.code != 0);
  CHECK(count_lines(r.err) == 1);
  r = uqseg_run({"evaluate", "--image", case_image(0), "--out-dir", out.string()});
  CHECK(r.err.find("has no label") != std::string::npos);
}

TEST_CASE("external predictor failures surface stderr and timeouts") {
  const auto out = test_scratch_dir("extern");
  auto r = uqseg_run({"predict", "--image", case_image(0), "--out-dir", out.string(), "--method",
                      "baseline", "--predictor",
                      "extern:'" + kMock + "' --input {input} --output {output} --seed {seed} --mode fail"});
  CHECK(r.code != 0);
  CHECK(count_lines(r.err) == 1);
  CHECK(r.err.find("model weights missing") != std::string::npos);

  r = uqseg_run({"predict", "--image", case_image(0), "--out-dir", out.string(), "--method",
                 "baseline", "--timeout-secs", "1", "--predictor",
                 "extern:'" + kMock + "' --input {input} --output {output} --seed {seed} --mode sleep"});
  CHECK(r.code != 0);
  CHECK(r.err.find("timed out") != std::string::npos);

  r = uqseg_run({"predict", "--image", case_image(0), "--out-dir", out.string(), "--method",
                 "baseline", "--predictor",
                 "extern:'" + kMock + "' --input {input} --output {output} --seed {seed}"});
  CHECK(r.code == 0);
  const auto builtin = test_scratch_dir("extern_builtin");
  REQUIRE(uqseg_run({"predict", "--image", case_image(0), "--out-dir", builtin.string(), "--method",
                     "baseline"})
              .code == 0);
  CHECK(slurp(out / "pred.npy") == slurp(builtin / "pred.npy"));
}

TEST_CASE("manifest predict, then evaluate and histogram") {
  const auto pred = test_scratch_dir("mpred");
  REQUIRE(uqseg_run({"predict", "--manifest", manifest(), "--out-dir", pred.string(), "--method",
                     "tta", "--n", "6", "--seed", "1", "--predictor", kBiased, "--max-parallel", "2"})
              .code == 0);
  for (const char *id : {"case_000", "case_001", "case_002"})
    CHECK(fs::exists(pred / id / "stats.json"));

  const auto ev = test_scratch_dir("meval");
  auto r = uqseg_run({"evaluate", "--manifest", manifest(), "--out-dir", ev.string(), "--method",
                      "baseline,tta", "--n", "6", "--seed", "1", "--predictor", kBiased});
  REQUIRE(r.code == 0);
  const auto cases = slurp(ev / "cases.csv");
  CHECK(count_lines(cases) == 1 + 3 * 2);
  CHECK(cases.rfind("case_id,method,n_samples,dice,assd,vvc\n", 0) == 0);
  CHECK(count_lines(slurp(ev / "summary.csv")) == 3);

  // Scoring the stored tta predictions gives the same tta rows.
  const auto stored = test_scratch_dir("meval_stored");
  REQUIRE(uqseg_run({"evaluate", "--manifest", manifest(), "--out-dir", stored.string(),
                     "--pred-dir", pred.string()})
              .code == 0);
  std::istringstream in_live(cases), in_stored(slurp(stored / "cases.csv"));
  std::string line;
  std::vector<std::string> live_tta, stored_rows;
  while (std::getline(in_live, line))
    if (line.find(",tta,") != std::string::npos)
      live_tta.push_back(line);
  std::getline(in_stored, line);
  while (std::getline(in_stored, line))
    stored_rows.push_back(line);
  CHECK(live_tta == stored_rows);

  const auto hi = test_scratch_dir("mhist");
  r = uqseg_run({"histogram", "--manifest", manifest(), "--out-dir", hi.string(), "--method",
                 "tta", "--n", "6", "--seed", "1", "--bins", "8", "--predictor", kBiased});
  REQUIRE(r.code == 0);
  CHECK(count_lines(slurp(hi / "histogram.csv")) == 9);
  const auto doc = read_json(hi / "histogram.json");
  CHECK(doc["pixels"] == 3 * 64 * 64);

  const auto hs = test_scratch_dir("mhist_stored");
  REQUIRE(uqseg_run({"histogram", "--manifest", manifest(), "--out-dir", hs.string(), "--bins", "8",
                     "--pred-dir", pred.string()})
              .code == 0);
  CHECK(slurp(hs / "histogram.csv") == slurp(hi / "histogram.csv"));
}

TEST_CASE("augment") {
  const auto a = test_scratch_dir("aug_a");
  const std::vector<std::string> args{"augment", "--image", case_image(2), "--label", case_label(2),
                                      "--out-dir", a.string(), "--n", "4", "--seed", "3"};
  REQUIRE(uqseg_run(args).code == 0);
  const auto first = tree(a);
  REQUIRE(uqseg_run(args).code == 0);
  CHECK(tree(a) == first);
  CHECK(fs::exists(a / "aug_003_image.npy"));
  const auto labels = npy::read_labels(a / "aug_000_label.npy");
  for (auto v : labels.data())
    CHECK(v <= 1);

  // Identity prior: the exported pair is the input pair.
  const auto prior = a / "identity.json";
  std::ofstream(prior) << R"({"flip_prob":[0,0],"rotation_range":[0,0],"scale_range":[1,1],"noise_std":0})";
  const auto c = test_scratch_dir("aug_identity");
  REQUIRE(uqseg_run({"augment", "--image", case_image(2), "--label", case_label(2), "--out-dir",
                     c.string(), "--n", "1", "--prior", prior.string()})
              .code == 0);
  CHECK(npy::read_float(c / "aug_000_image.npy") == npy::read_float(case_image(2)));
  CHECK(npy::read_labels(c / "aug_000_label.npy") == npy::read_labels(case_label(2)));
}

TEST_CASE("binary exit codes") {
  const auto dir = test_scratch_dir("binary");
  const auto err = dir / "err.txt";
  const int ok = std::system(("'" + kBinary + "' --help > /dev/null").c_str());
  CHECK(ok == 0);
  const int bad = std::system(("'" + kBinary + "' predict --image /missing.npy --out-dir '" +
                               dir.string() + "' 2> '" + err.string() + "'")
                                  .c_str());
  CHECK(bad != 0);
  const auto text = slurp(err);
  CHECK(count_lines(text) == 1);
  CHECK(text.rfind("uqseg: error: ", 0) == 0);
}
