#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "uqseg/acquisition.hpp"
#include "uqseg/errors.hpp"
#include "uqseg/manifest.hpp"
#include "uqseg/mc_inference.hpp"
#include "uqseg/metrics.hpp"
#include "uqseg/npy.hpp"
#include "uqseg/phantom.hpp"
#include "uqseg/predictor.hpp"
#include "uqseg/transforms.hpp"
#include "uqseg/uncertainty.hpp"

namespace uqseg::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct Options {
  std::string image, label, manifest, out_dir, pred_dir, prior;
  std::string method = "tta";
  std::string predictor = "builtin:threshold:0.5";
  std::size_t n = 0;  // 0: pick the default for the image dimension
  std::uint64_t seed = 0;
  std::size_t bins = 20;
  std::vector<double> spacing;
  bool keep_samples = false;
  std::size_t max_parallel = 1;
  std::optional<long> timeout_secs;
  int target_label = 1;
  // synth
  std::size_t dim = 2;
  std::optional<std::size_t> size;
  double noise_std = 0.05;
};

std::string in_quotes(const fs::path &p) { return "'" + p.string() + "'"; }

[[noreturn]] void rethrow_with_context(const std::string &context) {
  try {
    throw;
  } catch (const std::exception &e) {
    throw Error(context + ": " + e.what());
  }
}

void write_text_atomic(const fs::path &path, const std::string &text) {
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out)
      throw IoError("cannot write " + in_quotes(tmp));
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move " + in_quotes(tmp) + " into place: " + ec.message());
  }
}

fs::path make_out_dir(const Options &o) {
  if (o.out_dir.empty())
    throw Error("--out-dir is required");
  std::error_code ec;
  fs::create_directories(o.out_dir, ec);
  if (ec)
    throw IoError("--out-dir " + in_quotes(o.out_dir) + ": " + ec.message());
  return o.out_dir;
}

/// Flags given on the command line, echoed into every JSON output.
ordered_json echo_flags(const CLI::App &sub) {
  ordered_json j = ordered_json::object();
  for (const CLI::Option *opt : sub.get_options()) {
    if (opt->count() == 0 || opt->get_name() == "--help")
      continue;
    const auto &r = opt->results();
    if (r.size() == 1)
      j[opt->get_name()] = r.front();
    else
      j[opt->get_name()] = r;
  }
  return j;
}

ordered_json params_json(const TransformParams &p) {
  ordered_json j;
  j["flips"] = p.flips;
  j["rotation"] = p.rotation;
  j["scale"] = p.scale;
  j["translation"] = p.translation;
  j["noise_seed"] = p.noise_seed;
  return j;
}

std::string case_dir_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%03zu", i);
  return buf;
}

/// Cases from --manifest, or a single case from --image/--label.
std::vector<ManifestCase> input_cases(const Options &o, bool need_labels) {
  std::vector<ManifestCase> cases;
  if (!o.manifest.empty()) {
    try {
      cases = DatasetManifest::load(o.manifest).cases;
    } catch (...) {
      rethrow_with_context("--manifest " + in_quotes(o.manifest));
    }
  } else if (!o.image.empty()) {
    ManifestCase c;
    c.id = fs::path(o.image).stem().string();
    c.image_path = o.image;
    if (!o.label.empty())
      c.label_path = o.label;
    cases.push_back(std::move(c));
  } else {
    throw Error("one of --image or --manifest is required");
  }
  for (auto &c : cases) {
    if (!o.spacing.empty())
      c.spacing = o.spacing;
    if (need_labels && !c.label_path)
      throw Error("case '" + c.id + "' has no label (pass --label or a manifest with label_path)");
  }
  return cases;
}

FloatImage load_image(const ManifestCase &c, const Options &o) {
  const std::string flag = o.manifest.empty() ? "--image " : "case '" + c.id + "' image ";
  try {
    return load_case_image(c);
  } catch (...) {
    rethrow_with_context(flag + in_quotes(c.image_path));
  }
}

LabelMap load_labels(const ManifestCase &c, const Options &o) {
  const std::string flag = o.manifest.empty() ? "--label " : "case '" + c.id + "' label ";
  try {
    return load_case_labels(c);
  } catch (...) {
    rethrow_with_context(flag + in_quotes(*c.label_path));
  }
}

PredictorSpec predictor_from(const Options &o) {
  PredictorSpec spec;
  try {
    spec = PredictorSpec::parse(o.predictor);
    if (o.timeout_secs) {
      if (*o.timeout_secs <= 0)
        throw InvalidParameterError("must be positive");
      spec.timeout = std::chrono::seconds(*o.timeout_secs);
    }
    spec.validate();
  } catch (...) {
    rethrow_with_context(o.timeout_secs ? "--predictor/--timeout-secs" : "--predictor");
  }
  return spec;
}

AugmentationPrior prior_from(const Options &o, std::size_t dim) {
  if (o.prior.empty())
    return AugmentationPrior::standard(dim);
  AugmentationPrior prior;
  try {
    prior = AugmentationPrior::load(o.prior);
  } catch (...) {
    rethrow_with_context("--prior " + in_quotes(o.prior));
  }
  if (prior.dim() != dim)
    throw Error("--prior " + in_quotes(o.prior) + ": prior is " + std::to_string(prior.dim()) +
                "D but the image is " + std::to_string(dim) + "D");
  return prior;
}

std::vector<Method> methods_from(const Options &o, bool allow_list) {
  std::vector<Method> out;
  std::stringstream ss(o.method);
  std::string item;
  try {
    while (std::getline(ss, item, ','))
      out.push_back(parse_method(item));
  } catch (...) {
    rethrow_with_context("--method");
  }
  if (out.empty() || (!allow_list && out.size() != 1))
    throw Error("--method: expected " + std::string(allow_list ? "a comma list of" : "one of") +
                " baseline, tta, ttd, ttad");
  return out;
}

std::size_t samples_for(const Options &o, Method m, std::size_t dim) {
  if (m == Method::baseline)
    return 1;
  if (o.n > 0)
    return o.n;
  return dim == 3 ? 40 : 20;
}

std::uint8_t target_label(const Options &o) {
  if (o.target_label < 1 || o.target_label > 255)
    throw Error("--target-label must lie in [1, 255]");
  return static_cast<std::uint8_t>(o.target_label);
}

bool uses_prior(Method m) { return m == Method::tta || m == Method::ttad; }

/// Runs `body(i)` for every case with at most max_parallel in flight and
/// rethrows the first failure in case order.
template <typename F> void for_each_case(std::size_t count, std::size_t max_parallel, F body) {
  std::vector<std::exception_ptr> failures(count);
  const auto n = static_cast<std::ptrdiff_t>(count);
  const int threads = static_cast<int>(std::max<std::size_t>(1, max_parallel));
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads) if (threads > 1 && count > 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      failures[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto &f : failures)
    if (f)
      std::rethrow_exception(f);
}

struct Inference {
  SampleSet samples;
  LabelMap pred;
};

Inference infer(const Options &o, const PredictorSpec &spec, Method m, const FloatImage &image) {
  const std::size_t dim = image.dim();
  const AugmentationPrior prior =
      uses_prior(m) ? prior_from(o, dim) : AugmentationPrior::degenerate(dim);
  const std::size_t n = samples_for(o, m, dim);
  check_method(m, spec, n);
  EngineOptions eng;
  eng.max_parallel = o.max_parallel;
  Inference out{run_method(m, spec, image, prior, n, o.seed, eng), {}};
  out.pred = aggregate_mode(out.samples);
  out.pred.set_spacing(image.spacing());
  return out;
}

// ---------------------------------------------------------------- synth

void cmd_synth(const Options &o, const CLI::App &sub, std::ostream &out) {
  const fs::path dir = make_out_dir(o);
  PhantomSpec spec;
  try {
    spec = PhantomSpec::standard(o.dim);
    if (o.size)
      spec.size = *o.size;
    spec.noise_std = o.noise_std;
    spec.validate();
  } catch (...) {
    rethrow_with_context("--dim/--size/--noise-std");
  }
  const std::size_t n = o.n > 0 ? o.n : 20;
  const auto manifest = make_dataset(spec, n, dir, o.seed);

  ordered_json doc;
  doc["command"] = "synth";
  doc["n_cases"] = n;
  doc["seed"] = o.seed;
  doc["flags"] = echo_flags(sub);
  write_text_atomic(dir / "synth.json", doc.dump(2) + "\n");
  out << "wrote " << manifest.cases.size() << " cases to " << (dir / "manifest.json").string()
      << "\n";
}

// ------------------------------------------------------------- augment

void cmd_augment(const Options &o, const CLI::App &sub, std::ostream &out) {
  const auto cases = input_cases(o, false);
  if (cases.size() != 1)
    throw Error("augment takes a single --image");
  const fs::path dir = make_out_dir(o);
  const FloatImage image = load_image(cases.front(), o);
  std::optional<LabelMap> labels;
  if (cases.front().label_path) {
    labels = load_labels(cases.front(), o);
    if (labels->shape() != image.shape())
      throw ShapeError("--label shape " + shape_string(labels->shape()) +
                       " differs from --image shape " + shape_string(image.shape()));
  }
  const AugmentationPrior prior = prior_from(o, image.dim());
  const std::size_t k = o.n > 0 ? o.n : 10;

  ordered_json records = ordered_json::array();
  for (std::size_t i = 0; i < k; ++i) {
    Rng rng(transform_seed(o.seed, i));
    const TransformParams p = sample_params(prior, rng);
    const std::string stem = "aug_" + case_dir_name(i);
    npy::write_atomic(acquire(image, p, prior), dir / (stem + "_image.npy"));
    if (labels)
      npy::write_atomic(warp_labels(*labels, affine_from_params(p, image.shape())),
                        dir / (stem + "_label.npy"));
    records.push_back(params_json(p));
  }
  ordered_json doc;
  doc["command"] = "augment";
  doc["n"] = k;
  doc["seed"] = o.seed;
  doc["prior"] = ordered_json::parse(prior.to_json());
  doc["params"] = std::move(records);
  doc["flags"] = echo_flags(sub);
  write_text_atomic(dir / "augment.json", doc.dump(2) + "\n");
  out << "wrote " << k << " augmented samples to " << dir.string() << "\n";
}

// ------------------------------------------------------------- predict

void write_prediction(const Options &o, const ordered_json &flags, const PredictorSpec &spec,
                      Method m, const FloatImage &image, const fs::path &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create " + in_quotes(dir) + ": " + ec.message());

  const Inference inf = infer(o, spec, m, image);
  const UncertaintyReport report = make_report(inf.samples, image.spacing(), target_label(o));
  npy::write_atomic(inf.pred, dir / "pred.npy");
  npy::write_atomic(report.entropy_map, dir / "entropy.npy");

  if (o.keep_samples) {
    const fs::path sdir = dir / "samples";
    fs::create_directories(sdir, ec);
    if (ec)
      throw IoError("cannot create " + in_quotes(sdir) + ": " + ec.message());
    ordered_json recs = ordered_json::array();
    for (std::size_t i = 0; i < inf.samples.size(); ++i) {
      npy::write_atomic(inf.samples.samples[i], sdir / ("sample_" + case_dir_name(i) + ".npy"));
      ordered_json r;
      const auto &rec = inf.samples.records[i];
      r["predictor_seed"] = rec.predictor_seed;
      r["params"] = rec.params ? params_json(*rec.params) : ordered_json(nullptr);
      recs.push_back(std::move(r));
    }
    write_text_atomic(sdir / "records.json", recs.dump(2) + "\n");
  }

  ordered_json stats;
  stats["method"] = std::string(method_name(m));
  stats["n_samples"] = inf.samples.size();
  stats["seed"] = o.seed;
  stats["target_label"] = o.target_label;
  stats["volumes"] = report.volumes;
  stats["volume_mean"] = report.volume_mean;
  stats["volume_std"] = report.volume_std;
  if (m != Method::baseline)
    stats["vvc"] = report.vvc ? ordered_json(*report.vvc) : ordered_json(nullptr);
  stats["predictor"] = spec.to_string();
  if (uses_prior(m))
    stats["prior"] = ordered_json::parse(prior_from(o, image.dim()).to_json());
  stats["flags"] = flags;
  write_text_atomic(dir / "stats.json", stats.dump(2) + "\n");
}

void cmd_predict(const Options &o, const CLI::App &sub, std::ostream &out) {
  const auto cases = input_cases(o, false);
  const Method m = methods_from(o, false).front();
  const PredictorSpec spec = predictor_from(o);
  const fs::path dir = make_out_dir(o);
  const ordered_json flags = echo_flags(sub);
  const bool per_case_dirs = !o.manifest.empty();

  for_each_case(cases.size(), o.max_parallel, [&](std::size_t i) {
    const auto &c = cases[i];
    try {
      write_prediction(o, flags, spec, m, load_image(c, o), per_case_dirs ? dir / c.id : dir);
    } catch (...) {
      if (!per_case_dirs)
        throw;
      rethrow_with_context("case '" + c.id + "'");
    }
  });
  out << "predicted " << cases.size() << " case(s) with " << method_name(m) << " into "
      << dir.string() << "\n";
}

// ------------------------------------------------------------ evaluate

/// A stored prediction from a previous `predict` run.
struct StoredPrediction {
  LabelMap pred;
  FloatImage entropy;
  std::string method;
  std::size_t n_samples = 1;
  std::optional<double> vvc;
};

StoredPrediction load_stored(const Options &o, const ManifestCase &c, bool need_entropy) {
  const fs::path dir = o.manifest.empty() ? fs::path(o.pred_dir) : fs::path(o.pred_dir) / c.id;
  StoredPrediction sp;
  try {
    sp.pred = npy::read_labels(dir / "pred.npy");
    if (need_entropy)
      sp.entropy = npy::read_float(dir / "entropy.npy");
    std::ifstream in(dir / "stats.json");
    if (!in)
      throw IoError("cannot open " + in_quotes(dir / "stats.json"));
    const auto stats = nlohmann::json::parse(in);
    sp.method = stats.at("method").get<std::string>();
    sp.n_samples = stats.at("n_samples").get<std::size_t>();
    if (stats.contains("vvc") && !stats["vvc"].is_null())
      sp.vvc = stats["vvc"].get<double>();
  } catch (...) {
    rethrow_with_context("--pred-dir " + in_quotes(dir));
  }
  return sp;
}

CaseResult score(const std::string &id, const std::string &method, std::size_t n,
                 const LabelMap &pred, const LabelMap &gt, std::optional<double> vvc,
                 std::uint8_t label) {
  if (pred.shape() != gt.shape())
    throw ShapeError("case '" + id + "': prediction shape " + shape_string(pred.shape()) +
                     " differs from label shape " + shape_string(gt.shape()));
  CaseResult r;
  r.case_id = id;
  r.method = method;
  r.n_samples = n;
  r.dice = dice(pred, gt, label);
  try {
    r.assd = assd(pred, gt, gt.spacing(), label);
  } catch (const UndefinedAssdError &) {
  }
  r.vvc = vvc;
  return r;
}

void cmd_evaluate(const Options &o, const CLI::App &sub, std::ostream &out) {
  const auto cases = input_cases(o, true);
  const bool stored = !o.pred_dir.empty();
  const std::vector<Method> methods = stored ? std::vector<Method>{} : methods_from(o, true);
  const PredictorSpec spec = stored ? PredictorSpec{} : predictor_from(o);
  const std::uint8_t label = target_label(o);
  const fs::path dir = make_out_dir(o);

  std::vector<std::vector<CaseResult>> per_case(cases.size());
  for_each_case(cases.size(), o.max_parallel, [&](std::size_t i) {
    const auto &c = cases[i];
    LabelMap gt = load_labels(c, o);
    if (!c.spacing.empty())
      gt.set_spacing(c.spacing);
    if (stored) {
      const auto sp = load_stored(o, c, false);
      per_case[i].push_back(score(c.id, sp.method, sp.n_samples, sp.pred, gt, sp.vvc, label));
      return;
    }
    const FloatImage image = load_image(c, o);
    gt.set_spacing(image.spacing());
    for (Method m : methods) {
      const Inference inf = infer(o, spec, m, image);
      std::optional<double> vvc;
      if (m != Method::baseline)
        vvc = make_report(inf.samples, image.spacing(), label).vvc;
      per_case[i].push_back(score(c.id, std::string(method_name(m)), inf.samples.size(),
                                  inf.pred, gt, vvc, label));
    }
  });

  std::vector<CaseResult> results;
  for (auto &v : per_case)
    results.insert(results.end(), v.begin(), v.end());
  const auto summary = aggregate_cases(results);

  std::ostringstream cases_csv, summary_csv;
  write_cases_csv(results, cases_csv);
  write_summary_csv(summary, summary_csv);
  write_text_atomic(dir / "cases.csv", cases_csv.str());
  write_text_atomic(dir / "summary.csv", summary_csv.str());

  ordered_json doc;
  doc["command"] = "evaluate";
  doc["seed"] = o.seed;
  doc["flags"] = echo_flags(sub);
  write_text_atomic(dir / "evaluate.json", doc.dump(2) + "\n");
  out << summary_csv.str();
}

// ----------------------------------------------------------- histogram

void cmd_histogram(const Options &o, const CLI::App &sub, std::ostream &out) {
  const auto cases = input_cases(o, true);
  const bool stored = !o.pred_dir.empty();
  const Method m = stored ? Method::baseline : methods_from(o, false).front();
  const PredictorSpec spec = stored ? PredictorSpec{} : predictor_from(o);
  if (o.bins == 0)
    throw Error("--bins must be >= 1");
  const fs::path dir = make_out_dir(o);

  struct CaseMaps {
    FloatImage entropy;
    LabelMap pred, gt;
  };
  std::vector<CaseMaps> maps(cases.size());
  for_each_case(cases.size(), o.max_parallel, [&](std::size_t i) {
    const auto &c = cases[i];
    maps[i].gt = load_labels(c, o);
    if (stored) {
      auto sp = load_stored(o, c, true);
      maps[i].entropy = std::move(sp.entropy);
      maps[i].pred = std::move(sp.pred);
    } else {
      const FloatImage image = load_image(c, o);
      const Inference inf = infer(o, spec, m, image);
      maps[i].entropy = pixel_entropy(inf.samples);
      maps[i].pred = inf.pred;
    }
  });

  const double max_entropy = std::log(static_cast<double>(std::max<std::size_t>(2, spec.num_classes)));
  const double confident_below = 0.1 * max_entropy;
  JointHistogram hist(o.bins, max_entropy);
  OverconfidenceCounts over;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    try {
      hist.add(maps[i].entropy, maps[i].pred, maps[i].gt);
      over.add(maps[i].entropy, maps[i].pred, maps[i].gt, confident_below);
    } catch (...) {
      rethrow_with_context("case '" + cases[i].id + "'");
    }
  }

  std::vector<double> centers, errors;
  for (std::size_t b = 0; b < hist.bins(); ++b)
    if (auto e = hist.mean_error(b)) {
      centers.push_back(hist.bin_center(b));
      errors.push_back(*e);
    }

  std::ostringstream csv;
  hist.write_csv(csv);
  write_text_atomic(dir / "histogram.csv", csv.str());

  ordered_json doc;
  doc["command"] = "histogram";
  doc["method"] = stored ? ordered_json("stored") : ordered_json(std::string(method_name(m)));
  doc["bins"] = o.bins;
  doc["max_entropy"] = max_entropy;
  doc["pixels"] = hist.total();
  doc["confident_below"] = confident_below;
  doc["wrong_pixels"] = over.wrong;
  doc["wrong_confident"] = over.wrong_confident;
  doc["overconfident_fraction"] = over.fraction();
  doc["spearman_mean_error"] =
      centers.size() >= 2 ? ordered_json(spearman(centers, errors)) : ordered_json(nullptr);
  doc["seed"] = o.seed;
  doc["flags"] = echo_flags(sub);
  write_text_atomic(dir / "histogram.json", doc.dump(2) + "\n");
  out << csv.str();
}

// --------------------------------------------------------------- setup

void add_io(CLI::App &sub, Options &o, bool labels) {
  auto *image = sub.add_option("--image", o.image, "Input image (.npy, float32)");
  auto *manifest = sub.add_option("--manifest", o.manifest, "Dataset manifest (JSON)");
  image->excludes(manifest);
  if (labels)
    sub.add_option("--label", o.label, "Ground-truth labels (.npy, uint8)")->needs(image);
  sub.add_option("--out-dir", o.out_dir, "Output directory")->required();
  sub.add_option("--spacing", o.spacing, "Voxel spacing, comma list (mm)")->delimiter(',');
}

void add_inference(CLI::App &sub, Options &o, bool method_list) {
  sub.add_option("--method", o.method,
                 method_list ? "baseline|tta|ttd|ttad, comma list allowed" : "baseline|tta|ttd|ttad")
      ->capture_default_str();
  sub.add_option("--n", o.n, "Monte Carlo samples (default 20 in 2D, 40 in 3D)");
  sub.add_option("--seed", o.seed, "Master seed")->capture_default_str();
  sub.add_option("--prior", o.prior, "Augmentation prior (JSON path)");
  sub.add_option("--predictor", o.predictor, "Predictor spec string")->capture_default_str();
  sub.add_option("--max-parallel", o.max_parallel, "Concurrent cases/samples")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub.add_option("--timeout-secs", o.timeout_secs, "External predictor timeout");
  sub.add_option("--target-label", o.target_label, "Structure label for volumes/metrics")
      ->capture_default_str();
}

std::string one_line(std::string s) {
  for (auto &ch : s)
    if (ch == '\n' || ch == '\r')
      ch = ' ';
  while (!s.empty() && s.back() == ' ')
    s.pop_back();
  return s;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Test-time augmentation / dropout uncertainty for segmentation", "uqseg"};
  app.require_subcommand(1);
  Options o;

  auto *synth = app.add_subcommand("synth", "Write a phantom dataset and manifest");
  synth->add_option("--out-dir", o.out_dir, "Output directory")->required();
  synth->add_option("--n", o.n, "Number of cases (default 20)");
  synth->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  synth->add_option("--dim", o.dim, "2 or 3")->capture_default_str();
  synth->add_option("--size", o.size, "Side length (default 64 in 2D, 32 in 3D)");
  synth->add_option("--noise-std", o.noise_std, "Additive noise std before normalization")
      ->capture_default_str();

  auto *augment = app.add_subcommand("augment", "Export augmented training pairs");
  add_io(*augment, o, true);
  augment->add_option("--n", o.n, "Number of augmented pairs (default 10)");
  augment->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  augment->add_option("--prior", o.prior, "Augmentation prior (JSON path)");

  auto *predict = app.add_subcommand("predict", "Monte Carlo prediction with uncertainty maps");
  add_io(*predict, o, false);
  add_inference(*predict, o, false);
  predict->add_flag("--keep-samples", o.keep_samples, "Also write every sample prediction");

  auto *evaluate = app.add_subcommand("evaluate", "Per-case Dice/ASSD/VVC against ground truth");
  add_io(*evaluate, o, true);
  add_inference(*evaluate, o, true);
  evaluate->add_option("--pred-dir", o.pred_dir, "Score stored predict outputs instead");

  auto *histogram = app.add_subcommand("histogram", "Joint entropy/error histogram");
  add_io(*histogram, o, true);
  add_inference(*histogram, o, false);
  histogram->add_option("--bins", o.bins, "Entropy bins")->capture_default_str();
  histogram->add_option("--pred-dir", o.pred_dir, "Use stored predict outputs instead");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError &e) {
    err << "uqseg: error: " << one_line(e.what()) << "\n";
    return 2;
  }

  try {
    if (synth->parsed())
      cmd_synth(o, *synth, out);
    else if (augment->parsed())
      cmd_augment(o, *augment, out);
    else if (predict->parsed())
      cmd_predict(o, *predict, out);
    else if (evaluate->parsed())
      cmd_evaluate(o, *evaluate, out);
    else if (histogram->parsed())
      cmd_histogram(o, *histogram, out);
  } catch (const std::exception &e) {
    err << "uqseg: error: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}

} // namespace uqseg::cli
