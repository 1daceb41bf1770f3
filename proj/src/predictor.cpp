#include "uqseg/predictor.hpp"

#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "uqseg/acquisition.hpp"
#include "uqseg/kernels.hpp"

namespace uqseg {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos)
      return parts;
    start = pos + 1;
  }
}

double parse_number(std::string_view token, std::string_view what) {
  double value = 0.0;
  const auto *end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value))
    throw ConfigurationError("predictor spec: invalid " + std::string(what) + " '" +
                             std::string(token) + "'");
  return value;
}

std::vector<double> parse_list(std::string_view token, std::string_view what) {
  std::vector<double> values;
  for (auto part : split(token, ','))
    values.push_back(parse_number(part, what));
  return values;
}

std::string join(const std::vector<double> &values) {
  std::ostringstream out;
  for (std::size_t i = 0; i < values.size(); ++i)
    out << (i ? "," : "") << values[i];
  return out.str();
}

std::vector<double> half_widths_for(const PredictorSpec &spec, std::size_t dim) {
  if (spec.half_widths.empty())
    return {};
  if (spec.half_widths.size() == 1)
    return std::vector<double>(dim, spec.half_widths.front());
  if (spec.half_widths.size() != dim)
    throw ConfigurationError("predictor: " + std::to_string(spec.half_widths.size()) +
                             " half-widths given for a " + std::to_string(dim) + "D image");
  return spec.half_widths;
}

} // namespace

PredictorSpec PredictorSpec::threshold_model(double tau) {
  PredictorSpec s;
  s.kind = PredictorKind::builtin_threshold;
  s.threshold = tau;
  return s;
}

PredictorSpec PredictorSpec::biased_model(double tau, std::vector<double> half_widths) {
  PredictorSpec s;
  s.kind = PredictorKind::builtin_biased;
  s.threshold = tau;
  s.half_widths = std::move(half_widths);
  s.validate();
  return s;
}

PredictorSpec PredictorSpec::stochastic_model(double tau, double sigma,
                                              std::vector<double> half_widths) {
  PredictorSpec s;
  s.kind = PredictorKind::builtin_stochastic;
  s.threshold = tau;
  s.threshold_std = sigma;
  s.half_widths = std::move(half_widths);
  s.stochastic = true;
  s.validate();
  return s;
}

PredictorSpec PredictorSpec::external_model(std::string command) {
  PredictorSpec s;
  s.kind = PredictorKind::external;
  s.command = std::move(command);
  s.validate();
  return s;
}

PredictorSpec PredictorSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw ConfigurationError("predictor spec '" + std::string(text) +
                             "': expected builtin:... or extern:...");
  const auto head = text.substr(0, colon);
  const auto rest = text.substr(colon + 1);

  if (head == "builtin") {
    const auto parts = split(rest, ':');
    const auto name = parts[0];
    auto need = [&](std::size_t lo, std::size_t hi) {
      if (parts.size() < lo || parts.size() > hi)
        throw ConfigurationError("predictor spec '" + std::string(text) +
                                 "': wrong number of fields");
    };
    if (name == "threshold") {
      need(2, 2);
      return threshold_model(parse_number(parts[1], "threshold"));
    }
    if (name == "biased") {
      need(3, 3);
      return biased_model(parse_number(parts[1], "threshold"),
                          parse_list(parts[2], "half-width"));
    }
    if (name == "stochastic") {
      need(3, 4);
      return stochastic_model(parse_number(parts[1], "threshold"),
                              parse_number(parts[2], "threshold std"),
                              parts.size() == 4 ? parse_list(parts[3], "half-width")
                                                : std::vector<double>{});
    }
    throw ConfigurationError("unknown builtin predictor '" + std::string(name) + "'");
  }

  const auto options = split(head, ',');
  if (options[0] != "extern")
    throw ConfigurationError("predictor spec '" + std::string(text) +
                             "': expected builtin:... or extern:...");
  PredictorSpec s;
  s.kind = PredictorKind::external;
  s.command = std::string(rest);
  for (std::size_t i = 1; i < options.size(); ++i) {
    const auto opt = options[i];
    if (opt == "stochastic")
      s.stochastic = true;
    else if (opt == "stateless")
      s.stateless = true;
    else if (opt == "probabilities")
      s.output_kind = OutputKind::probabilities;
    else if (opt.starts_with("classes="))
      s.num_classes = static_cast<std::size_t>(parse_number(opt.substr(8), "class count"));
    else if (opt.starts_with("timeout="))
      s.timeout = std::chrono::seconds(
          static_cast<long>(parse_number(opt.substr(8), "timeout")));
    else
      throw ConfigurationError("unknown extern option '" + std::string(opt) + "'");
  }
  s.validate();
  return s;
}

void PredictorSpec::validate() const {
  if (num_classes < 2 || num_classes > 255)
    throw ConfigurationError("predictor: class count must be in [2, 255]");
  switch (kind) {
  case PredictorKind::builtin_threshold:
    if (stochastic)
      throw ConfigurationError("builtin_threshold is deterministic");
    break;
  case PredictorKind::builtin_biased:
    if (stochastic)
      throw ConfigurationError("builtin_biased is deterministic");
    if (half_widths.empty())
      throw ConfigurationError("builtin_biased needs box half-widths");
    break;
  case PredictorKind::builtin_stochastic:
    if (!(threshold_std >= 0.0))
      throw ConfigurationError("builtin_stochastic: threshold std must be >= 0");
    break;
  case PredictorKind::external:
    for (const char *slot : {"{input}", "{output}", "{seed}"})
      if (command.find(slot) == std::string::npos)
        throw ConfigurationError("external predictor command must contain " +
                                 std::string(slot) + ": '" + command + "'");
    if (timeout.count() <= 0)
      throw ConfigurationError("external predictor timeout must be positive");
    break;
  }
  for (double hw : half_widths)
    if (!(hw >= 0.0))
      throw ConfigurationError("predictor: half-widths must be >= 0");
  if (kind != PredictorKind::external && output_kind != OutputKind::labels)
    throw ConfigurationError("builtin predictors produce labels");
}

std::string PredictorSpec::to_string() const {
  std::ostringstream out;
  switch (kind) {
  case PredictorKind::builtin_threshold:
    out << "builtin:threshold:" << threshold;
    break;
  case PredictorKind::builtin_biased:
    out << "builtin:biased:" << threshold << ':' << join(half_widths);
    break;
  case PredictorKind::builtin_stochastic:
    out << "builtin:stochastic:" << threshold << ':' << threshold_std;
    if (!half_widths.empty())
      out << ':' << join(half_widths);
    break;
  case PredictorKind::external:
    out << "extern";
    if (stochastic)
      out << ",stochastic";
    if (stateless)
      out << ",stateless";
    if (output_kind == OutputKind::probabilities)
      out << ",probabilities";
    if (num_classes != 2)
      out << ",classes=" << num_classes;
    out << ':' << command;
    break;
  }
  return out.str();
}

Prediction predict(const PredictorSpec &spec, const FloatImage &image, std::uint64_t seed) {
  require_spatial(image.shape(), "predict");
  for (float v : image.data())
    if (!std::isfinite(v))
      throw InvalidParameterError("predict: input image contains non-finite values");

  switch (spec.kind) {
  case PredictorKind::builtin_threshold:
    return parallel::threshold(image, spec.threshold, {});
  case PredictorKind::builtin_biased: {
    const auto hw = half_widths_for(spec, image.dim());
    return parallel::threshold(image, spec.threshold, hw);
  }
  case PredictorKind::builtin_stochastic: {
    double jitter = 0.0;
    if (spec.threshold_std > 0.0) {
      Rng rng(seed);
      std::normal_distribution<double> normal(0.0, spec.threshold_std);
      jitter = normal(rng);
    }
    const auto hw = half_widths_for(spec, image.dim());
    return parallel::threshold(image, spec.threshold + jitter, hw);
  }
  case PredictorKind::external:
    return run_external(spec, image, seed);
  }
  throw ConfigurationError("unknown predictor kind");
}

LabelMap argmax_labels(const FloatImage &probabilities) {
  const auto &shape = probabilities.shape();
  if (shape.size() < 3)
    throw ShapeError("argmax_labels: expected a leading class axis, got " + shape_string(shape));
  const std::size_t classes = shape[0];
  Shape spatial(shape.begin() + 1, shape.end());
  Spacing spacing(probabilities.spacing().begin() + 1, probabilities.spacing().end());
  LabelMap out(spatial, std::uint8_t{0}, spacing);
  const std::size_t pixels = out.size();
  const auto p = probabilities.data();
  for (std::size_t i = 0; i < pixels; ++i) {
    std::size_t best = 0;
    for (std::size_t m = 1; m < classes; ++m)
      if (p[m * pixels + i] > p[best * pixels + i])
        best = m;
    out[i] = static_cast<std::uint8_t>(best);
  }
  return out;
}

LabelMap predict_labels(const PredictorSpec &spec, const FloatImage &image, std::uint64_t seed) {
  auto result = predict(spec, image, seed);
  if (auto *labels = std::get_if<LabelMap>(&result)) {
    labels->set_spacing(image.spacing());
    return std::move(*labels);
  }
  auto labels = argmax_labels(std::get<FloatImage>(result));
  labels.set_spacing(image.spacing());
  return labels;
}

} // namespace uqseg
