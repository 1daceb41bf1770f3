#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "uqseg/ndimage.hpp"

namespace uqseg {

enum class PredictorKind { builtin_threshold, builtin_biased, builtin_stochastic, external };
enum class OutputKind { labels, probabilities };

/// A segmentation function f(theta, X), optionally seed-dependent.
///
/// Spec strings:
///   builtin:threshold:TAU
///   builtin:biased:TAU:HW0,HW1[,HW2]
///   builtin:stochastic:TAU:SIGMA[:HW0,HW1[,HW2]]
///   extern[,OPTION...]:COMMAND
/// External options: stochastic, stateless, probabilities, classes=M,
/// timeout=SECONDS. COMMAND must contain {input}, {output} and {seed}.
///
/// builtin:stochastic with half-widths is the box-clipped (biased) model
/// with a seed-dependent threshold, i.e. the same model under dropout.
struct PredictorSpec {
  PredictorKind kind = PredictorKind::builtin_threshold;
  double threshold = 0.5;
  std::vector<double> half_widths;  // empty: no box
  double threshold_std = 0.0;       // builtin_stochastic only
  std::string command;              // external only
  bool stochastic = false;
  bool stateless = false;           // externals may run concurrently only if set
  OutputKind output_kind = OutputKind::labels;
  std::size_t num_classes = 2;
  std::chrono::seconds timeout{300};

  static PredictorSpec parse(std::string_view text);
  static PredictorSpec threshold_model(double tau);
  static PredictorSpec biased_model(double tau, std::vector<double> half_widths);
  static PredictorSpec stochastic_model(double tau, double sigma,
                                        std::vector<double> half_widths = {});
  static PredictorSpec external_model(std::string command);

  void validate() const;
  std::string to_string() const;
  bool is_builtin() const noexcept { return kind != PredictorKind::external; }
  /// Whether several calls may be in flight at once.
  bool concurrent_safe() const noexcept { return is_builtin() || stateless; }
};

using Prediction = std::variant<LabelMap, FloatImage>;

/// One forward pass. Deterministic predictors ignore `seed`. Labels have
/// the spatial shape of X; probabilities carry a leading class axis.
Prediction predict(const PredictorSpec &spec, const FloatImage &image, std::uint64_t seed);

/// predict() reduced to hard labels (argmax over the class axis).
LabelMap predict_labels(const PredictorSpec &spec, const FloatImage &image, std::uint64_t seed);

/// Argmax over the leading class axis; ties go to the smaller class.
LabelMap argmax_labels(const FloatImage &probabilities);

/// Runs the external command protocol once. Exposed for tests.
Prediction run_external(const PredictorSpec &spec, const FloatImage &image, std::uint64_t seed);

/// Instantiates the command template with shell-quoted arguments.
std::string instantiate_command(std::string_view tmpl, const std::string &input,
                                const std::string &output, std::uint64_t seed);

} // namespace uqseg
