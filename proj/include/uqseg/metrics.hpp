#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uqseg/ndimage.hpp"

namespace uqseg {

/// 2TP / (2TP + FP + FN) for `label`; 1.0 when neither mask contains it.
double dice(const LabelMap &pred, const LabelMap &gt, std::uint8_t label = 1);

/// Average symmetric surface distance (mm) between the `label` regions.
/// Surfaces use face adjacency with the outside counted as background.
/// Throws UndefinedAssdError when either region is empty.
double assd(const LabelMap &pred, const LabelMap &gt, const Spacing &spacing,
            std::uint8_t label = 1);

/// Pixel counts by (entropy bin, correctness), equal-width bins over
/// [0, max_entropy], last bin right-closed. Accumulates across cases.
class JointHistogram {
public:
  JointHistogram(std::size_t bins, double max_entropy);

  void add(const FloatImage &entropy, const LabelMap &pred, const LabelMap &gt);

  std::size_t bins() const noexcept { return counts_.size(); }
  double bin_lo(std::size_t b) const;
  double bin_hi(std::size_t b) const;
  double bin_center(std::size_t b) const { return 0.5 * (bin_lo(b) + bin_hi(b)); }
  std::size_t bin_of(double entropy) const;

  std::uint64_t total() const noexcept { return total_; }
  std::uint64_t correct(std::size_t b) const { return counts_[b][0]; }
  std::uint64_t incorrect(std::size_t b) const { return counts_[b][1]; }
  /// Fraction of all pixels in (bin, correct) / (bin, incorrect).
  double frac_correct(std::size_t b) const;
  double frac_incorrect(std::size_t b) const;
  /// Error rate within the bin; empty bins are undefined.
  std::optional<double> mean_error(std::size_t b) const;

  /// Columns bin_lo,bin_hi,frac_correct,frac_incorrect,mean_error.
  void write_csv(std::ostream &out) const;

private:
  double max_entropy_;
  std::vector<std::array<std::uint64_t, 2>> counts_;
  std::uint64_t total_ = 0;
};

JointHistogram joint_histogram(const FloatImage &entropy, const LabelMap &pred,
                               const LabelMap &gt, std::size_t bins, double max_entropy);

/// Wrong pixels split by whether their entropy is below `threshold`.
struct OverconfidenceCounts {
  std::uint64_t wrong = 0;
  std::uint64_t wrong_confident = 0;
  void add(const FloatImage &entropy, const LabelMap &pred, const LabelMap &gt,
           double threshold);
  double fraction() const {
    return wrong ? static_cast<double>(wrong_confident) / static_cast<double>(wrong) : 0.0;
  }
};

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

struct CaseResult {
  std::string case_id;
  std::string method;
  std::size_t n_samples = 1;
  double dice = 0.0;
  std::optional<double> assd;
  std::optional<double> vvc;
};

struct SummaryRow {
  std::string method;
  std::size_t n = 0;
  double dice_mean = 0.0, dice_std = 0.0;
  double assd_mean = 0.0, assd_std = 0.0;
};

/// Per method, in order of first appearance: mean and population std.
std::vector<SummaryRow> aggregate_cases(std::span<const CaseResult> results);

void write_cases_csv(std::span<const CaseResult> results, std::ostream &out);
void write_summary_csv(std::span<const SummaryRow> rows, std::ostream &out);

} // namespace uqseg
