#include "uqseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>

#include "uqseg/kernels.hpp"

namespace uqseg {

namespace {

void require_same_shape(const LabelMap &a, const LabelMap &b, const char *what) {
  if (a.shape() != b.shape())
    throw ShapeError(std::string(what) + ": shape mismatch " + shape_string(a.shape()) +
                     " vs " + shape_string(b.shape()));
}

LabelMap binary(const LabelMap &labels, std::uint8_t label) {
  LabelMap out = labels.like<std::uint8_t>();
  for (std::size_t i = 0; i < labels.size(); ++i)
    out[i] = labels[i] == label;
  return out;
}

std::ostream &csv_number(std::ostream &out, double v) {
  return out << std::setprecision(10) << v;
}

} // namespace

double dice(const LabelMap &pred, const LabelMap &gt, std::uint8_t label) {
  require_same_shape(pred, gt, "dice");
  const auto c = parallel::overlap(pred, gt, label);
  const std::uint64_t denom = 2 * c.tp + c.fp + c.fn;
  if (denom == 0)
    return 1.0;
  return static_cast<double>(2 * c.tp) / static_cast<double>(denom);
}

double assd(const LabelMap &pred, const LabelMap &gt, const Spacing &spacing,
            std::uint8_t label) {
  require_same_shape(pred, gt, "assd");
  require_spatial(pred.shape(), "assd");
  if (spacing.size() != pred.dim())
    throw ShapeError("assd: spacing length does not match image rank");

  const auto s_surface = parallel::surface(binary(pred, label));
  const auto g_surface = parallel::surface(binary(gt, label));
  const auto s_count = std::count(s_surface.begin(), s_surface.end(), 1);
  const auto g_count = std::count(g_surface.begin(), g_surface.end(), 1);
  if (s_count == 0)
    throw UndefinedAssdError("prediction");
  if (g_count == 0)
    throw UndefinedAssdError("ground-truth");

  const auto to_g = parallel::squared_distance(g_surface, pred.shape(), spacing);
  const auto to_s = parallel::squared_distance(s_surface, pred.shape(), spacing);
  double sum_s = 0.0;
  for (std::size_t i = 0; i < s_surface.size(); ++i)
    if (s_surface[i])
      sum_s += std::sqrt(to_g[i]);
  double sum_g = 0.0;
  for (std::size_t i = 0; i < g_surface.size(); ++i)
    if (g_surface[i])
      sum_g += std::sqrt(to_s[i]);
  return (sum_s + sum_g) / static_cast<double>(s_count + g_count);
}

JointHistogram::JointHistogram(std::size_t bins, double max_entropy)
    : max_entropy_(max_entropy), counts_(bins, {0, 0}) {
  if (bins < 2)
    throw ConfigurationError("histogram needs at least 2 bins");
  if (!(max_entropy > 0.0))
    throw ConfigurationError("histogram entropy range must be positive");
}

double JointHistogram::bin_lo(std::size_t b) const {
  return max_entropy_ * static_cast<double>(b) / static_cast<double>(bins());
}

double JointHistogram::bin_hi(std::size_t b) const {
  return max_entropy_ * static_cast<double>(b + 1) / static_cast<double>(bins());
}

std::size_t JointHistogram::bin_of(double entropy) const {
  if (!(entropy > 0.0))
    return 0;
  const auto b = static_cast<std::size_t>(entropy / max_entropy_ * static_cast<double>(bins()));
  return std::min(b, bins() - 1);
}

void JointHistogram::add(const FloatImage &entropy, const LabelMap &pred, const LabelMap &gt) {
  require_same_shape(pred, gt, "joint_histogram");
  if (entropy.shape() != pred.shape())
    throw ShapeError("joint_histogram: entropy shape " + shape_string(entropy.shape()) +
                     " does not match labels " + shape_string(pred.shape()));
  for (std::size_t i = 0; i < pred.size(); ++i)
    ++counts_[bin_of(entropy[i])][pred[i] != gt[i] ? 1 : 0];
  total_ += pred.size();
}

double JointHistogram::frac_correct(std::size_t b) const {
  return total_ ? static_cast<double>(counts_[b][0]) / static_cast<double>(total_) : 0.0;
}

double JointHistogram::frac_incorrect(std::size_t b) const {
  return total_ ? static_cast<double>(counts_[b][1]) / static_cast<double>(total_) : 0.0;
}

std::optional<double> JointHistogram::mean_error(std::size_t b) const {
  const auto n = counts_[b][0] + counts_[b][1];
  if (n == 0)
    return std::nullopt;
  return static_cast<double>(counts_[b][1]) / static_cast<double>(n);
}

void JointHistogram::write_csv(std::ostream &out) const {
  out << "bin_lo,bin_hi,frac_correct,frac_incorrect,mean_error\n";
  for (std::size_t b = 0; b < bins(); ++b) {
    csv_number(out, bin_lo(b)) << ',';
    csv_number(out, bin_hi(b)) << ',';
    csv_number(out, frac_correct(b)) << ',';
    csv_number(out, frac_incorrect(b)) << ',';
    if (auto e = mean_error(b))
      csv_number(out, *e);
    else
      out << "nan";
    out << '\n';
  }
}

JointHistogram joint_histogram(const FloatImage &entropy, const LabelMap &pred,
                               const LabelMap &gt, std::size_t bins, double max_entropy) {
  JointHistogram h(bins, max_entropy);
  h.add(entropy, pred, gt);
  return h;
}

void OverconfidenceCounts::add(const FloatImage &entropy, const LabelMap &pred,
                               const LabelMap &gt, double threshold) {
  require_same_shape(pred, gt, "overconfidence");
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] == gt[i])
      continue;
    ++wrong;
    wrong_confident += entropy[i] < threshold;
  }
}

namespace {
std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]])
      ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k)
      ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}
} // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ConfigurationError("spearman: need two equally long series of length >= 2");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0)
    return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

std::vector<SummaryRow> aggregate_cases(std::span<const CaseResult> results) {
  std::vector<SummaryRow> rows;
  for (const auto &r : results) {
    if (std::none_of(rows.begin(), rows.end(), [&](const auto &row) { return row.method == r.method; }))
      rows.push_back({.method = r.method});
  }
  auto moments = [](const std::vector<double> &v, double &mean, double &sd) {
    if (v.empty()) {
      mean = sd = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    const double n = static_cast<double>(v.size());
    mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double sq = 0.0;
    for (double x : v)
      sq += (x - mean) * (x - mean);
    sd = std::sqrt(sq / n);
  };
  for (auto &row : rows) {
    std::vector<double> dices, assds;
    for (const auto &r : results) {
      if (r.method != row.method)
        continue;
      dices.push_back(r.dice);
      if (r.assd)
        assds.push_back(*r.assd);
    }
    row.n = dices.size();
    moments(dices, row.dice_mean, row.dice_std);
    moments(assds, row.assd_mean, row.assd_std);
  }
  return rows;
}

void write_cases_csv(std::span<const CaseResult> results, std::ostream &out) {
  out << "case_id,method,n_samples,dice,assd,vvc\n";
  for (const auto &r : results) {
    out << r.case_id << ',' << r.method << ',' << r.n_samples << ',';
    csv_number(out, r.dice) << ',';
    if (r.assd)
      csv_number(out, *r.assd);
    else
      out << "nan";
    out << ',';
    if (r.vvc)
      csv_number(out, *r.vvc);
    else
      out << "nan";
    out << '\n';
  }
}

void write_summary_csv(std::span<const SummaryRow> rows, std::ostream &out) {
  out << "method,n,dice_mean,dice_std,assd_mean,assd_std\n";
  for (const auto &row : rows) {
    out << row.method << ',' << row.n << ',';
    csv_number(out, row.dice_mean) << ',';
    csv_number(out, row.dice_std) << ',';
    csv_number(out, row.assd_mean) << ',';
    csv_number(out, row.assd_std) << '\n';
  }
}

} // namespace uqseg
