#pragma once

#include <string>
#include <vector>

#include "spx/grid.hpp"
#include "spx/scene_gen.hpp"

namespace spx::metrics {

struct SampleMetrics {
  std::string id;
  double rate = 0.0;
  double alpha = 0.0;  // mean signed error
  double delta = 0.0;  // mean squared error
  double gamma = 0.0;  // largest absolute error
  double ssim = 1.0;

  friend bool operator==(const SampleMetrics&, const SampleMetrics&) = default;
};

// Dataset-level statistics: mean alpha, delta and ssim, max gamma.
struct EvalReport {
  double alpha = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  double ssim = 1.0;
  std::size_t count = 0;
  std::vector<SampleMetrics> samples;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Inputs are compared as given (no clamping).
SampleMetrics evaluate(const Image& pred, const Image& truth);
SampleMetrics evaluate(const scene::DepthMap& pred, const scene::DepthMap& truth);

EvalReport aggregate(std::vector<SampleMetrics> samples);

// Rate columns of the comparison tables.
inline const std::vector<double> kTableRates{0.5, 0.25, 0.0625};

// Samples whose rate equals `rate`; empty report if none.
EvalReport subset(const EvalReport& report, double rate);

struct MetricDelta {
  double a = 0.0;
  double b = 0.0;
  double delta = 0.0;  // b - a
};

struct ComparisonColumn {
  double rate = 0.0;  // 0 for the all-samples column
  std::size_t count = 0;
  MetricDelta alpha, delta, gamma, ssim;
};

struct Comparison {
  std::vector<ComparisonColumn> columns;  // kTableRates, then all samples
};

// Requires the same sample ids in the same order.
Comparison compare_reports(const EvalReport& a, const EvalReport& b);

// Aligned text: one row per metric, one column per rate plus "all".
std::string format_table(const EvalReport& report);
std::string format_comparison(const Comparison& cmp, const std::string& label_a, const std::string& label_b);

std::string rate_label(double rate);

}  // namespace spx::metrics
