#include "spx/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "spx/error.hpp"
#include "spx/tensor.hpp"

namespace spx::metrics {

SampleMetrics evaluate(const Image& pred, const Image& truth) {
  if (!pred.same_dims(truth) || pred.size() == 0)
    throw Error(ErrorKind::Shape, "evaluate: prediction " + std::to_string(pred.height()) + "x" +
                                      std::to_string(pred.width()) + " vs truth " + std::to_string(truth.height()) +
                                      "x" + std::to_string(truth.width()));
  const auto p = pred.values();
  const auto t = truth.values();
  double sum = 0.0, sq = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double e = p[i] - t[i];
    sum += e;
    sq += e * e;
    worst = std::max(worst, std::abs(e));
  }
  const auto n = static_cast<double>(p.size());
  SampleMetrics m;
  m.alpha = sum / n;
  m.delta = sq / n;
  m.gamma = worst;
  m.ssim = nn::ssim_value(p, t);
  return m;
}

SampleMetrics evaluate(const scene::DepthMap& pred, const scene::DepthMap& truth) {
  return evaluate(pred.grid(), truth.grid());
}

EvalReport aggregate(std::vector<SampleMetrics> samples) {
  EvalReport r;
  r.count = samples.size();
  if (!samples.empty()) {
    double a = 0.0, d = 0.0, s = 0.0;
    for (const auto& m : samples) {
      a += m.alpha;
      d += m.delta;
      s += m.ssim;
      r.gamma = std::max(r.gamma, m.gamma);
    }
    const auto n = static_cast<double>(samples.size());
    r.alpha = a / n;
    r.delta = d / n;
    r.ssim = s / n;
  }
  r.samples = std::move(samples);
  return r;
}

EvalReport subset(const EvalReport& report, double rate) {
  std::vector<SampleMetrics> picked;
  for (const auto& m : report.samples)
    if (m.rate == rate) picked.push_back(m);
  return aggregate(std::move(picked));
}

Comparison compare_reports(const EvalReport& a, const EvalReport& b) {
  if (a.count != b.count || a.samples.size() != b.samples.size())
    throw Error(ErrorKind::Consistency, "reports cover different sample counts (" + std::to_string(a.count) + " vs " +
                                            std::to_string(b.count) + ")");
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    if (a.samples[i].id != b.samples[i].id || a.samples[i].rate != b.samples[i].rate)
      throw Error(ErrorKind::Consistency, "reports cover different samples ('" + a.samples[i].id + "' vs '" +
                                              b.samples[i].id + "')");

  auto column = [](double rate, const EvalReport& ra, const EvalReport& rb) {
    ComparisonColumn c;
    c.rate = rate;
    c.count = ra.count;
    c.alpha = {ra.alpha, rb.alpha, rb.alpha - ra.alpha};
    c.delta = {ra.delta, rb.delta, rb.delta - ra.delta};
    c.gamma = {ra.gamma, rb.gamma, rb.gamma - ra.gamma};
    c.ssim = {ra.ssim, rb.ssim, rb.ssim - ra.ssim};
    return c;
  };
  Comparison cmp;
  for (double rate : kTableRates) cmp.columns.push_back(column(rate, subset(a, rate), subset(b, rate)));
  cmp.columns.push_back(column(0.0, a, b));
  return cmp;
}

std::string rate_label(double rate) {
  if (rate == 0.0) return "all";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g%%", rate * 100.0);
  return buf;
}

namespace {

std::string cell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%12.6f", v);
  return buf;
}

std::string head(const std::string& s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%12s", s.c_str());
  return buf;
}

}  // namespace

std::string format_table(const EvalReport& report) {
  std::vector<EvalReport> cols;
  for (double rate : kTableRates) cols.push_back(subset(report, rate));
  cols.push_back(report);

  std::ostringstream os;
  os << "metric  ";
  for (double rate : kTableRates) os << head(rate_label(rate));
  os << head("all") << "\n";
  os << "n       ";
  for (const auto& c : cols) os << head(std::to_string(c.count));
  os << "\n";
  const std::pair<const char*, double EvalReport::*> rows[] = {
      {"alpha   ", &EvalReport::alpha}, {"delta   ", &EvalReport::delta},
      {"gamma   ", &EvalReport::gamma}, {"ssim    ", &EvalReport::ssim}};
  for (const auto& [name, field] : rows) {
    os << name;
    for (const auto& c : cols) os << (c.count ? cell(c.*field) : head("-"));
    os << "\n";
  }
  return os.str();
}

std::string format_comparison(const Comparison& cmp, const std::string& label_a, const std::string& label_b) {
  std::ostringstream os;
  os << "metric  rate        " << head(label_a) << head(label_b) << head("delta") << "\n";
  const std::pair<const char*, MetricDelta ComparisonColumn::*> rows[] = {
      {"alpha   ", &ComparisonColumn::alpha}, {"delta   ", &ComparisonColumn::delta},
      {"gamma   ", &ComparisonColumn::gamma}, {"ssim    ", &ComparisonColumn::ssim}};
  for (const auto& [name, field] : rows) {
    for (const auto& c : cmp.columns) {
      char rate[16];
      std::snprintf(rate, sizeof rate, "%-12s", rate_label(c.rate).c_str());
      const auto& d = c.*field;
      os << name << rate << (c.count ? cell(d.a) + cell(d.b) + cell(d.delta) : head("-") + head("-") + head("-"))
         << "\n";
    }
  }
  return os.str();
}

}  // namespace spx::metrics
