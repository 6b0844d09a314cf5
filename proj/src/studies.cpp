#include "spx/studies.hpp"

#include <cmath>
#include <numeric>

#include "spx/dataset.hpp"
#include "spx/detector_sim.hpp"
#include "spx/error.hpp"
#include "spx/fringe_render.hpp"
#include "spx/models.hpp"
#include "spx/spectral.hpp"
#include "spx/tensor.hpp"

namespace spx::studies {

int nyquist_width(double period, const std::vector<int>& extents) {
  int base = 1;
  for (int m : extents) {
    if (m < 1) throw Error(ErrorKind::Parameter, "window extent must be positive");
    base = std::lcm(base, m);
  }
  if (period == std::floor(period) && period >= 1.0) base = std::lcm(base, static_cast<int>(period));
  int width = base;
  while (width < 64) width += base;
  return width;
}

NyquistReport nyquist_study(double period, const std::vector<int>& extents, int height, int width) {
  if (extents.empty()) throw Error(ErrorKind::Parameter, "no window extents given");
  if (height < 8) throw Error(ErrorKind::Parameter, "height must be at least 8");
  if (width == 0) width = nyquist_width(period, extents);

  NyquistReport rep;
  rep.period = period;
  rep.height = height;
  rep.width = width;
  const scene::DepthMap flat(Image(static_cast<std::size_t>(height), static_cast<std::size_t>(width), 0.0));
  const auto carrier = fringe::binarize(fringe::render_sinusoid(flat, {15.0, period, 1.0}));
  rep.carrier = carrier.values;
  const int carrier_bin = spectral::dominant_row_bin(carrier.values);

  for (int m : extents) {
    const auto seq = sampling::make_sequence(height, width, sampling::make_rect_window(1, m), sampling::ScanOrder::Raster);
    const auto low = detector::reorder(detector::acquire(carrier, seq), seq, detector::ReorderMode::Rounded);
    NyquistCase c;
    c.window_extent = m;
    c.regime = sampling::check_nyquist(m, period);
    c.carrier_bin = carrier_bin;
    c.sampled_bin = spectral::dominant_row_bin(low.values);
    c.lowres = low.values;
    rep.cases.push_back(std::move(c));
  }
  return rep;
}

PatternComparison compare_patterns(const std::vector<Image>& scenes, const std::vector<Image>& truths, double rate,
                                   std::uint64_t seed, sampling::ScanOrder order,
                                   const std::vector<baseline::Candidate>& candidates) {
  if (scenes.empty() || scenes.size() != truths.size())
    throw Error(ErrorKind::Parameter, "need matching, non-empty scene and truth lists");
  const auto h = static_cast<int>(scenes.front().height());
  const auto w = static_cast<int>(scenes.front().width());
  for (std::size_t i = 0; i < scenes.size(); ++i)
    if (!scenes[i].same_dims(scenes.front()) || !truths[i].same_dims(scenes.front()))
      throw Error(ErrorKind::Shape, "comparison scenes differ in size");
  if (h != w) throw Error(ErrorKind::Shape, "comparison scenes must be square");

  PatternComparison out;
  out.rate = rate;
  const auto seq = sampling::make_sequence(h, w, data::window_for_rate(rate), order);
  out.measurements = static_cast<int>(seq.placements().size());
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const fringe::FringeImage f{scenes[i], fringe::FringeKind::Binary};
    const auto low = detector::reorder(detector::acquire(f, seq), seq, detector::ReorderMode::Rounded);
    const auto up = models::prepare_image(low.values, h);
    out.active_per_scene.push_back(nn::ssim_value(up.values(), truths[i].values()));
  }
  out.active_ssim = std::accumulate(out.active_per_scene.begin(), out.active_per_scene.end(), 0.0) /
                    static_cast<double>(scenes.size());

  const int count = sampling::matched_pattern_count(h, w, rate);
  if (count != out.measurements)
    throw Error(ErrorKind::Consistency, "matched pattern count differs from the active budget");
  const auto patterns = sampling::make_random_patterns(h, w, count, 0.5, seed);
  std::vector<detector::SignalTrace> traces;
  for (const auto& s : scenes) traces.push_back(detector::acquire_random({s, fringe::FringeKind::Binary}, patterns));

  out.random_ssim = -std::numeric_limits<double>::infinity();
  for (const auto& cand : candidates.empty() ? baseline::default_candidates(rate) : candidates) {
    const baseline::LinearReconstructor rec(patterns, cand);
    std::vector<double> per_scene;
    for (std::size_t i = 0; i < scenes.size(); ++i)
      per_scene.push_back(nn::ssim_value(rec.reconstruct(traces[i]).values(), truths[i].values()));
    const double mean = std::accumulate(per_scene.begin(), per_scene.end(), 0.0) / static_cast<double>(scenes.size());
    if (mean > out.random_ssim) {
      out.random_ssim = mean;
      out.random_method = baseline::describe(cand);
      out.random_per_scene = std::move(per_scene);
    }
  }
  return out;
}

}  // namespace spx::studies
