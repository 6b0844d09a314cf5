#include "spx/detector_sim.hpp"

#include <cmath>
#include <string>

#include "spx/error.hpp"

namespace spx::detector {

double round_half_up(double x) { return std::floor(x + 0.5); }

double measure(const Image& scene, const sampling::Window& window, int row, int col) {
  const auto h = static_cast<int>(scene.height());
  const auto w = static_cast<int>(scene.width());
  double total = 0.0;
  for (const auto& cell : window.cells()) {
    const int r = row + cell.row;
    const int c = col + cell.col;
    if (r < 0 || r >= h || c < 0 || c >= w)
      throw Error(ErrorKind::Bounds, "window at (" + std::to_string(row) + ", " +
                                         std::to_string(col) + ") leaves the scene");
    total += scene(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  }
  return total;
}

SignalTrace acquire(const fringe::FringeImage& scene, const sampling::PatternSequence& seq) {
  if (static_cast<int>(scene.height()) != seq.height() ||
      static_cast<int>(scene.width()) != seq.width())
    throw Error(ErrorKind::Bounds, "scene dimensions do not match the pattern sequence");
  SignalTrace trace;
  trace.info.rate = seq.rate();
  trace.values.reserve(seq.placements().size());
  const auto& windows = seq.windows().windows;
  for (const auto& p : seq.placements())
    trace.values.push_back(measure(scene.values, windows[static_cast<std::size_t>(p.window)], p.row, p.col));
  return trace;
}

LowResFringe reorder(const SignalTrace& trace, const sampling::PatternSequence& seq,
                     ReorderMode mode) {
  if (trace.size() != seq.placements().size())
    throw Error(ErrorKind::Consistency, "trace length " + std::to_string(trace.size()) +
                                            " does not match " +
                                            std::to_string(seq.placements().size()) + " placements");
  LowResFringe out;
  out.values = Image(static_cast<std::size_t>(seq.lowres_height()),
                     static_cast<std::size_t>(seq.lowres_width()));
  out.binary = mode == ReorderMode::Rounded;
  const auto& windows = seq.windows().windows;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto& p = seq.placements()[k];
    const double n = static_cast<double>(windows[static_cast<std::size_t>(p.window)].size());
    const double avg = trace.values[k] / n;
    const auto lr = seq.lowres_coord(p);
    out.values(static_cast<std::size_t>(lr.row), static_cast<std::size_t>(lr.col)) =
        mode == ReorderMode::Rounded ? round_half_up(avg) : avg;
  }
  return out;
}

SignalTrace acquire_random(const fringe::FringeImage& scene,
                           const sampling::RandomPatternSet& patterns) {
  if (static_cast<int>(scene.height()) != patterns.height ||
      static_cast<int>(scene.width()) != patterns.width)
    throw Error(ErrorKind::Bounds, "scene dimensions do not match the random patterns");
  SignalTrace trace;
  trace.info.seed = patterns.seed;
  trace.info.rate = static_cast<double>(patterns.count()) /
                    (static_cast<double>(patterns.height) * static_cast<double>(patterns.width));
  trace.values.reserve(patterns.count());
  const auto pixels = scene.values.values();
  for (const auto& mask : patterns.masks) {
    double total = 0.0;
    for (std::size_t i = 0; i < pixels.size(); ++i)
      if (mask[i]) total += pixels[i];
    trace.values.push_back(total);
  }
  return trace;
}

}  // namespace spx::detector
