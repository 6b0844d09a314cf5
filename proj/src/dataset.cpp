#include "spx/dataset.hpp"

#include <cmath>

#include "spx/error.hpp"
#include "spx/pgm.hpp"
#include "spx/rng.hpp"
#include "spx/serialize.hpp"

namespace spx::data {

namespace {

constexpr std::uint64_t kSpecStream = 0xA0u;
constexpr std::uint64_t kEntryStream = 0xA1u;

bool valid_range(const std::pair<double, double>& r) { return std::isfinite(r.first) && std::isfinite(r.second) && r.first <= r.second; }

}  // namespace

void validate(const GenConfig& cfg) {
  if (cfg.size < 16 || cfg.size % 16 != 0)
    throw Error(ErrorKind::Parameter, "size must be a positive multiple of 16, got " + std::to_string(cfg.size));
  if (!valid_range(cfg.angle_range) || !valid_range(cfg.period_range) || !valid_range(cfg.noise_range))
    throw Error(ErrorKind::Parameter, "ranges must be finite with low <= high");
  if (cfg.period_range.first < 2.0) throw Error(ErrorKind::Parameter, "fringe period must be at least 2 px");
  if (cfg.noise_range.first < 0.0) throw Error(ErrorKind::Parameter, "noise amplitude must be non-negative");
  if (cfg.rates.empty()) throw Error(ErrorKind::Parameter, "at least one sampling rate is required");
  for (double r : cfg.rates) window_for_rate(r);
  if (!(cfg.split_ratio > 0.0 && cfg.split_ratio < 1.0)) throw Error(ErrorKind::Parameter, "split ratio must be in (0, 1)");
}

sampling::WindowSet window_for_rate(double rate) {
  if (!(rate > 0.0 && rate <= 1.0)) throw Error(ErrorKind::Parameter, "sampling rate must be in (0, 1]");
  const double n = 1.0 / rate;
  const long rounded = std::lround(n);
  if (std::abs(n - static_cast<double>(rounded)) > 1e-9)
    throw Error(ErrorKind::Parameter, "sampling rate " + io::format_double(rate) + " is not 1/N");
  return sampling::make_window(static_cast<int>(rounded), sampling::WindowKind::Rect);
}

Sample synthesize(scene::ManifestEntry& entry, const GenConfig& cfg, std::uint64_t seed) {
  const std::uint64_t s = derive_seed(seed, kEntryStream, entry.index);
  entry.rate = cfg.rates[entry.index % cfg.rates.size()];
  entry.period = fringe::sample_period(cfg.period_range, derive_seed(s, 1));
  entry.angle = fringe::sample_angle(cfg.angle_range, derive_seed(s, 2));

  const auto size = static_cast<std::size_t>(cfg.size);
  const auto depth = scene::gen_scene(entry.spec, size, size);
  const fringe::ProjectionGeometry geom{entry.angle, entry.period, cfg.phase_gain};
  const auto hi = fringe::render_sinusoid(depth, geom);
  const auto noisy = fringe::add_noise(fringe::binarize(hi), {cfg.noise_range.first, cfg.noise_range.second, derive_seed(s, 3)});

  const auto seq = sampling::make_sequence(cfg.size, cfg.size, window_for_rate(entry.rate), cfg.order);
  auto trace = detector::acquire(noisy, seq);
  trace.info = {entry.rate, entry.period, s};
  const auto low = detector::reorder(trace, seq, detector::ReorderMode::Rounded);

  Sample out;
  out.id = entry.scene_id;
  out.split = entry.split;
  out.rate = entry.rate;
  out.period = entry.period;
  out.angle = entry.angle;
  out.depth = depth.grid();
  out.fringe_hi = hi.values;
  out.scene = noisy.values;
  out.lowres = low.values;
  return out;
}

Dataset generate(int count, const GenConfig& cfg, std::uint64_t seed) {
  if (count < 1) throw Error(ErrorKind::Parameter, "dataset count must be positive, got " + std::to_string(count));
  validate(cfg);
  const auto size = static_cast<std::size_t>(cfg.size);
  std::vector<scene::SceneSpec> specs;
  specs.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    specs.push_back(scene::random_spec(derive_seed(seed, kSpecStream, static_cast<std::uint64_t>(i)), size, size));

  Dataset ds;
  ds.manifest = scene::build_manifest(specs, cfg.split_ratio, seed);
  ds.samples.reserve(ds.manifest.entries.size());
  for (auto& e : ds.manifest.entries) {
    e.depth_path = "depth/" + e.scene_id + ".pgm";
    e.fringe_hi_path = "fringe_hi/" + e.scene_id + ".pgm";
    e.fringe_lo_path = "fringe_lo/" + e.scene_id + ".pgm";
    ds.samples.push_back(synthesize(e, cfg, seed));
  }
  return ds;
}

std::vector<Sample> select(const std::vector<Sample>& samples, scene::Split split) {
  std::vector<Sample> out;
  for (const auto& s : samples)
    if (s.split == split) out.push_back(s);
  return out;
}

void write_dataset(const Dataset& ds, const GenConfig& cfg, const std::filesystem::path& dir) {
  for (const char* sub : {"depth", "fringe_hi", "fringe_lo"}) std::filesystem::create_directories(dir / sub);
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const auto& e = ds.manifest.entries[i];
    const auto& s = ds.samples[i];
    io::write_pgm(dir / e.depth_path, s.depth, io::PgmDepth::Bits16);
    io::write_pgm(dir / e.fringe_hi_path, s.fringe_hi, io::PgmDepth::Bits8);
    io::write_pgm(dir / e.fringe_lo_path, s.lowres, io::PgmDepth::Bits8);
  }
  auto j = io::to_json(ds.manifest);
  j["generator"] = io::to_json(cfg);
  io::write_text(dir / "manifest.json", j.dump(2) + "\n");
}

Dataset load_dataset(const std::filesystem::path& manifest_path) {
  io::Json j;
  try {
    j = io::Json::parse(io::read_text(manifest_path));
  } catch (const io::Json::parse_error& e) {
    throw Error(ErrorKind::Data, "manifest " + manifest_path.string() + " is not valid JSON: " + e.what());
  }
  Dataset ds;
  ds.manifest = io::manifest_from_json(j);
  const auto root = manifest_path.parent_path();
  for (const auto& e : ds.manifest.entries) {
    Sample s;
    s.id = e.scene_id;
    s.split = e.split;
    s.rate = e.rate;
    s.period = e.period;
    s.angle = e.angle;
    s.depth = io::read_pgm(root / e.depth_path);
    s.fringe_hi = io::read_pgm(root / e.fringe_hi_path);
    s.lowres = io::read_pgm(root / e.fringe_lo_path);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

}  // namespace spx::data
