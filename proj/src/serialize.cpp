#include "spx/serialize.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "spx/error.hpp"

namespace spx::io {

namespace {

template <typename T>
T get(const Json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorKind::Data, std::string("missing JSON field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Data, std::string("bad JSON field '") + key + "': " + e.what());
  }
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw Error(ErrorKind::Data, "bad number '" + std::string(s) + "'");
  return v;
}

long parse_int(std::string_view s) {
  long v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw Error(ErrorKind::Data, "bad integer '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> lines(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto l : split(text, '\n')) {
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    if (!l.empty()) out.push_back(l);
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, ptr};
}

Json to_json(const scene::SceneSpec& s) {
  return {{"kind", std::string(scene::to_string(s.kind))},
          {"center_x", s.center_x},
          {"center_y", s.center_y},
          {"radius", s.radius},
          {"amplitude", s.amplitude},
          {"count", s.count},
          {"pose_deg", s.pose_deg},
          {"seed", s.seed}};
}

scene::SceneSpec spec_from_json(const Json& j) {
  scene::SceneSpec s;
  s.kind = scene::primitive_from_string(get<std::string>(j, "kind"));
  s.center_x = get<double>(j, "center_x");
  s.center_y = get<double>(j, "center_y");
  s.radius = get<double>(j, "radius");
  s.amplitude = get<double>(j, "amplitude");
  s.count = get<int>(j, "count");
  s.pose_deg = get<double>(j, "pose_deg");
  s.seed = get<std::uint64_t>(j, "seed");
  return s;
}

Json to_json(const scene::DatasetManifest& m) {
  Json entries = Json::array();
  for (const auto& e : m.entries) {
    entries.push_back({{"scene_id", e.scene_id},
                       {"index", e.index},
                       {"spec", to_json(e.spec)},
                       {"depth_path", e.depth_path},
                       {"fringe_hi_path", e.fringe_hi_path},
                       {"fringe_lo_path", e.fringe_lo_path},
                       {"rate", e.rate},
                       {"period", e.period},
                       {"angle", e.angle},
                       {"split", std::string(scene::to_string(e.split))}});
  }
  return {{"seed", m.seed}, {"split_ratio", m.split_ratio}, {"entries", std::move(entries)}};
}

scene::DatasetManifest manifest_from_json(const Json& j) {
  scene::DatasetManifest m;
  m.seed = get<std::uint64_t>(j, "seed");
  m.split_ratio = get<double>(j, "split_ratio");
  if (!j.contains("entries") || !j["entries"].is_array()) throw Error(ErrorKind::Data, "manifest has no entries array");
  for (const auto& je : j["entries"]) {
    scene::ManifestEntry e;
    e.scene_id = get<std::string>(je, "scene_id");
    e.index = get<std::size_t>(je, "index");
    e.spec = spec_from_json(je.at("spec"));
    e.depth_path = get<std::string>(je, "depth_path");
    e.fringe_hi_path = get<std::string>(je, "fringe_hi_path");
    e.fringe_lo_path = get<std::string>(je, "fringe_lo_path");
    e.rate = get<double>(je, "rate");
    e.period = get<double>(je, "period");
    e.angle = get<double>(je, "angle");
    e.split = scene::split_from_string(get<std::string>(je, "split"));
    m.entries.push_back(std::move(e));
  }
  return m;
}

Json to_json(const data::GenConfig& c) {
  return {{"size", c.size},
          {"angle_range", {c.angle_range.first, c.angle_range.second}},
          {"period_range", {c.period_range.first, c.period_range.second}},
          {"noise_range", {c.noise_range.first, c.noise_range.second}},
          {"phase_gain", c.phase_gain},
          {"order", std::string(sampling::to_string(c.order))},
          {"rates", c.rates},
          {"split_ratio", c.split_ratio}};
}

data::GenConfig gen_config_from_json(const Json& j) {
  data::GenConfig c;
  c.size = get<int>(j, "size");
  c.angle_range = get<std::pair<double, double>>(j, "angle_range");
  c.period_range = get<std::pair<double, double>>(j, "period_range");
  c.noise_range = get<std::pair<double, double>>(j, "noise_range");
  c.phase_gain = get<double>(j, "phase_gain");
  c.order = sampling::scan_order_from_string(get<std::string>(j, "order"));
  c.rates = get<std::vector<double>>(j, "rates");
  c.split_ratio = get<double>(j, "split_ratio");
  return c;
}

Json to_json(const sampling::PatternSequence& seq) {
  auto window_json = [](const sampling::Window& w) {
    Json cells = Json::array();
    for (const auto& c : w.cells()) cells.push_back({c.row, c.col});
    return Json{{"shape", std::string(sampling::to_string(w.shape()))}, {"cells", std::move(cells)}};
  };
  const auto& set = seq.windows();
  Json placements = Json::array();
  for (const auto& p : seq.placements()) placements.push_back({p.row, p.col, p.window});
  Json j{{"dims", {seq.height(), seq.width()}},
         {"order", std::string(sampling::to_string(seq.order()))},
         {"window", window_json(set.windows.front())},
         {"tile", {set.tile_rows, set.tile_cols}},
         {"lowres_dims", {seq.lowres_height(), seq.lowres_width()}},
         {"placements", std::move(placements)}};
  // Split pairs carry the complementary window; placements index 0 or 1.
  if (set.is_split_pair()) j["window_b"] = window_json(set.windows[1]);
  return j;
}

Json to_json(const metrics::EvalReport& r) {
  Json samples = Json::array();
  for (const auto& s : r.samples)
    samples.push_back({{"id", s.id},
                       {"rate", s.rate},
                       {"alpha", s.alpha},
                       {"delta", s.delta},
                       {"gamma", s.gamma},
                       {"ssim", s.ssim}});
  return {{"count", r.count}, {"alpha", r.alpha},     {"delta", r.delta},
          {"gamma", r.gamma}, {"ssim", r.ssim},       {"samples", std::move(samples)}};
}

metrics::EvalReport report_from_json(const Json& j) {
  metrics::EvalReport r;
  r.count = get<std::size_t>(j, "count");
  r.alpha = get<double>(j, "alpha");
  r.delta = get<double>(j, "delta");
  r.gamma = get<double>(j, "gamma");
  r.ssim = get<double>(j, "ssim");
  for (const auto& js : j.at("samples")) {
    metrics::SampleMetrics s;
    s.id = get<std::string>(js, "id");
    s.rate = get<double>(js, "rate");
    s.alpha = get<double>(js, "alpha");
    s.delta = get<double>(js, "delta");
    s.gamma = get<double>(js, "gamma");
    s.ssim = get<double>(js, "ssim");
    r.samples.push_back(std::move(s));
  }
  if (r.samples.size() != r.count) throw Error(ErrorKind::Data, "report count does not match its samples");
  return r;
}

std::string trace_to_csv(const detector::SignalTrace& trace) {
  std::string out = "index,value\n";
  for (std::size_t i = 0; i < trace.values.size(); ++i)
    out += std::to_string(i) + "," + format_double(trace.values[i]) + "\n";
  return out;
}

detector::SignalTrace trace_from_csv(const std::string& text) {
  const auto rows = lines(text);
  if (rows.empty() || rows.front() != "index,value") throw Error(ErrorKind::Data, "trace CSV must start with 'index,value'");
  detector::SignalTrace trace;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto fields = split(rows[i], ',');
    if (fields.size() != 2) throw Error(ErrorKind::Data, "trace CSV row " + std::to_string(i) + " needs 2 fields");
    if (parse_int(fields[0]) != static_cast<long>(i - 1))
      throw Error(ErrorKind::Data, "trace CSV index out of sequence at row " + std::to_string(i));
    trace.values.push_back(parse_double(fields[1]));
  }
  return trace;
}

std::string loss_curve_to_csv(const train::LossCurve& curve, bool adversarial) {
  std::string out = adversarial ? "step,epoch,loss,loss_d,loss_g\n" : "step,epoch,loss\n";
  for (const auto& r : curve) {
    out += std::to_string(r.step) + "," + std::to_string(r.epoch) + "," + format_double(r.loss);
    if (adversarial) out += "," + format_double(r.loss_d) + "," + format_double(r.loss_g);
    out += "\n";
  }
  return out;
}

train::LossCurve loss_curve_from_csv(const std::string& text) {
  const auto rows = lines(text);
  if (rows.empty()) throw Error(ErrorKind::Data, "empty loss CSV");
  const bool adversarial = rows.front() == "step,epoch,loss,loss_d,loss_g";
  if (!adversarial && rows.front() != "step,epoch,loss") throw Error(ErrorKind::Data, "unrecognized loss CSV header");
  train::LossCurve curve;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = split(rows[i], ',');
    if (f.size() != (adversarial ? 5u : 3u)) throw Error(ErrorKind::Data, "loss CSV row " + std::to_string(i) + " has wrong width");
    train::LossRecord r;
    r.step = static_cast<int>(parse_int(f[0]));
    r.epoch = static_cast<int>(parse_int(f[1]));
    r.loss = parse_double(f[2]);
    if (adversarial) {
      r.loss_d = f[3] == "nan" ? train::kNoValue : parse_double(f[3]);
      r.loss_g = f[4] == "nan" ? train::kNoValue : parse_double(f[4]);
    }
    curve.push_back(r);
  }
  return curve;
}

}  // namespace spx::io
