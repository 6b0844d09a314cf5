// spx: dataset generation, acquisition simulation, training, evaluation and
// sampling studies for windowed single-pixel fringe imaging.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spx/checkpoint.hpp"
#include "spx/dataset.hpp"
#include "spx/detector_sim.hpp"
#include "spx/error.hpp"
#include "spx/kv_config.hpp"
#include "spx/metrics.hpp"
#include "spx/models.hpp"
#include "spx/pgm.hpp"
#include "spx/serialize.hpp"
#include "spx/studies.hpp"
#include "spx/training.hpp"

namespace fs = std::filesystem;
using namespace spx;

namespace {

std::pair<double, double> parse_range(const std::string& flag, const std::string& text) {
  const auto values = config::parse_list(flag, text);
  if (values.size() == 1) return {values[0], values[0]};
  if (values.size() != 2) throw Error(ErrorKind::Parameter, flag + ": expected 'low,high', got '" + text + "'");
  if (values[0] > values[1]) throw Error(ErrorKind::Parameter, flag + ": low exceeds high in '" + text + "'");
  return {values[0], values[1]};
}

std::vector<int> parse_int_list(const std::string& flag, const std::string& text) {
  std::vector<int> out;
  for (double v : config::parse_list(flag, text)) {
    if (v != static_cast<int>(v)) throw Error(ErrorKind::Parameter, flag + ": '" + text + "' must list integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

// Writes every long option of `cmd` with its resolved value.
void write_run_config(const CLI::App& cmd, const fs::path& dir) {
  config::KeyValues kv;
  kv.set("command", cmd.get_name());
  for (const auto* opt : cmd.get_options()) {
    if (opt->get_lnames().empty() || opt->get_lnames().front() == "help" || opt->get_lnames().front() == "config")
      continue;
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
    } else {
      value = opt->get_default_str();
    }
    std::string key = opt->get_lnames().front();
    std::replace(key.begin(), key.end(), '-', '_');
    kv.set(key, value);
  }
  io::write_text(dir / "run_config.txt", kv.str());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
}

// Model directory: model.cfg plus one or two checkpoints.
struct ModelBundle {
  std::string approach;
  models::UNetConfig unet;
  std::unique_ptr<models::UNet<float>> e2e;
  std::unique_ptr<models::UNet<float>> generator;
  std::unique_ptr<models::UNet<float>> depth;
};

config::KeyValues model_config(const std::string& approach, const models::UNetConfig& cfg) {
  config::KeyValues kv;
  kv.set("approach", approach);
  kv.set("levels", std::to_string(cfg.levels));
  kv.set("base_channels", std::to_string(cfg.base_channels));
  kv.set("resolution", std::to_string(cfg.resolution));
  kv.set("leaky_slope", io::format_double(cfg.leaky_slope));
  return kv;
}

std::unique_ptr<models::UNet<float>> load_unet(const models::UNetConfig& cfg, const fs::path& path) {
  auto net = std::make_unique<models::UNet<float>>(cfg, 0);
  models::load_into(net->parameters(), nn::load_checkpoint(path));
  return net;
}

ModelBundle load_bundle(const fs::path& dir) {
  const auto kv = config::KeyValues::load(dir / "model.cfg");
  ModelBundle b;
  b.approach = kv.at("approach");
  b.unet.levels = static_cast<int>(config::parse_integer("levels", kv.at("levels")));
  b.unet.base_channels = static_cast<int>(config::parse_integer("base_channels", kv.at("base_channels")));
  b.unet.resolution = static_cast<int>(config::parse_integer("resolution", kv.at("resolution")));
  b.unet.leaky_slope = config::parse_number("leaky_slope", kv.at("leaky_slope"));
  if (b.approach == "e2e") {
    b.e2e = load_unet(b.unet, dir / "model.ckpt");
  } else if (b.approach == "two-stage") {
    b.generator = load_unet(b.unet, dir / "generator.ckpt");
    b.depth = load_unet(b.unet, dir / "depth.ckpt");
  } else {
    throw Error(ErrorKind::Config, "model.cfg: unknown approach '" + b.approach + "'");
  }
  return b;
}

// ---------------------------------------------------------------------------

struct GenDataArgs {
  int count = 0;
  std::uint64_t seed = 0;
  int size = 64;
  std::string period = "6,8";
  std::string angle_range = "13,17";
  std::string noise_range = "0.04,0.14";
  std::string order = "raster";
  double phase_gain = 10.0;
  double split_ratio = 0.85;
  std::string out;
};

void run_gen_data(const CLI::App& cmd, const GenDataArgs& a) {
  data::GenConfig cfg;
  cfg.size = a.size;
  cfg.period_range = parse_range("--period", a.period);
  cfg.angle_range = parse_range("--angle-range", a.angle_range);
  cfg.noise_range = parse_range("--noise-range", a.noise_range);
  cfg.order = sampling::scan_order_from_string(a.order);
  cfg.phase_gain = a.phase_gain;
  cfg.split_ratio = a.split_ratio;
  // Everything is generated in memory first so that failures leave no files.
  const auto ds = data::generate(a.count, cfg, a.seed);
  const fs::path out(a.out);
  ensure_dir(out);
  data::write_dataset(ds, cfg, out);
  write_run_config(cmd, out);
  std::size_t per_rate[3] = {0, 0, 0};
  for (const auto& s : ds.samples)
    for (std::size_t k = 0; k < 3; ++k)
      if (s.rate == metrics::kTableRates[k]) ++per_rate[k];
  std::printf("wrote %zu entries (%zu train, %zu test) to %s\n", ds.samples.size(),
              ds.manifest.count(scene::Split::Train), ds.manifest.count(scene::Split::Test), out.string().c_str());
  std::printf("rates: 50%% %zu, 25%% %zu, 6.25%% %zu\n", per_rate[0], per_rate[1], per_rate[2]);
}

struct SampleArgs {
  std::string scene;
  double rate = 0.25;
  int window = 0;
  std::string kind = "rect";
  std::string orientation = "vertical";
  std::string order = "raster";
  std::string mode = "rounded";
  double period = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

void run_sample(const CLI::App& cmd, const SampleArgs& a) {
  const Image img = io::read_pgm(a.scene);
  int n = a.window;
  if (n == 0) {
    if (!(a.rate > 0.0 && a.rate <= 1.0)) throw Error(ErrorKind::Parameter, "--rate must be in (0, 1]");
    n = static_cast<int>(std::lround(1.0 / a.rate));
    if (std::abs(1.0 / a.rate - n) > 1e-9) throw Error(ErrorKind::Parameter, "--rate must be 1/N for an integer N");
  }
  sampling::WindowKind kind;
  if (a.kind == "rect") {
    kind = sampling::WindowKind::Rect;
  } else if (a.kind == "split-pair") {
    kind = sampling::WindowKind::SplitPair;
  } else {
    throw Error(ErrorKind::Parameter, "--kind must be rect or split-pair");
  }
  if (a.mode != "rounded" && a.mode != "raw") throw Error(ErrorKind::Parameter, "--mode must be rounded or raw");
  const auto windows = sampling::make_window(n, kind, sampling::orientation_from_string(a.orientation));
  const auto seq = sampling::make_sequence(static_cast<int>(img.height()), static_cast<int>(img.width()), windows,
                                           sampling::scan_order_from_string(a.order));
  auto trace = detector::acquire({img, fringe::FringeKind::Sinusoidal}, seq);
  trace.info = {seq.rate(), a.period, a.seed};
  const auto low = detector::reorder(trace, seq, a.mode == "raw" ? detector::ReorderMode::Raw : detector::ReorderMode::Rounded);

  // Every pixel is measured exactly once, so the trace carries the total.
  double total = 0.0, measured = 0.0;
  for (double v : img.values()) total += v;
  for (double v : trace.values) measured += v;
  if (std::abs(total - measured) > 1e-9 * std::max(1.0, total))
    throw Error(ErrorKind::Consistency, "trace does not conserve scene intensity");

  const fs::path out(a.out);
  ensure_dir(out);
  io::write_text(out / "trace.csv", io::trace_to_csv(trace));
  io::write_pgm(out / "lowres.pgm", low.values, io::PgmDepth::Bits16);
  io::write_text(out / "sequence.json", io::to_json(seq).dump(2) + "\n");
  write_run_config(cmd, out);
  std::printf("%zu measurements, low-res %zux%zu\n", trace.size(), low.height(), low.width());
}

struct TrainArgs {
  std::string manifest;
  std::string approach = "e2e";
  std::string split = "train";
  double learning_rate = 1e-4;
  int batch_size = 8;
  int epochs = 20;
  double dropout = 0.5;
  double leaky_slope = 0.2;
  std::string rate_mix = "1:1:2";
  std::uint64_t seed = 0;
  int max_steps = 0;
  int levels = 4;
  int base_channels = 8;
  int disc_layers = 3;
  std::string out;
};

void run_train(const CLI::App& cmd, const TrainArgs& a) {
  if (a.approach != "e2e" && a.approach != "two-stage")
    throw Error(ErrorKind::Parameter, "--approach must be e2e or two-stage");
  train::TrainConfig tc;
  tc.learning_rate = a.learning_rate;
  tc.batch_size = a.batch_size;
  tc.epochs = a.epochs;
  tc.dropout = a.dropout;
  tc.leaky_slope = a.leaky_slope;
  tc.rate_mix = config::parse_list("--rate-mix", a.rate_mix);
  tc.seed = a.seed;
  tc.max_steps = a.max_steps;
  train::validate(tc);

  const auto ds = data::load_dataset(a.manifest);
  const auto samples = data::select(ds.samples, scene::split_from_string(a.split));
  if (samples.empty()) throw Error(ErrorKind::Data, "split '" + a.split + "' of " + a.manifest + " is empty");

  models::UNetConfig ucfg;
  ucfg.levels = a.levels;
  ucfg.base_channels = a.base_channels;
  ucfg.resolution = static_cast<int>(samples.front().depth.height());
  ucfg.dropout = tc.dropout;
  ucfg.leaky_slope = tc.leaky_slope;

  const fs::path out(a.out);
  ensure_dir(out);
  if (a.approach == "e2e") {
    const auto res = train::train_end_to_end(samples, ucfg, tc);
    nn::save_checkpoint(out / "model.ckpt", res.checkpoint);
    io::write_text(out / "loss.csv", io::loss_curve_to_csv(res.curve, false));
    std::printf("e2e: %zu steps, loss %.6f -> %.6f\n", res.curve.size(), res.curve.front().loss, res.curve.back().loss);
  } else {
    models::DiscriminatorConfig dcfg;
    dcfg.layers = a.disc_layers;
    dcfg.base_channels = a.base_channels;
    dcfg.resolution = ucfg.resolution;
    const auto res = train::train_two_stage(samples, ucfg, dcfg, ucfg, tc);
    nn::save_checkpoint(out / "generator.ckpt", res.generator_checkpoint);
    nn::save_checkpoint(out / "depth.ckpt", res.depth_checkpoint);
    io::write_text(out / "loss.csv", io::loss_curve_to_csv(res.stage1, true));
    io::write_text(out / "loss_stage2.csv", io::loss_curve_to_csv(res.stage2, false));
    std::printf("two-stage: %zu steps, generator loss %.6f -> %.6f, depth loss %.6f -> %.6f\n", res.stage1.size(),
                res.stage1.front().loss, res.stage1.back().loss, res.stage2.front().loss, res.stage2.back().loss);
  }
  io::write_text(out / "model.cfg", model_config(a.approach, ucfg).str());
  write_run_config(cmd, out);
}

struct EvalArgs {
  std::string manifest;
  std::string model;
  std::string approach = "";
  std::string split = "test";
  std::string out;
};

void run_eval(const CLI::App& cmd, const EvalArgs& a) {
  const auto ds = data::load_dataset(a.manifest);
  const auto samples = a.split == "all" ? ds.samples : data::select(ds.samples, scene::split_from_string(a.split));
  if (samples.empty()) throw Error(ErrorKind::Data, "split '" + a.split + "' of " + a.manifest + " is empty");

  std::optional<ModelBundle> bundle;
  std::string approach = a.approach;
  if (approach != "identity") {
    if (a.model.empty()) throw Error(ErrorKind::Parameter, "--model is required unless --approach identity");
    bundle = load_bundle(a.model);
    if (approach.empty()) approach = bundle->approach;
    if (approach != bundle->approach)
      throw Error(ErrorKind::Config, "--approach " + approach + " does not match model approach " + bundle->approach);
  }

  std::vector<metrics::SampleMetrics> per_sample;
  for (const auto& s : samples) {
    Image pred;
    if (approach == "identity") {
      pred = s.depth;
    } else if (approach == "e2e") {
      pred = train::infer_end_to_end(*bundle->e2e, s.lowres);
    } else {
      pred = train::infer_two_stage(*bundle->generator, *bundle->depth, s.lowres).depth;
    }
    auto m = metrics::evaluate(pred, s.depth);
    m.id = s.id;
    m.rate = s.rate;
    per_sample.push_back(std::move(m));
  }
  const auto report = metrics::aggregate(std::move(per_sample));
  const fs::path out(a.out);
  ensure_dir(out);
  io::write_text(out / "report.json", io::to_json(report).dump(2) + "\n");
  const auto table = metrics::format_table(report);
  io::write_text(out / "report.txt", table);
  write_run_config(cmd, out);
  std::fputs(table.c_str(), stdout);
}

struct InferArgs {
  std::string model;
  std::string input;
  std::string out;
};

void run_infer(const CLI::App& cmd, const InferArgs& a) {
  const auto bundle = load_bundle(a.model);
  const Image low = io::read_pgm(a.input);
  const fs::path out(a.out);
  if (bundle.approach == "e2e") {
    const auto depth = train::infer_end_to_end(*bundle.e2e, low);
    ensure_dir(out);
    io::write_pgm(out / "depth.pgm", depth, io::PgmDepth::Bits16);
  } else {
    const auto res = train::infer_two_stage(*bundle.generator, *bundle.depth, low);
    ensure_dir(out);
    io::write_pgm(out / "fringe.pgm", res.fringe, io::PgmDepth::Bits16);
    io::write_pgm(out / "depth.pgm", res.depth, io::PgmDepth::Bits16);
  }
  write_run_config(cmd, out);
}

struct NyquistArgs {
  double period = 6.0;
  std::string extents = "3,5,7";
  int height = 8;
  std::string out;
};

void run_nyquist(const CLI::App& cmd, const NyquistArgs& a) {
  const auto rep = studies::nyquist_study(a.period, parse_int_list("--extents", a.extents), a.height);
  const fs::path out(a.out);
  ensure_dir(out);
  io::write_pgm(out / "carrier.pgm", rep.carrier, io::PgmDepth::Bits8);
  io::Json cases = io::Json::array();
  std::printf("T = %s px, width %d\n%4s %-8s %8s %8s %6s\n", io::format_double(a.period).c_str(), rep.width, "M",
              "regime", "carrier", "sampled", "shift");
  for (const auto& c : rep.cases) {
    io::write_pgm(out / ("lowres_M" + std::to_string(c.window_extent) + ".pgm"), c.lowres, io::PgmDepth::Bits8);
    cases.push_back({{"window_extent", c.window_extent},
                     {"regime", std::string(sampling::to_string(c.regime))},
                     {"carrier_bin", c.carrier_bin},
                     {"sampled_bin", c.sampled_bin},
                     {"shift", c.shift()}});
    std::printf("%4d %-8s %8d %8d %6d\n", c.window_extent, std::string(sampling::to_string(c.regime)).c_str(),
                c.carrier_bin, c.sampled_bin, c.shift());
  }
  const io::Json j{{"period", rep.period}, {"height", rep.height}, {"width", rep.width}, {"cases", std::move(cases)}};
  io::write_text(out / "nyquist.json", j.dump(2) + "\n");
  write_run_config(cmd, out);
}

struct CompareArgs {
  int count = 20;
  double rate = 0.25;
  std::uint64_t seed = 0;
  int size = 64;
  std::string order = "raster";
  std::string out;
};

void run_compare(const CLI::App& cmd, const CompareArgs& a) {
  data::GenConfig cfg;
  cfg.size = a.size;
  cfg.rates = {a.rate};
  const auto ds = data::generate(a.count, cfg, a.seed);
  std::vector<Image> scenes, truths;
  for (const auto& s : ds.samples) {
    scenes.push_back(s.scene);
    truths.push_back(fringe::binarize({s.fringe_hi, fringe::FringeKind::Sinusoidal}).values);
  }
  const auto cmp = studies::compare_patterns(scenes, truths, a.rate, a.seed, sampling::scan_order_from_string(a.order));
  const fs::path out(a.out);
  ensure_dir(out);
  const io::Json j{{"rate", cmp.rate},
                   {"measurements", cmp.measurements},
                   {"active_ssim", cmp.active_ssim},
                   {"random_ssim", cmp.random_ssim},
                   {"random_method", cmp.random_method},
                   {"active_per_scene", cmp.active_per_scene},
                   {"random_per_scene", cmp.random_per_scene}};
  io::write_text(out / "comparison.json", j.dump(2) + "\n");
  write_run_config(cmd, out);
  std::printf("rate %s, %d measurements per scene, %d scenes\n", metrics::rate_label(cmp.rate).c_str(), cmp.measurements,
              a.count);
  std::printf("active  mean ssim %.6f\nrandom  mean ssim %.6f (%s)\n", cmp.active_ssim, cmp.random_ssim,
              cmp.random_method.c_str());
}

// Turns `key = value` lines of --config into flags placed ahead of the user's
// own arguments; flags given explicitly win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (!path || args.size() < 2) return args;
  const auto kv = config::KeyValues::load(*path);
  std::vector<std::string> injected;
  for (const auto& [key, value] : kv.entries()) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& s) {
      return s == flag || s.rfind(flag + "=", 0) == 0;
    });
    if (!given) {
      injected.push_back(flag);
      injected.push_back(value);
    }
  }
  std::vector<std::string> out(args.begin(), args.begin() + 2);  // program, subcommand
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), args.begin() + 2, args.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Windowed single-pixel fringe imaging: simulation, training and evaluation", "spx"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  std::string config_path;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Key-value file; explicit flags override its entries");
  };

  GenDataArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a procedural dataset with manifest");
  gen_cmd->add_option("--count", gen.count, "Number of scenes")->required();
  gen_cmd->add_option("--seed", gen.seed, "Master seed");
  gen_cmd->add_option("--size", gen.size, "Scene side length in pixels (multiple of 16)");
  gen_cmd->add_option("--period", gen.period, "Fringe period range 'low,high' in pixels");
  gen_cmd->add_option("--angle-range", gen.angle_range, "Projection angle range 'low,high' in degrees");
  gen_cmd->add_option("--noise-range", gen.noise_range, "Ambient noise amplitude range 'low,high'");
  gen_cmd->add_option("--order", gen.order, "Scan order: raster or swirl");
  gen_cmd->add_option("--phase-gain", gen.phase_gain, "Fringe shift per unit depth per tan(angle)");
  gen_cmd->add_option("--split-ratio", gen.split_ratio, "Fraction of scenes in the train split");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  add_config(gen_cmd);

  SampleArgs smp;
  auto* smp_cmd = app.add_subcommand("sample", "Simulate windowed acquisition of one PGM scene");
  smp_cmd->add_option("--scene", smp.scene, "Input PGM")->required();
  smp_cmd->add_option("--rate", smp.rate, "Sampling rate 1/N (ignored when --window is set)");
  smp_cmd->add_option("--window", smp.window, "Cells per window N; 0 derives N from --rate");
  smp_cmd->add_option("--kind", smp.kind, "Window kind: rect or split-pair");
  smp_cmd->add_option("--orientation", smp.orientation, "Long-edge orientation: vertical or horizontal");
  smp_cmd->add_option("--order", smp.order, "Scan order: raster or swirl");
  smp_cmd->add_option("--mode", smp.mode, "Reorder mode: rounded or raw");
  smp_cmd->add_option("--period", smp.period, "Fringe period recorded with the trace");
  smp_cmd->add_option("--seed", smp.seed, "Seed recorded with the trace");
  smp_cmd->add_option("--out", smp.out, "Output directory")->required();
  add_config(smp_cmd);

  TrainArgs trn;
  auto* trn_cmd = app.add_subcommand("train", "Train the end-to-end or two-stage networks");
  trn_cmd->add_option("--manifest", trn.manifest, "Dataset manifest.json")->required();
  trn_cmd->add_option("--approach", trn.approach, "e2e or two-stage");
  trn_cmd->add_option("--split", trn.split, "Manifest split to train on");
  trn_cmd->add_option("--learning-rate", trn.learning_rate, "Adam learning rate");
  trn_cmd->add_option("--batch-size", trn.batch_size, "Mini-batch size");
  trn_cmd->add_option("--epochs", trn.epochs, "Training epochs");
  trn_cmd->add_option("--dropout", trn.dropout, "Decoder dropout probability");
  trn_cmd->add_option("--leaky-slope", trn.leaky_slope, "Encoder LeakyReLU slope");
  trn_cmd->add_option("--rate-mix", trn.rate_mix, "Batch share of 50%:25%:6.25% samples");
  trn_cmd->add_option("--seed", trn.seed, "Training seed");
  trn_cmd->add_option("--max-steps", trn.max_steps, "Stop after this many steps (0 = no limit)");
  trn_cmd->add_option("--levels", trn.levels, "U-Net down/up block count");
  trn_cmd->add_option("--base-channels", trn.base_channels, "U-Net first-level channel count");
  trn_cmd->add_option("--disc-layers", trn.disc_layers, "Discriminator layer count (two-stage)");
  trn_cmd->add_option("--out", trn.out, "Output directory")->required();
  add_config(trn_cmd);

  EvalArgs evl;
  auto* evl_cmd = app.add_subcommand("eval", "Evaluate a trained model on a manifest split");
  evl_cmd->add_option("--manifest", evl.manifest, "Dataset manifest.json")->required();
  evl_cmd->add_option("--model", evl.model, "Directory written by train");
  evl_cmd->add_option("--approach", evl.approach, "e2e, two-stage, or identity (ground truth as prediction)");
  evl_cmd->add_option("--split", evl.split, "train, test or all");
  evl_cmd->add_option("--out", evl.out, "Output directory")->required();
  add_config(evl_cmd);

  InferArgs inf;
  auto* inf_cmd = app.add_subcommand("infer", "Reconstruct depth from one low-res fringe PGM");
  inf_cmd->add_option("--model", inf.model, "Directory written by train")->required();
  inf_cmd->add_option("--input", inf.input, "Low-res fringe PGM")->required();
  inf_cmd->add_option("--out", inf.out, "Output directory")->required();
  add_config(inf_cmd);

  NyquistArgs nyq;
  auto* nyq_cmd = app.add_subcommand("nyquist-demo", "Sample a binarized carrier with 1xM windows");
  nyq_cmd->add_option("--period", nyq.period, "Carrier period T in pixels");
  nyq_cmd->add_option("--extents", nyq.extents, "Comma-separated window extents M");
  nyq_cmd->add_option("--height", nyq.height, "Carrier height in pixels");
  nyq_cmd->add_option("--out", nyq.out, "Output directory")->required();
  add_config(nyq_cmd);

  CompareArgs cmpa;
  auto* cmp_cmd = app.add_subcommand("compare-patterns", "Active windows versus random patterns at matched budget");
  cmp_cmd->add_option("--count", cmpa.count, "Number of scenes");
  cmp_cmd->add_option("--rate", cmpa.rate, "Sampling rate 1/N");
  cmp_cmd->add_option("--seed", cmpa.seed, "Scene and pattern seed");
  cmp_cmd->add_option("--size", cmpa.size, "Scene side length in pixels");
  cmp_cmd->add_option("--order", cmpa.order, "Scan order: raster or swirl");
  cmp_cmd->add_option("--out", cmpa.out, "Output directory")->required();
  add_config(cmp_cmd);

  try {
    auto args = expand_config(std::vector<std::string>(argv, argv + argc));
    std::vector<char*> cargs;
    for (auto& s : args) cargs.push_back(s.data());
    app.parse(static_cast<int>(cargs.size()), cargs.data());

    if (gen_cmd->parsed()) run_gen_data(*gen_cmd, gen);
    if (smp_cmd->parsed()) run_sample(*smp_cmd, smp);
    if (trn_cmd->parsed()) run_train(*trn_cmd, trn);
    if (evl_cmd->parsed()) run_eval(*evl_cmd, evl);
    if (inf_cmd->parsed()) run_infer(*inf_cmd, inf);
    if (nyq_cmd->parsed()) run_nyquist(*nyq_cmd, nyq);
    if (cmp_cmd->parsed()) run_compare(*cmp_cmd, cmpa);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::fprintf(stderr, "error: usage: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", e.what());
    return 1;
  }
  return 0;
}
