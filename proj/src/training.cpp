#include "spx/training.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "spx/error.hpp"
#include "spx/rng.hpp"

namespace spx::train {

namespace {

using models::UNet;
using nn::Tensor;

constexpr std::uint64_t kOrderStream = 0x0Eu;
constexpr std::uint64_t kDropoutStream = 0xD5u;
constexpr std::uint64_t kStage2Stream = 0x52u;

void require_samples(const std::vector<data::Sample>& samples, const char* what) {
  if (samples.empty()) throw Error(ErrorKind::Data, std::string(what) + ": no training samples");
}

int canonical_of(const models::UNetConfig& cfg) { return cfg.resolution; }

Tensor<float> gather(const std::vector<Image>& images, const std::vector<std::size_t>& idx) {
  std::vector<const Image*> ptrs;
  ptrs.reserve(idx.size());
  for (auto i : idx) ptrs.push_back(&images[i]);
  return models::stack_images<float>(ptrs);
}

Tensor<float> gather(const std::vector<const Image*>& images, const std::vector<std::size_t>& idx) {
  std::vector<const Image*> ptrs;
  ptrs.reserve(idx.size());
  for (auto i : idx) ptrs.push_back(images[i]);
  return models::stack_images<float>(ptrs);
}

// Calls fn(step, epoch, batch_indices) for every batch until epochs or
// max_steps run out.
template <typename F>
void for_each_batch(const std::vector<data::Sample>& samples, const TrainConfig& cfg, std::uint64_t seed, F&& fn) {
  int step = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto order = epoch_order(samples, cfg.rate_mix, derive_seed(seed, kOrderStream, epoch));
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      if (cfg.max_steps > 0 && step >= cfg.max_steps) return;
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                     order.begin() + static_cast<std::ptrdiff_t>(end));
      ++step;
      fn(step, epoch, batch);
    }
  }
}

double finite_or_throw(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(ErrorKind::Numeric, std::string(what) + " is not finite");
  return v;
}

models::UNetConfig with_train_params(models::UNetConfig cfg, const TrainConfig& tc) {
  cfg.dropout = tc.dropout;
  cfg.leaky_slope = tc.leaky_slope;
  return cfg;
}

// Fits `net` on (inputs -> targets) with loss 1 - ssim.
LossCurve fit_unet(UNet<float>& net, const std::vector<data::Sample>& samples, const std::vector<Image>& inputs,
                   const std::vector<const Image*>& targets, const TrainConfig& cfg, std::uint64_t seed) {
  nn::Adam<float> adam(net.parameter_tensors(), {.learning_rate = cfg.learning_rate});
  LossCurve curve;
  for_each_batch(samples, cfg, seed, [&](int step, int epoch, const std::vector<std::size_t>& batch) {
    const auto x = gather(inputs, batch);
    const auto y = gather(targets, batch);
    const auto pred = net.forward(x, true, derive_seed(seed, kDropoutStream, static_cast<std::uint64_t>(step)));
    const auto loss = models::loss_unet(pred, y);
    adam.zero_grad();
    nn::backward(loss);
    adam.step();
    curve.push_back({.step = step, .epoch = epoch, .loss = finite_or_throw(loss.item(), "training loss")});
  });
  return curve;
}

std::vector<Image> prepared_inputs(const std::vector<data::Sample>& samples, int canonical) {
  std::vector<Image> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(models::prepare_image(s.lowres, canonical));
  return out;
}

}  // namespace

void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw Error(ErrorKind::Config, "learning_rate must be positive");
  if (cfg.batch_size < 1) throw Error(ErrorKind::Config, "batch_size must be positive");
  if (cfg.epochs < 1) throw Error(ErrorKind::Config, "epochs must be positive");
  if (!(cfg.dropout >= 0.0 && cfg.dropout < 1.0)) throw Error(ErrorKind::Config, "dropout must be in [0, 1)");
  if (!(cfg.leaky_slope >= 0.0 && cfg.leaky_slope < 1.0)) throw Error(ErrorKind::Config, "leaky_slope must be in [0, 1)");
  if (cfg.rate_mix.empty()) throw Error(ErrorKind::Config, "rate_mix must not be empty");
  for (double w : cfg.rate_mix)
    if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorKind::Config, "rate_mix weights must be positive");
  if (cfg.max_steps < 0) throw Error(ErrorKind::Config, "max_steps must be non-negative");
}

std::vector<std::size_t> epoch_order(const std::vector<data::Sample>& samples, const std::vector<double>& rate_mix,
                                     std::uint64_t seed) {
  // Groups ordered by decreasing rate; groups beyond the mix get weight 1.
  std::map<double, std::vector<std::size_t>, std::greater<>> by_rate;
  for (std::size_t i = 0; i < samples.size(); ++i) by_rate[samples[i].rate].push_back(i);

  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> groups;
  std::vector<double> weights;
  for (auto& [rate, idx] : by_rate) {
    std::shuffle(idx.begin(), idx.end(), rng);
    weights.push_back(groups.size() < rate_mix.size() ? rate_mix[groups.size()] : 1.0);
    groups.push_back(std::move(idx));
  }

  std::vector<std::size_t> taken(groups.size(), 0);
  std::vector<std::size_t> order;
  order.reserve(samples.size());
  while (order.size() < samples.size()) {
    double active_weight = 0.0;
    for (std::size_t g = 0; g < groups.size(); ++g)
      if (taken[g] < groups[g].size()) active_weight += weights[g];
    // Pick the non-exhausted group furthest behind its share.
    std::size_t best = groups.size();
    double best_deficit = -std::numeric_limits<double>::infinity();
    const double next = static_cast<double>(order.size() + 1);
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (taken[g] >= groups[g].size()) continue;
      const double deficit = next * weights[g] / active_weight - static_cast<double>(taken[g]);
      if (deficit > best_deficit) {
        best_deficit = deficit;
        best = g;
      }
    }
    order.push_back(groups[best][taken[best]++]);
  }
  return order;
}

double mean_loss(const LossCurve& curve, std::size_t first, std::size_t last) {
  last = std::min(last, curve.size());
  if (first >= last) throw Error(ErrorKind::Parameter, "empty loss range");
  double s = 0.0;
  for (std::size_t i = first; i < last; ++i) s += curve[i].loss;
  return s / static_cast<double>(last - first);
}

LossCurve train_end_to_end(UNet<float>& net, const std::vector<data::Sample>& samples, const TrainConfig& cfg) {
  validate(cfg);
  require_samples(samples, "train_end_to_end");
  const auto inputs = prepared_inputs(samples, canonical_of(net.config()));
  std::vector<const Image*> targets;
  for (const auto& s : samples) targets.push_back(&s.depth);
  return fit_unet(net, samples, inputs, targets, cfg, cfg.seed);
}

EndToEndResult train_end_to_end(const std::vector<data::Sample>& samples, const models::UNetConfig& unet_cfg,
                                const TrainConfig& cfg) {
  UNet<float> net(with_train_params(unet_cfg, cfg), derive_seed(cfg.seed, 0x1Eu));
  EndToEndResult out;
  out.curve = train_end_to_end(net, samples, cfg);
  out.checkpoint = models::to_named_tensors(net.parameters());
  return out;
}

TwoStageModels::TwoStageModels(const models::UNetConfig& gen_cfg, const models::DiscriminatorConfig& disc_cfg,
                               const models::UNetConfig& depth_cfg, std::uint64_t seed)
    : generator(gen_cfg, derive_seed(seed, 0x61u)),
      discriminator(disc_cfg, derive_seed(seed, 0xD1u)),
      depth(depth_cfg, derive_seed(seed, 0xDEu)) {}

TwoStageResult train_two_stage(TwoStageModels& m, const std::vector<data::Sample>& samples, const TrainConfig& cfg,
                               bool stage2) {
  validate(cfg);
  require_samples(samples, "train_two_stage");
  if (m.generator.config().resolution != m.discriminator.config().resolution)
    throw Error(ErrorKind::Config, "generator and discriminator resolutions differ");

  const auto inputs = prepared_inputs(samples, canonical_of(m.generator.config()));
  std::vector<const Image*> fringes;
  for (const auto& s : samples) fringes.push_back(&s.fringe_hi);

  nn::Adam<float> opt_g(m.generator.parameter_tensors(), {.learning_rate = cfg.learning_rate});
  nn::Adam<float> opt_d(m.discriminator.parameter_tensors(), {.learning_rate = cfg.learning_rate});

  TwoStageResult out;
  for_each_batch(samples, cfg, cfg.seed, [&](int step, int epoch, const std::vector<std::size_t>& batch) {
    const auto z = gather(inputs, batch);
    const auto real = gather(fringes, batch);
    const auto fake =
        m.generator.forward(z, true, derive_seed(cfg.seed, kDropoutStream, static_cast<std::uint64_t>(step)));

    double loss_d = kNoValue;
    if (!cfg.freeze_discriminator) {
      const auto ld = models::loss_discriminator(m.discriminator.forward(z, real),
                                                 m.discriminator.forward(z, fake.detach()));
      opt_d.zero_grad();
      nn::backward(ld);
      opt_d.step();
      loss_d = finite_or_throw(ld.item(), "discriminator loss");
    }

    const auto gl = models::loss_generator(m.discriminator.forward(z, fake), fake, real);
    opt_g.zero_grad();
    nn::backward(gl.total);
    opt_g.step();
    // The generator pass also deposits gradients in the discriminator.
    opt_d.zero_grad();

    LossRecord rec{.step = step, .epoch = epoch, .loss = finite_or_throw(gl.total.item(), "generator loss")};
    rec.loss_d = loss_d;
    rec.loss_g = gl.adversarial.item();
    rec.structural = gl.structural.item();
    out.stage1.push_back(rec);
  });
  out.generator_checkpoint = models::to_named_tensors(m.generator.parameters());

  if (stage2) {
    std::vector<Image> fringe_inputs;
    fringe_inputs.reserve(samples.size());
    for (const auto& s : samples) fringe_inputs.push_back(models::prepare_image(s.fringe_hi, m.depth.config().resolution));
    std::vector<const Image*> depths;
    for (const auto& s : samples) depths.push_back(&s.depth);
    out.stage2 = fit_unet(m.depth, samples, fringe_inputs, depths, cfg, derive_seed(cfg.seed, kStage2Stream));
  }
  out.depth_checkpoint = models::to_named_tensors(m.depth.parameters());
  return out;
}

TwoStageResult train_two_stage(const std::vector<data::Sample>& samples, const models::UNetConfig& gen_cfg,
                               const models::DiscriminatorConfig& disc_cfg, const models::UNetConfig& depth_cfg,
                               const TrainConfig& cfg) {
  auto disc = disc_cfg;
  disc.leaky_slope = cfg.leaky_slope;
  TwoStageModels m(with_train_params(gen_cfg, cfg), disc, with_train_params(depth_cfg, cfg), cfg.seed);
  return train_two_stage(m, samples, cfg);
}

namespace {

Image run_eval(const UNet<float>& net, const Image& input) {
  const auto canonical = net.config().resolution;
  const Image prepared = models::prepare_image(input, canonical);
  const auto y = net.forward(models::stack_images<float>({&prepared}), false);
  const auto c = static_cast<std::size_t>(canonical);
  Image out(c, c);
  const auto v = y.values();
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] = std::clamp(static_cast<double>(v[i]), 0.0, 1.0);
  return out;
}

}  // namespace

Image infer_end_to_end(const UNet<float>& net, const Image& lowres) { return run_eval(net, lowres); }

TwoStageOutput infer_two_stage(const UNet<float>& generator, const UNet<float>& depth_net, const Image& lowres) {
  TwoStageOutput out;
  out.fringe = run_eval(generator, lowres);
  out.depth = run_eval(depth_net, out.fringe);
  return out;
}

}  // namespace spx::train
