#include "spx/models.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "spx/error.hpp"
#include "spx/rng.hpp"

namespace spx::models {

namespace {

constexpr double kInitSlope = 0.2;

template <typename T>
Conv<T> make_conv(int in_ch, int out_ch, int k, int stride, int padding, std::mt19937_64& rng) {
  // He-uniform weights with the leaky-ReLU gain; zero bias.
  const double bound = std::sqrt(6.0 / ((1.0 + kInitSlope * kInitSlope) * static_cast<double>(in_ch * k * k)));
  std::uniform_real_distribution<double> init(-bound, bound);
  std::vector<T> w(static_cast<std::size_t>(out_ch * in_ch * k * k));
  for (auto& v : w) v = static_cast<T>(init(rng));
  std::vector<T> b(static_cast<std::size_t>(out_ch), T(0));
  Conv<T> conv;
  conv.weight = Tensor<T>::from_values({static_cast<std::size_t>(out_ch), static_cast<std::size_t>(in_ch),
                                        static_cast<std::size_t>(k), static_cast<std::size_t>(k)},
                                       std::move(w), true);
  conv.bias = Tensor<T>::from_values({static_cast<std::size_t>(out_ch)}, std::move(b), true);
  conv.stride = stride;
  conv.padding = padding;
  return conv;
}


}  // namespace

UNetConfig UNetConfig::full_topology() {
  UNetConfig cfg;
  cfg.levels = 6;
  return cfg;
}

void validate(const UNetConfig& cfg) {
  if (cfg.levels < 1) throw Error(ErrorKind::Config, "U-Net needs at least one level");
  if (cfg.base_channels < 1 || cfg.in_channels < 1 || cfg.out_channels < 1)
    throw Error(ErrorKind::Config, "U-Net channel counts must be positive");
  if (cfg.levels > 30 || cfg.resolution < 1 || cfg.resolution % (1 << cfg.levels) != 0)
    throw Error(ErrorKind::Config, "resolution " + std::to_string(cfg.resolution) +
                                       " is not divisible by 2^" + std::to_string(cfg.levels));
  if (!(cfg.dropout >= 0.0 && cfg.dropout < 1.0)) throw Error(ErrorKind::Config, "dropout must be in [0, 1)");
  if (!(cfg.leaky_slope >= 0.0 && cfg.leaky_slope < 1.0))
    throw Error(ErrorKind::Config, "leaky slope must be in [0, 1)");
}

int DiscriminatorConfig::patch_size() const {
  // 4x4 stride-2 stack: rf = 1 + 3 * (2^layers - 1)
  return 1 + 3 * ((1 << layers) - 1);
}

void validate(const DiscriminatorConfig& cfg) {
  if (cfg.layers < 1 || cfg.layers > 20) throw Error(ErrorKind::Config, "discriminator needs 1..20 layers");
  if (cfg.base_channels < 1 || cfg.in_channels < 1)
    throw Error(ErrorKind::Config, "discriminator channel counts must be positive");
  if (cfg.resolution % (1 << cfg.layers) != 0 || cfg.resolution >> cfg.layers < 1)
    throw Error(ErrorKind::Config, "discriminator resolution must be divisible by 2^layers");
  if (cfg.patch_size() >= cfg.resolution)
    throw Error(ErrorKind::Config, "discriminator patch size must be smaller than the input");
}

template <typename T>
Tensor<T> Conv<T>::operator()(const Tensor<T>& x) const {
  return nn::conv2d(x, weight, bias, stride, padding);
}

// ---------------------------------------------------------------------------
// U-Net

template <typename T>
int UNet<T>::encoder_channels(int level) const {
  return cfg_.base_channels << std::min(level - 1, 3);
}

template <typename T>
int UNet<T>::decoder_channels(int level) const {
  return level == 0 ? cfg_.base_channels : encoder_channels(level);
}

template <typename T>
UNet<T>::UNet(const UNetConfig& cfg, std::uint64_t init_seed) : cfg_(cfg) {
  validate(cfg_);
  std::mt19937_64 rng(init_seed);
  int in = cfg_.in_channels;
  for (int k = 1; k <= cfg_.levels; ++k) {
    down_.push_back(make_conv<T>(in, encoder_channels(k), 4, 2, 1, rng));
    in = encoder_channels(k);
  }
  up_.resize(static_cast<std::size_t>(cfg_.levels));
  // Decoder input at level k: the deepest block sees the bottleneck, the
  // others see the previous decoder output concatenated with its skip.
  for (int k = cfg_.levels - 1; k >= 0; --k) {
    const int from = k == cfg_.levels - 1 ? encoder_channels(cfg_.levels)
                                          : decoder_channels(k + 1) + encoder_channels(k + 1);
    up_[static_cast<std::size_t>(k)] = make_conv<T>(from, decoder_channels(k), 3, 1, 1, rng);
  }
  head_ = make_conv<T>(decoder_channels(0) + cfg_.in_channels, cfg_.out_channels, 1, 1, 0, rng);
}

template <typename T>
Tensor<T> UNet<T>::forward(const Tensor<T>& x, bool training, std::uint64_t dropout_seed) const {
  if (x.rank() != 4 || x.dim(1) != static_cast<std::size_t>(cfg_.in_channels) ||
      x.dim(2) != static_cast<std::size_t>(cfg_.resolution) || x.dim(3) != static_cast<std::size_t>(cfg_.resolution))
    throw Error(ErrorKind::Shape, "U-Net input " + nn::shape_string(x.shape()) + " does not match config");
  const T slope = static_cast<T>(cfg_.leaky_slope);
  std::vector<Tensor<T>> skips{x};
  Tensor<T> h = x;
  for (const auto& conv : down_) {
    h = nn::leaky_relu(conv(h), slope);
    skips.push_back(h);
  }
  for (int k = cfg_.levels - 1; k >= 0; --k) {
    h = nn::relu(up_[static_cast<std::size_t>(k)](nn::upsample_nearest(h, 2)));
    const int depth_from_bottom = cfg_.levels - 1 - k;
    // Dropout on the deepest half of the decoder: 3 blocks at six levels.
    if (k >= 1 && depth_from_bottom < cfg_.levels / 2)
      h = nn::dropout(h, cfg_.dropout, training, derive_seed(dropout_seed, 0xD0u, static_cast<std::uint64_t>(k)));
    h = nn::concat_channels(h, skips[static_cast<std::size_t>(k)]);
  }
  return nn::sigmoid(head_(h));
}

template <typename T>
std::vector<NamedParam<T>> UNet<T>::parameters() const {
  std::vector<NamedParam<T>> out;
  for (std::size_t i = 0; i < down_.size(); ++i) {
    out.push_back({"down" + std::to_string(i + 1) + ".weight", down_[i].weight});
    out.push_back({"down" + std::to_string(i + 1) + ".bias", down_[i].bias});
  }
  for (int k = cfg_.levels - 1; k >= 0; --k) {
    out.push_back({"up" + std::to_string(k) + ".weight", up_[static_cast<std::size_t>(k)].weight});
    out.push_back({"up" + std::to_string(k) + ".bias", up_[static_cast<std::size_t>(k)].bias});
  }
  out.push_back({"head.weight", head_.weight});
  out.push_back({"head.bias", head_.bias});
  return out;
}

template <typename T>
std::vector<Tensor<T>> UNet<T>::parameter_tensors() const {
  std::vector<Tensor<T>> out;
  for (auto& p : parameters()) out.push_back(p.tensor);
  return out;
}

template <typename T>
std::size_t UNet<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p.tensor.numel();
  return n;
}

// ---------------------------------------------------------------------------
// Patch discriminator

template <typename T>
PatchDiscriminator<T>::PatchDiscriminator(const DiscriminatorConfig& cfg, std::uint64_t init_seed) : cfg_(cfg) {
  validate(cfg_);
  std::mt19937_64 rng(init_seed);
  int in = cfg_.in_channels;
  for (int i = 0; i < cfg_.layers; ++i) {
    const int out = i + 1 == cfg_.layers ? 1 : cfg_.base_channels << std::min(i, 3);
    layers_.push_back(make_conv<T>(in, out, 4, 2, 1, rng));
    in = out;
  }
}

template <typename T>
int PatchDiscriminator<T>::output_size() const {
  return cfg_.resolution >> cfg_.layers;
}

template <typename T>
Tensor<T> PatchDiscriminator<T>::forward(const Tensor<T>& condition, const Tensor<T>& candidate) const {
  Tensor<T> h = nn::concat_channels(condition, candidate);
  if (h.dim(1) != static_cast<std::size_t>(cfg_.in_channels))
    throw Error(ErrorKind::Shape, "discriminator expects " + std::to_string(cfg_.in_channels) + " input channels");
  const T slope = static_cast<T>(cfg_.leaky_slope);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    h = layers_[i](h);
    if (i + 1 < layers_.size()) h = nn::leaky_relu(h, slope);
  }
  return h;
}

template <typename T>
std::vector<NamedParam<T>> PatchDiscriminator<T>::parameters() const {
  std::vector<NamedParam<T>> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    out.push_back({"disc" + std::to_string(i + 1) + ".weight", layers_[i].weight});
    out.push_back({"disc" + std::to_string(i + 1) + ".bias", layers_[i].bias});
  }
  return out;
}

template <typename T>
std::vector<Tensor<T>> PatchDiscriminator<T>::parameter_tensors() const {
  std::vector<Tensor<T>> out;
  for (auto& p : parameters()) out.push_back(p.tensor);
  return out;
}

template <typename T>
std::size_t PatchDiscriminator<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p.tensor.numel();
  return n;
}

// ---------------------------------------------------------------------------
// Losses

template <typename T>
Tensor<T> loss_unet(const Tensor<T>& pred, const Tensor<T>& real) {
  return nn::add_scalar(nn::scale(nn::ssim(pred, real), T(-1)), T(1));
}

template <typename T>
GeneratorLoss<T> loss_generator(const Tensor<T>& disc_out, const Tensor<T>& gen_out, const Tensor<T>& real_fringe) {
  GeneratorLoss<T> out;
  out.adversarial = nn::mse(disc_out, Tensor<T>::full(disc_out.shape(), T(1)));
  out.structural = loss_unet(gen_out, real_fringe);
  out.total = nn::add(out.adversarial, nn::scale(out.structural, static_cast<T>(kStructuralWeight)));
  return out;
}

template <typename T>
Tensor<T> loss_discriminator(const Tensor<T>& score_real, const Tensor<T>& score_fake) {
  return nn::add(nn::mse(score_real, Tensor<T>::full(score_real.shape(), T(1))),
                 nn::mse(score_fake, Tensor<T>::zeros(score_fake.shape())));
}

// ---------------------------------------------------------------------------
// Data plumbing

Image prepare_image(const Image& lowres, int canonical) {
  if (canonical < 1 || lowres.height() == 0 || lowres.width() == 0)
    throw Error(ErrorKind::Resize, "invalid canonical size or empty image");
  const auto c = static_cast<std::size_t>(canonical);
  if (c % lowres.height() != 0 || c % lowres.width() != 0)
    throw Error(ErrorKind::Resize, "canonical size " + std::to_string(canonical) + " is not divisible by " +
                                       std::to_string(lowres.height()) + "x" + std::to_string(lowres.width()));
  const std::size_t fy = c / lowres.height();
  const std::size_t fx = c / lowres.width();
  Image out(c, c);
  for (std::size_t r = 0; r < c; ++r)
    for (std::size_t col = 0; col < c; ++col) out(r, col) = std::clamp(lowres(r / fy, col / fx), 0.0, 1.0);
  return out;
}

Tensor<float> prepare_input(const detector::LowResFringe& lowres, int canonical) {
  const Image img = prepare_image(lowres.values, canonical);
  return stack_images<float>({&img});
}

template <typename T>
Tensor<T> stack_images(const std::vector<const Image*>& images) {
  if (images.empty()) throw Error(ErrorKind::Data, "cannot stack an empty image list");
  const std::size_t h = images.front()->height(), w = images.front()->width();
  std::vector<T> values;
  values.reserve(images.size() * h * w);
  for (const auto* img : images) {
    if (img->height() != h || img->width() != w) throw Error(ErrorKind::Shape, "stacked images differ in size");
    for (double v : img->values()) values.push_back(static_cast<T>(v));
  }
  return Tensor<T>::from_values({images.size(), 1, h, w}, std::move(values));
}

template <typename T>
std::vector<nn::NamedTensor> to_named_tensors(const std::vector<NamedParam<T>>& params) {
  std::vector<nn::NamedTensor> out;
  out.reserve(params.size());
  for (const auto& p : params) {
    nn::NamedTensor t{p.name, p.tensor.shape(), {}};
    t.values.reserve(p.tensor.numel());
    for (T v : p.tensor.values()) t.values.push_back(static_cast<float>(v));
    out.push_back(std::move(t));
  }
  return out;
}

template <typename T>
void load_into(const std::vector<NamedParam<T>>& params, const std::vector<nn::NamedTensor>& stored) {
  if (params.size() != stored.size())
    throw Error(ErrorKind::Load, "checkpoint has " + std::to_string(stored.size()) + " tensors, model expects " +
                                     std::to_string(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    const auto& s = stored[i];
    if (p.name != s.name || p.tensor.shape() != s.shape)
      throw Error(ErrorKind::Load, "checkpoint tensor '" + s.name + "' " + nn::shape_string(s.shape) +
                                       " does not match model tensor '" + p.name + "' " +
                                       nn::shape_string(p.tensor.shape()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto dst = Tensor<T>(params[i].tensor).mutable_values();
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = static_cast<T>(stored[i].values[j]);
  }
}

template <typename Dst, typename Src>
void copy_parameters(const std::vector<NamedParam<Dst>>& dst, const std::vector<NamedParam<Src>>& src) {
  if (dst.size() != src.size()) throw Error(ErrorKind::Shape, "parameter lists differ in length");
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (dst[i].tensor.shape() != src[i].tensor.shape())
      throw Error(ErrorKind::Shape, "parameter '" + dst[i].name + "' differs in shape");
    auto out = Tensor<Dst>(dst[i].tensor).mutable_values();
    const auto in = src[i].tensor.values();
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = static_cast<Dst>(in[j]);
  }
}

#define SPX_INSTANTIATE(T)                                                                             \
  template struct Conv<T>;                                                                             \
  template class UNet<T>;                                                                              \
  template class PatchDiscriminator<T>;                                                                \
  template Tensor<T> loss_unet(const Tensor<T>&, const Tensor<T>&);                                    \
  template GeneratorLoss<T> loss_generator(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);      \
  template Tensor<T> loss_discriminator(const Tensor<T>&, const Tensor<T>&);                           \
  template Tensor<T> stack_images(const std::vector<const Image*>&);                                  \
  template std::vector<nn::NamedTensor> to_named_tensors(const std::vector<NamedParam<T>>&);          \
  template void load_into(const std::vector<NamedParam<T>>&, const std::vector<nn::NamedTensor>&);

SPX_INSTANTIATE(float)
SPX_INSTANTIATE(double)
#undef SPX_INSTANTIATE

template void copy_parameters(const std::vector<NamedParam<float>>&, const std::vector<NamedParam<double>>&);
template void copy_parameters(const std::vector<NamedParam<double>>&, const std::vector<NamedParam<float>>&);
template void copy_parameters(const std::vector<NamedParam<float>>&, const std::vector<NamedParam<float>>&);
template void copy_parameters(const std::vector<NamedParam<double>>&, const std::vector<NamedParam<double>>&);

}  // namespace spx::models
