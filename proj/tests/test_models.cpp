#include <cmath>
#include <random>

#include "doctest.h"
#include "spx/error.hpp"
#include "spx/models.hpp"

using namespace spx;
using namespace spx::models;
using nn::Shape;

namespace {

Tensor<float> random_input(Shape shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::vector<float> v(nn::numel(shape));
  for (auto& x : v) x = u(rng);
  return Tensor<float>::from_values(std::move(shape), std::move(v));
}

UNetConfig small(int levels, int base, int in, int resolution) {
  UNetConfig c;
  c.levels = levels;
  c.base_channels = base;
  c.in_channels = in;
  c.resolution = resolution;
  return c;
}

}  // namespace

TEST_CASE("six-level topology reaches a 1x1 bottleneck at 64x64") {
  const auto cfg = UNetConfig::full_topology();
  CHECK(cfg.levels == 6);
  CHECK((cfg.resolution >> cfg.levels) == 1);
  const UNet<float> net(cfg, 1);
  const auto y = net.forward(random_input({1, 1, 64, 64}, 2), false);
  CHECK(y.shape() == Shape{1, 1, 64, 64});
  auto deeper = cfg;
  deeper.levels = 7;
  CHECK_THROWS_AS(validate(deeper), Error);
}

TEST_CASE("parameter counts match a hand count") {
  // down1 2->1 4x4: 33; up0 1->1 3x3: 10; head 3->1 1x1: 4.
  CHECK(UNet<float>(small(1, 1, 2, 8), 0).parameter_count() == 47);
  // down 1->2: 34, 2->4: 132; up1 4->2: 74; up0 4->2: 74; head 3->1: 4.
  CHECK(UNet<float>(small(2, 2, 1, 8), 0).parameter_count() == 318);
  DiscriminatorConfig d;
  d.layers = 2;
  d.base_channels = 3;
  d.resolution = 16;
  // 2->3 4x4: 99; 3->1 4x4: 49.
  CHECK(PatchDiscriminator<float>(d, 0).parameter_count() == 148);
}

TEST_CASE("output is a sigmoid map") {
  const UNet<float> net(small(3, 4, 1, 32), 5);
  const auto y = net.forward(Tensor<float>::zeros({2, 1, 32, 32}), false);
  for (float v : y.values()) {
    CHECK(v > 0.0f);
    CHECK(v < 1.0f);
  }
  CHECK_THROWS_AS(net.forward(Tensor<float>::zeros({1, 1, 16, 16}), false), Error);
  CHECK_THROWS_AS(net.forward(Tensor<float>::zeros({1, 2, 32, 32}), false), Error);
}

TEST_CASE("discriminator produces a patch score map") {
  DiscriminatorConfig d;
  const PatchDiscriminator<float> disc(d, 3);
  CHECK(disc.output_size() == 8);
  CHECK(d.patch_size() == 22);
  const auto s = disc.forward(random_input({2, 1, 64, 64}, 1), random_input({2, 1, 64, 64}, 2));
  CHECK(s.shape() == Shape{2, 1, 8, 8});
  d.layers = 6;
  CHECK_THROWS_AS(validate(d), Error);
}

TEST_CASE("loss identities") {
  const auto a = random_input({1, 1, 8, 8}, 7);
  CHECK(loss_unet(a, a).item() == doctest::Approx(0.0).epsilon(1e-6).scale(1.0));
  const auto zeros = Tensor<float>::zeros({1, 1, 4, 4});
  const auto ones = Tensor<float>::full({1, 1, 4, 4}, 1.0f);
  const auto half = Tensor<float>::full({1, 1, 4, 4}, 0.5f);
  CHECK(loss_discriminator(ones, zeros).item() == 0.0f);
  CHECK(loss_discriminator(zeros, ones).item() == 2.0f);
  CHECK(loss_discriminator(half, half).item() == 0.5f);

  const auto g = loss_generator(ones, a, a);
  CHECK(g.adversarial.item() == 0.0f);
  CHECK(g.total.item() == doctest::Approx(0.0).epsilon(1e-4).scale(1.0));
  const auto g2 = loss_generator(zeros, a, a);
  CHECK(g2.adversarial.item() == 1.0f);
  const auto b = random_input({1, 1, 8, 8}, 8);
  const auto g3 = loss_generator(half, a, b);
  CHECK(g3.structural.item() == doctest::Approx(1.0f - nn::ssim(a, b).item()).epsilon(1e-6));
  CHECK(g3.total.item() ==
        doctest::Approx(g3.adversarial.item() + kStructuralWeight * g3.structural.item()).epsilon(1e-6));
  CHECK(g3.adversarial.item() == 0.25f);
}

TEST_CASE("prepare_image replicates pixels per axis") {
  Image lo(16, 16);
  for (std::size_t i = 0; i < lo.size(); ++i) lo.values()[i] = static_cast<double>(i % 7) / 6.0;
  const auto up = prepare_image(lo, 64);
  REQUIRE(up.height() == 64);
  for (std::size_t r = 0; r < 64; ++r)
    for (std::size_t c = 0; c < 64; ++c) CHECK(up(r, c) == lo(r / 4, c / 4));

  Image wide(32, 64, 0.0);
  wide(3, 10) = 1.0;
  const auto w = prepare_image(wide, 64);
  CHECK(w(6, 10) == 1.0);
  CHECK(w(7, 10) == 1.0);
  CHECK(w(7, 11) == 0.0);
  CHECK(prepare_image(Image(64, 64, 0.25), 64) == Image(64, 64, 0.25));

  try {
    prepare_image(Image(24, 64, 0.0), 64);
    FAIL("expected a resize error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Resize);
  }
  CHECK_THROWS_AS(prepare_image(Image(128, 128, 0.0), 64), Error);

  detector::LowResFringe f{Image(32, 32, 1.0), true};
  const auto t = prepare_input(f, 64);
  CHECK(t.shape() == Shape{1, 1, 64, 64});
}

TEST_CASE("stack_images builds a batch") {
  const Image a(4, 4, 0.25), b(4, 4, 0.75);
  const auto t = stack_images<float>({&a, &b});
  CHECK(t.shape() == Shape{2, 1, 4, 4});
  CHECK(t.values()[0] == 0.25f);
  CHECK(t.values()[16] == 0.75f);
  const Image c(2, 4, 0.0);
  CHECK_THROWS_AS(stack_images<float>({&a, &c}), Error);
}

TEST_CASE("checkpoint load restores behaviour and rejects mismatches") {
  const UNet<float> a(small(2, 2, 1, 16), 1);
  const UNet<float> b(small(2, 2, 1, 16), 2);
  const auto x = random_input({1, 1, 16, 16}, 3);
  const auto ya = a.forward(x, false);
  const auto yb0 = b.forward(x, false);
  CHECK(std::vector<float>(ya.values().begin(), ya.values().end()) !=
        std::vector<float>(yb0.values().begin(), yb0.values().end()));
  const auto stored = to_named_tensors(a.parameters());
  load_into(b.parameters(), stored);
  const auto yb = b.forward(x, false);
  for (std::size_t i = 0; i < ya.numel(); ++i) CHECK(ya.values()[i] == yb.values()[i]);

  const UNet<float> other(small(2, 3, 1, 16), 1);
  try {
    load_into(other.parameters(), stored);
    FAIL("expected a load error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Load);
  }
  auto renamed = stored;
  renamed[0].name = "bogus";
  CHECK_THROWS_AS(load_into(b.parameters(), renamed), Error);
  renamed = stored;
  renamed.pop_back();
  CHECK_THROWS_AS(load_into(b.parameters(), renamed), Error);
}

TEST_CASE("parameters copy between precisions") {
  const UNet<float> f(small(2, 2, 1, 16), 1);
  const UNet<double> d(small(2, 2, 1, 16), 9);
  copy_parameters(d.parameters(), f.parameters());
  const auto x = random_input({1, 1, 16, 16}, 4);
  const auto xd = Tensor<double>::from_values(x.shape(), std::vector<double>(x.values().begin(), x.values().end()));
  const auto yf = f.forward(x, false);
  const auto yd = d.forward(xd, false);
  for (std::size_t i = 0; i < yf.numel(); ++i) CHECK(yf.values()[i] == doctest::Approx(yd.values()[i]).epsilon(1e-5));
}

TEST_CASE("batched forward equals per-sample forward") {
  const UNet<float> net(small(3, 4, 1, 32), 11);
  const auto x = random_input({3, 1, 32, 32}, 12);
  const auto y = net.forward(x, false);
  for (std::size_t n = 0; n < 3; ++n) {
    const std::size_t stride = 32 * 32;
    const auto xn = Tensor<float>::from_values(
        {1, 1, 32, 32}, std::vector<float>(x.values().begin() + n * stride, x.values().begin() + (n + 1) * stride));
    const auto yn = net.forward(xn, false);
    for (std::size_t i = 0; i < stride; ++i) CHECK(yn.values()[i] == y.values()[n * stride + i]);
  }
}

TEST_CASE("training-mode dropout is seeded") {
  const UNet<float> net(small(3, 4, 1, 32), 13);
  const auto x = random_input({1, 1, 32, 32}, 14);
  const auto a = net.forward(x, true, 5), b = net.forward(x, true, 5), c = net.forward(x, true, 6);
  const auto va = std::vector<float>(a.values().begin(), a.values().end());
  CHECK(va == std::vector<float>(b.values().begin(), b.values().end()));
  CHECK(va != std::vector<float>(c.values().begin(), c.values().end()));
}

TEST_CASE("every parameter receives a gradient") {
  const UNet<float> net(small(3, 4, 1, 32), 15);
  const auto x = random_input({2, 1, 32, 32}, 16);
  const auto target = random_input({2, 1, 32, 32}, 17);
  nn::backward(loss_unet(net.forward(x, true, 1), target));
  for (const auto& p : net.parameters()) {
    INFO(p.name);
    REQUIRE(p.tensor.grad().size() == p.tensor.numel());
    bool nonzero = false;
    for (float g : p.tensor.grad()) nonzero = nonzero || g != 0.0f;
    CHECK(nonzero);
  }
}

TEST_CASE("parameter names are unique") {
  const UNet<float> net(small(3, 4, 1, 32), 1);
  std::vector<std::string> names;
  for (const auto& p : net.parameters()) names.push_back(p.name);
  std::sort(names.begin(), names.end());
  CHECK(std::adjacent_find(names.begin(), names.end()) == names.end());
  CHECK(names.size() == 2 * (3 + 3 + 1));
}

TEST_CASE("summed per-sample losses equal the batch loss times the batch size") {
  const UNet<float> net(small(2, 2, 1, 16), 21);
  for (std::uint64_t trial = 0; trial < 5; ++trial) {
    const std::size_t n = 2 + trial;
    const auto x = random_input({n, 1, 16, 16}, 30 + trial);
    const auto target = random_input({n, 1, 16, 16}, 40 + trial);
    const auto y = net.forward(x, false);
    const double batch = loss_unet(y, target).item();
    const std::size_t stride = 16 * 16;
    double summed = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto slice = [&](const Tensor<float>& t) {
        return Tensor<float>::from_values({1, 1, 16, 16}, std::vector<float>(t.values().begin() + i * stride,
                                                                              t.values().begin() + (i + 1) * stride));
      };
      summed += loss_unet(slice(y), slice(target)).item();
    }
    CHECK(std::abs(summed - batch * static_cast<double>(n)) <= 1e-5 * std::abs(summed));
  }
}

TEST_CASE("random batches reach every parameter") {
  int healthy = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const UNet<float> net(small(2, 2, 1, 16), 100 + trial);
    nn::backward(loss_unet(net.forward(random_input({2, 1, 16, 16}, 200 + trial), true, trial),
                           random_input({2, 1, 16, 16}, 300 + trial)));
    bool all = true;
    for (const auto& p : net.parameters()) {
      bool nonzero = false;
      for (float g : p.tensor.grad()) nonzero = nonzero || g != 0.0f;
      all = all && nonzero;
    }
    healthy += all ? 1 : 0;
  }
  CHECK(healthy >= 99);
}
