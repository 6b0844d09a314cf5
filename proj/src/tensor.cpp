#include "spx/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <unordered_set>

#include "spx/error.hpp"

namespace spx::nn {

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ']';
  return os.str();
}

namespace {

template <typename T>
using NodePtr = std::shared_ptr<detail::Node<T>>;

template <typename T>
void check_finite(const std::vector<T>& values, const char* op) {
  for (T v : values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::Numeric, std::string("non-finite value produced by ") + op);
  }
}

// Builds a result node; the backward closure is only kept when some parent
// participates in differentiation.
template <typename T>
Tensor<T> make_result(Shape shape, std::vector<T> value, std::vector<NodePtr<T>> parents,
                      std::function<void(detail::Node<T>&)> backward_fn, const char* op) {
  check_finite(value, op);
  auto node = std::make_shared<detail::Node<T>>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  const bool any = std::any_of(parents.begin(), parents.end(),
                               [](const NodePtr<T>& p) { return p->requires_grad; });
  if (any) {
    node->requires_grad = true;
    node->parents = std::move(parents);
    node->backward = std::move(backward_fn);
  }
  return Tensor<T>::wrap(std::move(node));
}

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  if (a.shape() != b.shape())
    throw Error(ErrorKind::Shape, std::string(op) + ": shape mismatch " + shape_string(a.shape()) +
                                      " vs " + shape_string(b.shape()));
}

template <typename T>
void require_rank4(const Tensor<T>& x, const char* op) {
  if (x.rank() != 4)
    throw Error(ErrorKind::Shape, std::string(op) + ": expected NCHW tensor, got " + shape_string(x.shape()));
}

// Per-sample SSIM statistics and partial derivatives.
struct SsimTerms {
  double value = 0.0;
  double mu_u = 0.0, mu_v = 0.0, var_u = 0.0, var_v = 0.0, cov = 0.0;
};

template <typename U>
SsimTerms ssim_terms(const U* u, const U* v, std::size_t n) {
  SsimTerms t;
  double su = 0.0, sv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    su += static_cast<double>(u[i]);
    sv += static_cast<double>(v[i]);
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  t.mu_u = su * inv_n;
  t.mu_v = sv * inv_n;
  double vu = 0.0, vv = 0.0, cuv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double du = static_cast<double>(u[i]) - t.mu_u;
    const double dv = static_cast<double>(v[i]) - t.mu_v;
    vu += du * du;
    vv += dv * dv;
    cuv += du * dv;
  }
  t.var_u = vu * inv_n;
  t.var_v = vv * inv_n;
  t.cov = cuv * inv_n;
  const double a = 2.0 * t.mu_u * t.mu_v + kSsimC1;
  const double b = 2.0 * t.cov + kSsimC2;
  const double c = t.mu_u * t.mu_u + t.mu_v * t.mu_v + kSsimC1;
  const double d = t.var_u + t.var_v + kSsimC2;
  t.value = (a * b) / (c * d);
  return t;
}

}  // namespace

double ssim_value(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size() || u.empty())
    throw Error(ErrorKind::Shape, "ssim: inputs must be non-empty and equally sized");
  return ssim_terms(u.data(), v.data(), u.size()).value;
}

// ---------------------------------------------------------------------------
// Tensor

template <typename T>
Tensor<T> Tensor<T>::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), T(0), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::full(Shape shape, T value, bool requires_grad) {
  const auto n = nn::numel(shape);
  return from_values(std::move(shape), std::vector<T>(n, value), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::from_values(Shape shape, std::vector<T> values, bool requires_grad) {
  if (nn::numel(shape) != values.size())
    throw Error(ErrorKind::Shape, "tensor of shape " + shape_string(shape) + " given " +
                                      std::to_string(values.size()) + " values");
  check_finite(values, "tensor construction");
  auto node = std::make_shared<detail::Node<T>>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  return wrap(std::move(node));
}

template <typename T>
Tensor<T> Tensor<T>::scalar(T value) {
  return from_values({1}, {value});
}

template <typename T>
T Tensor<T>::item() const {
  if (numel() != 1) throw Error(ErrorKind::Shape, "item() on tensor of shape " + shape_string(shape()));
  return node_->value[0];
}

template <typename T>
Tensor<T> Tensor<T>::detach() const {
  return from_values(shape(), node_->value, false);
}

// ---------------------------------------------------------------------------
// Elementwise ops

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "add");
  std::vector<T> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] + b.values()[i];
  return make_result<T>(a.shape(), std::move(out), {a.node(), b.node()},
                        [](detail::Node<T>& self) {
                          for (auto& p : self.parents) {
                            if (!p->requires_grad) continue;
                            p->ensure_grad();
                            for (std::size_t i = 0; i < self.grad.size(); ++i) p->grad[i] += self.grad[i];
                          }
                        },
                        "add");
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "sub");
  std::vector<T> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] - b.values()[i];
  return make_result<T>(a.shape(), std::move(out), {a.node(), b.node()},
                        [](detail::Node<T>& self) {
                          const T sign[2] = {T(1), T(-1)};
                          for (std::size_t k = 0; k < 2; ++k) {
                            auto& p = self.parents[k];
                            if (!p->requires_grad) continue;
                            p->ensure_grad();
                            for (std::size_t i = 0; i < self.grad.size(); ++i)
                              p->grad[i] += sign[k] * self.grad[i];
                          }
                        },
                        "sub");
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
  std::vector<T> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] * factor;
  return make_result<T>(a.shape(), std::move(out), {a.node()},
                        [factor](detail::Node<T>& self) {
                          auto& p = self.parents[0];
                          p->ensure_grad();
                          for (std::size_t i = 0; i < self.grad.size(); ++i) p->grad[i] += factor * self.grad[i];
                        },
                        "scale");
}

template <typename T>
Tensor<T> add_scalar(const Tensor<T>& a, T offset) {
  std::vector<T> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] + offset;
  return make_result<T>(a.shape(), std::move(out), {a.node()},
                        [](detail::Node<T>& self) {
                          auto& p = self.parents[0];
                          p->ensure_grad();
                          for (std::size_t i = 0; i < self.grad.size(); ++i) p->grad[i] += self.grad[i];
                        },
                        "add_scalar");
}

template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& x, T slope) {
  if (!(slope >= T(0) && slope < T(1)))
    throw Error(ErrorKind::Parameter, "leaky_relu slope must be in [0, 1)");
  std::vector<T> out(x.numel());
  const auto in = x.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = in[i] >= T(0) ? in[i] : slope * in[i];
  return make_result<T>(x.shape(), std::move(out), {x.node()},
                        [slope](detail::Node<T>& self) {
                          auto& p = self.parents[0];
                          p->ensure_grad();
                          for (std::size_t i = 0; i < self.grad.size(); ++i)
                            p->grad[i] += (p->value[i] >= T(0) ? T(1) : slope) * self.grad[i];
                        },
                        "leaky_relu");
}

template <typename T>
Tensor<T> relu(const Tensor<T>& x) {
  return leaky_relu(x, T(0));
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x) {
  std::vector<T> out(x.numel());
  const auto in = x.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = T(1) / (T(1) + std::exp(-in[i]));
  return make_result<T>(x.shape(), std::move(out), {x.node()},
                        [](detail::Node<T>& self) {
                          auto& p = self.parents[0];
                          p->ensure_grad();
                          for (std::size_t i = 0; i < self.grad.size(); ++i) {
                            const T s = self.value[i];
                            p->grad[i] += s * (T(1) - s) * self.grad[i];
                          }
                        },
                        "sigmoid");
}

template <typename T>
Tensor<T> dropout(const Tensor<T>& x, double p, bool training, std::uint64_t seed) {
  if (!(p >= 0.0 && p < 1.0)) throw Error(ErrorKind::Parameter, "dropout probability must be in [0, 1)");
  if (!training || p == 0.0) return x;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep(1.0 - p);
  const T survivor_scale = static_cast<T>(1.0 / (1.0 - p));
  std::vector<T> mask(x.numel());
  for (auto& m : mask) m = keep(rng) ? survivor_scale : T(0);
  std::vector<T> out(x.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.values()[i] * mask[i];
  return make_result<T>(x.shape(), std::move(out), {x.node()},
                        [mask = std::move(mask)](detail::Node<T>& self) {
                          auto& par = self.parents[0];
                          par->ensure_grad();
                          for (std::size_t i = 0; i < self.grad.size(); ++i) par->grad[i] += mask[i] * self.grad[i];
                        },
                        "dropout");
}

// ---------------------------------------------------------------------------
// Reductions

template <typename T>
Tensor<T> sum(const Tensor<T>& x) {
  double total = 0.0;
  for (T v : x.values()) total += static_cast<double>(v);
  return make_result<T>({1}, {static_cast<T>(total)}, {x.node()},
                        [](detail::Node<T>& self) {
                          auto& p = self.parents[0];
                          p->ensure_grad();
                          for (auto& g : p->grad) g += self.grad[0];
                        },
                        "sum");
}

template <typename T>
Tensor<T> mean(const Tensor<T>& x) {
  double total = 0.0;
  for (T v : x.values()) total += static_cast<double>(v);
  const double n = static_cast<double>(x.numel());
  return make_result<T>({1}, {static_cast<T>(total / n)}, {x.node()},
                        [n](detail::Node<T>& self) {
                          auto& p = self.parents[0];
                          p->ensure_grad();
                          const T g = static_cast<T>(static_cast<double>(self.grad[0]) / n);
                          for (auto& pg : p->grad) pg += g;
                        },
                        "mean");
}

// ---------------------------------------------------------------------------
// Convolution

namespace {

struct ConvGeometry {
  std::size_t batch, in_ch, out_ch, in_h, in_w, out_h, out_w, k;
  int stride, pad;
};

// Output columns [lo, hi) whose input column ox * stride - pad + kx is valid.
inline void valid_range(int k_off, int stride, int pad, std::size_t in_len, std::size_t out_len,
                        std::size_t& lo, std::size_t& hi) {
  const int first = pad - k_off;  // need ox * stride >= first
  int l = first <= 0 ? 0 : (first + stride - 1) / stride;
  const int last = static_cast<int>(in_len) - 1 + pad - k_off;  // need ox * stride <= last
  int h = last < 0 ? -1 : last / stride;
  h = std::min(h, static_cast<int>(out_len) - 1);
  l = std::max(l, 0);
  lo = static_cast<std::size_t>(l);
  hi = h < l ? lo : static_cast<std::size_t>(h + 1);
}

// Visits every (input index, output index, kernel index) triple of the
// cross-correlation, innermost over output columns.
template <typename F>
void for_each_tap(const ConvGeometry& g, F&& f) {
  const std::size_t in_plane = g.in_h * g.in_w;
  const std::size_t out_plane = g.out_h * g.out_w;
  const std::size_t kk = g.k * g.k;
  for (std::size_t n = 0; n < g.batch; ++n)
    for (std::size_t o = 0; o < g.out_ch; ++o)
      for (std::size_t c = 0; c < g.in_ch; ++c) {
        const std::size_t in_base = (n * g.in_ch + c) * in_plane;
        const std::size_t out_base = (n * g.out_ch + o) * out_plane;
        const std::size_t w_base = (o * g.in_ch + c) * kk;
        for (std::size_t ky = 0; ky < g.k; ++ky) {
          std::size_t oy_lo, oy_hi;
          valid_range(static_cast<int>(ky), g.stride, g.pad, g.in_h, g.out_h, oy_lo, oy_hi);
          for (std::size_t kx = 0; kx < g.k; ++kx) {
            std::size_t ox_lo, ox_hi;
            valid_range(static_cast<int>(kx), g.stride, g.pad, g.in_w, g.out_w, ox_lo, ox_hi);
            if (ox_lo >= ox_hi) continue;
            const std::size_t widx = w_base + ky * g.k + kx;
            for (std::size_t oy = oy_lo; oy < oy_hi; ++oy) {
              const std::size_t iy = oy * g.stride + ky - g.pad;
              const std::size_t in_row = in_base + iy * g.in_w;
              const std::size_t out_row = out_base + oy * g.out_w;
              const std::size_t ix0 = ox_lo * g.stride + kx - g.pad;
              f(in_row + ix0, out_row + ox_lo, widx, ox_hi - ox_lo);
            }
          }
        }
      }
}

}  // namespace

template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& kernels, const Tensor<T>& bias,
                 int stride, int padding) {
  require_rank4(input, "conv2d");
  require_rank4(kernels, "conv2d kernels");
  if (stride < 1 || padding < 0) throw Error(ErrorKind::Parameter, "conv2d: invalid stride or padding");
  const auto& is = input.shape();
  const auto& ks = kernels.shape();
  if (ks[1] != is[1] || ks[2] != ks[3])
    throw Error(ErrorKind::Shape, "conv2d: kernels " + shape_string(ks) + " incompatible with input " +
                                      shape_string(is));
  if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != ks[0]))
    throw Error(ErrorKind::Shape, "conv2d: bias must have one value per output channel");
  const long span_h = static_cast<long>(is[2]) + 2 * padding - static_cast<long>(ks[2]);
  const long span_w = static_cast<long>(is[3]) + 2 * padding - static_cast<long>(ks[3]);
  if (span_h < 0 || span_w < 0) throw Error(ErrorKind::Shape, "conv2d: kernel larger than padded input");

  ConvGeometry g{is[0], is[1], ks[0], is[2], is[3],
                 static_cast<std::size_t>(span_h / stride + 1),
                 static_cast<std::size_t>(span_w / stride + 1), ks[2], stride, padding};
  std::vector<T> out(g.batch * g.out_ch * g.out_h * g.out_w, T(0));
  if (bias.defined()) {
    const std::size_t plane = g.out_h * g.out_w;
    for (std::size_t n = 0; n < g.batch; ++n)
      for (std::size_t o = 0; o < g.out_ch; ++o)
        std::fill_n(out.begin() + static_cast<std::ptrdiff_t>((n * g.out_ch + o) * plane), plane,
                    bias.values()[o]);
  }
  const T* in = input.values().data();
  const T* w = kernels.values().data();
  T* dst = out.data();
  const auto s = static_cast<std::size_t>(stride);
  for_each_tap(g, [&](std::size_t ii, std::size_t oi, std::size_t wi, std::size_t len) {
    const T wv = w[wi];
    const T* src = in + ii;
    T* o = dst + oi;
    for (std::size_t j = 0; j < len; ++j) o[j] += wv * src[j * s];
  });

  std::vector<NodePtr<T>> parents{input.node(), kernels.node()};
  if (bias.defined()) parents.push_back(bias.node());
  return make_result<T>({g.batch, g.out_ch, g.out_h, g.out_w}, std::move(out), std::move(parents),
                        [g](detail::Node<T>& self) {
                          auto& in_node = *self.parents[0];
                          auto& w_node = *self.parents[1];
                          const T* gout = self.grad.data();
                          const auto st = static_cast<std::size_t>(g.stride);
                          if (in_node.requires_grad) {
                            in_node.ensure_grad();
                            T* gin = in_node.grad.data();
                            const T* wv = w_node.value.data();
                            for_each_tap(g, [&](std::size_t ii, std::size_t oi, std::size_t wi, std::size_t len) {
                              const T k = wv[wi];
                              T* d = gin + ii;
                              const T* go = gout + oi;
                              for (std::size_t j = 0; j < len; ++j) d[j * st] += k * go[j];
                            });
                          }
                          if (w_node.requires_grad) {
                            w_node.ensure_grad();
                            T* gw = w_node.grad.data();
                            const T* inv = in_node.value.data();
                            for_each_tap(g, [&](std::size_t ii, std::size_t oi, std::size_t wi, std::size_t len) {
                              const T* src = inv + ii;
                              const T* go = gout + oi;
                              T acc = T(0);
                              for (std::size_t j = 0; j < len; ++j) acc += src[j * st] * go[j];
                              gw[wi] += acc;
                            });
                          }
                          if (self.parents.size() > 2 && self.parents[2]->requires_grad) {
                            auto& b_node = *self.parents[2];
                            b_node.ensure_grad();
                            const std::size_t plane = g.out_h * g.out_w;
                            for (std::size_t n = 0; n < g.batch; ++n)
                              for (std::size_t o = 0; o < g.out_ch; ++o) {
                                const T* go = gout + (n * g.out_ch + o) * plane;
                                T acc = T(0);
                                for (std::size_t j = 0; j < plane; ++j) acc += go[j];
                                b_node.grad[o] += acc;
                              }
                          }
                        },
                        "conv2d");
}

// ---------------------------------------------------------------------------
// Resampling and concatenation

template <typename T>
Tensor<T> upsample_nearest(const Tensor<T>& x, int factor_y, int factor_x) {
  require_rank4(x, "upsample_nearest");
  if (factor_y < 1 || factor_x < 1) throw Error(ErrorKind::Parameter, "upsample factor must be >= 1");
  if (factor_y == 1 && factor_x == 1) return x;
  const auto& s = x.shape();
  const std::size_t fy = static_cast<std::size_t>(factor_y), fx = static_cast<std::size_t>(factor_x);
  const std::size_t planes = s[0] * s[1], h = s[2], w = s[3], oh = h * fy, ow = w * fx;
  std::vector<T> out(planes * oh * ow);
  const auto in = x.values();
  for (std::size_t p = 0; p < planes; ++p)
    for (std::size_t y = 0; y < oh; ++y)
      for (std::size_t xx = 0; xx < ow; ++xx)
        out[(p * oh + y) * ow + xx] = in[(p * h + y / fy) * w + xx / fx];
  return make_result<T>({s[0], s[1], oh, ow}, std::move(out), {x.node()},
                        [planes, h, w, oh, ow, fy, fx](detail::Node<T>& self) {
                          auto& p = self.parents[0];
                          p->ensure_grad();
                          for (std::size_t pl = 0; pl < planes; ++pl)
                            for (std::size_t y = 0; y < oh; ++y)
                              for (std::size_t xx = 0; xx < ow; ++xx)
                                p->grad[(pl * h + y / fy) * w + xx / fx] += self.grad[(pl * oh + y) * ow + xx];
                        },
                        "upsample_nearest");
}

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
  require_rank4(a, "concat_channels");
  require_rank4(b, "concat_channels");
  const auto& sa = a.shape();
  const auto& sb = b.shape();
  if (sa[0] != sb[0] || sa[2] != sb[2] || sa[3] != sb[3])
    throw Error(ErrorKind::Shape, "concat_channels: " + shape_string(sa) + " vs " + shape_string(sb));
  const std::size_t plane = sa[2] * sa[3];
  const std::size_t chunk_a = sa[1] * plane, chunk_b = sb[1] * plane;
  std::vector<T> out;
  out.reserve(a.numel() + b.numel());
  for (std::size_t n = 0; n < sa[0]; ++n) {
    out.insert(out.end(), a.values().begin() + static_cast<std::ptrdiff_t>(n * chunk_a),
               a.values().begin() + static_cast<std::ptrdiff_t>((n + 1) * chunk_a));
    out.insert(out.end(), b.values().begin() + static_cast<std::ptrdiff_t>(n * chunk_b),
               b.values().begin() + static_cast<std::ptrdiff_t>((n + 1) * chunk_b));
  }
  const std::size_t batch = sa[0];
  return make_result<T>({sa[0], sa[1] + sb[1], sa[2], sa[3]}, std::move(out), {a.node(), b.node()},
                        [batch, chunk_a, chunk_b](detail::Node<T>& self) {
                          auto& pa = self.parents[0];
                          auto& pb = self.parents[1];
                          if (pa->requires_grad) pa->ensure_grad();
                          if (pb->requires_grad) pb->ensure_grad();
                          for (std::size_t n = 0; n < batch; ++n) {
                            const T* g = self.grad.data() + n * (chunk_a + chunk_b);
                            if (pa->requires_grad)
                              for (std::size_t i = 0; i < chunk_a; ++i) pa->grad[n * chunk_a + i] += g[i];
                            if (pb->requires_grad)
                              for (std::size_t i = 0; i < chunk_b; ++i) pb->grad[n * chunk_b + i] += g[chunk_a + i];
                          }
                        },
                        "concat_channels");
}

// ---------------------------------------------------------------------------
// Losses

template <typename T>
Tensor<T> mse(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "mse");
  double total = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i) {
    const double d = static_cast<double>(a.values()[i]) - static_cast<double>(b.values()[i]);
    total += d * d;
  }
  const double n = static_cast<double>(a.numel());
  return make_result<T>({1}, {static_cast<T>(total / n)}, {a.node(), b.node()},
                        [n](detail::Node<T>& self) {
                          auto& pa = *self.parents[0];
                          auto& pb = *self.parents[1];
                          const double g = static_cast<double>(self.grad[0]) * 2.0 / n;
                          if (pa.requires_grad) pa.ensure_grad();
                          if (pb.requires_grad) pb.ensure_grad();
                          for (std::size_t i = 0; i < pa.value.size(); ++i) {
                            const double d = static_cast<double>(pa.value[i]) - static_cast<double>(pb.value[i]);
                            if (pa.requires_grad) pa.grad[i] += static_cast<T>(g * d);
                            if (pb.requires_grad) pb.grad[i] -= static_cast<T>(g * d);
                          }
                        },
                        "mse");
}

template <typename T>
Tensor<T> ssim(const Tensor<T>& u, const Tensor<T>& v) {
  require_same_shape(u, v, "ssim");
  if (u.numel() == 0) throw Error(ErrorKind::Shape, "ssim: empty input");
  const std::size_t samples = u.rank() == 4 ? u.dim(0) : 1;
  const std::size_t n = u.numel() / samples;
  std::vector<SsimTerms> terms(samples);
  double total = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    terms[s] = ssim_terms(u.values().data() + s * n, v.values().data() + s * n, n);
    total += terms[s].value;
  }
  return make_result<T>({1}, {static_cast<T>(total / static_cast<double>(samples))}, {u.node(), v.node()},
                        [terms = std::move(terms), samples, n](detail::Node<T>& self) {
                          auto& pu = *self.parents[0];
                          auto& pv = *self.parents[1];
                          if (pu.requires_grad) pu.ensure_grad();
                          if (pv.requires_grad) pv.ensure_grad();
                          const double upstream = static_cast<double>(self.grad[0]) / static_cast<double>(samples);
                          const double inv_n = 1.0 / static_cast<double>(n);
                          for (std::size_t s = 0; s < samples; ++s) {
                            const auto& t = terms[s];
                            const double a = 2.0 * t.mu_u * t.mu_v + kSsimC1;
                            const double b = 2.0 * t.cov + kSsimC2;
                            const double c = t.mu_u * t.mu_u + t.mu_v * t.mu_v + kSsimC1;
                            const double d = t.var_u + t.var_v + kSsimC2;
                            // S = AB / (CD); C and D are strictly positive.
                            const double cd = c * d;
                            for (std::size_t i = 0; i < n; ++i) {
                              const std::size_t idx = s * n + i;
                              const double du = static_cast<double>(pu.value[idx]) - t.mu_u;
                              const double dv = static_cast<double>(pv.value[idx]) - t.mu_v;
                              if (pu.requires_grad) {
                                const double num = (2.0 * t.mu_v * b + a * 2.0 * dv) * inv_n / cd;
                                const double den = t.value * (2.0 * t.mu_u / c + 2.0 * du / d) * inv_n;
                                pu.grad[idx] += static_cast<T>(upstream * (num - den));
                              }
                              if (pv.requires_grad) {
                                const double num = (2.0 * t.mu_u * b + a * 2.0 * du) * inv_n / cd;
                                const double den = t.value * (2.0 * t.mu_v / c + 2.0 * dv / d) * inv_n;
                                pv.grad[idx] += static_cast<T>(upstream * (num - den));
                              }
                            }
                          }
                        },
                        "ssim");
}

// ---------------------------------------------------------------------------
// Backward pass

template <typename T>
void backward(const Tensor<T>& loss) {
  if (!loss.defined()) throw Error(ErrorKind::Parameter, "backward on undefined tensor");
  if (loss.numel() != 1) throw Error(ErrorKind::Shape, "backward needs a single-element loss, got " + shape_string(loss.shape()));
  if (!std::isfinite(loss.values()[0])) throw Error(ErrorKind::Numeric, "loss is not finite");
  if (!loss.requires_grad()) return;

  // Iterative post-order DFS gives a topological order (parents first).
  std::vector<detail::Node<T>*> order;
  std::unordered_set<detail::Node<T>*> seen;
  std::vector<std::pair<detail::Node<T>*, std::size_t>> stack{{loss.node().get(), 0}};
  seen.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node<T>* parent = node->parents[next++].get();
      if (parent->requires_grad && seen.insert(parent).second) stack.push_back({parent, 0});
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (auto* node : order)
    if (node->backward) node->grad.assign(node->value.size(), T(0));
  auto* root = loss.node().get();
  root->ensure_grad();
  for (auto& g : root->grad) g += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if ((*it)->backward) (*it)->backward(**it);
}

// ---------------------------------------------------------------------------

#define SPX_INSTANTIATE(T)                                                                    \
  template class Tensor<T>;                                                                   \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                                 \
  template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);                                 \
  template Tensor<T> scale(const Tensor<T>&, T);                                              \
  template Tensor<T> add_scalar(const Tensor<T>&, T);                                         \
  template Tensor<T> leaky_relu(const Tensor<T>&, T);                                         \
  template Tensor<T> relu(const Tensor<T>&);                                                  \
  template Tensor<T> sigmoid(const Tensor<T>&);                                               \
  template Tensor<T> dropout(const Tensor<T>&, double, bool, std::uint64_t);                  \
  template Tensor<T> sum(const Tensor<T>&);                                                   \
  template Tensor<T> mean(const Tensor<T>&);                                                  \
  template Tensor<T> conv2d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, int, int);  \
  template Tensor<T> upsample_nearest(const Tensor<T>&, int, int);                            \
  template Tensor<T> concat_channels(const Tensor<T>&, const Tensor<T>&);                     \
  template Tensor<T> mse(const Tensor<T>&, const Tensor<T>&);                                 \
  template Tensor<T> ssim(const Tensor<T>&, const Tensor<T>&);                                \
  template void backward(const Tensor<T>&);

SPX_INSTANTIATE(float)
SPX_INSTANTIATE(double)

#undef SPX_INSTANTIATE

}  // namespace spx::nn
