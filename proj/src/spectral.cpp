#include "spx/spectral.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "spx/error.hpp"

namespace spx::spectral {

std::vector<double> magnitude_spectrum(std::span<const double> signal) {
  const std::size_t n = signal.size();
  if (n == 0) throw Error(ErrorKind::Shape, "empty signal");
  std::vector<double> mag(n / 2 + 1);
  for (std::size_t k = 0; k < mag.size(); ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t x = 0; x < n; ++x) {
      // Reduce k * x mod n first to keep the angle small and exact.
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((k * x) % n) / static_cast<double>(n);
      acc += signal[x] * std::polar(1.0, angle);
    }
    mag[k] = std::abs(acc);
  }
  return mag;
}

std::vector<double> mean_row_spectrum(const Image& image) {
  if (image.height() == 0 || image.width() == 0) throw Error(ErrorKind::Shape, "empty image");
  std::vector<double> acc(image.width() / 2 + 1, 0.0);
  const auto vals = image.values();
  for (std::size_t r = 0; r < image.height(); ++r) {
    const auto mag = magnitude_spectrum(vals.subspan(r * image.width(), image.width()));
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += mag[k];
  }
  for (auto& v : acc) v /= static_cast<double>(image.height());
  return acc;
}

int dominant_row_bin(const Image& image) {
  const auto spec = mean_row_spectrum(image);
  if (spec.size() < 2) throw Error(ErrorKind::Shape, "image too narrow for a non-DC bin");
  std::size_t best = 1;
  for (std::size_t k = 2; k < spec.size(); ++k)
    if (spec[k] > spec[best] * (1.0 + 1e-12)) best = k;
  return static_cast<int>(best);
}

}  // namespace spx::spectral
