#pragma once

#include <span>
#include <vector>

#include "spx/grid.hpp"

namespace spx::spectral {

// |DFT| of a real sequence for bins 0..n/2.
std::vector<double> magnitude_spectrum(std::span<const double> signal);

// Row spectra averaged over all rows of the image.
std::vector<double> mean_row_spectrum(const Image& image);

// Largest non-DC bin of the averaged row spectrum; ties go to the lower bin.
// The bin index counts cycles across the image width, so images of
// different widths covering the same field are directly comparable.
int dominant_row_bin(const Image& image);

}  // namespace spx::spectral
