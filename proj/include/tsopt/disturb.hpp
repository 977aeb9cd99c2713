#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsopt/image.hpp"

namespace tsopt::disturb {

// Controlled image corruptions. Every operation is a pure function of
// (input, level, seed); level zero is the identity (byte-exact except for
// swirl, which is the identity up to bilinear rounding of 1e-9). Outputs
// clamp to [0, 255].

enum class Kind {
  gaussian_noise,
  gaussian_blur,
  black_rectangles,
  swirl,
  salt_pepper,
  contaminate,
};

const char* to_string(Kind k);
Kind kind_from_string(const std::string& name);

// The level grids the sweep experiments use; level 0 is always the baseline.
std::vector<double> canonical_levels(Kind k);

// out = (1 - alpha) * X + alpha * N with N i.i.d. standard normal per sample,
// min-max rescaled to [0, 255] before mixing.
Image gaussian_noise(const Image& img, double alpha, std::uint64_t seed);

// Separable Gaussian blur, kernel half-width ceil(3 sigma), taps normalized
// to unit sum, reflected (mirrored, edge-repeating) padding. sigma = 0 is the
// identity. Channels blur independently.
Image gaussian_blur(const Image& img, double sigma);

// Five filled black squares of side floor(alpha * min(H, W)) at seeded
// uniform corners drawn from [0, H-side] x [0, W-side] (so the squares fit;
// the corner range clamps to zero once side reaches the image dimensions,
// which makes large alpha black out the whole image). Squares may overlap.
Image black_rectangles(const Image& img, double alpha, std::uint64_t seed);

// Inverse-mapped spiral about the image center: a source sample is taken at
// angle theta + alpha * exp(-5 r / (ln(2) rho)) and the same radius, with
// bilinear interpolation and border clamping.
Image swirl(const Image& img, double alpha, double rho = 25.0);

// Each pixel independently flips to black or white (equal odds) with
// probability alpha; a flip applies to all channels of the pixel.
Image salt_pepper(const Image& img, double alpha, std::uint64_t seed);

// Replaces floor(alpha * primary.size()) images at seeded uniform positions
// (drawn without replacement) by copies drawn from the foreign corpus,
// without replacement while the foreign supply lasts.
std::vector<Image> contaminate(const std::vector<Image>& primary,
                               const std::vector<Image>& foreign, double alpha,
                               std::uint64_t seed);

// Single-image dispatcher for the five per-image kinds (contaminate is a
// corpus-level operation and is rejected here).
Image apply(Kind k, const Image& img, double level, std::uint64_t seed);

// Corpus-level dispatcher. Per-image RNG streams derive from (seed, image
// index), so any parallel split over images reproduces the serial result.
// `foreign` may be empty for every kind except contaminate.
std::vector<Image> apply_corpus(Kind k, const std::vector<Image>& primary,
                                const std::vector<Image>& foreign, double level,
                                std::uint64_t seed);

}  // namespace tsopt::disturb
