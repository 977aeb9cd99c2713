#include "tsopt/disturb.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tsopt/kernels.hpp"
#include "tsopt/rng.hpp"

namespace tsopt::disturb {

namespace {

constexpr double kLn2 = 0.6931471805599453;

void require_level(double alpha, double hi, const char* who) {
  require(std::isfinite(alpha) && alpha >= 0.0 && alpha <= hi,
          ErrorKind::invalid_argument, std::string(who) + ": level out of range");
}

// Mirrored (edge-repeating) index: ...cba|abcd|dcb... Applies repeatedly so
// kernels wider than the image stay well-defined.
std::size_t mirror_index(long i, long n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return std::size_t(i);
}

// One separable pass along rows of a single-channel plane.
void blur_rows(std::vector<double>& plane, std::size_t h, std::size_t w,
               const std::vector<double>& kern, std::size_t radius) {
  std::vector<double> padded(w + 2 * radius);
  std::vector<double> out(w);
  for (std::size_t y = 0; y < h; ++y) {
    double* row = plane.data() + y * w;
    for (std::size_t j = 0; j < padded.size(); ++j)
      padded[j] = row[mirror_index(long(j) - long(radius), long(w))];
    kernels::conv_row(out.data(), padded.data(), w, kern.data(), radius);
    std::copy(out.begin(), out.end(), row);
  }
}

std::vector<double> transpose_plane(const std::vector<double>& plane, std::size_t h,
                                    std::size_t w) {
  std::vector<double> t(plane.size());
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) t[x * h + y] = plane[y * w + x];
  return t;
}

double bilinear(const Image& img, double sy, double sx, std::size_t c) {
  const double max_y = double(img.height - 1), max_x = double(img.width - 1);
  sy = std::clamp(sy, 0.0, max_y);
  sx = std::clamp(sx, 0.0, max_x);
  std::size_t y0 = std::size_t(sy), x0 = std::size_t(sx);
  if (y0 >= img.height - 1 && img.height > 1) y0 = img.height - 2;
  if (x0 >= img.width - 1 && img.width > 1) x0 = img.width - 2;
  const std::size_t y1 = std::min(y0 + 1, img.height - 1);
  const std::size_t x1 = std::min(x0 + 1, img.width - 1);
  const double fy = sy - double(y0), fx = sx - double(x0);
  const double top = (1.0 - fx) * img.at(y0, x0, c) + fx * img.at(y0, x1, c);
  const double bot = (1.0 - fx) * img.at(y1, x0, c) + fx * img.at(y1, x1, c);
  return (1.0 - fy) * top + fy * bot;
}

void clamp_image(Image& img) {
  for (double& v : img.px) v = std::clamp(v, 0.0, 255.0);
}

}  // namespace

const char* to_string(Kind k) {
  switch (k) {
    case Kind::gaussian_noise: return "gaussian_noise";
    case Kind::gaussian_blur: return "gaussian_blur";
    case Kind::black_rectangles: return "black_rectangles";
    case Kind::swirl: return "swirl";
    case Kind::salt_pepper: return "salt_pepper";
    case Kind::contaminate: return "contaminate";
  }
  return "unknown";
}

Kind kind_from_string(const std::string& name) {
  for (Kind k : {Kind::gaussian_noise, Kind::gaussian_blur, Kind::black_rectangles,
                 Kind::swirl, Kind::salt_pepper, Kind::contaminate})
    if (name == to_string(k)) return k;
  fail(ErrorKind::invalid_argument, "unknown disturbance kind: " + name);
}

std::vector<double> canonical_levels(Kind k) {
  switch (k) {
    case Kind::gaussian_blur:
    case Kind::swirl: return {0.0, 1.0, 2.0, 4.0};
    case Kind::salt_pepper: return {0.0, 0.1, 0.2, 0.3};
    default: return {0.0, 0.25, 0.5, 0.75};
  }
}

Image gaussian_noise(const Image& img, double alpha, std::uint64_t seed) {
  require_level(alpha, 1.0, "gaussian_noise");
  Rng rng(seed);
  std::vector<double> noise(img.px.size());
  for (double& v : noise) v = rng.normal();
  const auto [mn, mx] = std::minmax_element(noise.begin(), noise.end());
  const double lo = *mn, span = *mx - *mn;
  if (span > 0.0) {
    for (double& v : noise) v = (v - lo) / span * 255.0;
  } else {
    std::fill(noise.begin(), noise.end(), 127.5);
  }
  Image out = img;
  kernels::mix_clamp(out.px.data(), img.px.data(), noise.data(), img.px.size(), alpha);
  return out;
}

Image gaussian_blur(const Image& img, double sigma) {
  require(std::isfinite(sigma) && sigma >= 0.0, ErrorKind::invalid_argument,
          "gaussian_blur: sigma must be >= 0");
  if (sigma == 0.0) return img;
  const std::size_t radius = std::size_t(std::ceil(3.0 * sigma));
  std::vector<double> kern(2 * radius + 1);
  for (std::size_t t = 0; t < kern.size(); ++t) {
    const double d = double(t) - double(radius);
    kern[t] = std::exp(-d * d / (2.0 * sigma * sigma));
  }
  const double total = std::accumulate(kern.begin(), kern.end(), 0.0);
  for (double& v : kern) v /= total;

  Image out = img;
  std::vector<double> plane(img.pixel_count());
  for (std::size_t c = 0; c < img.channels; ++c) {
    for (std::size_t p = 0; p < plane.size(); ++p)
      plane[p] = img.px[p * img.channels + c];
    blur_rows(plane, img.height, img.width, kern, radius);
    plane = transpose_plane(plane, img.height, img.width);
    blur_rows(plane, img.width, img.height, kern, radius);
    plane = transpose_plane(plane, img.width, img.height);
    for (std::size_t p = 0; p < plane.size(); ++p)
      out.px[p * img.channels + c] = plane[p];
  }
  clamp_image(out);
  return out;
}

Image black_rectangles(const Image& img, double alpha, std::uint64_t seed) {
  require(std::isfinite(alpha) && alpha >= 0.0, ErrorKind::invalid_argument,
          "black_rectangles: level must be >= 0");
  const std::size_t side =
      std::size_t(std::floor(alpha * double(std::min(img.height, img.width))));
  Image out = img;
  if (side == 0) return out;
  Rng rng(seed);
  const std::size_t row_range = side >= img.height ? 1 : img.height - side + 1;
  const std::size_t col_range = side >= img.width ? 1 : img.width - side + 1;
  for (int rect = 0; rect < 5; ++rect) {
    const std::size_t r0 = rng.below(row_range);
    const std::size_t c0 = rng.below(col_range);
    const std::size_t r1 = std::min(r0 + side, img.height);
    const std::size_t c1 = std::min(c0 + side, img.width);
    for (std::size_t y = r0; y < r1; ++y)
      for (std::size_t x = c0; x < c1; ++x)
        for (std::size_t c = 0; c < img.channels; ++c) out.at(y, x, c) = 0.0;
  }
  return out;
}

Image swirl(const Image& img, double alpha, double rho) {
  require(std::isfinite(alpha), ErrorKind::invalid_argument, "swirl: bad level");
  require(std::isfinite(rho) && rho > 0.0, ErrorKind::invalid_argument,
          "swirl: rho must be > 0");
  const double cy = 0.5 * double(img.height - 1);
  const double cx = 0.5 * double(img.width - 1);
  Image out(img.height, img.width, img.channels);
  for (std::size_t y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < img.width; ++x) {
      const double dy = double(y) - cy, dx = double(x) - cx;
      const double r = std::hypot(dx, dy);
      const double theta = std::atan2(dy, dx);
      const double twist = alpha * std::exp(-5.0 * r / (kLn2 * rho));
      const double sy = cy + r * std::sin(theta + twist);
      const double sx = cx + r * std::cos(theta + twist);
      for (std::size_t c = 0; c < img.channels; ++c)
        out.at(y, x, c) = bilinear(img, sy, sx, c);
    }
  }
  clamp_image(out);
  return out;
}

Image salt_pepper(const Image& img, double alpha, std::uint64_t seed) {
  require_level(alpha, 1.0, "salt_pepper");
  Image out = img;
  Rng rng(seed);
  for (std::size_t y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < img.width; ++x) {
      if (rng.uniform01() >= alpha) continue;
      const double value = rng.uniform01() < 0.5 ? 0.0 : 255.0;
      for (std::size_t c = 0; c < img.channels; ++c) out.at(y, x, c) = value;
    }
  }
  return out;
}

std::vector<Image> contaminate(const std::vector<Image>& primary,
                               const std::vector<Image>& foreign, double alpha,
                               std::uint64_t seed) {
  require_level(alpha, 1.0, "contaminate");
  require(!(alpha > 0.0 && foreign.empty()), ErrorKind::insufficient_foreign,
          "contaminate: foreign corpus is empty");
  std::vector<Image> out = primary;
  const std::size_t n = primary.size();
  const std::size_t count = std::size_t(std::floor(alpha * double(n)));
  if (count == 0) return out;

  Rng rng_pos(derive_seed(seed, 0));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < count; ++i)
    std::swap(idx[i], idx[i + rng_pos.below(n - i)]);

  Rng rng_pick(derive_seed(seed, 1));
  const std::size_t f = foreign.size();
  std::vector<std::size_t> deck(f);
  std::iota(deck.begin(), deck.end(), 0);
  for (std::size_t i = 0; i + 1 < f && i < count; ++i)
    std::swap(deck[i], deck[i + rng_pick.below(f - i)]);

  for (std::size_t t = 0; t < count; ++t) {
    const std::size_t pick = t < f ? deck[t] : rng_pick.below(f);
    out[idx[t]] = foreign[pick];
  }
  return out;
}

Image apply(Kind k, const Image& img, double level, std::uint64_t seed) {
  switch (k) {
    case Kind::gaussian_noise: return gaussian_noise(img, level, seed);
    case Kind::gaussian_blur: return gaussian_blur(img, level);
    case Kind::black_rectangles: return black_rectangles(img, level, seed);
    case Kind::swirl: return swirl(img, level);
    case Kind::salt_pepper: return salt_pepper(img, level, seed);
    case Kind::contaminate:
      fail(ErrorKind::invalid_argument, "contaminate operates on a corpus");
  }
  fail(ErrorKind::invalid_argument, "unknown disturbance kind");
}

std::vector<Image> apply_corpus(Kind k, const std::vector<Image>& primary,
                                const std::vector<Image>& foreign, double level,
                                std::uint64_t seed) {
  if (k == Kind::contaminate) return contaminate(primary, foreign, level, seed);
  std::vector<Image> out;
  out.reserve(primary.size());
  for (std::size_t i = 0; i < primary.size(); ++i)
    out.push_back(apply(k, primary[i], level, derive_seed(seed, i)));
  return out;
}

}  // namespace tsopt::disturb
