#include "tsopt/rng.hpp"

#include <cmath>

#include "tsopt/errors.hpp"

namespace tsopt {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) ^ (index + 0x632be59bd9b4e019ull));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t i, std::uint64_t j) {
  return derive_seed(derive_seed(seed, i), j);
}

double Rng::uniform01() {
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 must be nonzero for the log; the smallest representable draw is used
  // instead, which keeps the map measurable and deterministic.
  double u1 = uniform01();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * 3.14159265358979323846 * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t Rng::below(std::uint64_t n) {
  require(n >= 1, ErrorKind::invalid_argument, "Rng::below needs n >= 1");
  if (n == 1) return 0;
  const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
  std::uint64_t draw;
  do {
    draw = eng_();
  } while (draw >= limit);
  return draw % n;
}

}  // namespace tsopt
