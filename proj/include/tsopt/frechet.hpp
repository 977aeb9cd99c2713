#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsopt/image.hpp"
#include "tsopt/linalg.hpp"

namespace tsopt::frechet {

// Streaming mean/covariance accumulator (Welford update, n-1 denominator).
// Accumulators over disjoint sample sets merge exactly, so feature extraction
// can fan out over images and combine per-thread partials; merged results
// agree with single-threaded accumulation to tight tolerance.
class GaussianStats {
public:
  GaussianStats() = default;
  explicit GaussianStats(std::size_t dim);

  void accumulate(const std::vector<double>& x);
  void merge(const GaussianStats& other);

  std::size_t dim() const { return dim_; }
  std::size_t count() const { return count_; }
  std::vector<double> mean() const;
  linalg::SymMatrix cov() const;  // requires count >= 2

  // JSON snapshot: {"dim":., "count":., "mean":[...], "cov":[[...]]}.
  std::string to_json() const;
  static GaussianStats from_json(const std::string& text);

private:
  std::size_t dim_ = 0;
  std::size_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> com_;  // comoment sum, row-major dim x dim
};

// Squared 2-Wasserstein distance between Gaussians:
//   ||m1 - m2||^2 + tr(C1) + tr(C2) - 2 tr((C1^{1/2} C2 C1^{1/2})^{1/2}).
// The product is formed symmetrized so one PSD square root serves the cross
// term. Rounding can push the exact-zero case fractionally negative, so the
// result clamps at 0; bitwise-identical inputs short-circuit to exactly 0.
double fid_squared(const std::vector<double>& mean1, const linalg::SymMatrix& cov1,
                   const std::vector<double>& mean2, const linalg::SymMatrix& cov2);
double fid_squared(const GaussianStats& g1, const GaussianStats& g2);

// The reported distance is the square root of the clamped square.
double fid(const std::vector<double>& mean1, const linalg::SymMatrix& cov1,
           const std::vector<double>& mean2, const linalg::SymMatrix& cov2);
double fid(const GaussianStats& g1, const GaussianStats& g2);

// Row-stochastic table of class probabilities, rows = samples.
struct ProbTable {
  std::size_t rows = 0, cols = 0;
  std::vector<double> p;  // row-major

  double at(std::size_t i, std::size_t k) const { return p[i * cols + k]; }
};

// exp of the mean KL divergence between each row and the column-mean
// marginal; zero probabilities contribute zero. Bounded above by the number
// of rows, with equality for distinct one-hot rows. Raises
// invalid_distribution for negative entries or rows not summing to 1
// (tolerance 1e-9).
double inception_score(const ProbTable& t);

// rows - inception_score, clamped at 0 (higher = worse, like the distance).
double inception_distance(const ProbTable& t);

// Deterministic stand-in feature extractor: 16x16 grayscale block means,
// centered to [-0.5, 0.5], a seeded fixed Gaussian random projection, then
// tanh. Same (image, seed) always yields the same vector.
class SurrogateExtractor {
public:
  SurrogateExtractor(std::uint64_t seed, std::size_t output_dim);
  std::size_t output_dim() const { return output_dim_; }
  std::vector<double> extract(const Image& img) const;

private:
  std::size_t output_dim_;
  std::vector<double> wt_;  // transposed projection, 256 x output_dim
};

// FEATV1 feature file: 8-byte magic "FEATV1\0\0", u32 LE row count, u32 LE
// dimension, then row-major float32 LE payload.
struct FeatureMatrix {
  std::size_t rows = 0, dim = 0;
  std::vector<float> data;  // row-major

  std::vector<double> row(std::size_t i) const;
};

void write_features(const std::string& path, const FeatureMatrix& f);
FeatureMatrix read_features(const std::string& path);

// Convenience: extract a whole corpus and accumulate stats in one pass.
FeatureMatrix extract_features(const SurrogateExtractor& ex,
                               const std::vector<Image>& corpus);
GaussianStats stats_of(const FeatureMatrix& f);

}  // namespace tsopt::frechet
