#include "tsopt/frechet.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "tsopt/kernels.hpp"
#include "tsopt/rng.hpp"

namespace tsopt::frechet {

using linalg::Matrix;
using linalg::SymMatrix;

GaussianStats::GaussianStats(std::size_t dim)
    : dim_(dim), mean_(dim, 0.0), com_(dim * dim, 0.0) {
  require(dim > 0, ErrorKind::invalid_argument, "GaussianStats needs dim >= 1");
}

void GaussianStats::accumulate(const std::vector<double>& x) {
  require(x.size() == dim_, ErrorKind::dimension_mismatch, "accumulate: wrong dim");
  ++count_;
  std::vector<double> delta_pre(dim_), delta_post(dim_);
  for (std::size_t i = 0; i < dim_; ++i) delta_pre[i] = x[i] - mean_[i];
  const double inv_n = 1.0 / double(count_);
  for (std::size_t i = 0; i < dim_; ++i) mean_[i] += delta_pre[i] * inv_n;
  for (std::size_t i = 0; i < dim_; ++i) delta_post[i] = x[i] - mean_[i];
  kernels::outer_accumulate(com_.data(), delta_pre.data(), delta_post.data(), dim_);
}

void GaussianStats::merge(const GaussianStats& other) {
  require(other.dim_ == dim_ || other.count_ == 0 || count_ == 0,
          ErrorKind::dimension_mismatch, "merge: wrong dim");
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double n1 = double(count_), n2 = double(other.count_);
  const double n = n1 + n2;
  std::vector<double> delta(dim_);
  for (std::size_t i = 0; i < dim_; ++i) delta[i] = other.mean_[i] - mean_[i];
  for (std::size_t i = 0; i < dim_; ++i) mean_[i] += delta[i] * (n2 / n);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j)
      com_[i * dim_ + j] += other.com_[i * dim_ + j] + delta[i] * delta[j] * (n1 * n2 / n);
  count_ += other.count_;
}

std::vector<double> GaussianStats::mean() const { return mean_; }

SymMatrix GaussianStats::cov() const {
  require(count_ >= 2, ErrorKind::invalid_argument,
          "covariance needs at least 2 samples");
  Matrix c(dim_, dim_);
  const double inv = 1.0 / double(count_ - 1);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) c(i, j) = com_[i * dim_ + j] * inv;
  return SymMatrix(c);
}

std::string GaussianStats::to_json() const {
  nlohmann::json j;
  j["dim"] = dim_;
  j["count"] = count_;
  j["mean"] = mean_;
  SymMatrix c = cov();
  std::vector<std::vector<double>> rows(dim_, std::vector<double>(dim_));
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t k = 0; k < dim_; ++k) rows[i][k] = c(i, k);
  j["cov"] = rows;
  return j.dump(2);
}

GaussianStats GaussianStats::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::io_error, std::string("bad stats JSON: ") + e.what());
  }
  try {
    GaussianStats g(j.at("dim").get<std::size_t>());
    g.count_ = j.at("count").get<std::size_t>();
    g.mean_ = j.at("mean").get<std::vector<double>>();
    require(g.mean_.size() == g.dim_, ErrorKind::io_error, "stats JSON: mean size");
    auto rows = j.at("cov").get<std::vector<std::vector<double>>>();
    require(rows.size() == g.dim_, ErrorKind::io_error, "stats JSON: cov rows");
    require(g.count_ >= 2, ErrorKind::io_error, "stats JSON: count < 2");
    const double scale = double(g.count_ - 1);
    for (std::size_t i = 0; i < g.dim_; ++i) {
      require(rows[i].size() == g.dim_, ErrorKind::io_error, "stats JSON: cov cols");
      for (std::size_t k = 0; k < g.dim_; ++k) g.com_[i * g.dim_ + k] = rows[i][k] * scale;
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::io_error, std::string("bad stats JSON: ") + e.what());
  }
}

namespace {

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

bool bitwise_equal(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) return false;
  const Matrix& am = a.as_matrix();
  const Matrix& bm = b.as_matrix();
  return std::memcmp(am.data(), bm.data(), a.dim() * a.dim() * sizeof(double)) == 0;
}

double trace(const SymMatrix& m) {
  double t = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i) t += m(i, i);
  return t;
}

}  // namespace

double fid_squared(const std::vector<double>& mean1, const SymMatrix& cov1,
                   const std::vector<double>& mean2, const SymMatrix& cov2) {
  require(mean1.size() == mean2.size() && cov1.dim() == cov2.dim() &&
              mean1.size() == cov1.dim(),
          ErrorKind::dimension_mismatch, "fid: population shapes differ");
  if (bitwise_equal(mean1, mean2) && bitwise_equal(cov1, cov2)) return 0.0;

  double mean_term = 0.0;
  for (std::size_t i = 0; i < mean1.size(); ++i) {
    const double d = mean1[i] - mean2[i];
    mean_term += d * d;
  }
  const SymMatrix s1 = linalg::sqrtm_psd(cov1);
  const SymMatrix inner =
      SymMatrix(s1.as_matrix() * cov2.as_matrix() * s1.as_matrix());
  const SymMatrix cross = linalg::sqrtm_psd(inner);
  const double d2 = mean_term + trace(cov1) + trace(cov2) - 2.0 * trace(cross);
  return d2 < 0.0 ? 0.0 : d2;
}

double fid_squared(const GaussianStats& g1, const GaussianStats& g2) {
  return fid_squared(g1.mean(), g1.cov(), g2.mean(), g2.cov());
}

double fid(const std::vector<double>& mean1, const SymMatrix& cov1,
           const std::vector<double>& mean2, const SymMatrix& cov2) {
  return std::sqrt(fid_squared(mean1, cov1, mean2, cov2));
}

double fid(const GaussianStats& g1, const GaussianStats& g2) {
  return std::sqrt(fid_squared(g1, g2));
}

double inception_score(const ProbTable& t) {
  require(t.rows >= 1 && t.cols >= 1 && t.p.size() == t.rows * t.cols,
          ErrorKind::invalid_distribution, "probability table is empty or ragged");
  for (std::size_t i = 0; i < t.rows; ++i) {
    double sum = 0.0;
    for (std::size_t k = 0; k < t.cols; ++k) {
      const double v = t.at(i, k);
      require(v >= 0.0, ErrorKind::invalid_distribution,
              "negative probability at row " + std::to_string(i));
      sum += v;
    }
    require(std::abs(sum - 1.0) <= 1e-9, ErrorKind::invalid_distribution,
            "row " + std::to_string(i) + " sums to " + std::to_string(sum));
  }
  std::vector<double> marginal(t.cols, 0.0);
  for (std::size_t i = 0; i < t.rows; ++i)
    for (std::size_t k = 0; k < t.cols; ++k) marginal[k] += t.at(i, k);
  for (double& m : marginal) m /= double(t.rows);

  // 0 log 0 = 0; a positive entry forces a positive marginal in its column.
  double kl_sum = 0.0;
  for (std::size_t i = 0; i < t.rows; ++i)
    for (std::size_t k = 0; k < t.cols; ++k) {
      const double v = t.at(i, k);
      if (v > 0.0) kl_sum += v * std::log(v / marginal[k]);
    }
  return std::exp(kl_sum / double(t.rows));
}

double inception_distance(const ProbTable& t) {
  const double d = double(t.rows) - inception_score(t);
  return d < 0.0 ? 0.0 : d;
}

SurrogateExtractor::SurrogateExtractor(std::uint64_t seed, std::size_t output_dim)
    : output_dim_(output_dim), wt_(256 * output_dim) {
  require(output_dim >= 1, ErrorKind::invalid_argument, "output_dim >= 1");
  // Fill order (input index major) is part of the determinism contract.
  Rng rng(seed);
  for (double& w : wt_) w = 0.25 * rng.normal();
}

std::vector<double> SurrogateExtractor::extract(const Image& img) const {
  require(img.height > 0 && img.width > 0 && img.channels > 0,
          ErrorKind::invalid_argument, "empty image");
  // 16x16 block means of the channel-averaged image, centered.
  std::vector<double> pooled(256);
  for (std::size_t by = 0; by < 16; ++by) {
    std::size_t r0 = by * img.height / 16, r1 = (by + 1) * img.height / 16;
    if (r0 >= img.height) r0 = img.height - 1;
    if (r1 <= r0) r1 = r0 + 1;
    for (std::size_t bx = 0; bx < 16; ++bx) {
      std::size_t c0 = bx * img.width / 16, c1 = (bx + 1) * img.width / 16;
      if (c0 >= img.width) c0 = img.width - 1;
      if (c1 <= c0) c1 = c0 + 1;
      double acc = 0.0;
      for (std::size_t y = r0; y < r1; ++y)
        for (std::size_t x = c0; x < c1; ++x) {
          double g = 0.0;
          for (std::size_t c = 0; c < img.channels; ++c) g += img.at(y, x, c);
          acc += g / double(img.channels);
        }
      pooled[by * 16 + bx] =
          acc / (double(r1 - r0) * double(c1 - c0)) / 255.0 - 0.5;
    }
  }
  std::vector<double> out(output_dim_);
  kernels::project_tanh(out.data(), wt_.data(), pooled.data(), 256, output_dim_);
  return out;
}

namespace {

constexpr char kMagic[8] = {'F', 'E', 'A', 'T', 'V', '1', '\0', '\0'};

void put_u32_le(std::string& buf, std::uint32_t v) {
  buf.push_back(char(v & 0xff));
  buf.push_back(char((v >> 8) & 0xff));
  buf.push_back(char((v >> 16) & 0xff));
  buf.push_back(char((v >> 24) & 0xff));
}

std::uint32_t get_u32_le(const unsigned char* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
         std::uint32_t(p[3]) << 24;
}

}  // namespace

std::vector<double> FeatureMatrix::row(std::size_t i) const {
  std::vector<double> out(dim);
  for (std::size_t k = 0; k < dim; ++k) out[k] = double(data[i * dim + k]);
  return out;
}

void write_features(const std::string& path, const FeatureMatrix& f) {
  require(f.data.size() == f.rows * f.dim, ErrorKind::invalid_argument,
          "feature matrix shape mismatch");
  require(f.rows <= 0xffffffffull && f.dim <= 0xffffffffull,
          ErrorKind::unsupported_size, "feature matrix too large for FEATV1");
  std::string buf(kMagic, 8);
  put_u32_le(buf, std::uint32_t(f.rows));
  put_u32_le(buf, std::uint32_t(f.dim));
  for (float v : f.data) put_u32_le(buf, std::bit_cast<std::uint32_t>(v));
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::io_error, "cannot write " + path);
  out.write(buf.data(), std::streamsize(buf.size()));
  require(out.good(), ErrorKind::io_error, "short write to " + path);
}

FeatureMatrix read_features(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::io_error, "cannot open " + path);
  unsigned char header[16];
  in.read(reinterpret_cast<char*>(header), 16);
  require(in.gcount() == 16 && std::memcmp(header, kMagic, 8) == 0,
          ErrorKind::io_error, "not a FEATV1 file: " + path);
  FeatureMatrix f;
  f.rows = get_u32_le(header + 8);
  f.dim = get_u32_le(header + 12);
  f.data.resize(f.rows * f.dim);
  std::vector<unsigned char> raw(f.data.size() * 4);
  in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size()));
  require(in.gcount() == std::streamsize(raw.size()), ErrorKind::io_error,
          "truncated FEATV1 payload in " + path);
  for (std::size_t i = 0; i < f.data.size(); ++i)
    f.data[i] = std::bit_cast<float>(get_u32_le(raw.data() + 4 * i));
  return f;
}

FeatureMatrix extract_features(const SurrogateExtractor& ex,
                               const std::vector<Image>& corpus) {
  FeatureMatrix f;
  f.rows = corpus.size();
  f.dim = ex.output_dim();
  f.data.reserve(f.rows * f.dim);
  for (const Image& img : corpus) {
    const auto v = ex.extract(img);
    for (double x : v) f.data.push_back(float(x));
  }
  return f;
}

GaussianStats stats_of(const FeatureMatrix& f) {
  require(f.rows >= 1 && f.dim >= 1, ErrorKind::invalid_argument, "empty features");
  GaussianStats g(f.dim);
  for (std::size_t i = 0; i < f.rows; ++i) g.accumulate(f.row(i));
  return g;
}

}  // namespace tsopt::frechet
