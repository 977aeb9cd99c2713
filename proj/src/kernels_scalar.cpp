#include <cmath>
#include <cstddef>

#include "tsopt/kernels.hpp"

// Reference implementations. The AVX2 file mirrors these loops lane-wise;
// any change here must be reflected there to keep the paths bit-identical.

namespace tsopt::kernels {
namespace {

void mix_clamp_scalar(double* out, const double* x, const double* noise,
                      std::size_t len, double alpha) {
  const double keep = 1.0 - alpha;
  for (std::size_t i = 0; i < len; ++i) {
    double v = keep * x[i] + alpha * noise[i];
    v = v < 0.0 ? 0.0 : v;
    v = v > 255.0 ? 255.0 : v;
    out[i] = v;
  }
}

void conv_row_scalar(double* out, const double* in, std::size_t len, const double* k,
                     std::size_t radius) {
  const std::size_t taps = 2 * radius + 1;
  for (std::size_t i = 0; i < len; ++i) {
    double acc = 0.0;
    for (std::size_t t = 0; t < taps; ++t) acc += k[t] * in[i + t];
    out[i] = acc;
  }
}

void outer_accumulate_scalar(double* m, const double* d1, const double* d2,
                             std::size_t dim) {
  for (std::size_t i = 0; i < dim; ++i) {
    double* row = m + i * dim;
    const double di = d1[i];
    for (std::size_t j = 0; j < dim; ++j) row[j] += di * d2[j];
  }
}

void fused_moment_update_scalar(double* theta, double* m, double* v, const double* g,
                                std::size_t len, double c1m, double c2m, double c1v,
                                double c2v, double step, double eps) {
  for (std::size_t i = 0; i < len; ++i) {
    m[i] = c1m * m[i] + c2m * g[i];
    v[i] = c1v * v[i] + c2v * (g[i] * g[i]);
    theta[i] -= step * m[i] / (std::sqrt(v[i]) + eps);
  }
}

void project_tanh_scalar(double* out, const double* wt, const double* x,
                         std::size_t in_dim, std::size_t out_dim) {
  for (std::size_t j = 0; j < out_dim; ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < in_dim; ++i) {
    const double xi = x[i];
    const double* row = wt + i * out_dim;
    for (std::size_t j = 0; j < out_dim; ++j) out[j] += row[j] * xi;
  }
  for (std::size_t j = 0; j < out_dim; ++j) out[j] = std::tanh(out[j]);
}

void axpy_scalar(double* y, double a, const double* x, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) y[i] += a * x[i];
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table = {
      mix_clamp_scalar,     conv_row_scalar,     outer_accumulate_scalar,
      fused_moment_update_scalar, project_tanh_scalar, axpy_scalar,
  };
  return table;
}

}  // namespace tsopt::kernels
