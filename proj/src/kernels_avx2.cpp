#include <cmath>
#include <cstddef>

#include "tsopt/kernels.hpp"

// AVX2 variants. Each lane evaluates exactly the operation sequence of the
// scalar reference (multiply then add, no FMA), so results are bit-identical.

#if defined(__AVX2__)

#include <immintrin.h>

namespace tsopt::kernels {
namespace {

void mix_clamp_avx2(double* out, const double* x, const double* noise,
                    std::size_t len, double alpha) {
  const double keep = 1.0 - alpha;
  const __m256d vkeep = _mm256_set1_pd(keep);
  const __m256d valpha = _mm256_set1_pd(alpha);
  const __m256d lo = _mm256_setzero_pd();
  const __m256d hi = _mm256_set1_pd(255.0);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    __m256d v = _mm256_add_pd(_mm256_mul_pd(vkeep, _mm256_loadu_pd(x + i)),
                              _mm256_mul_pd(valpha, _mm256_loadu_pd(noise + i)));
    v = _mm256_max_pd(v, lo);
    v = _mm256_min_pd(v, hi);
    _mm256_storeu_pd(out + i, v);
  }
  for (; i < len; ++i) {
    double v = keep * x[i] + alpha * noise[i];
    v = v < 0.0 ? 0.0 : v;
    v = v > 255.0 ? 255.0 : v;
    out[i] = v;
  }
}

void conv_row_avx2(double* out, const double* in, std::size_t len, const double* k,
                   std::size_t radius) {
  const std::size_t taps = 2 * radius + 1;
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t t = 0; t < taps; ++t)
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(k[t]),
                                             _mm256_loadu_pd(in + i + t)));
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < len; ++i) {
    double acc = 0.0;
    for (std::size_t t = 0; t < taps; ++t) acc += k[t] * in[i + t];
    out[i] = acc;
  }
}

void outer_accumulate_avx2(double* m, const double* d1, const double* d2,
                           std::size_t dim) {
  for (std::size_t i = 0; i < dim; ++i) {
    double* row = m + i * dim;
    const double di = d1[i];
    const __m256d vdi = _mm256_set1_pd(di);
    std::size_t j = 0;
    for (; j + 4 <= dim; j += 4) {
      __m256d v = _mm256_add_pd(_mm256_loadu_pd(row + j),
                                _mm256_mul_pd(vdi, _mm256_loadu_pd(d2 + j)));
      _mm256_storeu_pd(row + j, v);
    }
    for (; j < dim; ++j) row[j] += di * d2[j];
  }
}

void fused_moment_update_avx2(double* theta, double* m, double* v, const double* g,
                              std::size_t len, double c1m, double c2m, double c1v,
                              double c2v, double step, double eps) {
  const __m256d vc1m = _mm256_set1_pd(c1m), vc2m = _mm256_set1_pd(c2m);
  const __m256d vc1v = _mm256_set1_pd(c1v), vc2v = _mm256_set1_pd(c2v);
  const __m256d vstep = _mm256_set1_pd(step), veps = _mm256_set1_pd(eps);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    const __m256d vg = _mm256_loadu_pd(g + i);
    __m256d vm = _mm256_add_pd(_mm256_mul_pd(vc1m, _mm256_loadu_pd(m + i)),
                               _mm256_mul_pd(vc2m, vg));
    __m256d vv = _mm256_add_pd(_mm256_mul_pd(vc1v, _mm256_loadu_pd(v + i)),
                               _mm256_mul_pd(vc2v, _mm256_mul_pd(vg, vg)));
    _mm256_storeu_pd(m + i, vm);
    _mm256_storeu_pd(v + i, vv);
    const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vv), veps);
    const __m256d delta = _mm256_div_pd(_mm256_mul_pd(vstep, vm), denom);
    _mm256_storeu_pd(theta + i, _mm256_sub_pd(_mm256_loadu_pd(theta + i), delta));
  }
  for (; i < len; ++i) {
    m[i] = c1m * m[i] + c2m * g[i];
    v[i] = c1v * v[i] + c2v * (g[i] * g[i]);
    theta[i] -= step * m[i] / (std::sqrt(v[i]) + eps);
  }
}

void project_tanh_avx2(double* out, const double* wt, const double* x,
                       std::size_t in_dim, std::size_t out_dim) {
  for (std::size_t j = 0; j < out_dim; ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < in_dim; ++i) {
    const __m256d xi = _mm256_set1_pd(x[i]);
    const double* row = wt + i * out_dim;
    std::size_t j = 0;
    for (; j + 4 <= out_dim; j += 4) {
      __m256d v = _mm256_add_pd(_mm256_loadu_pd(out + j),
                                _mm256_mul_pd(_mm256_loadu_pd(row + j), xi));
      _mm256_storeu_pd(out + j, v);
    }
    for (; j < out_dim; ++j) out[j] += row[j] * x[i];
  }
  // libm tanh on both paths; vectorizing it would change low bits.
  for (std::size_t j = 0; j < out_dim; ++j) out[j] = std::tanh(out[j]);
}

void axpy_avx2(double* y, double a, const double* x, std::size_t len) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    __m256d v = _mm256_add_pd(_mm256_loadu_pd(y + i),
                              _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, v);
  }
  for (; i < len; ++i) y[i] += a * x[i];
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table = {
      mix_clamp_avx2,     conv_row_avx2,     outer_accumulate_avx2,
      fused_moment_update_avx2, project_tanh_avx2, axpy_avx2,
  };
  return table;
}

}  // namespace tsopt::kernels

#else  // no AVX2 at compile time: dispatch never selects this table.

namespace tsopt::kernels {

const KernelTable& avx2_table() { return scalar_table(); }

}  // namespace tsopt::kernels

#endif
