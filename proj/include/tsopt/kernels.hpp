#pragma once

#include <cstddef>

namespace tsopt::kernels {

// Data-parallel inner loops used by the image, statistics and optimizer
// modules. Each kernel has a scalar reference implementation and an AVX2
// variant; dispatch picks one at runtime after a cpuid check. The variants
// are bit-for-bit equivalent: every SIMD lane evaluates the same operations
// in the same order as the scalar loop, and the build disables FP contraction
// so neither path fuses multiply-add.

enum class Isa { scalar, avx2 };

// The instruction set the dispatch table currently resolves to.
Isa active_isa();

// Force a specific path (used by the equivalence tests and the CLI). Falls
// back to scalar when the requested ISA is unsupported on this machine;
// returns the ISA actually selected.
Isa force_isa(Isa isa);

bool cpu_has_avx2();

// out[i] = clamp((1 - alpha) * x[i] + alpha * n[i], 0, 255)
void mix_clamp(double* out, const double* x, const double* noise, std::size_t len,
               double alpha);

// One output row of a separable correlation with a symmetric odd kernel of
// half-width `radius`; `in` must already be padded by `radius` on both sides
// (so it holds len + 2*radius values and out[i] = sum_t k[t] * in[i + t]).
void conv_row(double* out, const double* in, std::size_t len, const double* k,
              std::size_t radius);

// m[i][j] += d1[i] * d2[j], row-major m of shape dim x dim.
void outer_accumulate(double* m, const double* d1, const double* d2, std::size_t dim);

// Fused moment update used by the adaptive-rate optimizer:
//   m[i] = c1m * m[i] + c2m * g[i]
//   v[i] = c1v * v[i] + c2v * g[i]^2
//   theta[i] -= step * m[i] / (sqrt(v[i]) + eps)
void fused_moment_update(double* theta, double* m, double* v, const double* g,
                         std::size_t len, double c1m, double c2m, double c1v,
                         double c2v, double step, double eps);

// out[j] = sum_i wt[i * out_dim + j] * x[i]  (wt is the transposed projection,
// laid out so consecutive j are contiguous), followed by tanh.
void project_tanh(double* out, const double* wt, const double* x, std::size_t in_dim,
                  std::size_t out_dim);

// y[i] += a * x[i]
void axpy(double* y, double a, const double* x, std::size_t len);

// Raw tables; exposed so the equivalence tests can drive both paths directly.
struct KernelTable {
  void (*mix_clamp)(double*, const double*, const double*, std::size_t, double);
  void (*conv_row)(double*, const double*, std::size_t, const double*, std::size_t);
  void (*outer_accumulate)(double*, const double*, const double*, std::size_t);
  void (*fused_moment_update)(double*, double*, double*, const double*, std::size_t,
                              double, double, double, double, double, double);
  void (*project_tanh)(double*, const double*, const double*, std::size_t, std::size_t);
  void (*axpy)(double*, double, const double*, std::size_t);
};

const KernelTable& scalar_table();
const KernelTable& avx2_table();  // valid only if cpu_has_avx2()

}  // namespace tsopt::kernels
