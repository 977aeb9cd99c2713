#include <atomic>

#include "tsopt/kernels.hpp"

namespace tsopt::kernels {

namespace {

std::atomic<const KernelTable*> g_table{nullptr};
std::atomic<Isa> g_isa{Isa::scalar};

void select_default() {
  if (cpu_has_avx2()) {
    g_table.store(&avx2_table());
    g_isa.store(Isa::avx2);
  } else {
    g_table.store(&scalar_table());
    g_isa.store(Isa::scalar);
  }
}

const KernelTable& table() {
  const KernelTable* t = g_table.load(std::memory_order_acquire);
  if (!t) {
    select_default();
    t = g_table.load(std::memory_order_acquire);
  }
  return *t;
}

}  // namespace

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() {
  table();  // resolve on first use
  return g_isa.load(std::memory_order_acquire);
}

Isa force_isa(Isa isa) {
  if (isa == Isa::avx2 && !cpu_has_avx2()) isa = Isa::scalar;
  g_table.store(isa == Isa::avx2 ? &avx2_table() : &scalar_table(),
                std::memory_order_release);
  g_isa.store(isa, std::memory_order_release);
  return isa;
}

void mix_clamp(double* out, const double* x, const double* noise, std::size_t len,
               double alpha) {
  table().mix_clamp(out, x, noise, len, alpha);
}

void conv_row(double* out, const double* in, std::size_t len, const double* k,
              std::size_t radius) {
  table().conv_row(out, in, len, k, radius);
}

void outer_accumulate(double* m, const double* d1, const double* d2, std::size_t dim) {
  table().outer_accumulate(m, d1, d2, dim);
}

void fused_moment_update(double* theta, double* m, double* v, const double* g,
                         std::size_t len, double c1m, double c2m, double c1v,
                         double c2v, double step, double eps) {
  table().fused_moment_update(theta, m, v, g, len, c1m, c2m, c1v, c2v, step, eps);
}

void project_tanh(double* out, const double* wt, const double* x, std::size_t in_dim,
                  std::size_t out_dim) {
  table().project_tanh(out, wt, x, in_dim, out_dim);
}

void axpy(double* y, double a, const double* x, std::size_t len) {
  table().axpy(y, a, x, len);
}

}  // namespace tsopt::kernels
