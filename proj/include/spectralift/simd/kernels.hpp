#pragma once

// Runtime-dispatched arithmetic kernels.
//
// Every kernel has a portable scalar reference and, on x86-64 builds, an
// AVX2+FMA variant. The axpy-style kernels and adam_update perform the same
// per-element operation sequence in both variants and are bit-identical;
// reductions (dot, sum_sq_diff_f32) use lane-parallel partial sums and agree
// with the reference only to rounding.

#include <cstddef>
#include <string_view>

namespace spectralift::simd {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

/// Hyperparameters and bias corrections for a single Adam update.
struct AdamCoefficients {
  double lr;
  double beta1;
  double beta2;
  double eps;
  double bias_correction1;  // 1 - beta1^t
  double bias_correction2;  // 1 - beta2^t
};

struct KernelTable {
  Isa isa;
  // y[i] = fma(a, x[i], y[i])
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y[i] = fma(a, double(x[i]), y[i])
  void (*axpy_f32)(double a, const float* x, double* y, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  // sum over i of (double(a[i]) - double(b[i]))^2
  double (*sum_sq_diff_f32)(const float* a, const float* b, std::size_t n);
  void (*adam_update)(double* params, const double* grads, double* m, double* v,
                      std::size_t n, const AdamCoefficients& c);
};

bool isa_supported(Isa isa);

/// Kernel table for a specific ISA; throws ParameterError when unsupported.
const KernelTable& kernels_for(Isa isa);

/// Currently active kernel table. Defaults to the best supported ISA unless
/// the SPECTRALIFT_ISA environment variable ("scalar" / "avx2") says otherwise.
const KernelTable& kernels();

void set_active_isa(Isa isa);

Isa parse_isa(std::string_view name);

namespace scalar {
extern const KernelTable table;
}
#if defined(SPECTRALIFT_WITH_AVX2)
namespace avx2 {
extern const KernelTable table;
}
#endif

}  // namespace spectralift::simd
