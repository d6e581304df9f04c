#include <atomic>
#include <cstdlib>
#include <string>

#include "spectralift/error.hpp"
#include "spectralift/simd/kernels.hpp"

namespace spectralift::simd {
namespace {

const KernelTable* best_table() {
#if defined(SPECTRALIFT_WITH_AVX2)
  if (isa_supported(Isa::Avx2)) return &avx2::table;
#endif
  return &scalar::table;
}

const KernelTable* initial_table() {
  if (const char* env = std::getenv("SPECTRALIFT_ISA"); env != nullptr && *env != '\0') {
    const Isa wanted = parse_isa(env);
    if (isa_supported(wanted)) return &kernels_for(wanted);
  }
  return best_table();
}

std::atomic<const KernelTable*>& active() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::Scalar;
  if (name == "avx2") return Isa::Avx2;
  throw ParameterError("unknown ISA '" + std::string(name) + "' (expected scalar or avx2)");
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(SPECTRALIFT_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_supported(isa)) {
    throw ParameterError("ISA " + std::string(isa_name(isa)) + " is not supported on this machine/build");
  }
#if defined(SPECTRALIFT_WITH_AVX2)
  if (isa == Isa::Avx2) return avx2::table;
#endif
  return scalar::table;
}

const KernelTable& kernels() { return *active().load(std::memory_order_acquire); }

void set_active_isa(Isa isa) { active().store(&kernels_for(isa), std::memory_order_release); }

}  // namespace spectralift::simd
