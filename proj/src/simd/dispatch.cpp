#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "pool/simd/kernels.hpp"

namespace pool::simd {
namespace {

constexpr KernelTable kScalar{Isa::scalar, scalar::dot, scalar::axpy, scalar::blend,
                              scalar::scale, scalar::adam};
#if defined(POOL_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::avx2, avx2::dot, avx2::axpy, avx2::blend, avx2::scale,
                            avx2::adam};
#endif
#if defined(POOL_HAVE_NEON)
constexpr KernelTable kNeon{Isa::neon, neon::dot, neon::axpy, neon::blend, neon::scale,
                            neon::adam};
#endif

bool cpu_has_avx2() {
#if defined(POOL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& initial_table() {
  if (const char* forced = std::getenv("POOL_SIMD")) {
    const std::string name(forced);
    if (name == "scalar") return kScalar;
    if (name == "avx2" && kernels_for(Isa::avx2)) return *kernels_for(Isa::avx2);
    if (name == "neon" && kernels_for(Isa::neon)) return *kernels_for(Isa::neon);
  }
  const auto isas = available_isas();
  return *kernels_for(isas.back());
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{&initial_table()};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

const KernelTable* kernels_for(Isa isa) {
  switch (isa) {
    case Isa::scalar: return &kScalar;
    case Isa::avx2:
#if defined(POOL_HAVE_AVX2)
      if (cpu_has_avx2()) return &kAvx2;
#endif
      return nullptr;
    case Isa::neon:
#if defined(POOL_HAVE_NEON)
      return &kNeon;  // mandatory on AArch64
#else
      return nullptr;
#endif
  }
  return nullptr;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out{Isa::scalar};
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (kernels_for(isa)) out.push_back(isa);
  }
  return out;
}

const KernelTable& kernels() { return *active_slot().load(std::memory_order_acquire); }

void set_active_isa(Isa isa) {
  const KernelTable* table = kernels_for(isa);
  if (!table) {
    throw std::invalid_argument("ISA not available: " + std::string(isa_name(isa)));
  }
  active_slot().store(table, std::memory_order_release);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  return kernels().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: length mismatch");
  kernels().axpy(alpha, x.data(), y.data(), x.size());
}

void blend(double keep, double add, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("blend: length mismatch");
  kernels().blend(keep, add, x.data(), y.data(), x.size());
}

void scale(double s, std::span<double> y) { kernels().scale(s, y.data(), y.size()); }

}  // namespace pool::simd
