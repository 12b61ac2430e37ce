#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "pool/simd/kernel_abi.hpp"

namespace pool::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  DotFn dot;
  AxpyFn axpy;
  BlendFn blend;
  ScaleFn scale;
  AdamFn adam;
};

/// Table for the given ISA, or nullptr when it was not compiled in or the
/// running CPU lacks it.
const KernelTable* kernels_for(Isa isa);

/// Every ISA usable on this machine, scalar first.
std::vector<Isa> available_isas();

/// The active table. Chosen once at first use: the widest available ISA,
/// overridable with the environment variable POOL_SIMD=scalar|avx2|neon.
const KernelTable& kernels();

/// Replace the active table (tests and benchmarks). Throws
/// std::invalid_argument when the ISA is unavailable.
void set_active_isa(Isa isa);

// Span conveniences over the active table. Length mismatches throw.
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void blend(double keep, double add, std::span<const double> x,
           std::span<double> y);
void scale(double s, std::span<double> y);

}  // namespace pool::simd
