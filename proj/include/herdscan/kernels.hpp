#pragma once

#include <span>
#include <string_view>

// Data-parallel inner loops. Every kernel has a scalar reference
// implementation; an AVX2 variant is picked at runtime when the CPU has it.
// Elementwise kernels are bit-identical across variants. Reductions may
// differ in the last bits because the vector variants reassociate.
namespace herdscan::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

/// ISA currently used by the dispatching entry points below.
Isa active_isa();

/// Best ISA the running CPU supports (ignores overrides).
Isa detected_isa();

/// Overrides dispatch. Falls back to Scalar when `isa` is unsupported.
/// HERDSCAN_SIMD=scalar in the environment has the same effect at startup.
void set_isa(Isa isa);

double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);

/// acc[t] += x[t] - ref[t]
void accumulate_diff(std::span<double> acc, std::span<const double> x, std::span<const double> ref);

/// acc[t] += |x[t] - center[t]|
void accumulate_abs_diff(std::span<double> acc, std::span<const double> x,
                         std::span<const double> center);

/// x[t] -= c
void subtract_scalar(std::span<double> x, double c);

namespace scalar {
double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
void accumulate_diff(std::span<double> acc, std::span<const double> x, std::span<const double> ref);
void accumulate_abs_diff(std::span<double> acc, std::span<const double> x,
                         std::span<const double> center);
void subtract_scalar(std::span<double> x, double c);
}  // namespace scalar

#if defined(HERDSCAN_HAVE_AVX2)
namespace avx2 {
double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
void accumulate_diff(std::span<double> acc, std::span<const double> x, std::span<const double> ref);
void accumulate_abs_diff(std::span<double> acc, std::span<const double> x,
                         std::span<const double> center);
void subtract_scalar(std::span<double> x, double c);
}  // namespace avx2
#endif

}  // namespace herdscan::kernels
