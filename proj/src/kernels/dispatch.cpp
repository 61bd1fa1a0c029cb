#include <atomic>
#include <cstdlib>
#include <cstring>

#include "herdscan/kernels.hpp"

namespace herdscan::kernels {

namespace {

Isa probe() {
#if defined(HERDSCAN_HAVE_AVX2)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Isa::Avx2;
#endif
  return Isa::Scalar;
}

Isa initial_isa() {
  const char* env = std::getenv("HERDSCAN_SIMD");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
  return probe();
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

Isa detected_isa() {
  static const Isa isa = probe();
  return isa;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (isa == Isa::Avx2 && detected_isa() != Isa::Avx2) isa = Isa::Scalar;
  current().store(isa, std::memory_order_relaxed);
}

#if defined(HERDSCAN_HAVE_AVX2)
#define HERDSCAN_DISPATCH(fn, ...) \
  return active_isa() == Isa::Avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#else
#define HERDSCAN_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

double sum(std::span<const double> x) { HERDSCAN_DISPATCH(sum, x); }

double dot(std::span<const double> x, std::span<const double> y) { HERDSCAN_DISPATCH(dot, x, y); }

void accumulate_diff(std::span<double> acc, std::span<const double> x, std::span<const double> ref) {
  HERDSCAN_DISPATCH(accumulate_diff, acc, x, ref);
}

void accumulate_abs_diff(std::span<double> acc, std::span<const double> x,
                         std::span<const double> center) {
  HERDSCAN_DISPATCH(accumulate_abs_diff, acc, x, center);
}

void subtract_scalar(std::span<double> x, double c) { HERDSCAN_DISPATCH(subtract_scalar, x, c); }

#undef HERDSCAN_DISPATCH

}  // namespace herdscan::kernels
