#include <atomic>
#include <cstdlib>
#include <cstring>

#include "geodesy/kernels.hpp"

namespace geodesy::kernels {

namespace {

Isa detect() {
  if (const char* env = std::getenv("GEODESY_ISA"); env != nullptr && std::strcmp(env, "scalar") == 0) {
    return Isa::Scalar;
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (isa_supported(Isa::Avx2)) return Isa::Avx2;
#elif defined(__aarch64__)
  return Isa::Neon;
#endif
  return Isa::Scalar;
}

std::atomic<Isa>& selected() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return selected().load(std::memory_order_relaxed); }

void force_isa(Isa isa) { selected().store(isa_supported(isa) ? isa : Isa::Scalar, std::memory_order_relaxed); }

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
    case Isa::Neon:
      return "neon";
  }
  return "unknown";
}

void squared_distances(ColumnView points, std::span<const double> query, std::span<double> out) {
  switch (active_isa()) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2:
      return avx2::squared_distances(points, query, out);
#endif
#if defined(__aarch64__)
    case Isa::Neon:
      return neon::squared_distances(points, query, out);
#endif
    default:
      return scalar::squared_distances(points, query, out);
  }
}

void min_squared_distances(ColumnView points, std::span<const double> query, std::span<double> mins) {
  switch (active_isa()) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2:
      return avx2::min_squared_distances(points, query, mins);
#endif
#if defined(__aarch64__)
    case Isa::Neon:
      return neon::min_squared_distances(points, query, mins);
#endif
    default:
      return scalar::min_squared_distances(points, query, mins);
  }
}

}  // namespace geodesy::kernels
