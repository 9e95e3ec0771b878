#pragma once

// Batched distance kernels over structure-of-arrays point storage.
//
// Every kernel has a scalar reference implementation and vectorized variants
// (AVX2 on x86-64, NEON on AArch64). The public entry points dispatch at
// runtime to the widest variant the CPU supports. All variants perform the
// same floating-point operations in the same order per output lane, so their
// results are bitwise identical to the scalar reference.

#include <cstddef>
#include <span>

namespace geodesy::kernels {

enum class Isa { Scalar, Avx2, Neon };

/// Coordinates of n points stored column-wise: columns[c][j] is coordinate c of point j.
struct ColumnView {
  std::span<const double* const> columns;
  std::size_t n = 0;
};

/// out[j] = |p_j - q|^2.
void squared_distances(ColumnView points, std::span<const double> query, std::span<double> out);

/// mins[j] = min(mins[j], |p_j - q|^2).
void min_squared_distances(ColumnView points, std::span<const double> query, std::span<double> mins);

Isa active_isa();
const char* isa_name(Isa isa);
bool isa_supported(Isa isa);

/// Overrides runtime selection; falls back to Scalar when `isa` is unsupported.
/// Intended for tests and benchmarking. Not thread-safe with concurrent kernel calls.
void force_isa(Isa isa);

namespace scalar {
void squared_distances(ColumnView points, std::span<const double> query, std::span<double> out);
void min_squared_distances(ColumnView points, std::span<const double> query, std::span<double> mins);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void squared_distances(ColumnView points, std::span<const double> query, std::span<double> out);
void min_squared_distances(ColumnView points, std::span<const double> query, std::span<double> mins);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
void squared_distances(ColumnView points, std::span<const double> query, std::span<double> out);
void min_squared_distances(ColumnView points, std::span<const double> query, std::span<double> mins);
}  // namespace neon
#endif

}  // namespace geodesy::kernels
