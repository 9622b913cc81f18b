#pragma once

// Data-parallel inner loops shared by the estimators.
//
// Every kernel has a scalar reference implementation and, where the CPU
// supports it, an AVX2 variant selected at runtime. Reductions use a fixed
// four-lane order (element j accumulates into lane j % 4, lanes combine as
// (l0 + l1) + (l2 + l3)) and element-wise updates use a fixed operation
// order, so all backends return bit-identical results.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace flda::kernels {

enum class Backend { scalar, avx2 };

inline constexpr std::size_t kLanes = 4;

struct KernelTable {
  Backend backend;
  const char* name;

  /// sum_j x_j * y_j
  double (*dot)(const double* x, const double* y, std::size_t n);

  /// sum_j v_j * (w_j * x_j)^2, i.e. w' diag(v .* x.^2) w
  double (*weighted_square)(const double* v, const double* w, const double* x,
                            std::size_t n);

  /// y_j += alpha * x_j
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

  /// g_j += c1 * x_j + c2 * v_j * w_j * x_j * x_j
  void (*score_update)(double c1, double c2, const double* x, const double* v,
                       const double* w, double* g, std::size_t n);

  /// Upper triangle of the row-major n x n matrix `gram` += x x'.
  void (*rank1_upper)(const double* x, double* gram, std::size_t n);

  /// counts_j += (x_j != 0)
  void (*count_nonzero)(const double* x, std::int64_t* counts, std::size_t n);
};

const KernelTable& scalar_table() noexcept;

/// Null when the binary was built without AVX2 support or the CPU lacks it.
const KernelTable* avx2_table() noexcept;

/// The table in use. Chosen on first call: FLDA_SIMD=scalar|avx2 if set,
/// otherwise the widest backend the CPU supports.
const KernelTable& active() noexcept;

/// Force a backend; returns false (and changes nothing) if unavailable.
bool select(Backend backend) noexcept;

bool available(Backend backend) noexcept;

std::string_view to_string(Backend backend) noexcept;

// Convenience wrappers over the active table.

inline double dot(std::span<const double> x, std::span<const double> y) noexcept {
  return active().dot(x.data(), y.data(), x.size());
}

inline double weighted_square(std::span<const double> v, std::span<const double> w,
                              std::span<const double> x) noexcept {
  return active().weighted_square(v.data(), w.data(), x.data(), x.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void score_update(double c1, double c2, std::span<const double> x,
                         std::span<const double> v, std::span<const double> w,
                         std::span<double> g) noexcept {
  active().score_update(c1, c2, x.data(), v.data(), w.data(), g.data(), x.size());
}

inline void rank1_upper(std::span<const double> x, std::span<double> gram) noexcept {
  active().rank1_upper(x.data(), gram.data(), x.size());
}

inline void count_nonzero(std::span<const double> x, std::span<std::int64_t> counts) noexcept {
  active().count_nonzero(x.data(), counts.data(), x.size());
}

}  // namespace flda::kernels
