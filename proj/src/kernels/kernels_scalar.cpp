#include "flda/kernels.hpp"

namespace flda::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double lane[kLanes] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t j = 0; j < n; ++j) {
    lane[j % kLanes] += x[j] * y[j];
  }
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double weighted_square_scalar(const double* v, const double* w, const double* x,
                              std::size_t n) {
  double lane[kLanes] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t j = 0; j < n; ++j) {
    const double wx = w[j] * x[j];
    lane[j % kLanes] += v[j] * (wx * wx);
  }
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    y[j] += alpha * x[j];
  }
}

void score_update_scalar(double c1, double c2, const double* x, const double* v,
                         const double* w, double* g, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const double lin = c1 * x[j];
    const double quad = (((c2 * v[j]) * w[j]) * x[j]) * x[j];
    g[j] += lin + quad;
  }
}

void rank1_upper_scalar(const double* x, double* gram, std::size_t n) {
  for (std::size_t r = 0; r < n; ++r) {
    const double xr = x[r];
    if (xr == 0.0) {
      continue;
    }
    double* row = gram + r * n;
    for (std::size_t c = r; c < n; ++c) {
      row[c] += xr * x[c];
    }
  }
}

void count_nonzero_scalar(const double* x, std::int64_t* counts, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    counts[j] += (x[j] != 0.0) ? 1 : 0;
  }
}

constexpr KernelTable kScalar{
    Backend::scalar,          "scalar",         &dot_scalar,         &weighted_square_scalar,
    &axpy_scalar,             &score_update_scalar, &rank1_upper_scalar, &count_nonzero_scalar,
};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace flda::kernels
