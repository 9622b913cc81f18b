#pragma once

// Shared machinery for the classifiers; not part of the public interface.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "flda/classify.hpp"

namespace flda::detail {

/// Augmented normal equations of a dataset: upper triangle of
/// sum_i [x_i;1][x_i;1]' (row-major, (m+1)^2) and per-class right-hand sides
/// sum_i t_ik [x_i;1] with t_ik = +1 for class k and -1 otherwise.
struct NormalEquations {
  std::size_t dim = 0;  // m + 1
  std::vector<double> gram;
  std::vector<std::vector<double>> rhs;
};

/// Binary datasets produce one right-hand side (the -1/+1 labels);
/// multiclass datasets produce one per class.
NormalEquations build_normal_equations(const Dataset& data);

/// Solves (gram + diag(extra)) w = rhs_k for every k with a Cholesky
/// factorization; on failure retries once with 1e-9 * mean(diagonal) added.
/// `hint` is appended to the error message when both attempts fail.
std::vector<std::vector<double>> solve_spd(const NormalEquations& eq, std::span<const double> extra,
                                           const std::string& hint);

/// f(w, grad): returns the objective and writes the gradient when grad is
/// non-empty.
using ObjectiveFn = std::function<double(std::span<const double> w, std::span<double> grad)>;

struct DescentResult {
  std::vector<double> weights;
  TrainMeta meta;
};

/// Batch gradient descent with Armijo backtracking, started from zero.
DescentResult gradient_descent(const ObjectiveFn& objective, std::size_t dim,
                               const TrainConfig& config);

void require_binary(const Dataset& data, const char* what);
void require_dims(const Dataset& data, const DropoutTransfer& transfer);

/// log(e^a + e^-a), overflow safe.
double log_partition_binary(double a) noexcept;

}  // namespace flda::detail
