#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "flda/error.hpp"
#include "flda/kernels.hpp"
#include "internal.hpp"

namespace flda::detail {

void require_binary(const Dataset& data, const char* what) {
  if (data.label_kind() != LabelKind::binary) {
    throw_config(std::string(what) + " needs binary -1/+1 labels");
  }
}

void require_dims(const Dataset& data, const DropoutTransfer& transfer) {
  if (data.cols() != transfer.dims()) {
    throw_dimension("data has " + std::to_string(data.cols()) + " features, transfer has " +
                    std::to_string(transfer.dims()));
  }
}

double log_partition_binary(double a) noexcept {
  const double abs_a = std::fabs(a);
  return abs_a + std::log1p(std::exp(-2.0 * abs_a));
}

NormalEquations build_normal_equations(const Dataset& data) {
  if (!data.has_labels()) {
    throw_config("least-squares fit needs labels");
  }
  if (data.empty()) {
    throw_config("least-squares fit on an empty dataset");
  }
  const std::size_t m = data.cols();
  NormalEquations eq;
  eq.dim = m + 1;
  eq.gram.assign(eq.dim * eq.dim, 0.0);
  const bool binary = data.label_kind() == LabelKind::binary;
  const std::size_t targets = binary ? 1 : data.num_classes();
  eq.rhs.assign(targets, std::vector<double>(eq.dim, 0.0));

  std::vector<double> aug(eq.dim, 1.0);
  const auto labels = data.labels();
  data.for_each_row([&](std::size_t i, std::span<const double> x) {
    std::copy(x.begin(), x.end(), aug.begin());
    kernels::rank1_upper(aug, eq.gram);
    if (binary) {
      kernels::axpy(static_cast<double>(labels[i]), aug, eq.rhs[0]);
    } else {
      for (std::size_t k = 0; k < targets; ++k) {
        kernels::axpy(static_cast<std::size_t>(labels[i]) == k ? 1.0 : -1.0, aug, eq.rhs[k]);
      }
    }
  });
  return eq;
}

std::vector<std::vector<double>> solve_spd(const NormalEquations& eq, std::span<const double> extra,
                                           const std::string& hint) {
  const auto n = static_cast<Eigen::Index>(eq.dim);
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = r; c < n; ++c) {
      const double v = eq.gram[static_cast<std::size_t>(r * n + c)];
      a(r, c) = v;
      a(c, r) = v;
    }
  }
  for (Eigen::Index d = 0; d < n && static_cast<std::size_t>(d) < extra.size(); ++d) {
    a(d, d) += extra[static_cast<std::size_t>(d)];
  }
  if (!a.allFinite()) {
    throw_numeric(hint.empty() ? std::string("normal equations contain non-finite entries")
                               : "normal equations contain non-finite entries; " + hint);
  }

  // rcond below this is treated as numerically singular
  constexpr double kMinRcond = 1e-14;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  double rcond = llt.info() == Eigen::Success ? llt.rcond() : 0.0;
  if (!(rcond >= kMinRcond)) {
    const double jitter = 1e-9 * a.diagonal().mean();
    Eigen::MatrixXd jittered = a;
    jittered.diagonal().array() += jitter;
    llt.compute(jittered);
    const double retry = llt.info() == Eigen::Success ? llt.rcond() : 0.0;
    if (!(retry >= kMinRcond)) {
      std::ostringstream msg;
      msg << "singular linear system (rcond " << rcond << ", " << retry << " after jitter "
          << jitter << ")";
      if (!hint.empty()) {
        msg << "; " << hint;
      }
      throw_numeric(msg.str());
    }
  }

  std::vector<std::vector<double>> out;
  out.reserve(eq.rhs.size());
  for (const auto& rhs : eq.rhs) {
    const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), n);
    const Eigen::VectorXd w = llt.solve(b);
    if (!w.allFinite()) {
      throw_numeric("linear solve produced non-finite weights");
    }
    out.emplace_back(w.data(), w.data() + n);
  }
  return out;
}

DescentResult gradient_descent(const ObjectiveFn& objective, std::size_t dim,
                               const TrainConfig& config) {
  config.validate();
  DescentResult result;
  result.weights.assign(dim, 0.0);
  result.meta.seed = config.seed;
  result.meta.converged = false;

  std::vector<double> grad(dim);
  std::vector<double> trial(dim);
  double value = objective(result.weights, grad);
  double step = config.initial_step;

  for (std::size_t iter = 0;; ++iter) {
    if (!std::isfinite(value)) {
      throw_numeric("objective became non-finite during descent; rescale the features");
    }
    double inf_norm = 0.0;
    double sq_norm = 0.0;
    for (double g : grad) {
      inf_norm = std::max(inf_norm, std::fabs(g));
      sq_norm += g * g;
    }
    result.meta.iterations = iter;
    result.meta.grad_norm = inf_norm;
    if (inf_norm <= config.grad_tol) {
      result.meta.converged = true;
      break;
    }
    if (iter == config.max_iter) {
      break;
    }

    // Armijo backtracking; each search starts one expansion above the last
    // accepted step, capped at the configured initial step.
    step = std::min(config.initial_step, step / config.shrink);
    double next_value = 0.0;
    bool accepted = false;
    while (step > std::numeric_limits<double>::min()) {
      for (std::size_t j = 0; j < dim; ++j) {
        trial[j] = result.weights[j] - step * grad[j];
      }
      next_value = objective(trial, {});
      // the strict test matters once the Armijo margin is below the
      // resolution of the objective: equal values would otherwise be accepted
      if (std::isfinite(next_value) && next_value < value &&
          next_value <= value - config.sufficient_decrease * step * sq_norm) {
        accepted = true;
        break;
      }
      step *= config.shrink;
    }
    if (!accepted) {
      break;  // no representable step decreases the objective
    }
    result.weights.swap(trial);
    value = objective(result.weights, grad);
  }
  return result;
}

}  // namespace flda::detail
