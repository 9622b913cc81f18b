#include <algorithm>

#include "flda/classify.hpp"
#include "flda/error.hpp"
#include "flda/kernels.hpp"
#include "internal.hpp"

namespace flda {

double expected_quadratic_risk(const LinearModel& model, const Dataset& source,
                               const DropoutTransfer& transfer) {
  detail::require_binary(source, "expected quadratic risk");
  detail::require_dims(source, transfer);
  if (!model.is_binary() || model.features() != source.cols()) {
    throw_dimension("quadratic risk needs a binary model over the source features");
  }
  const std::size_t m = source.cols();
  const auto w = model.column(0);
  const auto wf = w.first(m);
  const auto v = transfer.variance_factor();
  const auto labels = source.labels();
  // sum_i (y_i - w'x_i)^2 + w'V_i w: the expansion of y'y - 2w'E[Z]y + w'(E[Z]E[Z]' + V)w
  double risk = 0.0;
  source.for_each_row([&](std::size_t i, std::span<const double> x) {
    const double r = static_cast<double>(labels[i]) - (kernels::dot(wf, x) + w[m]);
    risk += r * r + kernels::weighted_square(v, wf, x);
  });
  return risk;
}

std::vector<double> grad_expected_quadratic_risk(const LinearModel& model, const Dataset& source,
                                                 const DropoutTransfer& transfer) {
  detail::require_binary(source, "expected quadratic risk");
  detail::require_dims(source, transfer);
  if (!model.is_binary() || model.features() != source.cols()) {
    throw_dimension("quadratic risk needs a binary model over the source features");
  }
  const std::size_t m = source.cols();
  const auto w = model.column(0);
  const auto wf = w.first(m);
  const auto v = transfer.variance_factor();
  const auto labels = source.labels();
  std::vector<double> grad(m + 1, 0.0);
  std::span<double> gf(grad.data(), m);
  source.for_each_row([&](std::size_t i, std::span<const double> x) {
    const double r = static_cast<double>(labels[i]) - (kernels::dot(wf, x) + w[m]);
    kernels::score_update(-2.0 * r, 2.0, x, v, wf, gf);
    grad[m] += -2.0 * r;
  });
  return grad;
}

namespace {

// Variance regularizer of the normal equations: v_d * sum_i x_id^2, which is
// v_d times the d-th diagonal entry of the Gram matrix. Bias gets none.
std::vector<double> dropout_diagonal(const detail::NormalEquations& eq,
                                     const DropoutTransfer& transfer) {
  std::vector<double> extra(eq.dim, 0.0);
  const auto v = transfer.variance_factor();
  for (std::size_t d = 0; d + 1 < eq.dim; ++d) {
    extra[d] = v[d] * eq.gram[d * eq.dim + d];
  }
  return extra;
}

LinearModel assemble(const std::vector<std::vector<double>>& solutions, std::size_t m,
                     bool adapted) {
  LinearModel model(m, solutions.size(), LossKind::quadratic, adapted);
  for (std::size_t k = 0; k < solutions.size(); ++k) {
    std::copy(solutions[k].begin(), solutions[k].end(), model.column(k).begin());
  }
  model.meta = TrainMeta{};
  return model;
}

void require_all_classes(const Dataset& data) {
  std::vector<std::size_t> seen(data.num_classes(), 0);
  for (int id : data.class_ids()) {
    ++seen[static_cast<std::size_t>(id)];
  }
  for (std::size_t k = 0; k < seen.size(); ++k) {
    if (seen[k] == 0) {
      throw_config("class " + std::to_string(k) + " has no samples in the training data");
    }
  }
}

}  // namespace

LinearModel fit_flda_q(const Dataset& source, const DropoutTransfer& transfer) {
  detail::require_binary(source, "flda-q");
  detail::require_dims(source, transfer);
  const auto eq = detail::build_normal_equations(source);
  const auto extra = dropout_diagonal(eq, transfer);
  return assemble(detail::solve_spd(eq, extra, ""), source.cols(), true);
}

LinearModel multiclass_fit_flda_q(const Dataset& source, const DropoutTransfer& transfer) {
  detail::require_dims(source, transfer);
  if (!source.has_labels()) {
    throw_config("flda-q needs labels");
  }
  require_all_classes(source);
  // binary labels are expanded to two one-vs-all columns
  Dataset expanded = source;
  if (source.label_kind() == LabelKind::binary) {
    expanded.with_labels(source.class_ids(), LabelKind::multiclass, 2, source.class_names());
  }
  const auto eq = detail::build_normal_equations(expanded);
  const auto extra = dropout_diagonal(eq, transfer);
  return assemble(detail::solve_spd(eq, extra, ""), source.cols(), true);
}

LinearModel fit_ls(const Dataset& data, const TrainConfig& config) {
  config.validate();
  if (!data.has_labels()) {
    throw_config("least squares needs labels");
  }
  if (data.label_kind() == LabelKind::multiclass) {
    require_all_classes(data);
  }
  const auto eq = detail::build_normal_equations(data);
  std::vector<double> extra(eq.dim, config.l2);
  extra.back() = 0.0;
  auto model = assemble(detail::solve_spd(eq, extra, "consider setting l2 > 0"), data.cols(), false);
  model.meta.seed = config.seed;
  return model;
}

}  // namespace flda
