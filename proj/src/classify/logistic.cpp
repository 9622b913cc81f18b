#include <algorithm>
#include <cmath>
#include <limits>

#include "flda/classify.hpp"
#include "flda/error.hpp"
#include "flda/kernels.hpp"
#include "internal.hpp"

namespace flda {
namespace {

using detail::log_partition_binary;

/// tanh(a) and s(2a) s(-2a) from one exponential.
struct BinaryCurvature {
  double tanh;
  double c;
};

BinaryCurvature binary_curvature(double a) noexcept {
  const double e = std::exp(-2.0 * std::fabs(a));
  const double t = (1.0 - e) / (1.0 + e);
  return {a < 0.0 ? -t : t, e / ((1.0 + e) * (1.0 + e))};
}

/// Softmax probabilities and log-sum-exp of `a`, overflow safe.
double softmax(std::span<const double> a, std::span<double> p) noexcept {
  const double top = *std::max_element(a.begin(), a.end());
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    p[k] = std::exp(a[k] - top);
    sum += p[k];
  }
  for (double& pk : p) {
    pk /= sum;
  }
  return top + std::log(sum);
}

// Binary Taylor objective over raw weights [w_features; bias]. `v` holds the
// dropout variance factors (all zero for plain logistic regression), `l2`
// penalizes feature weights by (l2 / 2) |w_f|^2.
double binary_objective(const Dataset& data, std::span<const double> v, double l2,
                        std::span<const double> w, std::span<double> grad) {
  const std::size_t m = data.cols();
  const auto wf = w.first(m);
  const auto labels = data.labels();
  const bool want_grad = !grad.empty();
  if (want_grad) {
    std::fill(grad.begin(), grad.end(), 0.0);
  }
  std::span<double> gf = want_grad ? grad.first(m) : std::span<double>{};
  double total = 0.0;
  data.for_each_row([&](std::size_t i, std::span<const double> x) {
    const double y = static_cast<double>(labels[i]);
    const double a = kernels::dot(wf, x) + w[m];
    const double q = kernels::weighted_square(v, wf, x);
    const auto [t, c] = binary_curvature(a);
    total += -y * a + log_partition_binary(a) + c * q;
    if (want_grad) {
      const double c1 = -y + t - 2.0 * c * t * q;
      kernels::score_update(c1, 2.0 * c, x, v, wf, gf);
      grad[m] += c1;
    }
  });
  const double n = static_cast<double>(data.rows());
  double penalty = 0.0;
  for (std::size_t d = 0; d < m; ++d) {
    penalty += wf[d] * wf[d];
  }
  if (want_grad) {
    for (std::size_t j = 0; j <= m; ++j) {
      grad[j] /= n;
    }
    for (std::size_t d = 0; d < m; ++d) {
      grad[d] += l2 * wf[d];
    }
  }
  return total / n + 0.5 * l2 * penalty;
}

// Multiclass Taylor objective; weights laid out as LinearModel columns.
// Per sample: -a_y + A(a) + 1/2 sum_k p_k (1 - p_k) W_k' V_i W_k.
double multiclass_objective(const Dataset& data, std::size_t classes, std::span<const double> v,
                            double l2, std::span<const double> w, std::span<double> grad) {
  const std::size_t m = data.cols();
  const std::size_t stride = m + 1;
  const bool want_grad = !grad.empty();
  if (want_grad) {
    std::fill(grad.begin(), grad.end(), 0.0);
  }
  const auto ids = data.class_ids();
  std::vector<double> a(classes), p(classes), q(classes);
  double total = 0.0;
  data.for_each_row([&](std::size_t i, std::span<const double> x) {
    for (std::size_t k = 0; k < classes; ++k) {
      const auto wk = w.subspan(k * stride, m);
      a[k] = kernels::dot(wk, x) + w[k * stride + m];
      q[k] = kernels::weighted_square(v, wk, x);
    }
    const double lse = softmax(a, p);
    const auto y = static_cast<std::size_t>(ids[i]);
    double penalty = 0.0;
    double h = 0.0;
    for (std::size_t k = 0; k < classes; ++k) {
      penalty += p[k] * (1.0 - p[k]) * q[k];
      h += q[k] * (1.0 - 2.0 * p[k]) * p[k];
    }
    total += -a[y] + lse + 0.5 * penalty;
    if (want_grad) {
      for (std::size_t k = 0; k < classes; ++k) {
        const double c1 = p[k] - (k == y ? 1.0 : 0.0) +
                          0.5 * (q[k] * (1.0 - 2.0 * p[k]) * p[k] - p[k] * h);
        const double c2 = p[k] * (1.0 - p[k]);
        kernels::score_update(c1, c2, x, v, w.subspan(k * stride, m),
                              grad.subspan(k * stride, m));
        grad[k * stride + m] += c1;
      }
    }
  });
  const double n = static_cast<double>(data.rows());
  double penalty = 0.0;
  for (std::size_t k = 0; k < classes; ++k) {
    for (std::size_t d = 0; d < m; ++d) {
      penalty += w[k * stride + d] * w[k * stride + d];
    }
  }
  if (want_grad) {
    for (double& g : grad) {
      g /= n;
    }
    for (std::size_t k = 0; k < classes; ++k) {
      for (std::size_t d = 0; d < m; ++d) {
        grad[k * stride + d] += l2 * w[k * stride + d];
      }
    }
  }
  return total / n + 0.5 * l2 * penalty;
}

void check_model(const LinearModel& model, const Dataset& data, bool binary) {
  if (model.features() != data.cols()) {
    throw_dimension("model has " + std::to_string(model.features()) + " features, data has " +
                    std::to_string(data.cols()));
  }
  if (binary && !model.is_binary()) {
    throw_dimension("binary risk needs a one-column model");
  }
}

void check_multiclass(const LinearModel& model, const Dataset& data) {
  if (!data.has_labels()) {
    throw_config("multiclass risk needs labels");
  }
  if (model.columns() < 2) {
    throw_dimension("multiclass risk needs at least two model columns");
  }
  if (data.num_classes() != model.columns()) {
    throw_dimension("dataset has " + std::to_string(data.num_classes()) + " classes, model has " +
                    std::to_string(model.columns()) + " columns");
  }
}

LinearModel fit_logistic(const Dataset& data, std::span<const double> v, double l2,
                         const TrainConfig& config, bool adapted) {
  if (!data.has_labels()) {
    throw_config("logistic fit needs labels");
  }
  if (data.empty()) {
    throw_config("logistic fit on an empty dataset");
  }
  const std::size_t m = data.cols();
  if (data.label_kind() == LabelKind::binary) {
    auto objective = [&](std::span<const double> w, std::span<double> g) {
      return binary_objective(data, v, l2, w, g);
    };
    auto result = detail::gradient_descent(objective, m + 1, config);
    LinearModel model(m, 1, LossKind::logistic, adapted);
    std::copy(result.weights.begin(), result.weights.end(), model.weights().begin());
    model.meta = result.meta;
    return model;
  }
  const std::size_t classes = data.num_classes();
  auto objective = [&](std::span<const double> w, std::span<double> g) {
    return multiclass_objective(data, classes, v, l2, w, g);
  };
  auto result = detail::gradient_descent(objective, classes * (m + 1), config);
  LinearModel model(m, classes, LossKind::logistic, adapted);
  std::copy(result.weights.begin(), result.weights.end(), model.weights().begin());
  model.meta = result.meta;
  return model;
}

}  // namespace

double expected_logistic_risk_taylor(const LinearModel& model, const Dataset& source,
                                     const DropoutTransfer& transfer) {
  detail::require_binary(source, "logistic Taylor risk");
  detail::require_dims(source, transfer);
  check_model(model, source, true);
  return binary_objective(source, transfer.variance_factor(), 0.0, model.weights(), {});
}

std::vector<double> grad_logistic_taylor(const LinearModel& model, const Dataset& source,
                                         const DropoutTransfer& transfer) {
  detail::require_binary(source, "logistic Taylor risk");
  detail::require_dims(source, transfer);
  check_model(model, source, true);
  std::vector<double> grad(model.stride());
  binary_objective(source, transfer.variance_factor(), 0.0, model.weights(), grad);
  return grad;
}

double multiclass_risk_taylor(const LinearModel& model, const Dataset& source,
                              const DropoutTransfer& transfer) {
  detail::require_dims(source, transfer);
  check_model(model, source, false);
  check_multiclass(model, source);
  return multiclass_objective(source, model.columns(), transfer.variance_factor(), 0.0,
                              model.weights(), {});
}

std::vector<double> multiclass_grad(const LinearModel& model, const Dataset& source,
                                    const DropoutTransfer& transfer) {
  detail::require_dims(source, transfer);
  check_model(model, source, false);
  check_multiclass(model, source);
  std::vector<double> grad(model.weights().size());
  multiclass_objective(source, model.columns(), transfer.variance_factor(), 0.0, model.weights(),
                       grad);
  return grad;
}

LinearModel fit_flda_l(const Dataset& source, const DropoutTransfer& transfer,
                       const TrainConfig& config) {
  detail::require_dims(source, transfer);
  return fit_logistic(source, transfer.variance_factor(), 0.0, config, true);
}

LinearModel fit_lr(const Dataset& data, const TrainConfig& config) {
  const std::vector<double> zeros(data.cols(), 0.0);
  return fit_logistic(data, zeros, config.l2, config, false);
}

// General transfer models. Plain loops: these are reference paths.

MomentFunction dropout_moments(const DropoutTransfer& transfer) {
  return [transfer](std::span<const double> x, std::span<double> mean, std::span<double> var) {
    const auto factor = transfer.variance_factor();
    for (std::size_t d = 0; d < x.size(); ++d) {
      mean[d] = x[d];
      var[d] = factor[d] * (x[d] * x[d]);
    }
  };
}

namespace {

struct GeneralSample {
  std::vector<double> mean;   // E[z | x], m entries
  std::vector<double> var;    // diag Var[z | x]
  std::vector<double> shift;  // E[z | x] - x
};

double general_binary(const LinearModel& model, const Dataset& data, const MomentFunction& moments,
                      std::span<double> grad) {
  detail::require_binary(data, "logistic Taylor risk");
  check_model(model, data, true);
  const std::size_t m = data.cols();
  const auto w = model.column(0);
  const auto labels = data.labels();
  GeneralSample s{std::vector<double>(m), std::vector<double>(m), std::vector<double>(m)};
  if (!grad.empty()) {
    std::fill(grad.begin(), grad.end(), 0.0);
  }
  double total = 0.0;
  data.for_each_row([&](std::size_t i, std::span<const double> x) {
    moments(x, s.mean, s.var);
    const double y = static_cast<double>(labels[i]);
    double a = w[m];
    double mu_score = w[m];
    double shift_score = 0.0;
    double var_score = 0.0;
    for (std::size_t d = 0; d < m; ++d) {
      s.shift[d] = s.mean[d] - x[d];
      a += w[d] * x[d];
      mu_score += w[d] * s.mean[d];
      shift_score += w[d] * s.shift[d];
      var_score += s.var[d] * w[d] * w[d];
    }
    const auto [t, c] = binary_curvature(a);
    const double second = var_score + shift_score * shift_score;
    total += -y * mu_score + log_partition_binary(a) + t * shift_score + c * second;
    if (!grad.empty()) {
      // d/da of the a-dependent factors: A' = t, t' = 4c, c' = -2ct
      const double along_x = t + 4.0 * c * shift_score - 2.0 * c * t * second;
      for (std::size_t d = 0; d < m; ++d) {
        grad[d] += -y * s.mean[d] + along_x * x[d] + t * s.shift[d] +
                   c * (2.0 * s.var[d] * w[d] + 2.0 * shift_score * s.shift[d]);
      }
      grad[m] += -y + along_x;
    }
  });
  const double n = static_cast<double>(data.rows());
  for (double& g : grad) {
    g /= n;
  }
  return total / n;
}

double general_multiclass(const LinearModel& model, const Dataset& data,
                          const MomentFunction& moments, std::span<double> grad) {
  check_model(model, data, false);
  check_multiclass(model, data);
  const std::size_t m = data.cols();
  const std::size_t classes = model.columns();
  const std::size_t stride = m + 1;
  const auto w = model.weights();
  const auto ids = data.class_ids();
  GeneralSample s{std::vector<double>(m), std::vector<double>(m), std::vector<double>(m)};
  std::vector<double> a(classes), p(classes), shift_score(classes), second(classes);
  if (!grad.empty()) {
    std::fill(grad.begin(), grad.end(), 0.0);
  }
  double total = 0.0;
  data.for_each_row([&](std::size_t i, std::span<const double> x) {
    moments(x, s.mean, s.var);
    for (std::size_t d = 0; d < m; ++d) {
      s.shift[d] = s.mean[d] - x[d];
    }
    const auto y = static_cast<std::size_t>(ids[i]);
    double mu_score_y = w[y * stride + m];
    for (std::size_t d = 0; d < m; ++d) {
      mu_score_y += w[y * stride + d] * s.mean[d];
    }
    for (std::size_t k = 0; k < classes; ++k) {
      const double* wk = w.data() + k * stride;
      double ak = wk[m];
      double sk = 0.0;
      double vk = 0.0;
      for (std::size_t d = 0; d < m; ++d) {
        ak += wk[d] * x[d];
        sk += wk[d] * s.shift[d];
        vk += s.var[d] * wk[d] * wk[d];
      }
      a[k] = ak;
      shift_score[k] = sk;
      second[k] = vk + sk * sk;
    }
    const double lse = softmax(a, p);
    double first_order = 0.0;
    double curvature = 0.0;
    double h = 0.0;
    for (std::size_t k = 0; k < classes; ++k) {
      first_order += p[k] * shift_score[k];
      curvature += p[k] * (1.0 - p[k]) * second[k];
      h += second[k] * (1.0 - 2.0 * p[k]) * p[k];
    }
    total += -mu_score_y + lse + first_order + 0.5 * curvature;
    if (grad.empty()) {
      return;
    }
    for (std::size_t k = 0; k < classes; ++k) {
      const double g_k = p[k] * (1.0 - p[k]);
      const double along_x = p[k] + p[k] * shift_score[k] - p[k] * first_order +
                             0.5 * (second[k] * (1.0 - 2.0 * p[k]) * p[k] - p[k] * h);
      const double label = k == y ? 1.0 : 0.0;
      double* gk = grad.data() + k * stride;
      const double* wk = w.data() + k * stride;
      for (std::size_t d = 0; d < m; ++d) {
        gk[d] += -label * s.mean[d] + along_x * x[d] + p[k] * s.shift[d] +
                 g_k * (s.var[d] * wk[d] + shift_score[k] * s.shift[d]);
      }
      gk[m] += -label + along_x;
    }
  });
  const double n = static_cast<double>(data.rows());
  for (double& g : grad) {
    g /= n;
  }
  return total / n;
}

}  // namespace

double logistic_risk_taylor_general(const LinearModel& model, const Dataset& source,
                                    const MomentFunction& moments) {
  return general_binary(model, source, moments, {});
}

std::vector<double> grad_logistic_taylor_general(const LinearModel& model, const Dataset& source,
                                                 const MomentFunction& moments) {
  std::vector<double> grad(model.stride());
  general_binary(model, source, moments, grad);
  return grad;
}

double multiclass_risk_taylor_general(const LinearModel& model, const Dataset& source,
                                      const MomentFunction& moments) {
  return general_multiclass(model, source, moments, {});
}

std::vector<double> multiclass_grad_general(const LinearModel& model, const Dataset& source,
                                            const MomentFunction& moments) {
  std::vector<double> grad(model.weights().size());
  general_multiclass(model, source, moments, grad);
  return grad;
}

}  // namespace flda
