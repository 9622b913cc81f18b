#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "flda/dataset.hpp"
#include "flda/transfer.hpp"

namespace flda {

enum class LossKind { quadratic, logistic };

const char* to_string(LossKind kind) noexcept;

struct TrainMeta {
  std::size_t iterations = 0;
  double grad_norm = 0.0;  // infinity norm at the returned weights
  std::uint64_t seed = 0;
  bool converged = true;
};

/// Linear classifier over m features. Weights are stored per output column
/// (one column for a binary model, K for a multiclass one); each column holds
/// m feature weights followed by the bias.
class LinearModel {
 public:
  LinearModel() = default;
  LinearModel(std::size_t features, std::size_t columns, LossKind loss, bool adapted);

  std::size_t features() const noexcept { return features_; }
  std::size_t columns() const noexcept { return columns_; }
  std::size_t stride() const noexcept { return features_ + 1; }
  bool is_binary() const noexcept { return columns_ == 1; }
  LossKind loss() const noexcept { return loss_; }
  bool adapted() const noexcept { return adapted_; }

  std::span<const double> weights() const noexcept { return weights_; }
  std::span<double> weights() noexcept { return weights_; }
  std::span<const double> column(std::size_t k) const;
  std::span<double> column(std::size_t k);
  double bias(std::size_t k = 0) const { return column(k).back(); }

  TrainMeta meta;

 private:
  std::size_t features_ = 0;
  std::size_t columns_ = 0;
  LossKind loss_ = LossKind::quadratic;
  bool adapted_ = false;
  std::vector<double> weights_;
};

struct TrainConfig {
  double l2 = 0.0;  // naive baselines only
  std::size_t max_iter = 5000;
  double grad_tol = 1e-5;  // infinity norm of the gradient
  double initial_step = 1.0;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  std::uint64_t seed = 0;  // recorded in TrainMeta

  void validate() const;
};

// Quadratic loss ---------------------------------------------------------

/// sum_i E[(y_i - w'z)^2] under the transfer, for a binary model.
double expected_quadratic_risk(const LinearModel& model, const Dataset& source,
                               const DropoutTransfer& transfer);
std::vector<double> grad_expected_quadratic_risk(const LinearModel& model, const Dataset& source,
                                                 const DropoutTransfer& transfer);

/// Closed-form minimizer of expected_quadratic_risk.
LinearModel fit_flda_q(const Dataset& source, const DropoutTransfer& transfer);

/// One-vs-all closed-form fits, one column per class.
LinearModel multiclass_fit_flda_q(const Dataset& source, const DropoutTransfer& transfer);

/// Ridge least squares (bias unpenalized); one-vs-all when multiclass.
LinearModel fit_ls(const Dataset& data, const TrainConfig& config = {});

// Logistic loss ----------------------------------------------------------

/// Mean second-order Taylor approximation of the expected logistic loss:
/// (1/n) sum_i [-y_i a_i + A(a_i) + s(-2a_i) s(2a_i) w'V_i w], a_i = w'x_i,
/// A(a) = log(e^a + e^-a), s the sigmoid.
double expected_logistic_risk_taylor(const LinearModel& model, const Dataset& source,
                                     const DropoutTransfer& transfer);
std::vector<double> grad_logistic_taylor(const LinearModel& model, const Dataset& source,
                                         const DropoutTransfer& transfer);

/// Multiclass counterpart with softmax log-partition; labels are class ids.
double multiclass_risk_taylor(const LinearModel& model, const Dataset& source,
                              const DropoutTransfer& transfer);
/// Gradient laid out like LinearModel::weights().
std::vector<double> multiclass_grad(const LinearModel& model, const Dataset& source,
                                    const DropoutTransfer& transfer);

/// Gradient descent with backtracking line search from zero weights.
/// Binary labels give a one-column model, multiclass labels a K-column one.
LinearModel fit_flda_l(const Dataset& source, const DropoutTransfer& transfer,
                       const TrainConfig& config = {});

/// l2-regularized logistic regression with the same optimizer.
LinearModel fit_lr(const Dataset& data, const TrainConfig& config = {});

// General transfer models ------------------------------------------------

/// Writes E[z | x] and the diagonal of Var[z | x] for a source sample x.
using MomentFunction =
    std::function<void(std::span<const double> x, std::span<double> mean, std::span<double> var_diag)>;

MomentFunction dropout_moments(const DropoutTransfer& transfer);

/// Taylor risks without assuming an unbiased transfer: the first-order term
/// and the squared mean shift are kept.
double logistic_risk_taylor_general(const LinearModel& model, const Dataset& source,
                                    const MomentFunction& moments);
std::vector<double> grad_logistic_taylor_general(const LinearModel& model, const Dataset& source,
                                                 const MomentFunction& moments);
double multiclass_risk_taylor_general(const LinearModel& model, const Dataset& source,
                                      const MomentFunction& moments);
std::vector<double> multiclass_grad_general(const LinearModel& model, const Dataset& source,
                                            const MomentFunction& moments);

// Prediction -------------------------------------------------------------

/// Binary: sign(w'[x;1]) with sign(0) = +1, as -1/+1. Multiclass: argmax
/// column as a class id, ties to the lowest id.
std::vector<int> predict(const LinearModel& model, const Dataset& data);

/// Decision values, one per row (binary) or rows x columns row-major.
std::vector<double> decision_values(const LinearModel& model, const Dataset& data);

double error_rate(std::span<const int> predicted, std::span<const int> truth);

/// Predicts and compares with the labels of `data`.
double error_rate(const LinearModel& model, const Dataset& data);

// Serialization ----------------------------------------------------------

void write_model(std::ostream& out, const LinearModel& model);
LinearModel read_model(std::istream& in, const std::string& source = "<stream>");
void save_model(const std::filesystem::path& path, const LinearModel& model);
LinearModel load_model(const std::filesystem::path& path);

}  // namespace flda
