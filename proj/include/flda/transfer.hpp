#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "flda/dataset.hpp"
#include "flda/random.hpp"

namespace flda {

/// Independent Bernoulli model of "feature d is non-zero" in the source.
struct SourceModel {
  std::vector<double> eta;

  std::size_t dims() const noexcept { return eta.size(); }
};

/// Per-feature unbiased dropout: a source value is zeroed with probability
/// theta_d and otherwise scaled by 1 / (1 - theta_d).
class DropoutTransfer {
 public:
  static constexpr double kDefaultEpsilon = 1e-6;

  DropoutTransfer() = default;
  /// Rates are clamped into [0, 1 - epsilon].
  explicit DropoutTransfer(std::vector<double> theta, double epsilon = kDefaultEpsilon);

  /// The identity transfer on m features.
  static DropoutTransfer none(std::size_t dims) { return DropoutTransfer(std::vector<double>(dims)); }

  std::size_t dims() const noexcept { return theta_.size(); }
  double epsilon() const noexcept { return epsilon_; }
  std::span<const double> theta() const noexcept { return theta_; }
  /// theta_d / (1 - theta_d): per-unit-x^2 variance of the transferred value.
  std::span<const double> variance_factor() const noexcept { return factor_; }

  /// Copy with theta_d replaced by theta_d + delta, clamped as usual.
  DropoutTransfer perturbed(std::size_t feature, double delta) const;

 private:
  std::vector<double> theta_;
  std::vector<double> factor_;
  double epsilon_ = kDefaultEpsilon;
};

struct TransferMoments {
  std::vector<double> mean;
  std::vector<double> var_diag;
};

/// Marginal probability of observing a non-zero / zero target value for
/// one feature after integrating the Bernoulli source model out.
struct MarginalProbabilities {
  double nonzero;
  double zero;
};

SourceModel estimate_source_model(const Dataset& source);

/// theta_d = max(0, 1 - zeta_d / eta_d); eta_d == 0 gives theta_d = 0.
DropoutTransfer estimate_dropout(const SourceModel& source, const Dataset& target,
                                 double epsilon = DropoutTransfer::kDefaultEpsilon);

/// Same estimate from precomputed target non-zero frequencies.
DropoutTransfer estimate_dropout(const SourceModel& source, std::span<const double> target_freq,
                                 double epsilon = DropoutTransfer::kDefaultEpsilon);

MarginalProbabilities marginal_probabilities(double theta, double eta) noexcept;

/// Log-likelihood of one feature column with `nonzero` non-zero entries out
/// of `n`. Throws a numeric error when a non-zero observation has zero
/// probability; returns -inf when a zero observation has zero probability.
double feature_marginal_loglik(double theta, double eta, std::int64_t nonzero, std::size_t n);

/// sum_j sum_d log q(z_jd | theta_d, eta_d) of the dichotomized target.
double target_marginal_loglik(const DropoutTransfer& transfer, const SourceModel& source,
                              const Dataset& target);

TransferMoments transfer_moments(std::span<const double> x, const DropoutTransfer& transfer);

/// One draw of the transferred sample.
std::vector<double> sample_transfer(std::span<const double> x, const DropoutTransfer& transfer,
                                    Rng& rng);

/// Applies sample_transfer to every row; keeps labels and feature names.
Dataset apply_transfer(const Dataset& data, const DropoutTransfer& transfer, Rng& rng);

/// Plain-text table: header comment, "epsilon <e>", "features <m>", then one
/// "<name> <theta>" line per feature (name = feature name or 0-based index).
void write_transfer(std::ostream& out, const DropoutTransfer& transfer,
                    const std::vector<std::string>& feature_names = {});
void save_transfer(const std::filesystem::path& path, const DropoutTransfer& transfer,
                   const std::vector<std::string>& feature_names = {});
DropoutTransfer load_transfer(const std::filesystem::path& path);

}  // namespace flda
