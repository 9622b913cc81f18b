#include "flda/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "flda/error.hpp"

namespace flda {

DropoutTransfer::DropoutTransfer(std::vector<double> theta, double epsilon)
    : theta_(std::move(theta)), epsilon_(epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw_config("dropout epsilon must lie in (0, 1)");
  }
  factor_.resize(theta_.size());
  for (std::size_t d = 0; d < theta_.size(); ++d) {
    if (std::isnan(theta_[d])) {
      throw_config("dropout rate is NaN");
    }
    theta_[d] = std::clamp(theta_[d], 0.0, 1.0 - epsilon_);
    factor_[d] = theta_[d] / (1.0 - theta_[d]);
  }
}

DropoutTransfer DropoutTransfer::perturbed(std::size_t feature, double delta) const {
  if (feature >= theta_.size()) {
    throw_dimension("perturbed feature index out of range");
  }
  std::vector<double> theta = theta_;
  theta[feature] += delta;
  return DropoutTransfer(std::move(theta), epsilon_);
}

SourceModel estimate_source_model(const Dataset& source) {
  if (source.empty()) {
    throw_config("cannot estimate a source model from an empty dataset");
  }
  return SourceModel{nonzero_frequencies(source).freq};
}

DropoutTransfer estimate_dropout(const SourceModel& source, std::span<const double> target_freq,
                                 double epsilon) {
  if (target_freq.size() != source.dims()) {
    throw_dimension("target has " + std::to_string(target_freq.size()) +
                    " features, source model has " + std::to_string(source.dims()));
  }
  std::vector<double> theta(source.dims(), 0.0);
  for (std::size_t d = 0; d < theta.size(); ++d) {
    const double eta = source.eta[d];
    if (eta > 0.0) {
      theta[d] = std::max(0.0, 1.0 - target_freq[d] / eta);
    }
  }
  return DropoutTransfer(std::move(theta), epsilon);
}

DropoutTransfer estimate_dropout(const SourceModel& source, const Dataset& target, double epsilon) {
  if (target.empty()) {
    throw_config("cannot estimate dropout from an empty target dataset");
  }
  if (target.cols() != source.dims()) {
    throw_dimension("target has " + std::to_string(target.cols()) + " features, source model has " +
                    std::to_string(source.dims()));
  }
  return estimate_dropout(source, nonzero_frequencies(target).freq, epsilon);
}

MarginalProbabilities marginal_probabilities(double theta, double eta) noexcept {
  const double nonzero = (1.0 - theta) * eta;
  return {nonzero, 1.0 - nonzero};
}

double feature_marginal_loglik(double theta, double eta, std::int64_t nonzero, std::size_t n) {
  const auto p = marginal_probabilities(theta, eta);
  const auto zeros = static_cast<std::int64_t>(n) - nonzero;
  double ll = 0.0;
  if (nonzero > 0) {
    if (p.nonzero <= 0.0) {
      throw_numeric("target observation impossible under model: non-zero value where (1 - theta) * eta = 0");
    }
    ll += static_cast<double>(nonzero) * std::log(p.nonzero);
  }
  if (zeros > 0) {
    if (p.zero <= 0.0) {
      return -std::numeric_limits<double>::infinity();
    }
    ll += static_cast<double>(zeros) * std::log(p.zero);
  }
  return ll;
}

double target_marginal_loglik(const DropoutTransfer& transfer, const SourceModel& source,
                              const Dataset& target) {
  if (transfer.dims() != source.dims() || target.cols() != source.dims()) {
    throw_dimension("transfer, source model and target dimensions differ");
  }
  const NonZeroFrequencies freq = nonzero_frequencies(target);
  double ll = 0.0;
  for (std::size_t d = 0; d < source.dims(); ++d) {
    ll += feature_marginal_loglik(transfer.theta()[d], source.eta[d], freq.count[d], freq.n);
  }
  return ll;
}

TransferMoments transfer_moments(std::span<const double> x, const DropoutTransfer& transfer) {
  if (x.size() != transfer.dims()) {
    throw_dimension("sample and transfer dimensions differ");
  }
  TransferMoments m;
  m.mean.assign(x.begin(), x.end());
  m.var_diag.resize(x.size());
  const auto factor = transfer.variance_factor();
  for (std::size_t d = 0; d < x.size(); ++d) {
    m.var_diag[d] = factor[d] * (x[d] * x[d]);
  }
  return m;
}

std::vector<double> sample_transfer(std::span<const double> x, const DropoutTransfer& transfer,
                                    Rng& rng) {
  if (x.size() != transfer.dims()) {
    throw_dimension("sample and transfer dimensions differ");
  }
  std::vector<double> z(x.size());
  const auto theta = transfer.theta();
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double u = uniform01(rng);
    z[d] = u < theta[d] ? 0.0 : x[d] / (1.0 - theta[d]);
  }
  return z;
}

Dataset apply_transfer(const Dataset& data, const DropoutTransfer& transfer, Rng& rng) {
  if (data.cols() != transfer.dims()) {
    throw_dimension("dataset and transfer dimensions differ");
  }
  std::vector<double> values;
  values.reserve(data.rows() * data.cols());
  data.for_each_row([&](std::size_t, std::span<const double> row) {
    const auto z = sample_transfer(row, transfer, rng);
    values.insert(values.end(), z.begin(), z.end());
  });
  Dataset out = Dataset::from_dense(data.rows(), data.cols(), std::move(values));
  if (data.has_labels()) {
    out.with_labels(std::vector<int>(data.labels().begin(), data.labels().end()),
                    data.label_kind(), data.num_classes(), data.class_names());
  }
  out.with_feature_names(data.feature_names());
  return data.storage() == Dataset::Storage::sparse ? out.to_sparse() : out;
}

void write_transfer(std::ostream& out, const DropoutTransfer& transfer,
                    const std::vector<std::string>& feature_names) {
  if (!feature_names.empty() && feature_names.size() != transfer.dims()) {
    throw_dimension("feature name count differs from transfer dimension");
  }
  out << "# flda dropout transfer\n";
  out << "epsilon " << format_double(transfer.epsilon()) << '\n';
  out << "features " << transfer.dims() << '\n';
  for (std::size_t d = 0; d < transfer.dims(); ++d) {
    out << (feature_names.empty() ? std::to_string(d) : feature_names[d]) << ' '
        << format_double(transfer.theta()[d]) << '\n';
  }
}

void save_transfer(const std::filesystem::path& path, const DropoutTransfer& transfer,
                   const std::vector<std::string>& feature_names) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw_io("cannot open '" + path.string() + "' for writing");
  }
  write_transfer(out, transfer, feature_names);
  if (!out) {
    throw_io("failed writing '" + path.string() + "'");
  }
}

DropoutTransfer load_transfer(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw_io("cannot open '" + path.string() + "' for reading");
  }
  const std::string source = path.string();
  double epsilon = DropoutTransfer::kDefaultEpsilon;
  std::optional<std::size_t> features;
  std::vector<double> theta;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (line.empty() || line.front() == '#') {
      continue;
    }
    std::istringstream fields(line);
    std::string key;
    std::string value;
    if (!(fields >> key >> value)) {
      throw ParseError(source, line_no, "expected '<key> <value>'");
    }
    const auto number = parse_double(value);
    if (!number) {
      throw ParseError(source, line_no, "value '" + value + "' is not numeric");
    }
    if (!features) {
      if (key == "epsilon") {
        epsilon = *number;
      } else if (key == "features") {
        features = static_cast<std::size_t>(*number);
      } else {
        throw ParseError(source, line_no, "expected 'epsilon' or 'features' before the rate table");
      }
      continue;
    }
    theta.push_back(*number);
  }
  if (!features || theta.size() != *features) {
    throw ParseError(source, 0, "rate table does not match the declared feature count");
  }
  return DropoutTransfer(std::move(theta), epsilon);
}

}  // namespace flda
