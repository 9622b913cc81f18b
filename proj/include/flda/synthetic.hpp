#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "flda/dataset.hpp"
#include "flda/random.hpp"

namespace flda {

enum class Family { bernoulli, poisson };

const char* to_string(Family family) noexcept;

/// Class-conditional generator with independent features. Class k draws
/// feature d from Bernoulli(params[k][d]) or Poisson(params[k][d]).
///
/// Two classes are emitted as binary labels: the first parameter vector is
/// labeled +1, the second -1. More classes use ids 0..K-1 in order.
struct SyntheticSpec {
  Family family = Family::bernoulli;
  std::vector<std::vector<double>> params;
  std::vector<double> priors;  // empty means uniform
  std::size_t n = 100000;      // samples per domain
  std::vector<double> true_theta;
  std::uint64_t seed = 1;

  std::size_t dims() const noexcept { return params.empty() ? 0 : params.front().size(); }
  std::size_t classes() const noexcept { return params.size(); }
  std::vector<double> class_priors() const;

  void validate() const;
};

/// Bernoulli [0.7 0.7] / [0.3 0.3], 50% dropout of the first feature.
SyntheticSpec bernoulli_preset();
/// Poisson rates [2 2] / [6 6], 50% dropout of the first feature.
SyntheticSpec poisson_preset();
/// "bernoulli" or "poisson"; anything else is a config error.
SyntheticSpec preset(const std::string& name);

/// n labeled samples from the source distribution.
Dataset generate_source(const SyntheticSpec& spec, std::size_t n, Rng& rng);
inline Dataset generate_source(const SyntheticSpec& spec, Rng& rng) {
  return generate_source(spec, spec.n, rng);
}

/// Fresh source samples pushed through dropout with spec.true_theta.
/// Labels are kept so target errors can be measured.
Dataset generate_target(const SyntheticSpec& spec, std::size_t n, Rng& rng);
inline Dataset generate_target(const SyntheticSpec& spec, Rng& rng) {
  return generate_target(spec, spec.n, rng);
}

/// Poisson draw by sequential search of the CDF (one uniform per draw).
std::uint32_t sample_poisson(double rate, Rng& rng);

/// INI text; keys live in a [synthetic] section:
///   family = bernoulli | poisson
///   preset = bernoulli | poisson   (optional starting point)
///   class0 = 0.7 0.7               (one line per class, space separated)
///   priors = 0.5 0.5
///   n = 100000
///   true_theta = 0.5 0
///   seed = 1
SyntheticSpec read_spec(std::istream& in, const std::string& source = "<stream>");
SyntheticSpec load_spec(const std::filesystem::path& path);
void write_spec(std::ostream& out, const SyntheticSpec& spec);

/// Whitespace- or comma-separated list of reals.
std::vector<double> parse_real_list(const std::string& text, const std::string& what);

}  // namespace flda
