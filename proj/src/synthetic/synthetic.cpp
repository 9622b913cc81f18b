#include "flda/synthetic.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "flda/error.hpp"
#include "flda/transfer.hpp"

namespace flda {

const char* to_string(Family family) noexcept {
  return family == Family::bernoulli ? "bernoulli" : "poisson";
}

std::vector<double> SyntheticSpec::class_priors() const {
  if (!priors.empty()) {
    return priors;
  }
  return std::vector<double>(classes(), 1.0 / static_cast<double>(classes()));
}

void SyntheticSpec::validate() const {
  if (params.size() < 2) {
    throw_config("a synthetic spec needs at least two classes");
  }
  const std::size_t m = dims();
  if (m == 0) {
    throw_config("a synthetic spec needs at least one feature");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (params[k].size() != m) {
      throw_config("class " + std::to_string(k) + " has " + std::to_string(params[k].size()) +
                   " parameters, expected " + std::to_string(m));
    }
    for (double p : params[k]) {
      if (family == Family::bernoulli && !(p >= 0.0 && p <= 1.0)) {
        throw_config("Bernoulli parameters must lie in [0, 1]");
      }
      if (family == Family::poisson && !(p > 0.0 && std::isfinite(p))) {
        throw_config("Poisson rates must be positive and finite");
      }
    }
  }
  if (!priors.empty()) {
    if (priors.size() != params.size()) {
      throw_config("need one prior per class");
    }
    double sum = 0.0;
    for (double p : priors) {
      if (!(p >= 0.0)) {
        throw_config("class priors must be non-negative");
      }
      sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
      throw_config("class priors must sum to 1");
    }
  }
  if (n == 0) {
    throw_config("sample count n must be positive");
  }
  if (true_theta.size() != m) {
    throw_config("true_theta needs " + std::to_string(m) + " entries");
  }
  for (double t : true_theta) {
    if (!(t >= 0.0 && t < 1.0)) {
      throw_config("true_theta entries must lie in [0, 1)");
    }
  }
}

SyntheticSpec bernoulli_preset() {
  SyntheticSpec spec;
  spec.family = Family::bernoulli;
  spec.params = {{0.7, 0.7}, {0.3, 0.3}};
  spec.true_theta = {0.5, 0.0};
  return spec;
}

SyntheticSpec poisson_preset() {
  SyntheticSpec spec;
  spec.family = Family::poisson;
  spec.params = {{2.0, 2.0}, {6.0, 6.0}};
  spec.true_theta = {0.5, 0.0};
  return spec;
}

SyntheticSpec preset(const std::string& name) {
  if (name == "bernoulli") {
    return bernoulli_preset();
  }
  if (name == "poisson") {
    return poisson_preset();
  }
  throw_config("unknown preset '" + name + "' (expected bernoulli or poisson)");
}

std::uint32_t sample_poisson(double rate, Rng& rng) {
  const double u = uniform01(rng);
  double p = std::exp(-rate);
  double cdf = p;
  std::uint32_t k = 0;
  // p underflows long before k wraps; stop there rather than loop forever
  while (u >= cdf && p > 0.0) {
    ++k;
    p *= rate / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

Dataset generate_source(const SyntheticSpec& spec, std::size_t n, Rng& rng) {
  spec.validate();
  const std::size_t m = spec.dims();
  const std::size_t classes = spec.classes();
  const auto priors = spec.class_priors();
  std::vector<double> values(n * m);
  std::vector<int> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = uniform01(rng);
    std::size_t k = 0;
    double cumulative = priors[0];
    while (k + 1 < classes && u >= cumulative) {
      ++k;
      cumulative += priors[k];
    }
    ids[i] = static_cast<int>(k);
    for (std::size_t d = 0; d < m; ++d) {
      const double p = spec.params[k][d];
      values[i * m + d] = spec.family == Family::bernoulli
                              ? (uniform01(rng) < p ? 1.0 : 0.0)
                              : static_cast<double>(sample_poisson(p, rng));
    }
  }
  Dataset data = Dataset::from_dense(n, m, std::move(values));
  if (classes == 2) {
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = ids[i] == 0 ? 1 : -1;
    }
    data.with_labels(std::move(labels), LabelKind::binary, 2, {"-1", "+1"});
  } else {
    std::vector<std::string> names(classes);
    for (std::size_t k = 0; k < classes; ++k) {
      names[k] = std::to_string(k);
    }
    data.with_labels(std::move(ids), LabelKind::multiclass, classes, std::move(names));
  }
  return data;
}

Dataset generate_target(const SyntheticSpec& spec, std::size_t n, Rng& rng) {
  const Dataset fresh = generate_source(spec, n, rng);
  return apply_transfer(fresh, DropoutTransfer(spec.true_theta), rng);
}

std::vector<double> parse_real_list(const std::string& text, const std::string& what) {
  std::string cleaned = text;
  for (char& c : cleaned) {
    if (c == ',') {
      c = ' ';
    }
  }
  std::istringstream in(cleaned);
  std::vector<double> out;
  std::string token;
  while (in >> token) {
    const auto v = parse_double(token);
    if (!v) {
      throw_config("bad number '" + token + "' in " + what);
    }
    out.push_back(*v);
  }
  return out;
}

namespace {

std::uint64_t parse_unsigned(const std::string& text, const std::string& what) {
  std::uint64_t value = 0;
  std::size_t used = 0;
  try {
    value = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text.front() == '-') {
    throw_config(what + " must be a non-negative integer, found '" + text + "'");
  }
  return value;
}

}  // namespace

SyntheticSpec read_spec(std::istream& in, const std::string& source) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(source, e.line(), e.message());
  }
  const auto section = tree.get_child_optional("synthetic");
  if (!section) {
    throw_config(source + ": missing [synthetic] section");
  }
  SyntheticSpec spec;
  if (const auto name = section->get_optional<std::string>("preset")) {
    spec = preset(*name);
  }
  if (const auto family = section->get_optional<std::string>("family")) {
    if (*family == "bernoulli") {
      spec.family = Family::bernoulli;
    } else if (*family == "poisson") {
      spec.family = Family::poisson;
    } else {
      throw_config(source + ": unknown family '" + *family + "'");
    }
  }
  std::vector<std::vector<double>> params;
  for (std::size_t k = 0;; ++k) {
    const auto row = section->get_optional<std::string>("class" + std::to_string(k));
    if (!row) {
      break;
    }
    params.push_back(parse_real_list(*row, "class" + std::to_string(k)));
  }
  if (!params.empty()) {
    spec.params = std::move(params);
  }
  if (const auto priors = section->get_optional<std::string>("priors")) {
    spec.priors = parse_real_list(*priors, "priors");
  }
  if (const auto theta = section->get_optional<std::string>("true_theta")) {
    spec.true_theta = parse_real_list(*theta, "true_theta");
  }
  if (const auto n = section->get_optional<std::string>("n")) {
    spec.n = parse_unsigned(*n, "n");
  }
  if (const auto seed = section->get_optional<std::string>("seed")) {
    spec.seed = parse_unsigned(*seed, "seed");
  }
  for (const auto& [key, value] : *section) {
    const bool known = key == "preset" || key == "family" || key == "priors" ||
                       key == "true_theta" || key == "n" || key == "seed" ||
                       key.rfind("class", 0) == 0;
    if (!known) {
      throw_config(source + ": unknown key '" + key + "' in [synthetic]");
    }
  }
  spec.validate();
  return spec;
}

SyntheticSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw_io("cannot open '" + path.string() + "' for reading");
  }
  return read_spec(in, path.string());
}

void write_spec(std::ostream& out, const SyntheticSpec& spec) {
  auto list = [](const std::vector<double>& values) {
    std::string text;
    for (std::size_t i = 0; i < values.size(); ++i) {
      text += (i ? " " : "") + format_double(values[i]);
    }
    return text;
  };
  out << "[synthetic]\n";
  out << "family = " << to_string(spec.family) << '\n';
  for (std::size_t k = 0; k < spec.params.size(); ++k) {
    out << "class" << k << " = " << list(spec.params[k]) << '\n';
  }
  out << "priors = " << list(spec.class_priors()) << '\n';
  out << "n = " << spec.n << '\n';
  out << "true_theta = " << list(spec.true_theta) << '\n';
  out << "seed = " << spec.seed << '\n';
}

}  // namespace flda
