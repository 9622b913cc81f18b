#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "flda/classify.hpp"
#include "flda/error.hpp"
#include "flda/kernels.hpp"

namespace flda {

const char* to_string(LossKind kind) noexcept {
  return kind == LossKind::quadratic ? "quadratic" : "logistic";
}

LinearModel::LinearModel(std::size_t features, std::size_t columns, LossKind loss, bool adapted)
    : features_(features),
      columns_(columns),
      loss_(loss),
      adapted_(adapted),
      weights_((features + 1) * columns, 0.0) {
  if (columns == 0) {
    throw_config("a linear model needs at least one column");
  }
}

std::span<const double> LinearModel::column(std::size_t k) const {
  if (k >= columns_) {
    throw_dimension("model column out of range");
  }
  return {weights_.data() + k * stride(), stride()};
}

std::span<double> LinearModel::column(std::size_t k) {
  if (k >= columns_) {
    throw_dimension("model column out of range");
  }
  return {weights_.data() + k * stride(), stride()};
}

void TrainConfig::validate() const {
  if (!(l2 >= 0.0)) {
    throw_config("l2 must be >= 0");
  }
  if (max_iter == 0) {
    throw_config("max_iter must be positive");
  }
  if (!(grad_tol > 0.0)) {
    throw_config("grad_tol must be positive");
  }
  if (!(initial_step > 0.0)) {
    throw_config("initial step must be positive");
  }
  if (!(shrink > 0.0 && shrink < 1.0)) {
    throw_config("step shrink factor must lie in (0, 1)");
  }
  if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0)) {
    throw_config("sufficient-decrease constant must lie in (0, 1)");
  }
}

std::vector<double> decision_values(const LinearModel& model, const Dataset& data) {
  if (data.cols() != model.features()) {
    throw_dimension("model has " + std::to_string(model.features()) + " features, data has " +
                    std::to_string(data.cols()));
  }
  const std::size_t m = model.features();
  const std::size_t k_count = model.columns();
  std::vector<double> out(data.rows() * k_count);
  data.for_each_row([&](std::size_t i, std::span<const double> x) {
    for (std::size_t k = 0; k < k_count; ++k) {
      const auto w = model.column(k);
      out[i * k_count + k] = kernels::dot(w.first(m), x) + w[m];
    }
  });
  return out;
}

std::vector<int> predict(const LinearModel& model, const Dataset& data) {
  const auto scores = decision_values(model, data);
  std::vector<int> out(data.rows());
  const std::size_t k_count = model.columns();
  for (std::size_t i = 0; i < data.rows(); ++i) {
    if (model.is_binary()) {
      out[i] = scores[i] >= 0.0 ? 1 : -1;
      continue;
    }
    const auto* row = scores.data() + i * k_count;
    // max_element keeps the first maximum, i.e. the lowest class id
    out[i] = static_cast<int>(std::max_element(row, row + k_count) - row);
  }
  return out;
}

double error_rate(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) {
    throw_dimension("prediction and truth lengths differ");
  }
  if (truth.empty()) {
    throw_config("error rate of an empty label set");
  }
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    wrong += predicted[i] != truth[i] ? 1 : 0;
  }
  return static_cast<double>(wrong) / static_cast<double>(truth.size());
}

double error_rate(const LinearModel& model, const Dataset& data) {
  if (!data.has_labels()) {
    throw_config("scoring needs a labeled dataset");
  }
  const auto predicted = predict(model, data);
  if (model.is_binary()) {
    if (data.label_kind() != LabelKind::binary) {
      throw_config("binary model scored against multiclass labels");
    }
    return error_rate(predicted, data.labels());
  }
  if (data.num_classes() > model.columns()) {
    throw_config("dataset has more classes than the model");
  }
  const auto truth = data.class_ids();
  return error_rate(predicted, truth);
}

void write_model(std::ostream& out, const LinearModel& model) {
  out << "# flda linear model\n";
  out << "loss " << to_string(model.loss()) << '\n';
  out << "adapted " << (model.adapted() ? 1 : 0) << '\n';
  out << "features " << model.features() << '\n';
  out << "columns " << model.columns() << '\n';
  out << "seed " << model.meta.seed << '\n';
  out << "iterations " << model.meta.iterations << '\n';
  out << "grad_norm " << format_double(model.meta.grad_norm) << '\n';
  out << "converged " << (model.meta.converged ? 1 : 0) << '\n';
  out << "weights\n";
  // one line per coordinate (features, then bias), one value per column
  for (std::size_t d = 0; d < model.stride(); ++d) {
    for (std::size_t k = 0; k < model.columns(); ++k) {
      if (k > 0) {
        out << ' ';
      }
      out << format_double(model.column(k)[d]);
    }
    out << '\n';
  }
}

LinearModel read_model(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::string loss;
  long long adapted = -1;
  long long features = -1;
  long long columns = -1;
  TrainMeta meta;

  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.front() != '#') {
        return true;
      }
    }
    return false;
  };
  auto integer = [&](const std::string& text) -> long long {
    const auto v = parse_double(text);
    if (!v || *v < 0 || std::floor(*v) != *v) {
      throw ParseError(source, line_no, "expected a non-negative integer, found '" + text + "'");
    }
    return static_cast<long long>(*v);
  };

  while (next_line()) {
    if (line == "weights") {
      break;
    }
    std::istringstream fields(line);
    std::string key;
    std::string value;
    if (!(fields >> key >> value)) {
      throw ParseError(source, line_no, "expected '<key> <value>'");
    }
    if (key == "loss") {
      loss = value;
    } else if (key == "adapted") {
      adapted = integer(value);
    } else if (key == "features") {
      features = integer(value);
    } else if (key == "columns") {
      columns = integer(value);
    } else if (key == "seed") {
      std::uint64_t seed = 0;
      std::istringstream(value) >> seed;
      meta.seed = seed;
    } else if (key == "iterations") {
      meta.iterations = static_cast<std::size_t>(integer(value));
    } else if (key == "grad_norm") {
      const auto v = parse_double(value);
      if (!v) {
        throw ParseError(source, line_no, "bad grad_norm");
      }
      meta.grad_norm = *v;
    } else if (key == "converged") {
      meta.converged = integer(value) != 0;
    } else {
      throw ParseError(source, line_no, "unknown header key '" + key + "'");
    }
  }
  if (line != "weights" || features < 0 || columns < 1 || adapted < 0 ||
      (loss != "quadratic" && loss != "logistic")) {
    throw ParseError(source, line_no, "incomplete model header");
  }
  LinearModel model(static_cast<std::size_t>(features), static_cast<std::size_t>(columns),
                    loss == "quadratic" ? LossKind::quadratic : LossKind::logistic, adapted != 0);
  model.meta = meta;
  for (std::size_t d = 0; d < model.stride(); ++d) {
    if (!next_line()) {
      throw ParseError(source, line_no, "weight table ends early");
    }
    std::istringstream fields(line);
    std::string cell;
    for (std::size_t k = 0; k < model.columns(); ++k) {
      if (!(fields >> cell)) {
        throw ParseError(source, line_no, "weight row has too few values");
      }
      const auto v = parse_double(cell);
      if (!v || !std::isfinite(*v)) {
        throw ParseError(source, line_no, "bad weight '" + cell + "'");
      }
      model.column(k)[d] = *v;
    }
    if (fields >> cell) {
      throw ParseError(source, line_no, "weight row has too many values");
    }
  }
  return model;
}

void save_model(const std::filesystem::path& path, const LinearModel& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw_io("cannot open '" + path.string() + "' for writing");
  }
  write_model(out, model);
  if (!out) {
    throw_io("failed writing '" + path.string() + "'");
  }
}

LinearModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw_io("cannot open '" + path.string() + "' for reading");
  }
  return read_model(in, path.string());
}

}  // namespace flda
