#include "flda/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <system_error>

#include "flda/error.hpp"
#include "flda/kernels.hpp"
#include "flda/random.hpp"

namespace flda {

Dataset Dataset::from_dense(std::size_t rows, std::size_t cols, std::vector<double> values) {
  if (values.size() != rows * cols) {
    throw_dimension("dense values hold " + std::to_string(values.size()) + " entries, expected " +
                    std::to_string(rows) + " x " + std::to_string(cols));
  }
  Dataset d;
  d.rows_ = rows;
  d.cols_ = cols;
  d.storage_ = Storage::dense;
  d.dense_ = std::move(values);
  return d;
}

Dataset Dataset::from_sparse(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                             std::vector<std::uint32_t> col_index, std::vector<double> values) {
  if (row_ptr.size() != rows + 1 || row_ptr.front() != 0 || row_ptr.back() != values.size() ||
      col_index.size() != values.size()) {
    throw_dimension("inconsistent CSR arrays");
  }
  Dataset d;
  d.rows_ = rows;
  d.cols_ = cols;
  d.storage_ = Storage::sparse;
  d.row_ptr_.reserve(row_ptr.size());
  d.row_ptr_.push_back(0);
  for (std::size_t i = 0; i < rows; ++i) {
    if (row_ptr[i + 1] < row_ptr[i]) {
      throw_dimension("CSR row pointers must be non-decreasing");
    }
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      if (col_index[k] >= cols) {
        throw_dimension("CSR column index out of range");
      }
      if (k > row_ptr[i] && col_index[k] <= col_index[k - 1]) {
        throw_dimension("CSR column indices must be strictly increasing within a row");
      }
      if (values[k] != 0.0) {
        d.col_index_.push_back(col_index[k]);
        d.sparse_values_.push_back(values[k]);
      }
    }
    d.row_ptr_.push_back(d.sparse_values_.size());
  }
  return d;
}

Dataset& Dataset::with_labels(std::vector<int> labels, LabelKind kind, std::size_t num_classes,
                              std::vector<std::string> class_names) {
  if (labels.size() != rows_) {
    throw_dimension("label count " + std::to_string(labels.size()) + " differs from row count " +
                    std::to_string(rows_));
  }
  if (!class_names.empty() && class_names.size() != num_classes) {
    throw_dimension("class name count differs from class count");
  }
  labels_ = std::move(labels);
  label_kind_ = kind;
  num_classes_ = kind == LabelKind::none ? 0 : num_classes;
  class_names_ = std::move(class_names);
  if (kind == LabelKind::none) {
    labels_.clear();
    class_names_.clear();
  }
  check_label_invariants();
  return *this;
}

void Dataset::check_label_invariants() const {
  if (label_kind_ == LabelKind::binary) {
    if (num_classes_ != 2) {
      throw_config("binary labels need exactly two classes");
    }
    for (int y : labels_) {
      if (y != -1 && y != 1) {
        throw_config("binary label " + std::to_string(y) + " is not -1 or +1");
      }
    }
  } else if (label_kind_ == LabelKind::multiclass) {
    if (num_classes_ < 1) {
      throw_config("multiclass labels need at least one class");
    }
    for (int y : labels_) {
      if (y < 0 || static_cast<std::size_t>(y) >= num_classes_) {
        throw_config("class label " + std::to_string(y) + " outside [0, " +
                     std::to_string(num_classes_) + ")");
      }
    }
  }
}

Dataset& Dataset::with_feature_names(std::vector<std::string> names) {
  if (!names.empty() && names.size() != cols_) {
    throw_dimension("feature name count differs from column count");
  }
  feature_names_ = std::move(names);
  return *this;
}

Dataset& Dataset::with_missing_mask(std::vector<std::uint8_t> mask) {
  if (!mask.empty() && mask.size() != rows_ * cols_) {
    throw_dimension("missing mask size differs from rows x cols");
  }
  missing_ = std::move(mask);
  return *this;
}

std::size_t Dataset::stored_nonzeros() const noexcept {
  if (storage_ == Storage::sparse) {
    return sparse_values_.size();
  }
  return static_cast<std::size_t>(
      std::count_if(dense_.begin(), dense_.end(), [](double v) { return v != 0.0; }));
}

int Dataset::class_id(std::size_t i) const {
  if (label_kind_ == LabelKind::none) {
    throw_config("dataset has no labels");
  }
  const int y = labels_.at(i);
  return label_kind_ == LabelKind::binary ? (y > 0 ? 1 : 0) : y;
}

std::vector<int> Dataset::class_ids() const {
  std::vector<int> ids(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    ids[i] = class_id(i);
  }
  return ids;
}

bool Dataset::missing(std::size_t i, std::size_t j) const {
  return !missing_.empty() && missing_[i * cols_ + j] != 0;
}

std::size_t Dataset::missing_in_row(std::size_t i) const {
  if (missing_.empty()) {
    return 0;
  }
  const auto* row = missing_.data() + i * cols_;
  return static_cast<std::size_t>(std::count_if(row, row + cols_, [](auto m) { return m != 0; }));
}

double Dataset::at(std::size_t i, std::size_t j) const {
  if (i >= rows_ || j >= cols_) {
    throw_dimension("index out of range");
  }
  if (storage_ == Storage::dense) {
    return dense_[i * cols_ + j];
  }
  const auto begin = col_index_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto end = col_index_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(begin, end, static_cast<std::uint32_t>(j));
  if (it == end || *it != j) {
    return 0.0;
  }
  return sparse_values_[static_cast<std::size_t>(it - col_index_.begin())];
}

void Dataset::copy_row(std::size_t i, std::span<double> out) const {
  if (out.size() != cols_) {
    throw_dimension("row buffer size differs from column count");
  }
  if (storage_ == Storage::dense) {
    std::copy_n(dense_.data() + i * cols_, cols_, out.data());
    return;
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
    out[col_index_[k]] = sparse_values_[k];
  }
}

std::span<const double> Dataset::dense_row(std::size_t i) const {
  if (storage_ != Storage::dense) {
    throw_config("dense_row on sparse storage");
  }
  return {dense_.data() + i * cols_, cols_};
}

SparseRow Dataset::sparse_row(std::size_t i) const {
  if (storage_ != Storage::sparse) {
    throw_config("sparse_row on dense storage");
  }
  const std::size_t begin = row_ptr_[i];
  const std::size_t len = row_ptr_[i + 1] - begin;
  return {{col_index_.data() + begin, len}, {sparse_values_.data() + begin, len}};
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  for (std::size_t r : rows) {
    if (r >= rows_) {
      throw_dimension("row index out of range");
    }
  }
  Dataset out;
  if (storage_ == Storage::dense) {
    std::vector<double> values;
    values.reserve(rows.size() * cols_);
    for (std::size_t r : rows) {
      const auto row = dense_row(r);
      values.insert(values.end(), row.begin(), row.end());
    }
    out = from_dense(rows.size(), cols_, std::move(values));
  } else {
    std::vector<std::size_t> ptr{0};
    std::vector<std::uint32_t> idx;
    std::vector<double> val;
    for (std::size_t r : rows) {
      const SparseRow row = sparse_row(r);
      idx.insert(idx.end(), row.index.begin(), row.index.end());
      val.insert(val.end(), row.value.begin(), row.value.end());
      ptr.push_back(val.size());
    }
    out = from_sparse(rows.size(), cols_, std::move(ptr), std::move(idx), std::move(val));
  }
  if (has_labels()) {
    std::vector<int> labels;
    labels.reserve(rows.size());
    for (std::size_t r : rows) {
      labels.push_back(labels_[r]);
    }
    out.with_labels(std::move(labels), label_kind_, num_classes_, class_names_);
  }
  out.feature_names_ = feature_names_;
  if (!missing_.empty()) {
    std::vector<std::uint8_t> mask;
    mask.reserve(rows.size() * cols_);
    for (std::size_t r : rows) {
      mask.insert(mask.end(), missing_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                  missing_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
    }
    out.missing_ = std::move(mask);
  }
  return out;
}

Dataset Dataset::to_dense() const {
  if (storage_ == Storage::dense) {
    return *this;
  }
  std::vector<double> values(rows_ * cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    copy_row(i, {values.data() + i * cols_, cols_});
  }
  Dataset out = *this;
  out.storage_ = Storage::dense;
  out.dense_ = std::move(values);
  out.row_ptr_.clear();
  out.col_index_.clear();
  out.sparse_values_.clear();
  return out;
}

Dataset Dataset::to_sparse() const {
  if (storage_ == Storage::sparse) {
    return *this;
  }
  std::vector<std::size_t> ptr{0};
  std::vector<std::uint32_t> idx;
  std::vector<double> val;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      const double v = dense_[i * cols_ + j];
      if (v != 0.0) {
        idx.push_back(static_cast<std::uint32_t>(j));
        val.push_back(v);
      }
    }
    ptr.push_back(val.size());
  }
  Dataset out = *this;
  out.storage_ = Storage::sparse;
  out.dense_.clear();
  out.row_ptr_ = std::move(ptr);
  out.col_index_ = std::move(idx);
  out.sparse_values_ = std::move(val);
  return out;
}

Dataset Dataset::relabeled(const std::vector<std::string>& classes) const {
  if (!has_labels()) {
    throw_config("cannot relabel a dataset without labels");
  }
  if (class_names_.size() != num_classes_) {
    throw_config("relabel needs the raw class tokens");
  }
  std::vector<std::string> tokens(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    tokens[i] = class_names_[static_cast<std::size_t>(class_id(i))];
  }
  Dataset out = *this;
  attach_label_tokens(out, tokens, classes);
  return out;
}

Dataset Dataset::without_labels() const {
  Dataset out = *this;
  out.label_kind_ = LabelKind::none;
  out.num_classes_ = 0;
  out.labels_.clear();
  out.class_names_.clear();
  return out;
}

NonZeroFrequencies nonzero_frequencies(const Dataset& data) {
  if (data.empty()) {
    throw_config("non-zero frequencies of an empty dataset");
  }
  NonZeroFrequencies out;
  out.n = data.rows();
  out.count.assign(data.cols(), 0);
  if (data.storage() == Dataset::Storage::sparse) {
    for (std::size_t i = 0; i < data.rows(); ++i) {
      const SparseRow row = data.sparse_row(i);
      for (std::size_t k = 0; k < row.index.size(); ++k) {
        out.count[row.index[k]] += row.value[k] != 0.0 ? 1 : 0;
      }
    }
  } else {
    data.for_each_row(
        [&](std::size_t, std::span<const double> row) { kernels::count_nonzero(row, out.count); });
  }
  out.freq.resize(data.cols());
  const double n = static_cast<double>(out.n);
  for (std::size_t j = 0; j < data.cols(); ++j) {
    out.freq[j] = static_cast<double>(out.count[j]) / n;
  }
  return out;
}

std::pair<Dataset, Dataset> missing_data_split(const Dataset& data) {
  if (!data.has_missing_mask()) {
    throw_config("missing-data split needs a missing-value mask");
  }
  if (!data.has_labels()) {
    throw_config("missing-data split needs labels");
  }
  std::vector<std::size_t> complete;
  std::vector<std::size_t> incomplete;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    (data.missing_in_row(i) == 0 ? complete : incomplete).push_back(i);
  }
  if (complete.empty()) {
    throw_config("no row is fully observed; cannot form a source domain");
  }
  return {data.select_rows(complete), data.select_rows(incomplete)};
}

std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t size, std::uint64_t seed) {
  if (size < 1 || size > n) {
    throw_config("subsample size " + std::to_string(size) + " outside [1, " + std::to_string(n) +
                 "]");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_index(rng, n - i));
    std::swap(perm[i], perm[j]);
  }
  perm.resize(size);
  return perm;
}

Dataset subsample(const Dataset& data, std::size_t size, std::uint64_t seed) {
  const auto rows = subsample_indices(data.rows(), size, seed);
  return data.select_rows(rows);
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view text) {
  if (!text.empty() && text.front() == '+') {
    text.remove_prefix(1);
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
      return std::nullopt;
    }
  }
  if (text.empty()) {
    return std::nullopt;
  }
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return value;
}

std::vector<std::string> sort_class_tokens(std::vector<std::string> tokens) {
  const bool numeric = std::all_of(tokens.begin(), tokens.end(),
                                   [](const std::string& t) { return parse_double(t).has_value(); });
  if (numeric) {
    std::stable_sort(tokens.begin(), tokens.end(), [](const std::string& a, const std::string& b) {
      return *parse_double(a) < *parse_double(b);
    });
    tokens.erase(std::unique(tokens.begin(), tokens.end(),
                             [](const std::string& a, const std::string& b) {
                               return *parse_double(a) == *parse_double(b);
                             }),
                 tokens.end());
  } else {
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  }
  return tokens;
}

Dataset& attach_label_tokens(Dataset& data, const std::vector<std::string>& tokens,
                             const std::vector<std::string>& classes) {
  if (classes.empty()) {
    throw_config("no label classes");
  }
  const bool numeric = std::all_of(classes.begin(), classes.end(),
                                   [](const std::string& t) { return parse_double(t).has_value(); });
  std::vector<double> class_values;
  if (numeric) {
    for (const auto& c : classes) {
      class_values.push_back(*parse_double(c));
    }
  }
  auto lookup = [&](const std::string& token) -> std::size_t {
    const auto v = numeric ? parse_double(token) : std::nullopt;
    for (std::size_t k = 0; k < classes.size(); ++k) {
      if (numeric ? (v && *v == class_values[k]) : token == classes[k]) {
        return k;
      }
    }
    throw_config("label '" + token + "' is not among the known classes");
  };
  std::vector<int> labels(tokens.size());
  if (classes.size() == 2) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      labels[i] = lookup(tokens[i]) == 0 ? -1 : 1;
    }
    data.with_labels(std::move(labels), LabelKind::binary, 2, classes);
  } else if (classes.size() == 1) {
    // A lone class is kept binary; a non-positive numeric token reads as -1.
    const auto v = parse_double(classes.front());
    const int y = (v && *v <= 0.0) ? -1 : 1;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      lookup(tokens[i]);
      labels[i] = y;
    }
    std::vector<std::string> names = y < 0 ? std::vector<std::string>{classes.front(), "+1"}
                                           : std::vector<std::string>{"-1", classes.front()};
    data.with_labels(std::move(labels), LabelKind::binary, 2, std::move(names));
  } else {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      labels[i] = static_cast<int>(lookup(tokens[i]));
    }
    data.with_labels(std::move(labels), LabelKind::multiclass, classes.size(), classes);
  }
  return data;
}

}  // namespace flda
