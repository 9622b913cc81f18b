#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace flda {

enum class LabelKind { none, binary, multiclass };

/// Non-zero entries of one row, indices strictly increasing (0-based).
struct SparseRow {
  std::span<const std::uint32_t> index;
  std::span<const double> value;
};

/// Feature matrix (n samples x m features) with optional labels, feature
/// names and a missing-value mask. Immutable once built; the with_* setters
/// are meant for construction only.
///
/// Binary labels are stored as -1/+1 and multiclass labels as 0..K-1.
/// `class_names()` keeps the raw label token for every encoded class, in
/// encoding order.
class Dataset {
 public:
  enum class Storage { dense, sparse };

  Dataset() = default;

  /// `values` is row-major, size rows * cols.
  static Dataset from_dense(std::size_t rows, std::size_t cols, std::vector<double> values);

  /// CSR layout; explicit zeros in `values` are dropped.
  static Dataset from_sparse(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                             std::vector<std::uint32_t> col_index, std::vector<double> values);

  /// Binary: labels in {-1, +1}, num_classes == 2. Multiclass: labels in
  /// [0, num_classes). `class_names` is empty or has num_classes entries.
  Dataset& with_labels(std::vector<int> labels, LabelKind kind, std::size_t num_classes,
                       std::vector<std::string> class_names = {});
  Dataset& with_feature_names(std::vector<std::string> names);
  /// Row-major n x m, nonzero = value was absent in the raw input.
  Dataset& with_missing_mask(std::vector<std::uint8_t> mask);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }
  Storage storage() const noexcept { return storage_; }
  std::size_t stored_nonzeros() const noexcept;

  bool has_labels() const noexcept { return label_kind_ != LabelKind::none; }
  LabelKind label_kind() const noexcept { return label_kind_; }
  std::size_t num_classes() const noexcept { return num_classes_; }
  std::span<const int> labels() const noexcept { return labels_; }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }

  /// Label of row i as a class id in [0, K); binary -1 maps to 0, +1 to 1.
  int class_id(std::size_t i) const;
  std::vector<int> class_ids() const;

  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  bool has_missing_mask() const noexcept { return !missing_.empty(); }
  bool missing(std::size_t i, std::size_t j) const;
  std::size_t missing_in_row(std::size_t i) const;

  double at(std::size_t i, std::size_t j) const;

  /// Writes row i densely into `out` (size cols()).
  void copy_row(std::size_t i, std::span<double> out) const;

  /// Dense storage only.
  std::span<const double> dense_row(std::size_t i) const;
  /// Sparse storage only.
  SparseRow sparse_row(std::size_t i) const;

  /// Calls f(i, row) for every row in order with a dense view of the row.
  /// Sparse rows are expanded into a scratch buffer that is only valid
  /// during the call; both storages therefore feed identical values to `f`.
  template <typename F>
  void for_each_row(F&& f) const;

  Dataset select_rows(std::span<const std::size_t> rows) const;
  Dataset to_dense() const;
  Dataset to_sparse() const;

  /// Re-encodes the labels against `classes` (raw tokens, encoding order).
  /// Two classes give -1/+1, more give 0..K-1.
  Dataset relabeled(const std::vector<std::string>& classes) const;

  /// Same features, no labels.
  Dataset without_labels() const;

 private:
  void check_label_invariants() const;

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Storage storage_ = Storage::dense;
  std::vector<double> dense_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> col_index_;
  std::vector<double> sparse_values_;

  LabelKind label_kind_ = LabelKind::none;
  std::size_t num_classes_ = 0;
  std::vector<int> labels_;
  std::vector<std::string> class_names_;
  std::vector<std::string> feature_names_;
  std::vector<std::uint8_t> missing_;
};

template <typename F>
void Dataset::for_each_row(F&& f) const {
  if (storage_ == Storage::dense) {
    for (std::size_t i = 0; i < rows_; ++i) {
      f(i, std::span<const double>(dense_.data() + i * cols_, cols_));
    }
    return;
  }
  std::vector<double> scratch(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    const std::size_t begin = row_ptr_[i];
    const std::size_t end = row_ptr_[i + 1];
    for (std::size_t k = begin; k < end; ++k) {
      scratch[col_index_[k]] = sparse_values_[k];
    }
    f(i, std::span<const double>(scratch));
    for (std::size_t k = begin; k < end; ++k) {
      scratch[col_index_[k]] = 0.0;
    }
  }
}

/// Per-feature fraction of rows with a non-zero value (exact != 0 test).
struct NonZeroFrequencies {
  std::vector<double> freq;
  std::vector<std::int64_t> count;
  std::size_t n = 0;
};

NonZeroFrequencies nonzero_frequencies(const Dataset& data);

/// Orders raw label tokens: numerically when every token parses as a
/// number, lexicographically otherwise. Duplicates are removed.
std::vector<std::string> sort_class_tokens(std::vector<std::string> tokens);

/// Encodes raw tokens against `classes` (as returned by sort_class_tokens).
Dataset& attach_label_tokens(Dataset& data, const std::vector<std::string>& tokens,
                             const std::vector<std::string>& classes);

enum class HeaderMode { absent, present, detect };

struct DelimitedOptions {
  char delimiter = ',';
  HeaderMode header = HeaderMode::detect;
  /// Column name (needs a header), 0-based index, or "last". Unset = no labels.
  std::optional<std::string> label_column;
  /// Cells equal to this token are zero-imputed and flagged missing.
  std::optional<std::string> missing_token;
  bool sparse_storage = false;
};

/// Delimited text: one sample per line. With `HeaderMode::detect` the first
/// line is a header when none of its cells parses as a number.
Dataset load_delimited(const std::filesystem::path& path, const DelimitedOptions& options);

/// "label idx:val idx:val ..." per line, 1-based strictly increasing indices.
/// Stored sparse; unlisted entries are exact zeros.
Dataset load_sparse_indexed(const std::filesystem::path& path);

/// Writes a header (feature names or x1..xm, then "label") and one row per
/// sample with shortest round-trip number formatting.
void save_delimited(const Dataset& data, const std::filesystem::path& path, char delimiter = ',');

void save_sparse_indexed(const Dataset& data, const std::filesystem::path& path);

/// Rows without any missing value form the source; every other row, zero
/// imputed, forms the target. Order within each part is preserved.
std::pair<Dataset, Dataset> missing_data_split(const Dataset& data);

/// Uniform sample of `size` distinct rows, deterministic in `seed`.
Dataset subsample(const Dataset& data, std::size_t size, std::uint64_t seed);

/// Indices used by subsample(); exposed for harness bookkeeping.
std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t size, std::uint64_t seed);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Strict full-token parse; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);

}  // namespace flda
