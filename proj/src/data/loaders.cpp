#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "flda/dataset.hpp"
#include "flda/error.hpp"

namespace flda {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_cells(std::string_view line, char delimiter) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    const auto cell = line.substr(start, pos == std::string_view::npos ? line.npos : pos - start);
    cells.emplace_back(trim(cell));
    if (pos == std::string_view::npos) {
      break;
    }
    start = pos + 1;
  }
  return cells;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw_io("cannot open '" + path.string() + "' for reading");
  }
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw_io("cannot open '" + path.string() + "' for writing");
  }
  return out;
}

std::size_t resolve_label_column(const std::string& spec, const std::vector<std::string>& header,
                                 std::size_t width) {
  if (spec == "last") {
    return width - 1;
  }
  std::size_t index = 0;
  const auto res = std::from_chars(spec.data(), spec.data() + spec.size(), index);
  if (res.ec == std::errc{} && res.ptr == spec.data() + spec.size()) {
    if (index >= width) {
      throw_config("label column " + spec + " out of range (" + std::to_string(width) +
                   " columns)");
    }
    return index;
  }
  const auto it = std::find(header.begin(), header.end(), spec);
  if (it == header.end()) {
    throw_config("unknown label column '" + spec + "'");
  }
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

Dataset load_delimited(const std::filesystem::path& path, const DelimitedOptions& options) {
  auto in = open_input(path);
  const std::string source = path.string();

  std::vector<std::pair<std::size_t, std::vector<std::string>>> lines;
  std::string raw;
  for (std::size_t line_no = 1; std::getline(in, raw); ++line_no) {
    if (trim(raw).empty()) {
      continue;
    }
    lines.emplace_back(line_no, split_cells(raw, options.delimiter));
  }
  if (lines.empty()) {
    throw ParseError(source, 0, "file contains no rows");
  }

  const auto is_missing = [&](const std::string& cell) {
    return options.missing_token && cell == *options.missing_token;
  };

  bool has_header = options.header == HeaderMode::present;
  if (options.header == HeaderMode::detect) {
    const auto& first = lines.front().second;
    has_header = std::none_of(first.begin(), first.end(), [&](const std::string& c) {
      return parse_double(c).has_value() || is_missing(c);
    });
  }
  std::vector<std::string> header;
  if (has_header) {
    header = lines.front().second;
    lines.erase(lines.begin());
    if (lines.empty()) {
      throw ParseError(source, 0, "file contains a header but no data rows");
    }
  }

  const std::size_t width = has_header ? header.size() : lines.front().second.size();
  std::optional<std::size_t> label_col;
  if (options.label_column) {
    label_col = resolve_label_column(*options.label_column, header, width);
  }
  const std::size_t cols = label_col ? width - 1 : width;
  const std::size_t rows = lines.size();

  std::vector<double> values(rows * cols, 0.0);
  std::vector<std::uint8_t> mask(rows * cols, 0);
  std::vector<std::string> tokens;
  tokens.reserve(label_col ? rows : 0);

  for (std::size_t i = 0; i < rows; ++i) {
    const auto& [line_no, cells] = lines[i];
    if (cells.size() != width) {
      throw ParseError(source, line_no,
                       "expected " + std::to_string(width) + " cells, found " +
                           std::to_string(cells.size()));
    }
    std::size_t j = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (label_col && c == *label_col) {
        if (cells[c].empty() || is_missing(cells[c])) {
          throw ParseError(source, line_no, "missing label");
        }
        tokens.push_back(cells[c]);
        continue;
      }
      if (is_missing(cells[c])) {
        mask[i * cols + j] = 1;
      } else {
        const auto v = parse_double(cells[c]);
        if (!v || !std::isfinite(*v)) {
          throw ParseError(source, line_no,
                           "non-numeric cell '" + cells[c] + "' in column " + std::to_string(c));
        }
        values[i * cols + j] = *v;
      }
      ++j;
    }
  }

  Dataset data = Dataset::from_dense(rows, cols, std::move(values));
  if (has_header) {
    std::vector<std::string> names;
    for (std::size_t c = 0; c < width; ++c) {
      if (!label_col || c != *label_col) {
        names.push_back(header[c]);
      }
    }
    data.with_feature_names(std::move(names));
  }
  if (options.missing_token) {
    data.with_missing_mask(std::move(mask));
  }
  if (label_col) {
    attach_label_tokens(data, tokens, sort_class_tokens(tokens));
  }
  return options.sparse_storage ? data.to_sparse() : data;
}

Dataset load_sparse_indexed(const std::filesystem::path& path) {
  auto in = open_input(path);
  const std::string source = path.string();

  std::vector<std::size_t> ptr{0};
  std::vector<std::uint32_t> idx;
  std::vector<double> val;
  std::vector<std::string> tokens;
  std::size_t cols = 0;

  std::string raw;
  for (std::size_t line_no = 1; std::getline(in, raw); ++line_no) {
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    if (trim(line).empty()) {
      continue;
    }
    std::istringstream fields{std::string(line)};
    std::string label;
    fields >> label;
    if (!parse_double(label)) {
      throw ParseError(source, line_no, "label '" + label + "' is not numeric");
    }
    tokens.push_back(label);

    std::size_t previous = 0;
    std::string pair;
    while (fields >> pair) {
      const auto colon = pair.find(':');
      if (colon == std::string::npos) {
        throw ParseError(source, line_no, "expected index:value, found '" + pair + "'");
      }
      std::size_t index = 0;
      const auto res = std::from_chars(pair.data(), pair.data() + colon, index);
      if (res.ec != std::errc{} || res.ptr != pair.data() + colon) {
        throw ParseError(source, line_no, "bad index in '" + pair + "'");
      }
      if (index < 1) {
        throw ParseError(source, line_no, "index must be >= 1 in '" + pair + "'");
      }
      if (index <= previous) {
        throw ParseError(source, line_no, "indices must be strictly increasing at '" + pair + "'");
      }
      const auto v = parse_double(std::string_view(pair).substr(colon + 1));
      if (!v || !std::isfinite(*v)) {
        throw ParseError(source, line_no, "bad value in '" + pair + "'");
      }
      previous = index;
      cols = std::max(cols, index);
      idx.push_back(static_cast<std::uint32_t>(index - 1));
      val.push_back(*v);
    }
    ptr.push_back(val.size());
  }
  if (tokens.empty()) {
    throw ParseError(source, 0, "file contains no rows");
  }
  const std::size_t rows = tokens.size();
  Dataset data = Dataset::from_sparse(rows, cols, std::move(ptr), std::move(idx), std::move(val));
  attach_label_tokens(data, tokens, sort_class_tokens(tokens));
  return data;
}

namespace {

std::string label_token(const Dataset& data, std::size_t i) {
  const int id = data.class_id(i);
  if (data.class_names().size() == data.num_classes()) {
    return data.class_names()[static_cast<std::size_t>(id)];
  }
  if (data.label_kind() == LabelKind::binary) {
    return id == 1 ? "+1" : "-1";
  }
  return std::to_string(id);
}

}  // namespace

void save_delimited(const Dataset& data, const std::filesystem::path& path, char delimiter) {
  auto out = open_output(path);
  for (std::size_t j = 0; j < data.cols(); ++j) {
    if (j > 0) {
      out << delimiter;
    }
    out << (data.feature_names().empty() ? "x" + std::to_string(j + 1) : data.feature_names()[j]);
  }
  if (data.has_labels()) {
    out << delimiter << "label";
  }
  out << '\n';
  std::vector<double> row(data.cols());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    data.copy_row(i, row);
    for (std::size_t j = 0; j < data.cols(); ++j) {
      if (j > 0) {
        out << delimiter;
      }
      out << format_double(row[j]);
    }
    if (data.has_labels()) {
      out << delimiter << label_token(data, i);
    }
    out << '\n';
  }
  if (!out) {
    throw_io("failed writing '" + path.string() + "'");
  }
}

void save_sparse_indexed(const Dataset& data, const std::filesystem::path& path) {
  if (!data.has_labels()) {
    throw_config("the sparse indexed format needs labels");
  }
  auto out = open_output(path);
  std::vector<double> row(data.cols());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    data.copy_row(i, row);
    out << label_token(data, i);
    for (std::size_t j = 0; j < data.cols(); ++j) {
      if (row[j] != 0.0) {
        out << ' ' << (j + 1) << ':' << format_double(row[j]);
      }
    }
    out << '\n';
  }
  if (!out) {
    throw_io("failed writing '" + path.string() + "'");
  }
}

}  // namespace flda
