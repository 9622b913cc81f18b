#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>

#include "flda/bench.hpp"
#include "flda/error.hpp"

namespace flda {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string file_safe(const std::string& name) {
  std::string out = name;
  for (char& c : out) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    if (!keep) {
      c = c == '+' ? '_' : '-';
    }
  }
  return out;
}

class Writer {
 public:
  explicit Writer(fs::path dir) : dir_(std::move(dir)) {}

  std::ofstream open(const std::string& name) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw_io("cannot open '" + path.string() + "' for writing");
    }
    written_.push_back(path);
    return out;
  }

  static void finish(std::ofstream& out, const std::string& name) {
    out.flush();
    if (!out) {
      throw_io("failed writing '" + name + "'");
    }
  }

  std::vector<fs::path> written() const { return written_; }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
};

Json to_json(const ExperimentResult& r) {
  Json j;
  j["experiment"] = r.id;
  Json config = Json::object();
  for (const auto& [key, value] : r.config) {
    config[key] = value;
  }
  j["config"] = config;
  Json seeds = Json::object();
  for (const auto& [key, value] : r.seeds) {
    seeds[key] = value;
  }
  j["seeds"] = seeds;
  if (!r.errors.empty()) {
    Json errors = Json::array();
    for (const auto& e : r.errors) {
      errors.push_back({{"classifier", e.classifier}, {"domain", e.domain}, {"error", e.error}});
    }
    j["errors"] = errors;
  }
  if (!r.agreements.empty()) {
    Json agreements = Json::array();
    for (const auto& a : r.agreements) {
      agreements.push_back(
          {{"first", a.first}, {"second", a.second}, {"disagreement", a.disagreement}});
    }
    j["agreements"] = agreements;
  }
  if (!r.curve.empty()) {
    Json curve = Json::array();
    for (const auto& p : r.curve) {
      curve.push_back({{"size", p.size},
                       {"classifier", p.classifier},
                       {"domain", p.domain},
                       {"mean", p.mean},
                       {"sem", p.sem},
                       {"repetitions", p.repetitions}});
    }
    j["curve"] = curve;
  }
  if (!r.table.empty()) {
    Json table = Json::object();
    table["columns"] = r.table_columns;
    Json rows = Json::array();
    for (const auto& row : r.table) {
      rows.push_back({{"label", row.label}, {"values", row.values}});
    }
    table["rows"] = rows;
    j["table"] = table;
  }
  if (!r.boundaries.empty()) {
    Json lines = Json::array();
    for (const auto& b : r.boundaries) {
      lines.push_back({{"classifier", b.classifier}, {"weights", b.weights}, {"bias", b.bias}});
    }
    j["boundaries"] = lines;
  }
  if (r.transfer) {
    Json theta = Json::array();
    for (std::size_t d = 0; d < r.transfer->dims(); ++d) {
      const std::string name =
          r.feature_names.empty() ? std::to_string(d) : r.feature_names[d];
      theta.push_back({{"feature", name}, {"theta", r.transfer->theta()[d]}});
    }
    j["transfer"] = theta;
  }
  return j;
}

struct Box {
  double lo[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  double hi[2] = {-std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity()};
};

/// Endpoints of w'x + b = 0 clipped to the scatter bounding box, solving for
/// the coordinate with the larger weight.
std::vector<std::array<double, 2>> line_points(const Boundary& b, const Box& box) {
  if (b.weights.size() != 2 || !(box.lo[0] <= box.hi[0])) {
    return {};
  }
  const double w1 = b.weights[0];
  const double w2 = b.weights[1];
  if (w1 == 0.0 && w2 == 0.0) {
    return {};
  }
  std::vector<std::array<double, 2>> out;
  if (std::fabs(w2) >= std::fabs(w1)) {
    for (double x1 : {box.lo[0], box.hi[0]}) {
      out.push_back({x1, -(w1 * x1 + b.bias) / w2});
    }
  } else {
    for (double x2 : {box.lo[1], box.hi[1]}) {
      out.push_back({-(w2 * x2 + b.bias) / w1, x2});
    }
  }
  return out;
}

}  // namespace

std::vector<fs::path> emit_results(const ExperimentResult& result, const fs::path& out_dir,
                                   const EmitOptions& options) {
  if (result.empty()) {
    throw_config("nothing to emit: the result holds no experiments");
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw_io("cannot create output directory '" + out_dir.string() + "'");
  }
  Writer writer(out_dir);

  {
    auto out = writer.open("result.json");
    out << to_json(result).dump(2) << '\n';
    Writer::finish(out, "result.json");
  }
  if (!result.errors.empty()) {
    auto out = writer.open("errors.csv");
    out << "classifier,domain,error\n";
    for (const auto& e : result.errors) {
      out << e.classifier << ',' << e.domain << ',' << format_double(e.error) << '\n';
    }
    Writer::finish(out, "errors.csv");
  }
  if (!result.curve.empty()) {
    auto out = writer.open("curve.csv");
    out << "size,classifier,domain,mean,sem,repetitions\n";
    for (const auto& p : result.curve) {
      out << p.size << ',' << p.classifier << ',' << p.domain << ',' << format_double(p.mean)
          << ',' << format_double(p.sem) << ',' << p.repetitions << '\n';
    }
    Writer::finish(out, "curve.csv");
  }
  if (!result.table.empty()) {
    auto out = writer.open("table.csv");
    out << "loss";
    for (const auto& c : result.table_columns) {
      out << ',' << c;
    }
    out << '\n';
    for (const auto& row : result.table) {
      out << row.label;
      for (double v : row.values) {
        out << ',' << format_double(v);
      }
      out << '\n';
    }
    Writer::finish(out, "table.csv");
  }
  if (result.transfer) {
    auto out = writer.open("transfer.txt");
    write_transfer(out, *result.transfer, result.feature_names);
    Writer::finish(out, "transfer.txt");
  }
  Box box;
  for (const auto& set : result.scatter) {
    const std::string name = "scatter_" + file_safe(set.domain) + ".csv";
    auto out = writer.open(name);
    out << "x1,x2,label\n";
    for (std::size_t i = 0; i < set.labels.size(); ++i) {
      const double x1 = set.points[2 * i];
      const double x2 = set.points[2 * i + 1];
      box.lo[0] = std::min(box.lo[0], x1);
      box.hi[0] = std::max(box.hi[0], x1);
      box.lo[1] = std::min(box.lo[1], x2);
      box.hi[1] = std::max(box.hi[1], x2);
      out << format_double(x1) << ',' << format_double(x2) << ',' << set.labels[i] << '\n';
    }
    Writer::finish(out, name);
  }
  if (!result.scatter.empty()) {
    for (const auto& b : result.boundaries) {
      const std::string name = "line_" + file_safe(b.classifier) + ".csv";
      auto out = writer.open(name);
      out << "x1,x2\n";
      for (const auto& p : line_points(b, box)) {
        out << format_double(p[0]) << ',' << format_double(p[1]) << '\n';
      }
      Writer::finish(out, name);
    }
  }
  if (options.timing) {
    auto out = writer.open("timing.csv");
    out << "cell,seconds\n";
    for (const auto& [cell, seconds] : result.timing) {
      out << cell << ',' << format_double(seconds) << '\n';
    }
    Writer::finish(out, "timing.csv");
  }
  return writer.written();
}

}  // namespace flda
