#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <set>
#include <sstream>

#include "flda/bench.hpp"
#include "flda/error.hpp"

namespace flda {
namespace {

namespace pt = boost::property_tree;

std::size_t as_count(const std::string& text, const std::string& key) {
  const auto v = parse_double(text);
  if (!v || *v < 0 || *v != static_cast<double>(static_cast<std::size_t>(*v))) {
    throw_config(key + " must be a non-negative integer, found '" + text + "'");
  }
  return static_cast<std::size_t>(*v);
}

double as_real(const std::string& text, const std::string& key) {
  const auto v = parse_double(text);
  if (!v) {
    throw_config(key + " must be a number, found '" + text + "'");
  }
  return *v;
}

bool as_flag(const std::string& text, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes") {
    return true;
  }
  if (text == "false" || text == "0" || text == "no") {
    return false;
  }
  throw_config(key + " must be true or false, found '" + text + "'");
}

void check_keys(const pt::ptree& section, const std::string& name,
                const std::set<std::string>& known) {
  for (const auto& [key, value] : section) {
    if (!known.count(key)) {
      throw_config("unknown key '" + key + "' in [" + name + "]");
    }
  }
}

void read_bench(const pt::ptree& s, BenchOptions& b) {
  check_keys(s, "bench",
             {"repetitions", "sizes", "deltas", "perturb_feature", "validation_size", "pool_size",
              "threads", "scatter_points"});
  for (const auto& [key, node] : s) {
    const std::string value = node.data();
    if (key == "repetitions") {
      b.repetitions = as_count(value, key);
    } else if (key == "sizes") {
      b.sizes.clear();
      for (double v : parse_real_list(value, key)) {
        b.sizes.push_back(as_count(format_double(v), key));
      }
    } else if (key == "deltas") {
      b.deltas = parse_real_list(value, key);
    } else if (key == "perturb_feature") {
      b.perturb_feature = as_count(value, key);
    } else if (key == "validation_size") {
      b.validation_size = as_count(value, key);
    } else if (key == "pool_size") {
      b.pool_size = as_count(value, key);
    } else if (key == "threads") {
      b.threads = as_count(value, key);
    } else if (key == "scatter_points") {
      b.scatter_points = as_count(value, key);
    }
  }
}

void read_train(const pt::ptree& s, TrainConfig& t) {
  check_keys(s, "train",
             {"l2", "max_iter", "grad_tol", "initial_step", "shrink", "sufficient_decrease"});
  for (const auto& [key, node] : s) {
    const std::string value = node.data();
    if (key == "l2") {
      t.l2 = as_real(value, key);
    } else if (key == "max_iter") {
      t.max_iter = as_count(value, key);
    } else if (key == "grad_tol") {
      t.grad_tol = as_real(value, key);
    } else if (key == "initial_step") {
      t.initial_step = as_real(value, key);
    } else if (key == "shrink") {
      t.shrink = as_real(value, key);
    } else if (key == "sufficient_decrease") {
      t.sufficient_decrease = as_real(value, key);
    }
  }
}

void read_data(const pt::ptree& s, DataOptions& d) {
  check_keys(s, "data",
             {"format", "delimiter", "header", "label_column", "missing_token", "sparse_storage"});
  for (const auto& [key, node] : s) {
    const std::string value = node.data();
    if (key == "format") {
      if (value != "delimited" && value != "sparse") {
        throw_config("format must be delimited or sparse, found '" + value + "'");
      }
      d.sparse_format = value == "sparse";
    } else if (key == "delimiter") {
      if (value == "tab" || value == "\\t") {
        d.delimited.delimiter = '\t';
      } else if (value.size() == 1) {
        d.delimited.delimiter = value[0];
      } else {
        throw_config("delimiter must be a single character or 'tab'");
      }
    } else if (key == "header") {
      if (value == "present") {
        d.delimited.header = HeaderMode::present;
      } else if (value == "absent") {
        d.delimited.header = HeaderMode::absent;
      } else if (value == "detect") {
        d.delimited.header = HeaderMode::detect;
      } else {
        throw_config("header must be present, absent or detect");
      }
    } else if (key == "label_column") {
      d.delimited.label_column = value;
    } else if (key == "missing_token") {
      d.delimited.missing_token = value;
    } else if (key == "sparse_storage") {
      d.delimited.sparse_storage = as_flag(value, key);
    }
  }
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw_io("cannot open config '" + path.string() + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  pt::ptree tree;
  try {
    std::istringstream text(buffer.str());
    pt::read_ini(text, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(path.string(), e.line(), e.message());
  }
  RunConfig config;
  for (const auto& [name, section] : tree) {
    if (name == "synthetic") {
      std::istringstream text(buffer.str());
      config.spec = read_spec(text, path.string());
    } else if (name == "bench") {
      read_bench(section, config.bench);
    } else if (name == "train") {
      read_train(section, config.bench.train);
    } else if (name == "data") {
      read_data(section, config.data);
    } else if (section.empty()) {
      throw_config(path.string() + ": key '" + name + "' outside any section");
    } else {
      throw_config(path.string() + ": unknown section [" + name + "]");
    }
  }
  return config;
}

}  // namespace flda
