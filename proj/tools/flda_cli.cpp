// Command-line front end: data generation, single fits, scoring and the
// experiment harness.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "flda/bench.hpp"
#include "flda/classify.hpp"
#include "flda/error.hpp"
#include "flda/synthetic.hpp"
#include "flda/transfer.hpp"

namespace fs = std::filesystem;
using namespace flda;

namespace {

constexpr const char* kFormats = R"(File formats
  delimited   one sample per line, comma separated by default; an optional
              header row (detected when no cell is numeric). The label
              column is chosen with --label-column (name, 0-based index or
              "last"). Cells equal to --missing-token are read as 0 and
              flagged missing. Two label values are encoded -1/+1 in sorted
              order, more become class ids 0..K-1.
  sparse      "label idx:val idx:val ..." per line, 1-based strictly
              increasing indices, '#' starts a comment.
  model       "# flda linear model", key/value header (loss, adapted,
              features, columns, seed, iterations, grad_norm, converged),
              then "weights" and one line per coordinate (features, then
              bias) holding one value per class column.
  transfer    "# flda dropout transfer", "epsilon <e>", "features <m>", then
              "<feature> <theta>" per feature.
  config      INI text with optional sections [synthetic], [bench], [train]
              and [data]; see README.md. Flags override config values.

Exit codes: 0 success, 2 usage or config, 3 parse, 4 dimension, 5 numeric, 6 io,
1 anything else.)";

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config:
      return 2;
    case ErrorKind::parse:
      return 3;
    case ErrorKind::dimension:
      return 4;
    case ErrorKind::numeric:
      return 5;
    case ErrorKind::io:
      return 6;
  }
  return 1;
}

struct Common {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string config_path;

  RunConfig load() const {
    return config_path.empty() ? RunConfig{} : load_config(config_path);
  }
};

void add_common(CLI::App* cmd, Common& c, bool out_required = true) {
  cmd->add_option("--seed", c.seed, "Random seed (overrides the config)");
  auto* out = cmd->add_option("--out", c.out, "Output directory");
  if (out_required) {
    out->required();
  }
  cmd->add_option("--config", c.config_path, "INI config file");
}

struct DataFlags {
  std::optional<std::string> label_column;
  std::optional<std::string> missing_token;
  std::optional<std::string> format;
  std::optional<char> delimiter;
};

void add_data_flags(CLI::App* cmd, DataFlags& f) {
  cmd->add_option("--label-column", f.label_column, "Label column: name, index or 'last'");
  cmd->add_option("--missing-token", f.missing_token, "Cell text meaning 'missing'");
  cmd->add_option("--format", f.format, "Input format: delimited or sparse")
      ->check(CLI::IsMember({"delimited", "sparse"}));
  cmd->add_option("--delimiter", f.delimiter, "Field delimiter (default ',')");
}

Dataset load_data(const std::string& path, DataOptions options, const DataFlags& flags,
                  bool labeled) {
  if (flags.format) {
    options.sparse_format = *flags.format == "sparse";
  }
  if (options.sparse_format) {
    Dataset data = load_sparse_indexed(path);
    return labeled ? data : data.without_labels();
  }
  auto& d = options.delimited;
  if (flags.delimiter) {
    d.delimiter = *flags.delimiter;
  }
  if (flags.missing_token) {
    d.missing_token = flags.missing_token;
  }
  if (flags.label_column) {
    d.label_column = flags.label_column;
  } else if (!d.label_column) {
    d.label_column = "last";
  }
  if (!labeled) {
    d.label_column.reset();
  }
  return load_delimited(path, d);
}

SyntheticSpec resolve_spec(const RunConfig& config, const std::optional<std::string>& preset_name,
                           const Common& common, const std::optional<std::size_t>& n,
                           const std::optional<std::string>& theta) {
  SyntheticSpec spec;
  if (preset_name) {
    spec = preset(*preset_name);
  } else if (config.spec) {
    spec = *config.spec;
  } else {
    throw_config("choose a synthetic setup with --preset or a [synthetic] config section");
  }
  if (common.seed) {
    spec.seed = *common.seed;
  }
  if (n) {
    spec.n = *n;
  }
  if (theta) {
    spec.true_theta = parse_real_list(*theta, "--theta");
  }
  spec.validate();
  return spec;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) {
    throw_io("cannot write '" + path.string() + "'");
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw_io("cannot create output directory '" + dir.string() + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature-level domain adaptation with dropout transfer models"};
  app.footer(kFormats);
  app.require_subcommand(1);

  // synth
  Common synth_common;
  std::optional<std::string> synth_preset;
  std::optional<std::size_t> synth_n;
  std::optional<std::string> synth_theta;
  std::string synth_format = "delimited";
  auto* synth = app.add_subcommand("synth", "Generate and save a synthetic source/target pair");
  add_common(synth, synth_common);
  synth->add_option("--preset", synth_preset, "bernoulli or poisson")
      ->check(CLI::IsMember({"bernoulli", "poisson"}));
  synth->add_option("--n", synth_n, "Samples per domain");
  synth->add_option("--theta", synth_theta, "True dropout rates, e.g. \"0.5 0\"");
  synth->add_option("--format", synth_format, "Output format: delimited or sparse")
      ->check(CLI::IsMember({"delimited", "sparse"}));

  // fit
  Common fit_common;
  DataFlags fit_data;
  std::string fit_method;
  std::string fit_source;
  std::string fit_target;
  std::optional<double> fit_l2;
  bool fit_target_unlabeled = false;
  auto* fit = app.add_subcommand("fit", "Train one classifier and save it");
  add_common(fit, fit_common);
  add_data_flags(fit, fit_data);
  fit->add_option("--method", fit_method, "flda-q, flda-l, ls or lr")
      ->required()
      ->check(CLI::IsMember({"flda-q", "flda-l", "ls", "lr"}));
  fit->add_option("--source", fit_source, "Labeled training data")->required();
  fit->add_option("--target", fit_target, "Unlabeled target data (flda methods)")
      ;
  fit->add_option("--l2", fit_l2, "Ridge penalty for ls/lr");
  fit->add_flag("--target-unlabeled", fit_target_unlabeled, "Target file has no label column");

  // eval
  Common eval_common;
  DataFlags eval_data;
  std::string eval_model;
  std::string eval_path;
  auto* eval = app.add_subcommand("eval", "Score a saved model on a labeled dataset");
  add_common(eval, eval_common);
  add_data_flags(eval, eval_data);
  eval->add_option("--model", eval_model, "Model file")->required();
  eval->add_option("--data", eval_path, "Labeled data")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "Run an experiment and write result files");
  bench->require_subcommand(1);
  Common bench_common;
  DataFlags bench_data;
  std::optional<std::string> bench_preset;
  std::optional<std::size_t> bench_n;
  std::optional<std::string> bench_theta;
  std::optional<std::size_t> bench_reps;
  std::optional<std::string> bench_sizes;
  std::optional<std::size_t> bench_threads;
  std::optional<double> bench_l2;
  bool bench_timing = false;
  std::string pair_source;
  std::string pair_target;
  bool pair_target_unlabeled = false;
  std::string missing_data;

  auto add_synthetic_flags = [&](CLI::App* cmd) {
    cmd->add_option("--preset", bench_preset, "bernoulli or poisson")
        ->check(CLI::IsMember({"bernoulli", "poisson"}));
    cmd->add_option("--n", bench_n, "Samples per domain");
    cmd->add_option("--theta", bench_theta, "True dropout rates");
  };
  auto add_bench_flags = [&](CLI::App* cmd) {
    add_common(cmd, bench_common);
    cmd->add_option("--l2", bench_l2, "Ridge penalty for the naive baselines");
    cmd->add_flag("--timing", bench_timing, "Also write timing.csv (not reproducible)");
  };
  auto* boundary = bench->add_subcommand("boundary", "Decision boundaries on a synthetic pair");
  add_bench_flags(boundary);
  add_synthetic_flags(boundary);
  auto* curve = bench->add_subcommand("curve", "Learning curves with standard errors");
  add_bench_flags(curve);
  add_synthetic_flags(curve);
  curve->add_option("--reps", bench_reps, "Repetitions per size");
  curve->add_option("--sizes", bench_sizes, "Training sizes, e.g. \"10 20 50\"");
  curve->add_option("--threads", bench_threads, "Worker threads");
  auto* perturb = bench->add_subcommand("perturb", "Perturbed transfer estimates");
  add_bench_flags(perturb);
  add_synthetic_flags(perturb);
  auto* pair = bench->add_subcommand("pair", "Source file -> target file evaluation");
  add_bench_flags(pair);
  add_data_flags(pair, bench_data);
  pair->add_option("--source", pair_source, "Labeled source data")->required();
  pair->add_option("--target", pair_target, "Target data")->required();
  pair->add_flag("--target-unlabeled", pair_target_unlabeled, "Target file has no label column");
  auto* missing = bench->add_subcommand("missing", "Complete rows -> rows with missing values");
  add_bench_flags(missing);
  add_data_flags(missing, bench_data);
  missing->add_option("--data", missing_data, "Labeled data with missing cells")
      ->required()
      ;

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error [usage]: " << e.what() << '\n';
    return 2;
  }

  try {
    if (synth->parsed()) {
      const RunConfig config = synth_common.load();
      const SyntheticSpec spec =
          resolve_spec(config, synth_preset, synth_common, synth_n, synth_theta);
      const fs::path dir = synth_common.out;
      ensure_dir(dir);
      Rng source_rng(derive_seed(spec.seed, 0));
      Rng target_rng(derive_seed(spec.seed, 1));
      const Dataset source = generate_source(spec, source_rng);
      const Dataset target = generate_target(spec, target_rng);
      if (synth_format == "sparse") {
        save_sparse_indexed(source, dir / "source.txt");
        save_sparse_indexed(target, dir / "target.txt");
      } else {
        save_delimited(source, dir / "source.csv");
        save_delimited(target, dir / "target.csv");
      }
      std::ofstream spec_out(dir / "spec.ini", std::ios::binary | std::ios::trunc);
      write_spec(spec_out, spec);
      if (!spec_out) {
        throw_io("cannot write spec.ini");
      }
      std::cout << "wrote " << spec.n << " source and " << spec.n << " target samples to "
                << dir.string() << '\n';
    } else if (fit->parsed()) {
      const RunConfig config = fit_common.load();
      TrainConfig train = config.bench.train;
      if (fit_l2) {
        train.l2 = *fit_l2;
      }
      if (fit_common.seed) {
        train.seed = *fit_common.seed;
      }
      const Dataset source = load_data(fit_source, config.data, fit_data, true);
      const bool adapted = fit_method == "flda-q" || fit_method == "flda-l";
      if (adapted && fit_target.empty()) {
        throw_config(fit_method + " needs --target");
      }
      const fs::path dir = fit_common.out;
      ensure_dir(dir);
      LinearModel model;
      if (adapted) {
        // target labels, if the file has them, are never used for training
        const Dataset target =
            load_data(fit_target, config.data, fit_data, !fit_target_unlabeled).without_labels();
        const DropoutTransfer transfer =
            estimate_dropout(estimate_source_model(source), target);
        if (fit_method == "flda-q") {
          model = source.label_kind() == LabelKind::multiclass
                      ? multiclass_fit_flda_q(source, transfer)
                      : fit_flda_q(source, transfer);
          model.meta.seed = train.seed;
        } else {
          model = fit_flda_l(source, transfer, train);
        }
        save_transfer(dir / "transfer.txt", transfer, source.feature_names());
      } else {
        model = fit_method == "ls" ? fit_ls(source, train) : fit_lr(source, train);
      }
      save_model(dir / "model.txt", model);
      std::cout << fit_method << ": training error " << format_double(error_rate(model, source))
                << '\n';
    } else if (eval->parsed()) {
      const RunConfig config = eval_common.load();
      const LinearModel model = load_model(eval_model);
      const Dataset data = load_data(eval_path, config.data, eval_data, true);
      const auto predicted = predict(model, data);
      const double err = error_rate(model, data);
      const fs::path dir = eval_common.out;
      ensure_dir(dir);
      nlohmann::ordered_json j;
      j["model"] = eval_model;
      j["data"] = eval_path;
      j["samples"] = data.rows();
      j["error"] = err;
      if (eval_common.seed) {
        j["seed"] = *eval_common.seed;
      }
      write_text(dir / "eval.json", j.dump(2) + "\n");
      std::string lines = "prediction\n";
      for (int p : predicted) {
        lines += std::to_string(p) + '\n';
      }
      write_text(dir / "predictions.csv", lines);
      std::cout << "error " << format_double(err) << '\n';
    } else {
      const RunConfig config = bench_common.load();
      BenchOptions options = config.bench;
      if (bench_reps) {
        options.repetitions = *bench_reps;
      }
      if (bench_sizes) {
        options.sizes.clear();
        for (double v : parse_real_list(*bench_sizes, "--sizes")) {
          if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) {
            throw_config("--sizes needs positive integers");
          }
          options.sizes.push_back(static_cast<std::size_t>(v));
        }
      }
      if (bench_threads) {
        options.threads = *bench_threads;
      }
      if (bench_l2) {
        options.train.l2 = *bench_l2;
      }
      if (bench_common.seed) {
        options.train.seed = *bench_common.seed;
      }
      ExperimentResult result;
      if (boundary->parsed() || curve->parsed() || perturb->parsed()) {
        const SyntheticSpec spec =
            resolve_spec(config, bench_preset, bench_common, bench_n, bench_theta);
        result = boundary->parsed() ? run_boundary(spec, options)
                 : curve->parsed()  ? run_learning_curve(spec, options)
                                    : run_perturbation(spec, options);
      } else if (pair->parsed()) {
        const Dataset source = load_data(pair_source, config.data, bench_data, true);
        const Dataset target =
            load_data(pair_target, config.data, bench_data, !pair_target_unlabeled);
        result = run_pair(source, target, options);
      } else {
        DataFlags flags = bench_data;
        if (!flags.missing_token && !config.data.delimited.missing_token) {
          flags.missing_token = "?";
        }
        const Dataset data = load_data(missing_data, config.data, flags, true);
        result = run_missing(data, options);
      }
      const auto files = emit_results(result, bench_common.out, EmitOptions{bench_timing});
      for (const auto& e : result.errors) {
        std::cout << e.classifier << ' ' << e.domain << ' ' << format_double(e.error) << '\n';
      }
      std::cout << "wrote " << files.size() << " files to " << bench_common.out << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error [internal]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
