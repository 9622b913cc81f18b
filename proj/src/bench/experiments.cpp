#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "flda/bench.hpp"
#include "flda/error.hpp"
#include "flda/random.hpp"

namespace flda {
namespace {

// Seed streams derived from the experiment seed.
constexpr std::uint64_t kSourceStream = 0;
constexpr std::uint64_t kTargetStream = 1;
constexpr std::uint64_t kTargetValidationStream = 2;
constexpr std::uint64_t kSourceValidationStream = 3;
constexpr std::uint64_t kSourcePoolStream = 10;
constexpr std::uint64_t kTargetPoolStream = 11;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Dataset source_sample(const SyntheticSpec& spec, std::size_t n, std::uint64_t stream) {
  Rng rng(derive_seed(spec.seed, stream));
  return generate_source(spec, n, rng);
}

Dataset target_sample(const SyntheticSpec& spec, std::size_t n, std::uint64_t stream) {
  Rng rng(derive_seed(spec.seed, stream));
  return generate_target(spec, n, rng);
}

bool is_multiclass(const Dataset& data) { return data.label_kind() == LabelKind::multiclass; }

LinearModel fit_quadratic_adapted(const Dataset& source, const DropoutTransfer& transfer) {
  return is_multiclass(source) ? multiclass_fit_flda_q(source, transfer)
                               : fit_flda_q(source, transfer);
}

DropoutTransfer estimate(const Dataset& source, const Dataset& target) {
  return estimate_dropout(estimate_source_model(source), target);
}

double disagreement(const LinearModel& a, const LinearModel& b, const Dataset& data) {
  const auto pa = predict(a, data);
  const auto pb = predict(b, data);
  return error_rate(pa, pb);
}

void snapshot_spec(ExperimentResult& result, const SyntheticSpec& spec) {
  auto list = [](const std::vector<double>& values) {
    std::string text;
    for (std::size_t i = 0; i < values.size(); ++i) {
      text += (i ? " " : "") + format_double(values[i]);
    }
    return text;
  };
  result.config.emplace_back("synthetic.family", to_string(spec.family));
  for (std::size_t k = 0; k < spec.params.size(); ++k) {
    result.config.emplace_back("synthetic.class" + std::to_string(k), list(spec.params[k]));
  }
  result.config.emplace_back("synthetic.priors", list(spec.class_priors()));
  result.config.emplace_back("synthetic.n", std::to_string(spec.n));
  result.config.emplace_back("synthetic.true_theta", list(spec.true_theta));
  result.config.emplace_back("synthetic.seed", std::to_string(spec.seed));
}

void snapshot_options(ExperimentResult& result, const BenchOptions& options, bool curve,
                      bool perturb) {
  const auto& t = options.train;
  if (curve) {
    std::string sizes;
    for (std::size_t i = 0; i < options.sizes.size(); ++i) {
      sizes += (i ? " " : "") + std::to_string(options.sizes[i]);
    }
    result.config.emplace_back("bench.repetitions", std::to_string(options.repetitions));
    result.config.emplace_back("bench.sizes", sizes);
    result.config.emplace_back("bench.pool_size", std::to_string(options.pool_size));
  }
  if (perturb) {
    std::string deltas;
    for (std::size_t i = 0; i < options.deltas.size(); ++i) {
      deltas += (i ? " " : "") + format_double(options.deltas[i]);
    }
    result.config.emplace_back("bench.deltas", deltas);
    result.config.emplace_back("bench.perturb_feature", std::to_string(options.perturb_feature));
  }
  result.config.emplace_back("bench.validation_size", std::to_string(options.validation_size));
  result.config.emplace_back("train.l2", format_double(t.l2));
  result.config.emplace_back("train.max_iter", std::to_string(t.max_iter));
  result.config.emplace_back("train.grad_tol", format_double(t.grad_tol));
  result.config.emplace_back("train.initial_step", format_double(t.initial_step));
  result.config.emplace_back("train.shrink", format_double(t.shrink));
  result.config.emplace_back("train.sufficient_decrease", format_double(t.sufficient_decrease));
}

void add_boundary(ExperimentResult& result, const std::string& name, const LinearModel& model) {
  if (!model.is_binary()) {
    return;
  }
  const auto w = model.column(0);
  result.boundaries.push_back(
      {name, std::vector<double>(w.begin(), w.end() - 1), w[model.features()]});
}

void add_scatter(ExperimentResult& result, const std::string& domain, const Dataset& data,
                 std::size_t limit) {
  if (data.cols() != 2 || limit == 0) {
    return;
  }
  ScatterSet set;
  set.domain = domain;
  const std::size_t n = std::min(limit, data.rows());
  set.points.resize(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    set.points[2 * i] = data.at(i, 0);
    set.points[2 * i + 1] = data.at(i, 1);
  }
  const auto ids = data.class_ids();
  set.labels.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n));
  if (data.label_kind() == LabelKind::binary) {
    for (int& y : set.labels) {
      y = y == 0 ? -1 : 1;
    }
  }
  result.scatter.push_back(std::move(set));
}

/// Runs f(cell) for cell in [0, count) on up to `threads` workers; the first
/// exception is rethrown after all workers stop.
template <typename F>
void parallel_for(std::size_t count, std::size_t threads, F&& f) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      f(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) {
        return;
      }
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
        next.store(count);
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back(worker);
  }
  for (auto& th : pool) {
    th.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
}

}  // namespace

void BenchOptions::validate() const {
  train.validate();
  if (repetitions < 2) {
    throw_config("learning curves need at least two repetitions");
  }
  if (sizes.empty()) {
    throw_config("learning curves need at least one training size");
  }
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 0 || (i > 0 && sizes[i] <= sizes[i - 1])) {
      throw_config("training sizes must be positive and strictly ascending");
    }
  }
  if (deltas.empty()) {
    throw_config("the perturbation study needs at least one delta");
  }
  if (validation_size == 0 || pool_size == 0) {
    throw_config("validation and pool sizes must be positive");
  }
  if (threads == 0) {
    throw_config("threads must be at least 1");
  }
}

bool ExperimentResult::empty() const noexcept {
  return errors.empty() && curve.empty() && table.empty();
}

double ExperimentResult::error_of(const std::string& classifier, const std::string& domain) const {
  for (const auto& e : errors) {
    if (e.classifier == classifier && e.domain == domain) {
      return e.error;
    }
  }
  throw_config("no " + domain + " error recorded for '" + classifier + "'");
}

const CurvePoint& ExperimentResult::point(std::size_t size, const std::string& classifier,
                                          const std::string& domain) const {
  for (const auto& p : curve) {
    if (p.size == size && p.classifier == classifier && p.domain == domain) {
      return p;
    }
  }
  throw_config("no curve point for '" + classifier + "' at size " + std::to_string(size));
}

ExperimentResult run_boundary(const SyntheticSpec& spec, const BenchOptions& options) {
  spec.validate();
  options.validate();
  ExperimentResult result;
  result.id = "boundary";
  snapshot_spec(result, spec);
  snapshot_options(result, options, false, false);
  result.seeds = {{"source", derive_seed(spec.seed, kSourceStream)},
                  {"target", derive_seed(spec.seed, kTargetStream)},
                  {"target_validation", derive_seed(spec.seed, kTargetValidationStream)}};

  Stopwatch gen;
  const Dataset source = source_sample(spec, spec.n, kSourceStream);
  const Dataset target = target_sample(spec, spec.n, kTargetStream);
  const Dataset validation = target_sample(spec, options.validation_size, kTargetValidationStream);
  result.timing.emplace_back("generate", gen.seconds());

  const DropoutTransfer transfer = estimate(source, target);
  result.transfer = transfer;

  struct Fitted {
    std::string name;
    LinearModel model;
  };
  std::vector<Fitted> fitted;
  auto timed = [&](const std::string& name, auto&& fit) {
    Stopwatch clock;
    fitted.push_back({name, fit()});
    result.timing.emplace_back("fit " + name, clock.seconds());
  };
  const TrainConfig& cfg = options.train;
  timed("s-ls", [&] { return fit_ls(source, cfg); });
  timed("t-ls", [&] { return fit_ls(target, cfg); });
  timed("flda-q", [&] { return fit_quadratic_adapted(source, transfer); });
  timed("s-lr", [&] { return fit_lr(source, cfg); });
  timed("t-lr", [&] { return fit_lr(target, cfg); });
  timed("flda-l", [&] { return fit_flda_l(source, transfer, cfg); });

  for (const auto& f : fitted) {
    result.errors.push_back({f.name, "target", error_rate(f.model, target)});
  }
  for (const auto& f : fitted) {
    result.errors.push_back({f.name, "source", error_rate(f.model, source)});
  }
  result.agreements.push_back({"flda-q", "t-ls", disagreement(fitted[2].model, fitted[1].model,
                                                               validation)});
  result.agreements.push_back({"flda-l", "t-lr", disagreement(fitted[5].model, fitted[4].model,
                                                               validation)});
  if (spec.dims() == 2) {
    for (const auto& f : fitted) {
      add_boundary(result, f.name, f.model);
    }
    add_scatter(result, "source", source, options.scatter_points);
    add_scatter(result, "target", target, options.scatter_points);
  }
  return result;
}

ExperimentResult run_learning_curve(const SyntheticSpec& spec, const BenchOptions& options) {
  spec.validate();
  options.validate();
  if (options.sizes.back() > options.pool_size) {
    throw_config("training size " + std::to_string(options.sizes.back()) +
                 " exceeds the generated pool of " + std::to_string(options.pool_size));
  }
  ExperimentResult result;
  result.id = "curve";
  snapshot_spec(result, spec);
  snapshot_options(result, options, true, false);
  result.seeds = {{"source_pool", derive_seed(spec.seed, kSourcePoolStream)},
                  {"target_pool", derive_seed(spec.seed, kTargetPoolStream)},
                  {"source_validation", derive_seed(spec.seed, kSourceValidationStream)},
                  {"target_validation", derive_seed(spec.seed, kTargetValidationStream)},
                  {"repetition_base", spec.seed}};

  const Dataset source_pool = source_sample(spec, options.pool_size, kSourcePoolStream);
  const Dataset target_pool = target_sample(spec, options.pool_size, kTargetPoolStream);
  const Dataset source_val = source_sample(spec, options.validation_size, kSourceValidationStream);
  const Dataset target_val = target_sample(spec, options.validation_size, kTargetValidationStream);

  static const char* const kNames[] = {"s-ls", "t-ls", "flda-q"};
  const std::size_t reps = options.repetitions;
  const std::size_t cells = options.sizes.size() * reps;
  // per cell: classifier x {source, target}
  std::vector<double> errors(cells * 6);
  std::vector<double> seconds(cells);

  parallel_for(cells, options.threads, [&](std::size_t cell) {
    Stopwatch clock;
    const std::size_t size = options.sizes[cell / reps];
    const std::uint64_t rep_seed = spec.seed + cell % reps;
    const Dataset src = subsample(source_pool, size, derive_seed(rep_seed, 0));
    const Dataset tgt = subsample(target_pool, size, derive_seed(rep_seed, 1));
    const LinearModel models[] = {fit_ls(src, options.train), fit_ls(tgt, options.train),
                                  fit_quadratic_adapted(src, estimate(src, tgt))};
    for (std::size_t c = 0; c < 3; ++c) {
      errors[cell * 6 + 2 * c] = error_rate(models[c], source_val);
      errors[cell * 6 + 2 * c + 1] = error_rate(models[c], target_val);
    }
    seconds[cell] = clock.seconds();
  });

  for (std::size_t s = 0; s < options.sizes.size(); ++s) {
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t dom = 0; dom < 2; ++dom) {
        double sum = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
          sum += errors[(s * reps + r) * 6 + 2 * c + dom];
        }
        const double mean = sum / static_cast<double>(reps);
        double ss = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
          const double d = errors[(s * reps + r) * 6 + 2 * c + dom] - mean;
          ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(reps - 1));
        result.curve.push_back({options.sizes[s], kNames[c], dom == 0 ? "source" : "target", mean,
                                sd / std::sqrt(static_cast<double>(reps)), reps});
      }
    }
    double total = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      total += seconds[s * reps + r];
    }
    result.timing.emplace_back("size " + std::to_string(options.sizes[s]), total);
  }
  return result;
}

ExperimentResult run_perturbation(const SyntheticSpec& spec, const BenchOptions& options) {
  spec.validate();
  options.validate();
  if (options.perturb_feature >= spec.dims()) {
    throw_config("perturbed feature index out of range");
  }
  ExperimentResult result;
  result.id = "perturb";
  snapshot_spec(result, spec);
  snapshot_options(result, options, false, true);
  result.seeds = {{"source", derive_seed(spec.seed, kSourceStream)},
                  {"target", derive_seed(spec.seed, kTargetStream)}};

  const Dataset source = source_sample(spec, spec.n, kSourceStream);
  const Dataset target = target_sample(spec, spec.n, kTargetStream);
  const DropoutTransfer transfer = estimate(source, target);
  result.transfer = transfer;
  const double base = transfer.theta()[options.perturb_feature];
  for (double delta : options.deltas) {
    if (!(base + delta >= 0.0 && base + delta <= 1.0 - transfer.epsilon())) {
      throw_config("delta " + format_double(delta) + " moves the estimated rate " +
                   format_double(base) + " outside [0, 1 - epsilon]");
    }
  }

  result.table_columns = {"sl", "tl"};
  for (double delta : options.deltas) {
    result.table_columns.push_back("flda+" + format_double(delta));
  }
  const TrainConfig& cfg = options.train;
  for (const bool quadratic : {true, false}) {
    const std::string suffix = quadratic ? "q" : "l";
    TableRow row{quadratic ? "quadratic" : "logistic", {}};
    auto record = [&](const std::string& column, const std::string& name, auto&& fit) {
      Stopwatch clock;
      const LinearModel model = fit();
      result.timing.emplace_back(quadratic ? "quadratic " + column : "logistic " + column,
                                 clock.seconds());
      const double err = error_rate(model, target);
      row.values.push_back(err);
      result.errors.push_back({name, "target", err});
      if (spec.dims() == 2) {
        add_boundary(result, name, model);
      }
    };
    record("sl", quadratic ? "s-ls" : "s-lr",
           [&] { return quadratic ? fit_ls(source, cfg) : fit_lr(source, cfg); });
    record("tl", quadratic ? "t-ls" : "t-lr",
           [&] { return quadratic ? fit_ls(target, cfg) : fit_lr(target, cfg); });
    for (double delta : options.deltas) {
      const DropoutTransfer shifted = transfer.perturbed(options.perturb_feature, delta);
      record("flda+" + format_double(delta), "flda-" + suffix + "+" + format_double(delta), [&] {
        return quadratic ? fit_quadratic_adapted(source, shifted)
                         : fit_flda_l(source, shifted, cfg);
      });
    }
    result.table.push_back(std::move(row));
  }
  if (spec.dims() == 2) {
    add_scatter(result, "source", source, options.scatter_points);
    add_scatter(result, "target", target, options.scatter_points);
  }
  return result;
}

namespace {

std::vector<std::string> union_classes(const Dataset& a, const Dataset& b) {
  std::set<std::string> seen;
  std::vector<std::string> tokens;
  for (const auto* data : {&a, &b}) {
    for (const auto& name : data->class_names()) {
      if (seen.insert(name).second) {
        tokens.push_back(name);
      }
    }
  }
  return sort_class_tokens(std::move(tokens));
}

}  // namespace

ExperimentResult run_pair(const Dataset& source_in, const Dataset& target_in,
                          const BenchOptions& options) {
  options.train.validate();
  if (!source_in.has_labels()) {
    throw_config("the source dataset needs labels");
  }
  if (source_in.cols() != target_in.cols()) {
    throw_dimension("source has " + std::to_string(source_in.cols()) + " features, target has " +
                    std::to_string(target_in.cols()));
  }
  if (source_in.empty() || target_in.empty()) {
    throw_config("source and target must both contain samples");
  }
  // encode both label sets against one class list so ids line up
  Dataset source = source_in;
  Dataset target = target_in;
  if (target_in.has_labels()) {
    const auto classes = union_classes(source_in, target_in);
    source = source_in.relabeled(classes);
    target = target_in.relabeled(classes);
  }

  ExperimentResult result;
  result.id = "pair";
  result.config.emplace_back("data.source_rows", std::to_string(source.rows()));
  result.config.emplace_back("data.target_rows", std::to_string(target.rows()));
  result.config.emplace_back("data.features", std::to_string(source.cols()));
  snapshot_options(result, options, false, false);
  result.seeds = {{"train", options.train.seed}};

  const DropoutTransfer transfer = estimate(source, target);
  result.transfer = transfer;
  result.feature_names = source.feature_names();

  struct Fitted {
    std::string name;
    LinearModel model;
  };
  std::vector<Fitted> fitted;
  auto timed = [&](const std::string& name, auto&& fit) {
    Stopwatch clock;
    fitted.push_back({name, fit()});
    result.timing.emplace_back("fit " + name, clock.seconds());
  };
  const TrainConfig& cfg = options.train;
  timed("s-ls", [&] { return fit_ls(source, cfg); });
  timed("s-lr", [&] { return fit_lr(source, cfg); });
  timed("flda-q", [&] { return fit_quadratic_adapted(source, transfer); });
  timed("flda-l", [&] { return fit_flda_l(source, transfer, cfg); });
  if (target.has_labels()) {
    timed("t-lr", [&] { return fit_lr(target, cfg); });
  }
  for (const auto& f : fitted) {
    result.errors.push_back({f.name, "source", error_rate(f.model, source)});
  }
  if (target.has_labels()) {
    for (const auto& f : fitted) {
      result.errors.push_back({f.name, "target", error_rate(f.model, target)});
    }
  }
  return result;
}

ExperimentResult run_missing(const Dataset& data, const BenchOptions& options) {
  const auto [source, target] = missing_data_split(data);
  if (target.empty()) {
    throw_config("no row has missing values; the target domain would be empty");
  }
  ExperimentResult result = run_pair(source, target, options);
  result.id = "missing";
  result.config.insert(result.config.begin(), {"data.total_rows", std::to_string(data.rows())});
  return result;
}

}  // namespace flda
