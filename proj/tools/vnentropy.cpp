// vnentropy: command-line front end for the vnge library.
//
// Exit codes: 0 success, 1 usage error, 2 data/validation error,
// 3 numerical failure.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vnge/vnge.hpp"

namespace {

using namespace vnge;
using namespace vnge::harness;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

struct GlobalOptions {
  std::uint64_t seed = 1;
  std::size_t dense_limit = kDefaultDenseLimit;
  std::size_t threads = 1;
  std::string output;
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error(ErrorCode::IoError, "cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

Model parse_model(const std::string& name) {
  if (name == "er") return Model::ErdosRenyi;
  if (name == "ba") return Model::BarabasiAlbert;
  if (name == "ws") return Model::WattsStrogatz;
  throw CLI::ValidationError("--model", "expected er, ba or ws");
}

std::vector<double> expand_range(const std::string& range) {
  double start = 0.0, stop = 0.0, step = 0.0;
  char c1 = 0, c2 = 0;
  std::istringstream in(range);
  if (!(in >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0.0 || stop < start) {
    throw CLI::ValidationError("--range", "expected start:stop:step");
  }
  std::vector<double> out;
  for (double x = start; x <= stop + 1e-9 * step; x += step) out.push_back(x);
  return out;
}

std::vector<MethodSpec> resolve_methods(const std::vector<std::string>& names) {
  if (names.empty() || (names.size() == 1 && names[0] == "all")) return default_methods();
  std::vector<MethodSpec> out;
  for (const auto& name : names) {
    if (name == "exact") continue;
    auto m = method_by_name(name);
    if (!m) throw CLI::ValidationError("--methods", "unknown method '" + name + "'");
    out.push_back(*m);
  }
  return out;
}

MixtureWeights load_weights_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return read_weights(in);
}

// --- entropy -----------------------------------------------------------------

struct EntropyArgs {
  std::string file;
  std::vector<std::string> methods;
  std::vector<std::string> weights_files;
  bool exact = false;
  bool one_indexed = false;
  bool unweighted = false;
};

int cmd_entropy(const GlobalOptions& global, const EntropyArgs& args) {
  EdgeListOptions load;
  load.indexing = args.one_indexed ? 1 : 0;
  load.weighted = !args.unweighted;
  const Graph g = load_edge_list(args.file, load);

  auto methods = resolve_methods(args.methods);
  for (const auto& path : args.weights_files) methods.push_back(method_spec(load_weights_file(path)));

  SummaryOptions options;
  options.dense_limit = global.dense_limit;
  options.with_lambda_max = std::any_of(methods.begin(), methods.end(),
                                        [](const MethodSpec& m) { return m.needs_lambda_max(); });
  const auto s = summarize(g, options);

  Output out(global.output);
  auto& os = out.stream();
  os << kCsvVersionLine << '\n' << "method,value,n,m,purity,lambda_max\n";
  auto row = [&](const std::string& name, double value, bool inputs) {
    os << name << ',' << fmt(value) << ',' << s.n << ',' << g.num_edges() << ','
       << (inputs ? fmt(s.purity) : "") << ',' << (inputs ? fmt(s.lambda_max) : "") << '\n';
  };
  for (const auto& m : methods) row(m.name, evaluate(m, s), true);
  os.flush();
  if (args.exact) row("exact", exact_vnge(g, global.dense_limit), false);
  return kExitOk;
}

// --- gen -----------------------------------------------------------------------

struct ModelArgs {
  std::string model = "er";
  std::size_t n = 100;
  std::optional<double> p;
  std::optional<std::size_t> m_attach;
  std::optional<std::size_t> k;
  double p_rewire = 0.1;
  std::optional<double> degree;
  bool weighted = false;

  void add_to(CLI::App* app, bool with_n = true) {
    app->add_option("--model", model, "Random graph model: er, ba, ws")->check(CLI::IsMember({"er", "ba", "ws"}));
    if (with_n) app->add_option("-n,--nodes", n, "Number of vertices");
    app->add_option("--p", p, "ER edge probability");
    app->add_option("--m", m_attach, "BA edges per arriving vertex");
    app->add_option("--k", k, "WS lattice degree (even)");
    app->add_option("--p-rewire", p_rewire, "WS rewiring probability");
    app->add_option("--degree", degree, "Target mean degree (sets p, m or k)");
    app->add_flag("--weighted", weighted, "Uniform random weights in [0.5, 1.5]");
  }

  ModelSpec spec(std::uint64_t seed) const {
    ModelDefaults defaults{p_rewire, weighted};
    ModelSpec s = spec_for_degree(parse_model(model), n, degree.value_or(10.0), seed, defaults);
    if (p) s.p = *p;
    if (m_attach) s.m_attach = *m_attach;
    if (k) s.k = *k;
    return s;
  }
};

int cmd_gen(const GlobalOptions& global, const ModelArgs& args) {
  const Graph g = generate(args.spec(global.seed));
  Output out(global.output);
  write_edge_list(out.stream(), g);
  return kExitOk;
}

// --- error-sweep -----------------------------------------------------------------

struct SweepArgs {
  ModelArgs model;
  std::string vary = "degree";
  std::vector<double> points;
  std::string range;
  std::size_t trials = 50;
  std::vector<std::string> methods;
  bool records = false;
  bool record_time = false;
};

int cmd_error_sweep(const GlobalOptions& global, const SweepArgs& args) {
  SweepConfig c;
  c.model = parse_model(args.model.model);
  c.axis = args.vary == "nodes" ? SweepAxis::Nodes : SweepAxis::Degree;
  c.points = args.points;
  if (!args.range.empty()) c.points = expand_range(args.range);
  if (c.points.empty()) c.points = c.axis == SweepAxis::Degree ? expand_range("2:50:4") : expand_range("100:1000:100");
  c.fixed_n = args.model.n;
  c.fixed_degree = args.model.degree.value_or(10.0);
  c.trials = args.trials;
  c.seed = global.seed;
  c.threads = global.threads;
  c.dense_limit = global.dense_limit;
  c.model_defaults = {args.model.p_rewire, args.model.weighted};
  c.methods = resolve_methods(args.methods);
  c.record_time = args.record_time;

  for (std::size_t p = 0; p < c.points.size(); ++p) {
    if (sweep_spec(c, p, 0).n > c.dense_limit) {
      std::cerr << "warning: n = " << sweep_spec(c, p, 0).n
                << " exceeds the dense limit; exact and error columns left empty\n";
    }
  }
  const auto result = run_error_sweep(c);
  Output out(global.output);
  if (args.records) {
    write_sweep_records(out.stream(), result);
  } else {
    write_sweep_summary(out.stream(), result);
  }
  return kExitOk;
}

// --- correlation -----------------------------------------------------------------

struct CorrelationArgs {
  ModelArgs model;
  std::size_t count = 50;
  std::vector<std::string> methods;
  bool same_graph = false;
};

int cmd_correlation(const GlobalOptions& global, const CorrelationArgs& args) {
  CorrelationConfig c;
  c.model = parse_model(args.model.model);
  c.n = args.model.n;
  c.degree = args.model.degree.value_or(10.0);
  c.count = args.count;
  c.seed = global.seed;
  c.threads = global.threads;
  c.dense_limit = global.dense_limit;
  c.model_defaults = {args.model.p_rewire, args.model.weighted};
  c.methods = resolve_methods(args.methods);
  c.same_graph = args.same_graph;
  const auto result = run_correlation(c);
  Output out(global.output);
  write_correlation(out.stream(), result);
  return kExitOk;
}

// --- timing ------------------------------------------------------------------------

struct TimingArgs {
  ModelArgs model;
  std::vector<std::size_t> sizes = {1000, 10000, 100000};
  std::size_t trials = 5;
  std::size_t exact_limit = 800;
};

int cmd_timing(const GlobalOptions& global, const TimingArgs& args) {
  TimingConfig c;
  c.model = parse_model(args.model.model);
  c.sizes = args.sizes;
  c.degree = args.model.degree.value_or(10.0);
  c.trials = args.trials;
  c.seed = global.seed;
  c.exact_limit = std::min(args.exact_limit, global.dense_limit);
  c.model_defaults = {args.model.p_rewire, args.model.weighted};
  const auto result = run_timing(c);
  Output out(global.output);
  write_timing(out.stream(), result);
  return kExitOk;
}

// --- calibrate -----------------------------------------------------------------------

struct CalibrateArgs {
  std::string samples;
  std::string write_samples;
  ModelArgs model;
  std::size_t count = 200;
  std::vector<std::string> pair = {"finger", "modified_taylor"};
  bool affine4 = false;
  std::string preset;
  double alpha = 1e-6;
  double init_t = 0.5;
  std::size_t max_iter = 10'000'000;
  double grad_tol = 1e-9;
  bool fast = false;
  std::string weights_out;
};

int cmd_calibrate(const GlobalOptions& global, const CalibrateArgs& args) {
  Output out(global.output);
  auto& os = out.stream();
  auto emit = [&](const MixtureWeights& w, std::optional<FitReport> report) {
    write_weights(os, w);
    if (report) {
      os << "cost=" << fmt(report->cost) << '\n'
         << "iterations=" << report->iterations << '\n'
         << "converged=" << (report->converged ? "true" : "false") << '\n';
      if (report->degenerate) os << "warning=degenerate features, t left at its initial value\n";
    }
    if (!args.weights_out.empty()) {
      std::ofstream wf(args.weights_out);
      if (!wf) throw Error(ErrorCode::IoError, "cannot write " + args.weights_out);
      write_weights(wf, w);
    }
  };

  if (!args.preset.empty()) {
    auto w = presets::by_name(args.preset);
    if (!w) throw CLI::ValidationError("--preset", "unknown preset '" + args.preset + "'");
    emit(*w, std::nullopt);
    return kExitOk;
  }

  std::vector<TrainingSample> samples;
  if (!args.samples.empty()) {
    std::ifstream in(args.samples);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + args.samples);
    samples = read_samples_csv(in);
  } else {
    std::vector<ModelSpec> specs;
    for (std::size_t i = 0; i < args.count; ++i) specs.push_back(args.model.spec(trial_seed(global.seed, 0, i)));
    samples = generate_samples(specs, global.threads, global.dense_limit);
  }
  if (!args.write_samples.empty()) {
    std::ofstream sf(args.write_samples);
    if (!sf) throw Error(ErrorCode::IoError, "cannot write " + args.write_samples);
    write_samples_csv(sf, samples);
  }

  if (args.affine4) {
    Affine4Config config;
    config.max_iter = args.max_iter;
    config.grad_tol = args.grad_tol;
    config.fast = args.fast;
    auto report = fit_affine4(samples, config);
    report.weights.name = "affine4";
    emit(report.weights, report);
    return kExitOk;
  }

  if (args.pair.size() != 2) throw CLI::ValidationError("--pair", "expected two estimators");
  auto first = parse_method(args.pair[0]);
  auto second = parse_method(args.pair[1]);
  auto is_estimator = [](std::optional<Method> m) { return m && *m != Method::Exact && *m != Method::Mixture; };
  if (!is_estimator(first) || !is_estimator(second)) throw CLI::ValidationError("--pair", "unknown estimator");
  TwoTermConfig config;
  config.alpha = args.alpha;
  config.init_t = args.init_t;
  config.max_iter = args.max_iter;
  config.grad_tol = args.grad_tol;
  config.fast = args.fast;
  auto report = fit_two_term(samples, {*first, *second}, config);
  report.weights.name = "two_term";
  emit(report.weights, report);
  return kExitOk;
}

// --- jsdist --------------------------------------------------------------------------

struct JsArgs {
  std::string file_a;
  std::string file_b;
  std::string method = "exact";
  std::string weights_file;
  bool one_indexed = false;
  bool unweighted = false;
};

int cmd_jsdist(const GlobalOptions& global, const JsArgs& args) {
  EdgeListOptions load;
  load.indexing = args.one_indexed ? 1 : 0;
  load.weighted = !args.unweighted;
  const Graph a = load_edge_list(args.file_a, load);
  const Graph b = load_edge_list(args.file_b, load);

  EntropyBackend backend;
  if (!args.weights_file.empty()) {
    backend = EntropyBackend::of(load_weights_file(args.weights_file));
  } else if (auto m = parse_method(args.method); m && *m != Method::Mixture) {
    backend = EntropyBackend::of(*m);
  } else if (auto w = presets::by_name(args.method)) {
    backend = EntropyBackend::of(*w);
  } else {
    throw CLI::ValidationError("--method", "unknown method '" + args.method + "'");
  }
  backend.summary.dense_limit = global.dense_limit;

  const auto d = js_distance(a, b, backend);
  Output out(global.output);
  auto& os = out.stream();
  os << kCsvVersionLine << '\n'
     << "method,jsdist,h_average,h_a,h_b,clamped\n"
     << args.method << ',' << fmt(d.distance) << ',' << fmt(d.h_average) << ',' << fmt(d.h_first)
     << ',' << fmt(d.h_second) << ',' << (d.clamped ? "true" : "false") << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Von Neumann graph entropy: exact values, quadratic approximations and experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions global;
  app.add_option("--seed", global.seed, "Base seed for random models")->capture_default_str();
  app.add_option("--dense-limit", global.dense_limit, "Largest n for the dense eigensolver")->capture_default_str();
  app.add_option("--threads", global.threads, "Worker threads for trials")->check(CLI::PositiveNumber);
  app.add_option("-o,--output", global.output, "Output path (default stdout)");

  std::function<int()> action;

  EntropyArgs entropy_args;
  auto* entropy = app.add_subcommand("entropy", "Entropy estimates of an edge-list graph");
  entropy->add_option("file", entropy_args.file, "Edge-list file")->required();
  entropy->add_option("--methods", entropy_args.methods, "Methods (default all)")->delimiter(',');
  entropy->add_option("--weights", entropy_args.weights_files, "Mixture weights file(s)");
  entropy->add_flag("--exact", entropy_args.exact, "Also compute the exact entropy");
  entropy->add_flag("--one-indexed", entropy_args.one_indexed, "Vertex ids start at 1");
  entropy->add_flag("--unweighted", entropy_args.unweighted, "Ignore a third column");
  entropy->callback([&] { action = [&] { return cmd_entropy(global, entropy_args); }; });

  ModelArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Sample a random graph and write it as an edge list");
  gen_args.add_to(gen);
  gen->callback([&] { action = [&] { return cmd_gen(global, gen_args); }; });

  SweepArgs sweep_args;
  sweep_args.model.n = 500;
  auto* sweep = app.add_subcommand("error-sweep", "Mean |exact - estimate| over a parameter sweep");
  sweep_args.model.add_to(sweep);
  sweep->add_option("--vary", sweep_args.vary, "Swept quantity")->check(CLI::IsMember({"degree", "nodes"}));
  sweep->add_option("--points", sweep_args.points, "Sweep values")->delimiter(',');
  sweep->add_option("--range", sweep_args.range, "Sweep values as start:stop:step");
  sweep->add_option("--trials", sweep_args.trials, "Trials per point")->capture_default_str();
  sweep->add_option("--methods", sweep_args.methods, "Methods (default all)")->delimiter(',');
  sweep->add_flag("--records", sweep_args.records, "Emit one row per trial and method");
  sweep->add_flag("--record-time", sweep_args.record_time, "Fill wall_time_ns (not reproducible)");
  sweep->callback([&] { action = [&] { return cmd_error_sweep(global, sweep_args); }; });

  CorrelationArgs corr_args;
  corr_args.model.n = 500;
  auto* corr = app.add_subcommand("correlation", "Exact vs estimated entropy over random graphs");
  corr_args.model.add_to(corr);
  corr->add_option("--count", corr_args.count, "Number of graphs")->capture_default_str();
  corr->add_option("--methods", corr_args.methods, "Methods (default all)")->delimiter(',');
  corr->add_flag("--same-graph", corr_args.same_graph, "Reuse one seed for every graph");
  corr->callback([&] { action = [&] { return cmd_correlation(global, corr_args); }; });

  TimingArgs timing_args;
  auto* timing = app.add_subcommand("timing", "Wall-time medians per method and size");
  timing_args.model.add_to(timing, false);
  timing->add_option("--sizes", timing_args.sizes, "Graph sizes")->delimiter(',');
  timing->add_option("--trials", timing_args.trials, "Repetitions per measurement")->capture_default_str();
  timing->add_option("--exact-limit", timing_args.exact_limit, "Largest n timed with the dense oracle");
  timing->callback([&] { action = [&] { return cmd_timing(global, timing_args); }; });

  CalibrateArgs cal_args;
  cal_args.model.n = 300;
  auto* cal = app.add_subcommand("calibrate", "Fit mixture weights against exact entropy");
  cal->add_option("--samples", cal_args.samples, "Training sample CSV");
  cal->add_option("--write-samples", cal_args.write_samples, "Write the training samples as CSV");
  cal_args.model.add_to(cal);
  cal->add_option("--count", cal_args.count, "Generated training graphs")->capture_default_str();
  cal->add_option("--pair", cal_args.pair, "Two estimators for t a + (1 - t) b")->delimiter(',');
  cal->add_flag("--affine4", cal_args.affine4, "Fit the four-estimator affine mixture");
  cal->add_option("--preset", cal_args.preset, "Load a published preset instead of fitting");
  cal->add_option("--alpha", cal_args.alpha, "Gradient step size")->capture_default_str();
  cal->add_option("--init-t", cal_args.init_t, "Initial t")->capture_default_str();
  cal->add_option("--max-iter", cal_args.max_iter, "Iteration cap")->capture_default_str();
  cal->add_option("--grad-tol", cal_args.grad_tol, "Gradient tolerance")->capture_default_str();
  cal->add_flag("--fast", cal_args.fast, "Exact least squares instead of gradient descent");
  cal->add_option("--weights-out", cal_args.weights_out, "Write fitted weights (key=value)");
  cal->callback([&] { action = [&] { return cmd_calibrate(global, cal_args); }; });

  JsArgs js_args;
  auto* js = app.add_subcommand("jsdist", "Jensen-Shannon distance between two graphs");
  js->add_option("file_a", js_args.file_a)->required();
  js->add_option("file_b", js_args.file_b)->required();
  js->add_option("--method", js_args.method, "Entropy backend or preset name")->capture_default_str();
  js->add_option("--weights", js_args.weights_file, "Mixture weights file for the backend");
  js->add_flag("--one-indexed", js_args.one_indexed, "Vertex ids start at 1");
  js->add_flag("--unweighted", js_args.unweighted, "Ignore a third column");
  js->callback([&] { action = [&] { return cmd_jsdist(global, js_args); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return action();
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.error_class() == ErrorClass::Numerical ? kExitNumerical : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}
