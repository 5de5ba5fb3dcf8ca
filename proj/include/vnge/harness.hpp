#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "vnge/calibration.hpp"
#include "vnge/estimators.hpp"
#include "vnge/generators.hpp"
#include "vnge/purity.hpp"
#include "vnge/spectral.hpp"

namespace vnge::harness {

inline constexpr const char* kCsvVersionLine = "# vnentropy-csv v1";

// ---------------------------------------------------------------------------
// Work pool

/// Runs body(i) for i in [0, count) on up to `threads` workers. Results must
/// be written to per-index slots so the schedule never affects output.
inline void parallel_for(std::size_t count, std::size_t threads,
                         const std::function<void(std::size_t)>& body) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Estimation methods

/// A named route from a graph summary to an entropy value.
struct MethodSpec {
  std::string name;
  Method method = Method::Finger;
  std::optional<MixtureWeights> mixture;

  bool needs_lambda_max() const {
    if (method == Method::Mixture) return mixture && mixture->needs_lambda_max();
    return method == Method::Finger || method == Method::ModifiedTaylor;
  }
};

inline MethodSpec method_spec(Method m) { return {to_string(m), m, std::nullopt}; }
inline MethodSpec method_spec(const MixtureWeights& w) { return {w.name, Method::Mixture, w}; }

/// The four estimators followed by the three published mixtures.
inline std::vector<MethodSpec> default_methods() {
  std::vector<MethodSpec> out = {method_spec(Method::Finger), method_spec(Method::Taylor),
                                 method_spec(Method::ModifiedTaylor),
                                 method_spec(Method::RadialProjection)};
  for (const auto& w : presets::all()) out.push_back(method_spec(w));
  return out;
}

inline std::optional<MethodSpec> method_by_name(const std::string& name) {
  if (auto m = parse_method(name); m && *m != Method::Mixture) return method_spec(*m);
  if (auto w = presets::by_name(name)) return method_spec(*w);
  return std::nullopt;
}

inline double evaluate(const MethodSpec& spec, const SpectralSummary& s) {
  switch (spec.method) {
    case Method::Finger: return finger(s.n, s.purity, s.lambda_max.value()).value;
    case Method::Taylor: return taylor(s.n, s.purity).value;
    case Method::ModifiedTaylor: return modified_taylor(s.n, s.purity, s.lambda_max.value()).value;
    case Method::RadialProjection: return radial_projection(s.n, s.purity).value;
    case Method::Mixture: return mixture_value(spec.mixture.value(), EstimatorValues::from(evaluate_all(s)));
    case Method::Exact: break;
  }
  throw Error(ErrorCode::InvalidArgument, "exact entropy is not an estimator");
}

// ---------------------------------------------------------------------------
// Statistics

/// Pearson correlation; NaN when either side has zero variance.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  // A constant side is tested directly: the rounded mean can leave tiny
  // nonzero deviations that would otherwise read as perfect correlation.
  auto constant = [n](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n), [&](double a) { return a == v[0]; });
  };
  if (constant(x) || constant(y)) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = intercept + slope x.
inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = std::min(x.size(), y.size());
  LinearFit fit;
  if (n < 2) return fit;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

// ---------------------------------------------------------------------------
// CSV

inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt(std::optional<double> v) { return v ? fmt(*v) : std::string(); }

/// One (graph, method) evaluation.
struct ExperimentRecord {
  std::string model;
  std::string params;
  std::size_t trial = 0;
  std::string method;
  std::optional<double> exact;
  double estimate = 0.0;
  std::optional<double> abs_error;
  std::optional<std::int64_t> wall_time_ns;
};

inline constexpr const char* kRecordHeader =
    "model,params,trial,method,exact,estimate,abs_error,wall_time_ns";

inline void write_record(std::ostream& out, const ExperimentRecord& r) {
  out << r.model << ',' << r.params << ',' << r.trial << ',' << r.method << ',' << fmt(r.exact)
      << ',' << fmt(r.estimate) << ',' << fmt(r.abs_error) << ',';
  if (r.wall_time_ns) out << *r.wall_time_ns;
  out << '\n';
}

// ---------------------------------------------------------------------------
// Model parameterization by average degree

struct ModelDefaults {
  double p_rewire = 0.1;  // WS only
  bool perturb_weights = false;
};

/// Spec of the given model with roughly the requested mean degree:
/// ER p = d / (n - 1), BA m = round(d / 2), WS K = nearest even integer to d.
inline ModelSpec spec_for_degree(Model model, std::size_t n, double degree, std::uint64_t seed,
                                 const ModelDefaults& defaults = {}) {
  ModelSpec s;
  s.model = model;
  s.n = n;
  s.seed = seed;
  s.perturb_weights = defaults.perturb_weights;
  switch (model) {
    case Model::ErdosRenyi: s.p = n > 1 ? std::min(1.0, degree / static_cast<double>(n - 1)) : 0.0; break;
    case Model::BarabasiAlbert:
      s.m_attach = static_cast<std::size_t>(std::max(1.0, std::round(degree / 2.0)));
      break;
    case Model::WattsStrogatz:
      s.k = 2 * static_cast<std::size_t>(std::max(1.0, std::round(degree / 2.0)));
      s.p_rewire = defaults.p_rewire;
      break;
  }
  return s;
}

/// Seed for trial `trial` at sweep point `point`; independent of scheduling.
inline std::uint64_t trial_seed(std::uint64_t seed, std::size_t point, std::size_t trial) {
  return derive_seed(derive_seed(seed, point), trial);
}

// ---------------------------------------------------------------------------
// Error sweep

enum class SweepAxis { Degree, Nodes };

struct SweepConfig {
  Model model = Model::ErdosRenyi;
  SweepAxis axis = SweepAxis::Degree;
  std::vector<double> points;  // degrees or node counts
  std::size_t fixed_n = 500;
  double fixed_degree = 10.0;
  std::size_t trials = 50;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::size_t dense_limit = kDefaultDenseLimit;
  ModelDefaults model_defaults;
  std::vector<MethodSpec> methods = default_methods();
  bool record_time = false;
};

struct SweepPoint {
  double point = 0.0;
  ModelSpec spec;
  std::vector<std::vector<ExperimentRecord>> trials;  // [trial][method]
};

inline ModelSpec sweep_spec(const SweepConfig& c, std::size_t point_index, std::size_t trial) {
  const double x = c.points[point_index];
  const std::uint64_t seed = trial_seed(c.seed, point_index, trial);
  if (c.axis == SweepAxis::Degree) return spec_for_degree(c.model, c.fixed_n, x, seed, c.model_defaults);
  return spec_for_degree(c.model, static_cast<std::size_t>(std::llround(x)), c.fixed_degree, seed,
                         c.model_defaults);
}

namespace detail {

inline std::int64_t elapsed_ns(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - since)
      .count();
}

inline std::vector<ExperimentRecord> run_trial(const ModelSpec& spec, std::size_t trial,
                                               const std::vector<MethodSpec>& methods,
                                               std::size_t dense_limit, bool record_time) {
  const Graph g = generate(spec);
  std::optional<double> exact;
  if (g.num_vertices() <= dense_limit && trace_laplacian(g) > 0.0) exact = exact_vnge(g, dense_limit);

  SummaryOptions options;
  options.dense_limit = dense_limit;
  const bool any_lambda = std::any_of(methods.begin(), methods.end(),
                                      [](const MethodSpec& m) { return m.needs_lambda_max(); });
  options.with_lambda_max = any_lambda;
  const SpectralSummary summary = summarize(g, options);

  std::vector<ExperimentRecord> rows;
  rows.reserve(methods.size());
  for (const auto& m : methods) {
    ExperimentRecord r;
    r.model = to_string(spec.model);
    r.params = spec.params();
    r.trial = trial;
    r.method = m.name;
    r.exact = exact;
    r.estimate = evaluate(m, summary);
    if (exact) r.abs_error = std::abs(*exact - r.estimate);
    if (record_time) {
      // End to end from the graph: summary plus estimator.
      auto start = std::chrono::steady_clock::now();
      SummaryOptions own = options;
      own.with_lambda_max = m.needs_lambda_max();
      volatile double sink = evaluate(m, summarize(g, own));
      (void)sink;
      r.wall_time_ns = elapsed_ns(start);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace detail

/// Samples `trials` graphs per point and evaluates every method on each.
inline std::vector<SweepPoint> run_error_sweep(const SweepConfig& c) {
  if (c.points.empty()) throw Error(ErrorCode::InvalidArgument, "sweep has no points");
  for (std::size_t p = 0; p < c.points.size(); ++p) validate(sweep_spec(c, p, 0));

  std::vector<SweepPoint> out(c.points.size());
  for (std::size_t p = 0; p < c.points.size(); ++p) {
    out[p].point = c.points[p];
    out[p].spec = sweep_spec(c, p, 0);
    out[p].trials.resize(c.trials);
  }
  parallel_for(c.points.size() * c.trials, c.threads, [&](std::size_t job) {
    const std::size_t p = job / c.trials;
    const std::size_t t = job % c.trials;
    out[p].trials[t] = detail::run_trial(sweep_spec(c, p, t), t, c.methods, c.dense_limit, c.record_time);
  });
  return out;
}

inline constexpr const char* kSweepSummaryHeader =
    "model,params,point,method,trials,mean_exact,mean_estimate,mean_abs_error";

/// Per point and method: mean exact value, mean estimate and mean |exact - estimate|.
inline void write_sweep_summary(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << kCsvVersionLine << '\n' << kSweepSummaryHeader << '\n';
  for (const auto& pt : points) {
    if (pt.trials.empty()) continue;
    const std::size_t methods = pt.trials.front().size();
    for (std::size_t m = 0; m < methods; ++m) {
      double sum_exact = 0.0, sum_est = 0.0, sum_err = 0.0;
      bool have_exact = true;
      for (const auto& trial : pt.trials) {
        const auto& r = trial[m];
        sum_est += r.estimate;
        if (r.exact && r.abs_error) {
          sum_exact += *r.exact;
          sum_err += *r.abs_error;
        } else {
          have_exact = false;
        }
      }
      const double count = static_cast<double>(pt.trials.size());
      const auto& first = pt.trials.front()[m];
      out << first.model << ',' << pt.spec.params() << ',' << fmt(pt.point) << ',' << first.method
          << ',' << pt.trials.size() << ',' << (have_exact ? fmt(sum_exact / count) : "") << ','
          << fmt(sum_est / count) << ',' << (have_exact ? fmt(sum_err / count) : "") << '\n';
    }
  }
}

inline void write_sweep_records(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << kCsvVersionLine << '\n' << kRecordHeader << '\n';
  for (const auto& pt : points)
    for (const auto& trial : pt.trials)
      for (const auto& r : trial) write_record(out, r);
}

// ---------------------------------------------------------------------------
// Correlation study

struct CorrelationConfig {
  Model model = Model::ErdosRenyi;
  std::size_t n = 500;
  double degree = 10.0;
  std::size_t count = 50;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::size_t dense_limit = kDefaultDenseLimit;
  ModelDefaults model_defaults;
  std::vector<MethodSpec> methods = default_methods();
  // Generate every graph from the same seed (degenerate study).
  bool same_graph = false;
};

struct CorrelationResult {
  std::vector<std::vector<ExperimentRecord>> graphs;  // [graph][method]
  std::vector<std::pair<std::string, double>> pearson_r;
};

inline CorrelationResult run_correlation(const CorrelationConfig& c) {
  if (c.n > c.dense_limit) {
    throw Error(ErrorCode::TooLargeForDense, "correlation study needs exact entropy; n = " +
                                                 std::to_string(c.n));
  }
  validate(spec_for_degree(c.model, c.n, c.degree, c.seed, c.model_defaults));
  CorrelationResult out;
  out.graphs.resize(c.count);
  parallel_for(c.count, c.threads, [&](std::size_t i) {
    const auto seed = trial_seed(c.seed, 0, c.same_graph ? 0 : i);
    const auto spec = spec_for_degree(c.model, c.n, c.degree, seed, c.model_defaults);
    out.graphs[i] = detail::run_trial(spec, i, c.methods, c.dense_limit, false);
  });
  for (std::size_t m = 0; m < c.methods.size(); ++m) {
    std::vector<double> exact, estimate;
    for (const auto& g : out.graphs) {
      if (!g[m].exact) continue;
      exact.push_back(*g[m].exact);
      estimate.push_back(g[m].estimate);
    }
    out.pearson_r.emplace_back(c.methods[m].name, pearson(exact, estimate));
  }
  return out;
}

inline constexpr const char* kCorrelationHeader = "kind,model,params,index,method,exact,estimate,pearson_r";

inline void write_correlation(std::ostream& out, const CorrelationResult& result) {
  out << kCsvVersionLine << '\n' << kCorrelationHeader << '\n';
  std::string model;
  for (const auto& g : result.graphs) {
    for (const auto& r : g) {
      model = r.model;
      out << "pair," << r.model << ',' << r.params << ',' << r.trial << ',' << r.method << ','
          << fmt(r.exact) << ',' << fmt(r.estimate) << ",\n";
    }
  }
  for (const auto& [name, r] : result.pearson_r) {
    out << "summary," << model << ",,," << name << ",,," << fmt(r) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Timing

struct TimingConfig {
  Model model = Model::ErdosRenyi;
  std::vector<std::size_t> sizes;
  double degree = 10.0;
  std::size_t trials = 5;
  std::uint64_t seed = 1;
  std::size_t exact_limit = 1000;  // exact oracle timed only up to this n
  ModelDefaults model_defaults;
};

struct TimingRow {
  std::size_t n = 0;
  std::size_t m = 0;
  std::string method;
  std::size_t trials = 0;
  double median_ns = 0.0;
};

struct TimingResult {
  std::vector<TimingRow> rows;
  LinearFit purity_fit;  // median purity time against n + m
};

template <typename F>
double time_ns(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return static_cast<double>(detail::elapsed_ns(start));
}

/// Median wall times per size for: purity, purity + lambda_max, each
/// estimator end to end, and the dense oracle where n <= exact_limit.
inline TimingResult run_timing(const TimingConfig& c) {
  TimingResult out;
  std::vector<double> purity_x, purity_y;
  for (std::size_t si = 0; si < c.sizes.size(); ++si) {
    const auto spec = spec_for_degree(c.model, c.sizes[si], c.degree, trial_seed(c.seed, si, 0),
                                      c.model_defaults);
    const Graph g = generate(spec);
    const std::size_t trials = std::max<std::size_t>(1, c.trials);
    volatile double sink = 0.0;

    auto record = [&](const std::string& name, const std::function<double()>& body) {
      std::vector<double> samples;
      for (std::size_t t = 0; t < trials; ++t) samples.push_back(time_ns([&] { sink = body(); }));
      out.rows.push_back({g.num_vertices(), g.num_edges(), name, trials, median(samples)});
      return out.rows.back().median_ns;
    };

    const double purity_ns = record("purity", [&] { return purity(g); });
    purity_x.push_back(static_cast<double>(g.num_vertices() + g.num_edges()));
    purity_y.push_back(purity_ns);
    record("purity+lambda_max", [&] { return purity(g) + lambda_max(g); });
    for (Method m : {Method::Finger, Method::Taylor, Method::ModifiedTaylor, Method::RadialProjection}) {
      const auto spec_m = method_spec(m);
      record(to_string(m), [&] {
        SummaryOptions o;
        o.with_lambda_max = spec_m.needs_lambda_max();
        return evaluate(spec_m, summarize(g, o));
      });
    }
    if (g.num_vertices() <= c.exact_limit) record("exact", [&] { return exact_vnge(g, c.exact_limit); });
    (void)sink;
  }
  out.purity_fit = linear_fit(purity_x, purity_y);
  return out;
}

inline void write_timing(std::ostream& out, const TimingResult& result) {
  out << kCsvVersionLine << '\n' << "n,m,method,trials,median_ns\n";
  for (const auto& r : result.rows) {
    out << r.n << ',' << r.m << ',' << r.method << ',' << r.trials << ',' << fmt(r.median_ns) << '\n';
  }
  out << "# purity linear fit vs n+m: intercept_ns=" << fmt(result.purity_fit.intercept)
      << " slope_ns=" << fmt(result.purity_fit.slope) << " r2=" << fmt(result.purity_fit.r_squared)
      << '\n';
}

// ---------------------------------------------------------------------------
// Calibration samples

struct SampleConfig {
  Model model = Model::ErdosRenyi;
  std::size_t n = 300;
  double degree = 15.0;
  std::size_t count = 200;
  std::uint64_t seed = 7;
  std::size_t threads = 1;
  std::size_t dense_limit = kDefaultDenseLimit;
  ModelDefaults model_defaults;
};

inline std::vector<TrainingSample> generate_samples(const std::vector<ModelSpec>& specs,
                                                    std::size_t threads,
                                                    std::size_t dense_limit = kDefaultDenseLimit) {
  std::vector<TrainingSample> out(specs.size());
  parallel_for(specs.size(), threads, [&](std::size_t i) {
    SummaryOptions o;
    o.dense_limit = dense_limit;
    out[i] = make_sample(generate(specs[i]), o);
  });
  return out;
}

inline std::vector<TrainingSample> generate_samples(const SampleConfig& c) {
  std::vector<ModelSpec> specs;
  for (std::size_t i = 0; i < c.count; ++i) {
    specs.push_back(spec_for_degree(c.model, c.n, c.degree, trial_seed(c.seed, 0, i), c.model_defaults));
  }
  return generate_samples(specs, c.threads, c.dense_limit);
}

}  // namespace vnge::harness
