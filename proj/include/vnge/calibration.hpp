#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "vnge/error.hpp"
#include "vnge/estimators.hpp"
#include "vnge/graph.hpp"

namespace vnge {

/// Values of the four quadratic estimators for one graph.
struct EstimatorValues {
  std::optional<double> finger;
  std::optional<double> taylor;
  std::optional<double> modified_taylor;
  std::optional<double> radial;

  std::optional<double> get(Method m) const {
    switch (m) {
      case Method::Finger: return finger;
      case Method::Taylor: return taylor;
      case Method::ModifiedTaylor: return modified_taylor;
      case Method::RadialProjection: return radial;
      default: return std::nullopt;
    }
  }

  static EstimatorValues from(const std::vector<EntropyEstimate>& estimates) {
    EstimatorValues v;
    for (const auto& e : estimates) {
      switch (e.method) {
        case Method::Finger: v.finger = e.value; break;
        case Method::Taylor: v.taylor = e.value; break;
        case Method::ModifiedTaylor: v.modified_taylor = e.value; break;
        case Method::RadialProjection: v.radial = e.value; break;
        default: break;
      }
    }
    return v;
  }
};

inline constexpr std::array<Method, 4> kAffineMethods = {Method::Finger, Method::Taylor,
                                                         Method::ModifiedTaylor,
                                                         Method::RadialProjection};

struct MethodPair {
  Method first = Method::Finger;
  Method second = Method::ModifiedTaylor;
};

/// Weighted mean t a + (1 - t) b of two estimators, or the affine mixture
/// sum_i omega_i x_i + beta over all four.
struct MixtureWeights {
  enum class Kind { TwoTerm, Affine4 };

  Kind kind = Kind::TwoTerm;
  std::string name = "mixture";
  MethodPair pair;
  double t = 0.5;
  std::array<double, 4> omegas = {0.25, 0.25, 0.25, 0.25};
  double beta = 0.0;

  static MixtureWeights two_term(MethodPair pair, double t, std::string name = "mixture") {
    MixtureWeights w;
    w.kind = Kind::TwoTerm;
    w.name = std::move(name);
    w.pair = pair;
    w.t = t;
    return w;
  }

  static MixtureWeights affine4(std::array<double, 4> omegas, double beta,
                                std::string name = "mixture") {
    MixtureWeights w;
    w.kind = Kind::Affine4;
    w.name = std::move(name);
    w.omegas = omegas;
    w.beta = beta;
    return w;
  }

  bool needs_lambda_max() const {
    if (kind == Kind::TwoTerm) {
      auto uses = [](Method m) { return m == Method::Finger || m == Method::ModifiedTaylor; };
      return uses(pair.first) || uses(pair.second);
    }
    return omegas[0] != 0.0 || omegas[2] != 0.0;
  }
};

namespace presets {

inline MixtureWeights improved_modified_taylor() {
  return MixtureWeights::two_term({Method::Finger, Method::ModifiedTaylor}, 0.3824,
                                  "improved_modified_taylor");
}

inline MixtureWeights improved_radial_projection() {
  return MixtureWeights::two_term({Method::Finger, Method::RadialProjection}, 0.2794,
                                  "improved_radial");
}

inline MixtureWeights mixed_quadratic() {
  return MixtureWeights::affine4({0.2299, 0.0, 0.3099, 0.4602}, -0.0073, "mixed_quadratic");
}

inline std::vector<MixtureWeights> all() {
  return {improved_modified_taylor(), improved_radial_projection(), mixed_quadratic()};
}

/// Accepts both the underscore and the dashed spelling.
inline std::optional<MixtureWeights> by_name(std::string name) {
  std::replace(name.begin(), name.end(), '-', '_');
  if (name == "improved_radial_projection") name = "improved_radial";
  for (auto& w : all()) {
    if (w.name == name) return w;
  }
  return std::nullopt;
}

}  // namespace presets

inline double require_value(const EstimatorValues& values, Method m) {
  auto v = values.get(m);
  if (!v) throw Error(ErrorCode::MissingEstimator, to_string(m));
  return *v;
}

inline double mixture_value(const MixtureWeights& w, const EstimatorValues& values) {
  if (w.kind == MixtureWeights::Kind::TwoTerm) {
    const double a = require_value(values, w.pair.first);
    const double b = require_value(values, w.pair.second);
    if (w.t == 1.0) return a;
    if (w.t == 0.0) return b;
    return w.t * a + (1.0 - w.t) * b;
  }
  double total = w.beta;
  for (std::size_t i = 0; i < kAffineMethods.size(); ++i) {
    if (w.omegas[i] == 0.0) continue;
    total += w.omegas[i] * require_value(values, kAffineMethods[i]);
  }
  return total;
}

struct TrainingSample {
  std::size_t n = 0;
  double purity = 0.0;
  std::optional<double> lambda_max;
  double exact = 0.0;  // y
  EstimatorValues x;
};

/// Builds a sample from a graph, evaluating every estimator plus the dense oracle.
inline TrainingSample make_sample(const Graph& g, const SummaryOptions& options = {}) {
  const auto summary = summarize(g, options);
  TrainingSample s;
  s.n = summary.n;
  s.purity = summary.purity;
  s.lambda_max = summary.lambda_max;
  s.exact = exact_vnge(g, options.dense_limit);
  s.x = EstimatorValues::from(evaluate_all(summary));
  return s;
}

// ---------------------------------------------------------------------------
// Two-term fit

struct TwoTermConfig {
  double alpha = 1e-6;
  double init_t = 0.5;
  std::size_t max_iter = 10'000'000;
  double grad_tol = 1e-9;
  bool fast = false;  // closed-form least squares instead of gradient descent
};

struct FitReport {
  MixtureWeights weights;
  double cost = 0.0;  // J at the returned weights
  std::size_t iterations = 0;
  bool converged = false;
  bool degenerate = false;  // features identical: J' vanishes everywhere
};

namespace detail {

struct TwoTermSums {
  double dd = 0.0;  // sum (x1 - x2)^2
  double dr = 0.0;  // sum (x1 - x2)(x2 - y)
  std::size_t count = 0;
};

inline TwoTermSums two_term_sums(const std::vector<TrainingSample>& samples, MethodPair pair) {
  TwoTermSums s;
  for (const auto& sample : samples) {
    const double a = require_value(sample.x, pair.first);
    const double b = require_value(sample.x, pair.second);
    const double d = a - b;
    s.dd += d * d;
    s.dr += d * (b - sample.exact);
  }
  s.count = samples.size();
  return s;
}

}  // namespace detail

/// J(t) = (1/N) sum (t x1 + (1 - t) x2 - y)^2.
inline double two_term_cost(const std::vector<TrainingSample>& samples, MethodPair pair, double t) {
  if (samples.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no samples");
  double total = 0.0;
  for (const auto& s : samples) {
    const double r = t * require_value(s.x, pair.first) +
                     (1.0 - t) * require_value(s.x, pair.second) - s.exact;
    total += r * r;
  }
  return total / static_cast<double>(samples.size());
}

/// Unconstrained minimizer of J: sum d (y - x2) / sum d^2 with d = x1 - x2.
inline std::optional<double> two_term_least_squares(const std::vector<TrainingSample>& samples,
                                                    MethodPair pair) {
  const auto sums = detail::two_term_sums(samples, pair);
  if (sums.dd == 0.0) return std::nullopt;
  return -sums.dr / sums.dd;
}

/// Gradient descent on J from init_t with t <- t - alpha J'(t), where
/// J'(t) = (2/N)(t sum d^2 + sum d (x2 - y)). The result is clipped to [0, 1].
inline FitReport fit_two_term(const std::vector<TrainingSample>& samples, MethodPair pair,
                              const TwoTermConfig& config = {}) {
  if (samples.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no samples");
  const auto sums = detail::two_term_sums(samples, pair);
  const double inv_n = 1.0 / static_cast<double>(sums.count);

  FitReport report;
  double t = config.init_t;
  if (sums.dd == 0.0) {
    report.degenerate = true;
    report.converged = true;
  } else if (config.fast) {
    t = -sums.dr / sums.dd;
    report.converged = true;
  } else {
    for (std::size_t it = 0; it < config.max_iter; ++it) {
      const double grad = 2.0 * inv_n * (t * sums.dd + sums.dr);
      if (std::abs(grad) < config.grad_tol) {
        report.converged = true;
        break;
      }
      t -= config.alpha * grad;
      report.iterations = it + 1;
    }
  }
  t = std::clamp(t, 0.0, 1.0);
  report.weights = MixtureWeights::two_term(pair, t);
  report.cost = two_term_cost(samples, pair, t);
  return report;
}

// ---------------------------------------------------------------------------
// Four-term affine fit

/// Euclidean projection onto the probability simplex (sort and threshold).
template <std::size_t N>
std::array<double, N> project_to_simplex(const std::array<double, N>& v) {
  std::array<double, N> sorted = v;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double threshold = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    cumulative += sorted[i];
    const double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (sorted[i] - candidate > 0.0) threshold = candidate;
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = std::max(v[i] - threshold, 0.0);
  return out;
}

struct Affine4Config {
  double alpha = 0.0;  // 0: 1 / Lipschitz constant of the gradient
  std::size_t max_iter = 10'000'000;
  double grad_tol = 1e-9;
  bool fast = false;  // exact minimizer over simplex supports instead of gradient descent
};

namespace detail {

struct AffineNormalEquations {
  Eigen::Matrix<double, 5, 5> gram = Eigen::Matrix<double, 5, 5>::Zero();
  Eigen::Matrix<double, 5, 1> cross = Eigen::Matrix<double, 5, 1>::Zero();
  double yy = 0.0;
};

inline AffineNormalEquations affine_normal_equations(const std::vector<TrainingSample>& samples) {
  AffineNormalEquations eq;
  for (const auto& s : samples) {
    Eigen::Matrix<double, 5, 1> z;
    for (std::size_t i = 0; i < 4; ++i) z(static_cast<Eigen::Index>(i)) = require_value(s.x, kAffineMethods[i]);
    z(4) = 1.0;
    eq.gram.noalias() += z * z.transpose();
    eq.cross.noalias() += z * s.exact;
    eq.yy += s.exact * s.exact;
  }
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  eq.gram *= inv_n;
  eq.cross *= inv_n;
  eq.yy *= inv_n;
  return eq;
}

// Exact minimizer: the optimum is the equality-constrained least-squares
// solution on some support of omega, so try all fifteen and keep the best
// feasible one.
inline Eigen::Matrix<double, 5, 1> affine_exact(const AffineNormalEquations& eq) {
  Eigen::Matrix<double, 5, 1> best = Eigen::Matrix<double, 5, 1>::Zero();
  double best_cost = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < 16; ++mask) {
    std::vector<Eigen::Index> vars;
    for (Eigen::Index i = 0; i < 4; ++i)
      if (mask & (1u << i)) vars.push_back(i);
    vars.push_back(4);
    const auto k = static_cast<Eigen::Index>(vars.size());
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + 1, k + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
    for (Eigen::Index r = 0; r < k; ++r) {
      for (Eigen::Index c = 0; c < k; ++c) kkt(r, c) = eq.gram(vars[r], vars[c]);
      rhs(r) = eq.cross(vars[r]);
    }
    for (Eigen::Index r = 0; r + 1 < k; ++r) kkt(r, k) = kkt(k, r) = 1.0;
    rhs(k) = 1.0;
    const Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    Eigen::Matrix<double, 5, 1> theta = Eigen::Matrix<double, 5, 1>::Zero();
    bool feasible = true;
    for (Eigen::Index r = 0; r < k; ++r) {
      if (vars[r] < 4 && sol(r) < 0.0) feasible = false;
      theta(vars[r]) = sol(r);
    }
    if (!feasible) continue;
    const double cost = theta.dot(eq.gram * theta) - 2.0 * theta.dot(eq.cross) + eq.yy;
    if (cost < best_cost) {
      best_cost = cost;
      best = theta;
    }
  }
  return best;
}

}  // namespace detail

inline double affine4_cost(const std::vector<TrainingSample>& samples, const MixtureWeights& w) {
  if (samples.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no samples");
  double total = 0.0;
  for (const auto& s : samples) {
    const double r = mixture_value(w, s.x) - s.exact;
    total += r * r;
  }
  return total / static_cast<double>(samples.size());
}

/// Projected gradient descent on the mean squared error over (omega, beta):
/// a gradient step followed by projecting omega onto the simplex. Stops when
/// the gradient mapping norm drops below grad_tol.
inline FitReport fit_affine4(const std::vector<TrainingSample>& samples,
                             const Affine4Config& config = {}) {
  if (samples.size() < 5) {
    throw Error(ErrorCode::EmptyTrainingSet,
                "affine fit needs at least 5 samples, got " + std::to_string(samples.size()));
  }
  const auto eq = detail::affine_normal_equations(samples);
  if (config.fast) {
    const auto theta = detail::affine_exact(eq);
    FitReport report;
    report.converged = true;
    report.weights = MixtureWeights::affine4({theta(0), theta(1), theta(2), theta(3)}, theta(4));
    report.cost = affine4_cost(samples, report.weights);
    return report;
  }
  double alpha = config.alpha;
  if (alpha <= 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 5, 5>> solver(eq.gram, Eigen::EigenvaluesOnly);
    alpha = 1.0 / (2.0 * solver.eigenvalues().maxCoeff());
  }

  Eigen::Matrix<double, 5, 1> theta;
  theta << 0.25, 0.25, 0.25, 0.25, 0.0;
  FitReport report;
  for (std::size_t it = 0; it < config.max_iter; ++it) {
    const Eigen::Matrix<double, 5, 1> grad = 2.0 * (eq.gram * theta - eq.cross);
    Eigen::Matrix<double, 5, 1> next = theta - alpha * grad;
    const auto omegas = project_to_simplex<4>({next(0), next(1), next(2), next(3)});
    for (Eigen::Index i = 0; i < 4; ++i) next(i) = omegas[static_cast<std::size_t>(i)];
    const double step_norm = (next - theta).norm() / alpha;
    theta = next;
    report.iterations = it + 1;
    if (step_norm < config.grad_tol) {
      report.converged = true;
      break;
    }
  }
  report.weights = MixtureWeights::affine4({theta(0), theta(1), theta(2), theta(3)}, theta(4));
  report.cost = affine4_cost(samples, report.weights);
  return report;
}

/// Fits t on each set and returns the mean absolute difference, over the test
/// samples, between the two fitted mixtures.
inline double train_test_gap(const std::vector<TrainingSample>& train,
                             const std::vector<TrainingSample>& test, MethodPair pair,
                             const TwoTermConfig& config = {}) {
  if (train.empty() || test.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no samples");
  const auto fitted = fit_two_term(train, pair, config).weights;
  const auto reference = fit_two_term(test, pair, config).weights;
  double total = 0.0;
  for (const auto& s : test) total += std::abs(mixture_value(fitted, s.x) - mixture_value(reference, s.x));
  return total / static_cast<double>(test.size());
}

// ---------------------------------------------------------------------------
// Serialization

inline constexpr const char* kSampleCsvHeader =
    "n,purity,lambda_max,H_exact,finger,taylor,modified_taylor,radial";

namespace detail {

inline std::string format_optional(std::optional<double> v) {
  if (!v) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto comma = line.find(',', start);
    auto field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
    out.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::optional<double> parse_optional(std::string_view field, std::size_t line_no) {
  if (field.empty()) return std::nullopt;
  double v = 0.0;
  if (!parse_number(field, v)) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad number '" +
                                           std::string(field) + "'");
  }
  return v;
}

}  // namespace detail

inline void write_samples_csv(std::ostream& out, const std::vector<TrainingSample>& samples) {
  out << kSampleCsvHeader << '\n';
  for (const auto& s : samples) {
    out << s.n << ',' << detail::format_optional(s.purity) << ','
        << detail::format_optional(s.lambda_max) << ',' << detail::format_optional(s.exact) << ','
        << detail::format_optional(s.x.finger) << ',' << detail::format_optional(s.x.taylor) << ','
        << detail::format_optional(s.x.modified_taylor) << ','
        << detail::format_optional(s.x.radial) << '\n';
  }
}

/// Reads the sample CSV; '#' lines are skipped and the header is required.
inline std::vector<TrainingSample> read_samples_csv(std::istream& in) {
  std::vector<TrainingSample> samples;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (view.empty() || view.front() == '#' || view.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    auto fields = detail::split_csv(view);
    if (!header_seen) {
      if (fields.size() != 8 || fields[0] != "n" || fields[3] != "H_exact") {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected header '" +
                                               kSampleCsvHeader + "'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 8) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 8 columns");
    }
    TrainingSample s;
    if (!detail::parse_number(fields[0], s.n)) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad n");
    }
    auto purity = detail::parse_optional(fields[1], line_no);
    auto exact = detail::parse_optional(fields[3], line_no);
    if (!exact) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": missing H_exact");
    s.purity = purity.value_or(0.0);
    s.lambda_max = detail::parse_optional(fields[2], line_no);
    s.exact = *exact;
    s.x.finger = detail::parse_optional(fields[4], line_no);
    s.x.taylor = detail::parse_optional(fields[5], line_no);
    s.x.modified_taylor = detail::parse_optional(fields[6], line_no);
    s.x.radial = detail::parse_optional(fields[7], line_no);
    samples.push_back(s);
  }
  if (!header_seen) throw Error(ErrorCode::ParseError, "empty sample file");
  return samples;
}

/// key=value lines, loadable with read_weights.
inline void write_weights(std::ostream& out, const MixtureWeights& w) {
  auto num = [](double v) { return detail::format_optional(v); };
  out << "name=" << w.name << '\n';
  if (w.kind == MixtureWeights::Kind::TwoTerm) {
    out << "kind=two_term\n"
        << "first=" << to_string(w.pair.first) << '\n'
        << "second=" << to_string(w.pair.second) << '\n'
        << "t=" << num(w.t) << '\n';
  } else {
    out << "kind=affine4\n";
    for (std::size_t i = 0; i < 4; ++i) out << "w_" << to_string(kAffineMethods[i]) << '=' << num(w.omegas[i]) << '\n';
    out << "beta=" << num(w.beta) << '\n';
  }
}

inline MixtureWeights read_weights(std::istream& in) {
  std::map<std::string, std::string, std::less<>> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected key=value");
    }
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto field = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw Error(ErrorCode::ParseError, "weights file missing '" + key + "'");
    return it->second;
  };
  auto number = [&](const std::string& key) {
    double v = 0.0;
    if (!detail::parse_number(field(key), v)) throw Error(ErrorCode::ParseError, "bad value for '" + key + "'");
    return v;
  };
  auto method = [&](const std::string& key) {
    auto m = parse_method(field(key));
    if (!m || *m == Method::Exact || *m == Method::Mixture) {
      throw Error(ErrorCode::ParseError, "bad estimator for '" + key + "'");
    }
    return *m;
  };

  const std::string name = kv.count("name") ? kv["name"] : "mixture";
  const std::string& kind = field("kind");
  if (kind == "two_term") {
    const double t = number("t");
    if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::DomainError, "t outside [0, 1]");
    return MixtureWeights::two_term({method("first"), method("second")}, t, name);
  }
  if (kind == "affine4") {
    std::array<double, 4> omegas{};
    double total = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      omegas[i] = number(std::string("w_") + to_string(kAffineMethods[i]));
      if (!(omegas[i] >= 0.0 && omegas[i] <= 1.0)) throw Error(ErrorCode::DomainError, "weight outside [0, 1]");
      total += omegas[i];
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::DomainError, "weights do not sum to 1");
    return MixtureWeights::affine4(omegas, number("beta"), name);
  }
  throw Error(ErrorCode::ParseError, "unknown kind '" + kind + "'");
}

}  // namespace vnge
