#pragma once

#include <cstddef>
#include <optional>

#include "vnge/graph.hpp"
#include "vnge/spectral.hpp"

namespace vnge {

struct PurityOptions {
  bool kahan = false;
};

namespace detail {

class Accumulator {
 public:
  explicit Accumulator(bool compensated) : compensated_(compensated) {}

  void add(double x) {
    if (!compensated_) {
      sum_ += x;
      return;
    }
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }

  double value() const { return sum_; }

 private:
  bool compensated_;
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace detail

/// tr(rho^2) in O(n + m): (sum_i s_i^2 + 2 sum_edges w^2) / tr(L)^2.
inline double purity(const Graph& g, const PurityOptions& options = {}) {
  detail::Accumulator degree_sq(options.kahan);
  detail::Accumulator trace(options.kahan);
  for (double s : g.degrees()) {
    degree_sq.add(s * s);
    trace.add(s);
  }
  detail::Accumulator weight_sq(options.kahan);
  for (const auto& e : g.edges()) weight_sq.add(e.w * e.w);

  const double tr = trace.value();
  require_nonempty(g, tr);
  double p = (degree_sq.value() + 2.0 * weight_sq.value()) / (tr * tr);

  const double lower = 1.0 / static_cast<double>(g.num_vertices());
  if (p < lower && p > lower - 1e-12) p = lower;
  if (p > 1.0 && p < 1.0 + 1e-12) p = 1.0;
  return p;
}

/// Scalars every estimator consumes, computed once per graph.
struct SpectralSummary {
  std::size_t n = 0;
  double trace_l = 0.0;
  double purity = 0.0;
  std::optional<double> lambda_max;
};

struct SummaryOptions {
  bool with_lambda_max = true;
  PowerIterationOptions power;
  PurityOptions purity;
  // Power iteration failures fall back to the dense spectrum up to this size.
  std::size_t dense_limit = kDefaultDenseLimit;
};

inline SpectralSummary summarize(const Graph& g, const SummaryOptions& options = {}) {
  SpectralSummary out;
  out.n = g.num_vertices();
  out.trace_l = trace_laplacian(g);
  out.purity = purity(g, options.purity);
  if (options.with_lambda_max) {
    try {
      out.lambda_max = power_iteration(g, options.power).value;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoConvergence || g.num_vertices() > options.dense_limit) throw;
      out.lambda_max = std::max(exact_spectrum(g, options.dense_limit).max(),
                                1.0 / static_cast<double>(out.n));
    }
  }
  return out;
}

}  // namespace vnge
