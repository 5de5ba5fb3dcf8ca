#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "vnge/calibration.hpp"
#include "vnge/error.hpp"
#include "vnge/estimators.hpp"
#include "vnge/graph.hpp"
#include "vnge/purity.hpp"
#include "vnge/spectral.hpp"

namespace vnge {

/// Entropy route used by the graph distance.
struct EntropyBackend {
  Method method = Method::Exact;
  std::optional<MixtureWeights> mixture;  // required for Method::Mixture
  SummaryOptions summary;

  static EntropyBackend of(Method m) {
    EntropyBackend b;
    b.method = m;
    return b;
  }
  static EntropyBackend of(MixtureWeights w) {
    EntropyBackend b;
    b.method = Method::Mixture;
    b.mixture = std::move(w);
    return b;
  }
};

inline double entropy(const Graph& g, const EntropyBackend& backend) {
  if (backend.method == Method::Exact) return exact_vnge(g, backend.summary.dense_limit);

  auto options = backend.summary;
  options.with_lambda_max = backend.method == Method::Finger ||
                            backend.method == Method::ModifiedTaylor ||
                            (backend.method == Method::Mixture && backend.mixture &&
                             backend.mixture->needs_lambda_max());
  const auto s = summarize(g, options);
  switch (backend.method) {
    case Method::Finger: return finger(s.n, s.purity, *s.lambda_max).value;
    case Method::Taylor: return taylor(s.n, s.purity).value;
    case Method::ModifiedTaylor: return modified_taylor(s.n, s.purity, *s.lambda_max).value;
    case Method::RadialProjection: return radial_projection(s.n, s.purity).value;
    case Method::Mixture:
      if (!backend.mixture) throw Error(ErrorCode::MissingEstimator, "mixture backend without weights");
      return mixture_value(*backend.mixture, EstimatorValues::from(evaluate_all(s)));
    case Method::Exact: break;
  }
  return 0.0;
}

/// Graph whose weight matrix is (W + W') / 2; an absent edge counts as weight 0.
inline Graph average_graph(const Graph& g, const Graph& h) {
  if (g.num_vertices() != h.num_vertices()) {
    throw Error(ErrorCode::SizeMismatch, std::to_string(g.num_vertices()) + " vs " +
                                             std::to_string(h.num_vertices()) + " vertices");
  }
  auto a = g.edges();
  auto b = h.edges();
  auto before = [](const Edge& x, const Edge& y) { return x.u != y.u ? x.u < y.u : x.v < y.v; };
  std::vector<Edge> merged;
  merged.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && before(a[i], b[j]))) {
      merged.push_back({a[i].u, a[i].v, a[i].w / 2.0});
      ++i;
    } else if (i == a.size() || before(b[j], a[i])) {
      merged.push_back({b[j].u, b[j].v, b[j].w / 2.0});
      ++j;
    } else {
      merged.push_back({a[i].u, a[i].v, (a[i].w + b[j].w) / 2.0});
      ++i;
      ++j;
    }
  }
  return build_graph(g.num_vertices(), std::move(merged));
}

struct JsDistance {
  double distance = 0.0;
  double radicand = 0.0;
  double h_average = 0.0;
  double h_first = 0.0;
  double h_second = 0.0;
  bool clamped = false;  // radicand was negative and set to zero
};

/// sqrt(H(average) - (H(G) + H(G')) / 2) under the chosen entropy backend.
inline JsDistance js_distance(const Graph& g, const Graph& h, const EntropyBackend& backend) {
  const Graph avg = average_graph(g, h);
  for (const Graph* x : {&g, &h, &avg}) require_nonempty(*x, trace_laplacian(*x));
  JsDistance out;
  out.h_first = entropy(g, backend);
  out.h_second = entropy(h, backend);
  out.h_average = entropy(avg, backend);
  out.radicand = out.h_average - 0.5 * (out.h_first + out.h_second);
  out.clamped = out.radicand < 0.0;
  out.distance = std::sqrt(std::max(out.radicand, 0.0));
  return out;
}

}  // namespace vnge
