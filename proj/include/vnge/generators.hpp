#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <string>
#include <unordered_set>
#include <vector>

#include "vnge/error.hpp"
#include "vnge/graph.hpp"
#include "vnge/random.hpp"

namespace vnge {

enum class Model { ErdosRenyi, BarabasiAlbert, WattsStrogatz };

inline const char* to_string(Model m) {
  switch (m) {
    case Model::ErdosRenyi: return "er";
    case Model::BarabasiAlbert: return "ba";
    case Model::WattsStrogatz: return "ws";
  }
  return "unknown";
}

/// A seeded random-graph model. Only the fields of the selected model are read:
/// ER uses p, BA uses m_attach, WS uses k and p_rewire.
struct ModelSpec {
  Model model = Model::ErdosRenyi;
  std::size_t n = 0;
  double p = 0.0;
  std::size_t m_attach = 1;
  std::size_t k = 2;
  double p_rewire = 0.0;
  std::uint64_t seed = 0;
  // Replace unit weights by uniform draws from [0.5, 1.5].
  bool perturb_weights = false;

  static ModelSpec erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
    ModelSpec s;
    s.model = Model::ErdosRenyi;
    s.n = n;
    s.p = p;
    s.seed = seed;
    return s;
  }
  static ModelSpec barabasi_albert(std::size_t n, std::size_t m_attach, std::uint64_t seed) {
    ModelSpec s;
    s.model = Model::BarabasiAlbert;
    s.n = n;
    s.m_attach = m_attach;
    s.seed = seed;
    return s;
  }
  static ModelSpec watts_strogatz(std::size_t n, std::size_t k, double p_rewire, std::uint64_t seed) {
    ModelSpec s;
    s.model = Model::WattsStrogatz;
    s.n = n;
    s.k = k;
    s.p_rewire = p_rewire;
    s.seed = seed;
    return s;
  }

  std::string params() const {
    char buf[128];
    switch (model) {
      case Model::ErdosRenyi: std::snprintf(buf, sizeof buf, "n=%zu;p=%.17g", n, p); break;
      case Model::BarabasiAlbert: std::snprintf(buf, sizeof buf, "n=%zu;m=%zu", n, m_attach); break;
      case Model::WattsStrogatz:
        std::snprintf(buf, sizeof buf, "n=%zu;k=%zu;p_rewire=%.17g", n, k, p_rewire);
        break;
    }
    return buf;
  }
};

inline void validate(const ModelSpec& s) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidSpec, why); };
  if (s.n < 1) fail("n must be positive");
  switch (s.model) {
    case Model::ErdosRenyi:
      if (!(s.p >= 0.0 && s.p <= 1.0)) fail("ER needs 0 <= p <= 1");
      break;
    case Model::BarabasiAlbert:
      if (s.m_attach < 1 || s.m_attach >= s.n) fail("BA needs 1 <= m_attach < n");
      break;
    case Model::WattsStrogatz:
      if (s.k % 2 != 0 || s.k == 0 || s.k >= s.n) fail("WS needs even K with 0 < K < n");
      if (!(s.p_rewire >= 0.0 && s.p_rewire <= 1.0)) fail("WS needs 0 <= p_rewire <= 1");
      break;
  }
}

namespace detail {

inline std::uint64_t pair_key(Vertex a, Vertex b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

// Each unordered pair independently with probability p, visiting only the
// selected pairs by drawing geometric gaps between them.
inline std::vector<Edge> erdos_renyi_edges(std::size_t n, double p, CounterRng& rng) {
  std::vector<Edge> edges;
  if (p <= 0.0 || n < 2) return edges;
  if (p >= 1.0) {
    edges.reserve(n * (n - 1) / 2);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v) edges.push_back({Vertex(u), Vertex(v), 1.0});
    return edges;
  }
  const double expected = p * 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  edges.reserve(static_cast<std::size_t>(expected * 1.05) + 16);
  const double log_q = std::log1p(-p);
  // Pairs are ordered (0,1), (0,2), (1,2), (0,3), ...: column v, row w < v.
  std::int64_t v = 1;
  std::int64_t w = -1;
  const auto nn = static_cast<std::int64_t>(n);
  while (v < nn) {
    const double gap = std::floor(std::log1p(-rng.uniform()) / log_q);
    if (gap > 4.0e18) break;
    w += 1 + static_cast<std::int64_t>(gap);
    while (w >= v && v < nn) {
      w -= v;
      ++v;
    }
    if (v < nn) edges.push_back({Vertex(w), Vertex(v), 1.0});
  }
  return edges;
}

// Complete seed on m vertices; each arrival draws m distinct targets with
// probability proportional to current degree.
inline std::vector<Edge> barabasi_albert_edges(std::size_t n, std::size_t m, CounterRng& rng) {
  std::vector<Edge> edges;
  edges.reserve(m * (n - m) + m * (m - 1) / 2);
  std::vector<Vertex> endpoints;  // each vertex appears once per incident edge
  endpoints.reserve(2 * edges.capacity());
  for (std::size_t u = 0; u < m; ++u) {
    for (std::size_t v = u + 1; v < m; ++v) {
      edges.push_back({Vertex(u), Vertex(v), 1.0});
      endpoints.push_back(Vertex(u));
      endpoints.push_back(Vertex(v));
    }
  }
  std::vector<Vertex> chosen;
  chosen.reserve(m);
  for (std::size_t v = m; v < n; ++v) {
    chosen.clear();
    while (chosen.size() < m) {
      const Vertex target = endpoints.empty()
                                ? Vertex(rng.below(v))
                                : endpoints[rng.below(endpoints.size())];
      if (std::find(chosen.begin(), chosen.end(), target) == chosen.end()) chosen.push_back(target);
    }
    for (Vertex t : chosen) {
      edges.push_back({t, Vertex(v), 1.0});
      endpoints.push_back(t);
      endpoints.push_back(Vertex(v));
    }
  }
  return edges;
}

// Ring lattice with k/2 neighbours per side, then each lattice edge (u, u+j)
// is rewired with probability p_rewire to (u, x) for uniform x. Candidates
// creating a self-loop or duplicate are redrawn; after 100 rejections the
// edge stays in place.
inline std::vector<Edge> watts_strogatz_edges(std::size_t n, std::size_t k, double p_rewire,
                                              CounterRng& rng) {
  std::vector<Edge> edges;
  edges.reserve(n * k / 2);
  std::unordered_set<std::uint64_t> present;
  present.reserve(n * k);
  for (std::size_t j = 1; j <= k / 2; ++j) {
    for (std::size_t u = 0; u < n; ++u) {
      const auto v = Vertex((u + j) % n);
      edges.push_back({Vertex(u), v, 1.0});
      present.insert(pair_key(Vertex(u), v));
    }
  }
  if (p_rewire <= 0.0) return edges;
  for (auto& e : edges) {
    if (rng.uniform() >= p_rewire) continue;
    for (int attempt = 0; attempt < 100; ++attempt) {
      const auto x = Vertex(rng.below(n));
      if (x == e.u || present.count(pair_key(e.u, x))) continue;
      present.erase(pair_key(e.u, e.v));
      present.insert(pair_key(e.u, x));
      e.v = x;
      break;
    }
  }
  return edges;
}

}  // namespace detail

/// Samples a graph from the model. Identical specs give identical graphs.
inline Graph generate(const ModelSpec& spec) {
  validate(spec);
  CounterRng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(spec.model)));
  std::vector<Edge> edges;
  switch (spec.model) {
    case Model::ErdosRenyi: edges = detail::erdos_renyi_edges(spec.n, spec.p, rng); break;
    case Model::BarabasiAlbert: edges = detail::barabasi_albert_edges(spec.n, spec.m_attach, rng); break;
    case Model::WattsStrogatz: edges = detail::watts_strogatz_edges(spec.n, spec.k, spec.p_rewire, rng); break;
  }
  if (spec.perturb_weights) {
    CounterRng weights(derive_seed(spec.seed, 0x77656967ULL));
    for (auto& e : edges) e.w = 0.5 + weights.uniform();
  }
  return build_graph(spec.n, std::move(edges));
}

}  // namespace vnge
