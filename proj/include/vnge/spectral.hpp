#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vnge/error.hpp"
#include "vnge/graph.hpp"
#include "vnge/random.hpp"

namespace vnge {

inline constexpr std::size_t kDefaultDenseLimit = 5000;
inline constexpr double kPsdSlack = 1e-10;

/// Eigenvalues of the density matrix, sorted descending.
struct Eigenspectrum {
  std::vector<double> values;

  double max() const { return values.empty() ? 0.0 : values.front(); }
};

/// -x ln x with 0 ln 0 = 0.
inline double xlogx_term(double x) { return x > 0.0 ? -x * std::log(x) : 0.0; }

/// Shannon entropy (nats) of a probability vector.
inline double shannon_entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p) h += xlogx_term(x);
  return h;
}

/// Dense combinatorial Laplacian. Only the reference path materializes it.
inline Eigen::MatrixXd dense_laplacian(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_vertices());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges()) {
    lap(e.u, e.v) -= e.w;
    lap(e.v, e.u) -= e.w;
  }
  for (Eigen::Index i = 0; i < n; ++i) lap(i, i) = g.degrees()[static_cast<std::size_t>(i)];
  return lap;
}

inline void require_nonempty(const Graph& g, double trace) {
  if (!(trace > 0.0)) {
    throw Error(ErrorCode::EmptyGraph,
                "Laplacian trace is zero on " + std::to_string(g.num_vertices()) + " vertices");
  }
}

/// Full spectrum of rho = L / tr(L) from a dense symmetric eigensolver.
inline Eigenspectrum exact_spectrum(const Graph& g, std::size_t dense_limit = kDefaultDenseLimit) {
  const double trace = trace_laplacian(g);
  require_nonempty(g, trace);
  if (g.num_vertices() > dense_limit) {
    throw Error(ErrorCode::TooLargeForDense, "n = " + std::to_string(g.num_vertices()) +
                                                 " exceeds dense limit " +
                                                 std::to_string(dense_limit));
  }
  Eigen::MatrixXd rho = dense_laplacian(g) / trace;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(rho, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NoConvergence, "dense eigensolver failed");
  }
  Eigenspectrum out;
  out.values.assign(solver.eigenvalues().data(),
                    solver.eigenvalues().data() + solver.eigenvalues().size());
  for (double& v : out.values) {
    if (v < -kPsdSlack) {
      throw Error(ErrorCode::NotPositiveSemidefinite, "eigenvalue " + std::to_string(v));
    }
    if (v < 0.0) v = 0.0;
  }
  std::sort(out.values.begin(), out.values.end(), std::greater<>());
  return out;
}

/// Exact von Neumann graph entropy, -sum lambda ln lambda over the spectrum of rho.
inline double exact_vnge(const Graph& g, std::size_t dense_limit = kDefaultDenseLimit) {
  return shannon_entropy(exact_spectrum(g, dense_limit).values);
}

struct PowerIterationOptions {
  double tol = 1e-10;
  std::size_t max_iter = 0;  // 0: max(10 n, 1000)
};

struct PowerIterationResult {
  double value = 0.0;
  std::size_t iterations = 0;
};

/// y = rho x using only the edge list.
inline void density_matvec(const Graph& g, double inv_trace, std::span<const double> x,
                           std::span<double> y) {
  const auto deg = g.degrees();
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = deg[i] * x[i];
  for (const auto& e : g.edges()) {
    y[e.u] -= e.w * x[e.v];
    y[e.v] -= e.w * x[e.u];
  }
  for (double& v : y) v *= inv_trace;
}

namespace detail {

// A vector together with its image under rho. Every update is applied to
// both halves so rho never has to be re-applied to a linear combination.
struct Paired {
  std::vector<double> v;
  std::vector<double> av;
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// x <- x - c y on both halves.
inline void subtract(Paired& x, const Paired& y, double c) {
  for (std::size_t i = 0; i < x.v.size(); ++i) {
    x.v[i] -= c * y.v[i];
    x.av[i] -= c * y.av[i];
  }
}

inline double normalize(Paired& x) {
  const double norm = std::sqrt(dot(x.v, x.v));
  if (norm > 0.0) {
    for (std::size_t i = 0; i < x.v.size(); ++i) {
      x.v[i] /= norm;
      x.av[i] /= norm;
    }
  }
  return norm;
}

}  // namespace detail

/// Largest eigenvalue of rho from sparse edge-list products only.
///
/// Each step is a power-iteration step refined by Rayleigh-Ritz over the
/// current iterate x, its residual rho x - theta x and the previous search
/// direction (the locally optimal block scheme), which needs one product with
/// rho per step. Stops once successive Rayleigh quotients differ by less than
/// tol and the residual norm is at most tol. The start vector is a fixed
/// pseudo-random perturbation of the flat vector.
inline PowerIterationResult power_iteration(const Graph& g, const PowerIterationOptions& options = {}) {
  using detail::Paired;
  const double trace = trace_laplacian(g);
  require_nonempty(g, trace);
  const std::size_t n = g.num_vertices();
  const double lower = 1.0 / static_cast<double>(n);
  const std::size_t max_iter =
      options.max_iter != 0 ? options.max_iter : std::max<std::size_t>(10 * n, 1000);
  const double inv_trace = 1.0 / trace;
  auto apply = [&](Paired& x) { density_matvec(g, inv_trace, x.v, x.av); };

  Paired x{std::vector<double>(n), std::vector<double>(n)};
  CounterRng rng(0x5eedULL);
  for (auto& v : x.v) v = 1.0 + 0.5 * (2.0 * rng.uniform() - 1.0);
  detail::normalize(x);
  apply(x);

  Paired r{std::vector<double>(n), std::vector<double>(n)};
  Paired p{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  bool have_p = false;
  double previous = -1.0;

  for (std::size_t it = 1; it <= max_iter; ++it) {
    if (it % 16 == 0) apply(x);  // refresh rho x against drift
    const double theta = detail::dot(x.v, x.av);
    for (std::size_t i = 0; i < n; ++i) r.v[i] = x.av[i] - theta * x.v[i];
    const double residual = std::sqrt(detail::dot(r.v, r.v));
    const double residual_tol = std::max(options.tol, 64.0 * 2.2e-16 * std::abs(theta));
    if ((std::abs(theta - previous) < options.tol && residual <= residual_tol) || residual == 0.0) {
      return {std::clamp(theta, lower, 1.0), it};
    }
    previous = theta;

    // Orthonormal basis {x, r, p} with images, dropping dependent directions.
    detail::normalize(r);
    apply(r);
    std::vector<Paired*> basis = {&x};
    auto orthogonalize = [&](Paired& y) {
      for (int pass = 0; pass < 2; ++pass)
        for (Paired* b : basis) detail::subtract(y, *b, detail::dot(y.v, b->v));
      return detail::normalize(y) > 1e-10;
    };
    if (orthogonalize(r)) basis.push_back(&r);
    if (have_p && orthogonalize(p)) basis.push_back(&p);

    const auto k = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd h(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
      for (Eigen::Index b = 0; b < k; ++b) h(a, b) = detail::dot(basis[a]->v, basis[b]->av);
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(h);
    const Eigen::VectorXd c = small.eigenvectors().col(k - 1);

    // New direction: the part of the Ritz vector outside the current x.
    Paired next_p{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    for (Eigen::Index a = 1; a < k; ++a) {
      for (std::size_t i = 0; i < n; ++i) {
        next_p.v[i] += c(a) * basis[a]->v[i];
        next_p.av[i] += c(a) * basis[a]->av[i];
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      x.v[i] = c(0) * x.v[i] + next_p.v[i];
      x.av[i] = c(0) * x.av[i] + next_p.av[i];
    }
    detail::normalize(x);
    p = std::move(next_p);
    have_p = detail::normalize(p) > 0.0;
  }
  throw Error(ErrorCode::NoConvergence,
              "eigenvalue iteration did not converge in " + std::to_string(max_iter) + " iterations");
}

inline double lambda_max(const Graph& g, double tol = 1e-10, std::size_t max_iter = 0) {
  return power_iteration(g, {tol, max_iter}).value;
}

}  // namespace vnge
