#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "test_support.hpp"
#include "vnge/purity.hpp"
#include "vnge/spectral.hpp"

namespace {

using namespace vnge;

void expect_spectrum(const Graph& g, const std::vector<double>& expected, double tol) {
  const auto s = exact_spectrum(g);
  ASSERT_EQ(s.values.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(s.values[i], expected[i], tol) << i;
}

TEST(ExactSpectrum, ClosedForms) {
  expect_spectrum(fixtures::single_edge(), {1.0, 0.0}, 1e-14);
  // L(K_n) has eigenvalues {0, n (n-1 times)} and tr L = n(n-1).
  expect_spectrum(fixtures::complete(3), {0.5, 0.5, 0.0}, 1e-14);
  // L(P_3) has eigenvalues {0, 1, 3} and tr L = 4.
  expect_spectrum(fixtures::path(3), {0.75, 0.25, 0.0}, 1e-14);
}

TEST(ExactSpectrum, AgreesWithJacobiOracle) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const Graph g = fixtures::random_graph(seed, 5, 40);
    const auto jacobi = fixtures::jacobi_density_spectrum(g);
    const auto eigen = exact_spectrum(g).values;
    ASSERT_EQ(jacobi.size(), eigen.size());
    for (std::size_t i = 0; i < eigen.size(); ++i) EXPECT_NEAR(eigen[i], std::max(jacobi[i], 0.0), 1e-12);
  }
}

TEST(ExactSpectrum, Invariants) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto s = exact_spectrum(fixtures::random_graph(seed));
    EXPECT_NEAR(std::accumulate(s.values.begin(), s.values.end(), 0.0), 1.0, 1e-9);
    EXPECT_LE(s.values.front(), 1.0);
    EXPECT_TRUE(std::is_sorted(s.values.rbegin(), s.values.rend()));
    for (double v : s.values) EXPECT_GE(v, 0.0);
  }
}

TEST(ExactSpectrum, Errors) {
  try {
    exact_spectrum(build_graph(3, {}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyGraph);
  }
  try {
    exact_spectrum(fixtures::path(20), 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooLargeForDense);
  }
}

TEST(ExactVnge, ClosedForms) {
  EXPECT_NEAR(exact_vnge(fixtures::single_edge()), 0.0, 1e-12);
  EXPECT_NEAR(exact_vnge(fixtures::complete(3)), std::log(2.0), 1e-12);
  for (std::size_t n = 4; n <= 10; ++n) EXPECT_NEAR(exact_vnge(fixtures::complete(n)), std::log(n - 1.0), 1e-9);
  EXPECT_NEAR(exact_vnge(fixtures::path(3)), -(0.75 * std::log(0.75) + 0.25 * std::log(0.25)), 1e-12);
}

TEST(ExactVnge, RangeAndExtremes) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Graph g = fixtures::random_graph(seed);
    const double h = exact_vnge(g);
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, std::log(static_cast<double>(g.num_vertices())));
  }
  // A single edge among isolated vertices: lambda_max = 1 and H = 0.
  const Graph lone = build_graph(6, {{2, 4, 3.0}});
  EXPECT_NEAR(exact_spectrum(lone).max(), 1.0, 1e-12);
  EXPECT_NEAR(exact_vnge(lone), 0.0, 1e-9);
  // H = ln n exactly at the uniform distribution, where lambda_max = 1/n.
  for (std::size_t n : {2u, 5u, 17u}) {
    std::vector<double> uniform(n, 1.0 / static_cast<double>(n));
    EXPECT_NEAR(shannon_entropy(uniform), std::log(static_cast<double>(n)), 1e-9);
  }
  // Any graph spectrum has a zero eigenvalue, so lambda_max > 1/n and H < ln n.
  const Graph k5 = fixtures::complete(5);
  EXPECT_GT(exact_spectrum(k5).max(), 0.2 + 1e-9);
  EXPECT_LT(exact_vnge(k5), std::log(5.0) - 1e-9);
}

TEST(ExactVnge, TwoPointBounds) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto s = exact_spectrum(fixtures::random_graph(seed));
    const double l = s.max();
    const double two_point = xlogx_term(l) + xlogx_term(1.0 - l);
    EXPECT_LE(two_point, shannon_entropy(s.values) + 1e-12);
    EXPECT_LE(2.0 * l * (1.0 - l), two_point + 1e-15);
  }
}

TEST(ExactVnge, ScaleInvariance) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Graph g = fixtures::random_graph(seed, 10, 80);
    const auto base = exact_spectrum(g).values;
    for (double k : {1e-3, 0.7, 42.0}) {
      const auto s = exact_spectrum(fixtures::scaled(g, k)).values;
      for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(s[i], base[i], 1e-10);
      EXPECT_NEAR(lambda_max(fixtures::scaled(g, k)), lambda_max(g), 1e-10);
    }
  }
}

TEST(LambdaMax, SmallGraphs) {
  EXPECT_NEAR(lambda_max(fixtures::single_edge()), 1.0, 1e-12);
  EXPECT_NEAR(lambda_max(fixtures::complete(3)), 0.5, 1e-9);
  // L(star with n vertices) has top eigenvalue n and tr L = 2(n-1).
  EXPECT_NEAR(lambda_max(fixtures::star(3)), 4.0 / 6.0, 1e-9);
}

TEST(LambdaMax, MatchesDenseSpectrum) {
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    const Graph g = fixtures::random_graph(seed);
    EXPECT_NEAR(lambda_max(g), exact_spectrum(g).max(), 1e-8) << "seed " << seed;
  }
}

TEST(LambdaMax, IsolatedFirstVertex) {
  // Vertex 0 isolated: the start vector must still reach the top eigenvector.
  const Graph g = build_graph(5, {{1, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}});
  EXPECT_NEAR(lambda_max(g), exact_spectrum(g).max(), 1e-9);
}

TEST(LambdaMax, NoConvergenceAndFallback) {
  const Graph g = fixtures::random_graph(3);
  try {
    lambda_max(g, 1e-10, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoConvergence);
    EXPECT_EQ(e.error_class(), ErrorClass::Numerical);
  }
  SummaryOptions options;
  options.power.max_iter = 1;
  const auto s = summarize(g, options);
  EXPECT_NEAR(*s.lambda_max, exact_spectrum(g).max(), 1e-12);
}

}  // namespace
