#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "test_support.hpp"
#include "vnge/harness.hpp"

namespace {

using namespace vnge;
using namespace vnge::harness;

TEST(Stats, Pearson) {
  EXPECT_NEAR(pearson({1, 2, 3, 4}, {2, 4, 6, 8}), 1.0, 1e-15);
  EXPECT_NEAR(pearson({1, 2, 3, 4}, {8, 6, 4, 2}), -1.0, 1e-15);
  EXPECT_TRUE(std::isnan(pearson({1, 1, 1}, {1, 2, 3})));
  EXPECT_TRUE(std::isnan(pearson({}, {})));
  // Constant values whose mean does not round back to the value itself.
  const std::vector<double> flat(7, 0.1 + 0.2);
  EXPECT_TRUE(std::isnan(pearson(flat, {1, 2, 3, 4, 5, 6, 7})));
  EXPECT_EQ(fmt(std::nan("")), "nan");
}

TEST(Stats, LinearFitAndMedian) {
  const auto f = linear_fit({1, 2, 3, 4}, {3, 5, 7, 9});
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_LT(linear_fit({1, 2, 3, 4}, {1, 3, 2, 4}).r_squared, 1.0);
  EXPECT_EQ(median({5, 1, 3}), 3.0);
  EXPECT_EQ(median({4, 1, 3, 2}), 2.5);
}

TEST(ParallelFor, CoversEveryIndexAndPropagatesErrors) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 8, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 4, [](std::size_t i) {
                 if (i == 7) throw Error(ErrorCode::InvalidArgument, "boom");
               }),
               Error);
}

TEST(SpecForDegree, Parameterization) {
  EXPECT_NEAR(spec_for_degree(Model::ErdosRenyi, 501, 10, 1).p, 0.02, 1e-15);
  EXPECT_EQ(spec_for_degree(Model::BarabasiAlbert, 500, 10, 1).m_attach, 5u);
  EXPECT_EQ(spec_for_degree(Model::WattsStrogatz, 500, 10, 1).k, 10u);
  EXPECT_EQ(spec_for_degree(Model::WattsStrogatz, 500, 7, 1).k, 8u);
  EXPECT_EQ(spec_for_degree(Model::BarabasiAlbert, 500, 1, 1).m_attach, 1u);
}

SweepConfig small_sweep(std::size_t threads) {
  SweepConfig c;
  c.model = Model::BarabasiAlbert;
  c.points = {4, 8};
  c.fixed_n = 80;
  c.trials = 6;
  c.seed = 42;
  c.threads = threads;
  return c;
}

std::string sweep_csv(const SweepConfig& c) {
  const auto points = run_error_sweep(c);
  std::ostringstream out;
  write_sweep_summary(out, points);
  write_sweep_records(out, points);
  return out.str();
}

TEST(ErrorSweep, DeterministicAcrossThreadCounts) {
  const auto one = sweep_csv(small_sweep(1));
  EXPECT_EQ(one, sweep_csv(small_sweep(1)));
  EXPECT_EQ(one, sweep_csv(small_sweep(4)));
  EXPECT_EQ(one.rfind(kCsvVersionLine, 0), 0u);
}

TEST(ErrorSweep, RecordsAreConsistent) {
  const auto points = run_error_sweep(small_sweep(2));
  ASSERT_EQ(points.size(), 2u);
  for (const auto& pt : points) {
    ASSERT_EQ(pt.trials.size(), 6u);
    for (const auto& trial : pt.trials) {
      ASSERT_EQ(trial.size(), default_methods().size());
      const Graph g = generate(sweep_spec(small_sweep(1), pt.point == 4 ? 0 : 1, trial.front().trial));
      const double exact = exact_vnge(g);
      for (const auto& r : trial) {
        ASSERT_TRUE(r.exact && r.abs_error);
        EXPECT_EQ(*r.exact, exact);
        EXPECT_NEAR(*r.abs_error, std::abs(*r.exact - r.estimate), 1e-15);
        EXPECT_FALSE(r.wall_time_ns.has_value());
      }
    }
  }
}

TEST(ErrorSweep, SummaryAveragesTrials) {
  const auto points = run_error_sweep(small_sweep(1));
  std::ostringstream out;
  write_sweep_summary(out, points);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  EXPECT_EQ(line, kSweepSummaryHeader);
  std::getline(in, line);
  double mean_error = 0.0;
  for (const auto& trial : points[0].trials) mean_error += *trial[0].abs_error;
  mean_error /= 6.0;
  EXPECT_EQ(line.substr(line.rfind(',') + 1), fmt(mean_error));
  EXPECT_NE(line.find(",finger,6,"), std::string::npos);
}

TEST(ErrorSweep, AboveDenseLimitLeavesErrorsEmpty) {
  auto c = small_sweep(1);
  c.dense_limit = 50;
  c.methods = {method_spec(Method::RadialProjection)};
  const auto points = run_error_sweep(c);
  EXPECT_FALSE(points[0].trials[0][0].exact.has_value());
  EXPECT_FALSE(points[0].trials[0][0].abs_error.has_value());
}

TEST(ErrorSweep, InvalidSpec) {
  auto c = small_sweep(1);
  c.model = Model::WattsStrogatz;
  c.points = {200};
  EXPECT_THROW(run_error_sweep(c), Error);
}

TEST(Correlation, DegenerateStudyGivesNan) {
  CorrelationConfig c;
  c.n = 60;
  c.count = 5;
  c.same_graph = true;
  const auto r = run_correlation(c);
  ASSERT_EQ(r.graphs.size(), 5u);
  for (const auto& [name, value] : r.pearson_r) EXPECT_TRUE(std::isnan(value)) << name;
  std::ostringstream out;
  write_correlation(out, r);
  EXPECT_NE(out.str().find("summary,er,,,radial,,,nan"), std::string::npos);
}

TEST(Correlation, DeterministicAndRejectsLargeN) {
  CorrelationConfig c;
  c.model = Model::WattsStrogatz;
  c.n = 100;
  c.count = 12;
  std::ostringstream a, b;
  write_correlation(a, run_correlation(c));
  c.threads = 3;
  write_correlation(b, run_correlation(c));
  EXPECT_EQ(a.str(), b.str());
  c.dense_limit = 50;
  try {
    run_correlation(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooLargeForDense);
  }
}

TEST(Timing, OneRowPerMethod) {
  TimingConfig c;
  c.sizes = {300};
  c.trials = 1;
  const auto r = run_timing(c);
  std::vector<std::string> names;
  for (const auto& row : r.rows) names.push_back(row.method);
  EXPECT_EQ(names, (std::vector<std::string>{"purity", "purity+lambda_max", "finger", "taylor",
                                             "modified_taylor", "radial", "exact"}));
}

TEST(Methods, ByNameAndEvaluate) {
  EXPECT_EQ(method_by_name("radial")->method, Method::RadialProjection);
  EXPECT_EQ(method_by_name("improved-radial")->method, Method::Mixture);
  EXPECT_FALSE(method_by_name("exact_ish").has_value());
  const auto s = summarize(fixtures::complete(3));
  EXPECT_NEAR(evaluate(method_spec(Method::ModifiedTaylor), s), 0.882216, 1e-5);
  const auto imt = method_by_name("improved_modified_taylor");
  EXPECT_NEAR(evaluate(*imt, s), 0.3824 * std::log(2.0) * 0.5 + 0.6176 * evaluate(method_spec(Method::ModifiedTaylor), s), 1e-12);
}

}  // namespace
