#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ansgd/harness.hpp"
#include "support/oracles.hpp"

using namespace ansgd;

namespace {

ExperimentConfig small_config(Algorithm algo, Mode mode) {
  ExperimentConfig cfg;
  cfg.algorithm = algo;
  cfg.mode = mode;
  cfg.lambda = 0.05;
  cfg.omega = 1.0;
  cfg.iterations = 1050;
  cfg.repeats = 3;
  cfg.seed = 12;
  cfg.eval_every = 100;
  return cfg;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST(EvaluationIterations, IncludesFinal) {
  EXPECT_EQ(evaluation_iterations(1050, 100).size(), 11u);
  EXPECT_EQ(evaluation_iterations(1050, 100).back(), 1050u);
  EXPECT_EQ(evaluation_iterations(1000, 100).size(), 10u);
  EXPECT_EQ(evaluation_iterations(5, 100), (std::vector<std::uint64_t>{5}));
}

TEST(RunExperiment, RowCountsAndOrdering) {
  auto ds = oracle::synthetic_classification(1, 120, 6, 0.1);
  for (auto algo : {Algorithm::ansgd, Algorithm::sgd, Algorithm::averaged_sgd}) {
    for (auto mode : {Mode::convex, Mode::strongly_convex}) {
      auto res = run_experiment(small_config(algo, mode), ds);
      ASSERT_EQ(res.rows.size(), 3u * 11u);
      for (std::size_t i = 0; i < res.rows.size(); ++i) {
        EXPECT_EQ(res.rows[i].run_id, i / 11);
        EXPECT_TRUE(res.rows[i].test_accuracy.has_value());
        EXPECT_TRUE(std::isfinite(res.rows[i].test_objective));
        EXPECT_EQ(res.rows[i].wall_clock_s, 0.0);
      }
      EXPECT_EQ(res.schedule.has_value(), algo == Algorithm::ansgd);
    }
  }
}

TEST(RunExperiment, ThreadCountDoesNotChangeRows) {
  auto ds = oracle::synthetic_classification(2, 120, 6, 0.1);
  auto cfg = small_config(Algorithm::ansgd, Mode::strongly_convex);
  auto serial = run_experiment(cfg, ds);
  cfg.threads = 3;
  auto parallel = run_experiment(cfg, ds);
  EXPECT_EQ(serial.rows, parallel.rows);
}

TEST(RunExperiment, RegressionLeavesAccuracyEmpty) {
  auto ds = oracle::synthetic_regression(3, 100, 5);
  auto cfg = small_config(Algorithm::sgd, Mode::convex);
  cfg.task = Task::regression;
  auto res = run_experiment(cfg, ds);
  for (const auto& r : res.rows) EXPECT_FALSE(r.test_accuracy.has_value());
  const std::string csv = format_csv(res.rows);
  EXPECT_NE(csv.find(",,"), std::string::npos);
}

TEST(RunExperiment, ConfigErrors) {
  auto ds = oracle::synthetic_classification(1, 50, 3, 0.1);
  auto cfg = small_config(Algorithm::ansgd, Mode::convex);
  cfg.iterations = 0;
  EXPECT_THROW(run_experiment(cfg, ds), ArgumentError);

  cfg = small_config(Algorithm::sgd, Mode::convex);
  cfg.omega.reset();
  EXPECT_THROW(run_experiment(cfg, ds), ConfigError);

  cfg = small_config(Algorithm::ansgd, Mode::strongly_convex);
  cfg.omega.reset();
  EXPECT_NO_THROW(run_experiment(cfg, ds));
  cfg.lambda = 0.0;
  EXPECT_THROW(run_experiment(cfg, ds), ConfigError);

  cfg = small_config(Algorithm::ansgd, Mode::convex);
  cfg.task = Task::regression;
  EXPECT_THROW(run_experiment(cfg, ds), ConfigError);
}

TEST(RunExperiment, DivergenceNamesRun) {
  auto ds = oracle::synthetic_classification(1, 50, 3, 0.1);
  auto cfg = small_config(Algorithm::sgd, Mode::convex);
  cfg.omega = 1e308;
  try {
    run_experiment(cfg, ds);
    FAIL() << "expected divergence";
  } catch (const RunError& e) {
    EXPECT_EQ(e.run_id(), 0u);
    EXPECT_GE(e.iteration(), 1u);
    EXPECT_NE(std::string(e.what()).find("run 0"), std::string::npos);
  }
}

TEST(Csv, ZeroRowsIsAnError) {
  std::vector<MetricRow> none;
  EXPECT_THROW(format_csv(none), ArgumentError);
}

TEST(Csv, RoundTripIsExact) {
  auto ds = oracle::synthetic_classification(4, 100, 5, 0.1);
  auto res = run_experiment(small_config(Algorithm::averaged_sgd, Mode::strongly_convex), ds);
  res.rows[0].wall_clock_s = 0.1234567890123;
  const auto back = parse_csv(format_csv(res.rows));
  EXPECT_EQ(back, res.rows);
  EXPECT_EQ(format_csv(res.rows).rfind(csv_header, 0), 0u);
}

TEST(Csv, RejectsMalformed) {
  EXPECT_THROW(parse_csv("a,b\n"), ParseError);
  const std::string head(csv_header);
  EXPECT_THROW(parse_csv(head + "\n0,1,2\n"), ParseError);
  try {
    parse_csv(head + "\n0,1,0.5,,0\n0,x,0.5,,0\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Csv, IdenticalBytesAcrossRuns) {
  auto ds = oracle::synthetic_classification(5, 150, 6, 0.1);
  auto dir = std::filesystem::temp_directory_path() / "ansgd_harness_test";
  std::filesystem::create_directories(dir);
  auto cfg = small_config(Algorithm::ansgd, Mode::convex);
  write_csv(run_experiment(cfg, ds).rows, (dir / "a.csv").string());
  write_csv(run_experiment(cfg, ds).rows, (dir / "b.csv").string());
  const auto a = read_file(dir / "a.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, read_file(dir / "b.csv"));
  EXPECT_EQ(a.find('\r'), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Csv, UnwritablePathIsIoError) {
  std::vector<MetricRow> rows(1);
  EXPECT_THROW(write_csv(rows, "/nonexistent-dir/x.csv"), IoError);
}

TEST(Aggregate, MatchesRecomputedStatistics) {
  auto ds = oracle::synthetic_classification(6, 150, 6, 0.1);
  auto cfg = small_config(Algorithm::sgd, Mode::strongly_convex);
  cfg.repeats = 5;
  auto res = run_experiment(cfg, ds);
  auto summary = aggregate(res.rows);
  ASSERT_EQ(summary.size(), 11u);
  for (const auto& s : summary) {
    std::vector<double> obj;
    for (const auto& r : res.rows)
      if (r.iteration == s.iteration) obj.push_back(r.test_objective);
    ASSERT_EQ(obj.size(), 5u);
    double m = 0.0;
    for (double v : obj) m += v;
    m /= 5.0;
    double ss = 0.0;
    for (double v : obj) ss += (v - m) * (v - m);
    EXPECT_NEAR(s.objective_mean, m, 1e-12);
    EXPECT_NEAR(s.objective_std, std::sqrt(ss / 4.0), 1e-12);
    EXPECT_TRUE(s.accuracy_mean.has_value());
  }
}

TEST(Aggregate, SingleRunHasZeroSpread) {
  std::vector<MetricRow> rows{{0, 10, 2.5, 0.5, 0.0}};
  auto s = aggregate(rows);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].objective_mean, 2.5);
  EXPECT_EQ(s[0].objective_std, 0.0);
}

TEST(RunExperiment, LoadsFromPath) {
  auto cfg = small_config(Algorithm::ansgd, Mode::convex);
  cfg.dataset_path = ANSGD_TEST_DATA_DIR "/fixture100.libsvm";
  cfg.repeats = 2;
  cfg.iterations = 200;
  auto res = run_experiment(cfg);
  EXPECT_EQ(res.rows.size(), 4u);
  EXPECT_GT(res.a_norm_sq, 0.0);

  cfg.dataset_path = ANSGD_TEST_DATA_DIR "/does_not_exist.libsvm";
  EXPECT_THROW(run_experiment(cfg), IoError);
}
