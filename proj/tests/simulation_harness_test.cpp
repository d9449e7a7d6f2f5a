#include "weibayes/simulation_harness.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "weibayes/errors.hpp"

namespace weibayes::sim {
namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.true_beta = 2.0;
  cfg.replications = 60;
  cfg.prior_cases = {CaseLabel::I, CaseLabel::V, CaseLabel::IX};
  cfg.seed = 11;
  return cfg;
}

std::string cells_csv(const ExperimentConfig& cfg) {
  const auto cells = run_experiment(cfg);
  std::ostringstream out;
  write_cells_csv(out, cfg, cells, false);
  return out.str();
}

TEST(Cases, LabelsRoundTrip) {
  for (auto label : kAllCases) EXPECT_EQ(parse_case(to_string(label)), label);
  EXPECT_EQ(to_string(CaseLabel::VIII), "VIII");
  EXPECT_THROW(parse_case("X"), InputError);
}

TEST(Cases, BuildCaseCrossesIntervalAndAnticipatedLife) {
  auto c = build_case(CaseLabel::I, 2.0);
  EXPECT_EQ(c.interval.beta1(), 1.0);
  EXPECT_EQ(c.interval.beta2(), 3.0);
  EXPECT_EQ(c.xbar_R, 1.0);
  c = build_case(CaseLabel::II, 1.0);
  EXPECT_EQ(c.interval.beta1(), 0.7);
  EXPECT_EQ(c.xbar_R, 10.0);
  c = build_case(CaseLabel::V, 2.0, 3.0);
  EXPECT_EQ(c.interval.beta1(), 2.0);
  EXPECT_EQ(c.interval.beta2(), 4.0);
  EXPECT_EQ(c.xbar_R, 30.0);
  c = build_case(CaseLabel::IX, 0.6);
  EXPECT_EQ(c.interval.beta1(), 0.3);
  EXPECT_EQ(c.interval.beta2(), 0.6);
  EXPECT_DOUBLE_EQ(c.xbar_R, 0.1);
  EXPECT_THROW(build_case(CaseLabel::I, 1.5), InputError);
  const IntervalTable custom{BetaInterval(1.0, 2.0), BetaInterval(1.5, 2.0), BetaInterval(1.0, 1.5)};
  EXPECT_EQ(build_case(CaseLabel::VII, 1.5, 1.0, custom).interval.beta2(), 1.5);
}

TEST(WSettings, ParseAndResolve) {
  const BetaInterval iv(0.3, 0.9);
  auto s = WSetting::parse("1.4/beta");
  EXPECT_DOUBLE_EQ(s.resolve(iv)(0.5), 2.8);
  s = WSetting::parse("1/beta1+0.1");
  EXPECT_DOUBLE_EQ(s.resolve(iv)(0.5), 1.0 / 0.3 + 0.1);
  EXPECT_DOUBLE_EQ(s.resolve(BetaInterval(1.0, 3.0))(2.0), 1.1);
  EXPECT_EQ(WSetting::parse("unit").resolve(iv)(0.4), 1.0);
  EXPECT_EQ(WSetting::parse("piecewise96").resolve(iv).kind(), WRule::Kind::kPiecewise96);
  EXPECT_EQ(WSetting::parse("2.5").resolve(iv)(0.7), 2.5);
  EXPECT_THROW(WSetting::parse("lots"), InputError);
  for (const auto& setting : paper_w_settings()) {
    EXPECT_EQ(WSetting::parse(setting.label()).label(), setting.label());
  }
  EXPECT_EQ(paper_w_settings().size(), 4u);
}

TEST(Metrics, HandExamples) {
  auto m = metrics(std::vector<double>{1.0, 1.0, 1.0}, 1.0);
  EXPECT_EQ(m.bias, 0.0);
  EXPECT_EQ(m.std_dev, 0.0);
  EXPECT_EQ(m.rmse, 0.0);
  m = metrics(std::vector<double>{0.0, 2.0}, 1.0);
  EXPECT_EQ(m.bias, 0.0);
  EXPECT_DOUBLE_EQ(m.std_dev, 1.0);
  EXPECT_DOUBLE_EQ(m.rmse, 1.0);
  m = metrics(std::vector<double>{2.0, 2.0}, 1.0);
  EXPECT_DOUBLE_EQ(m.bias, 1.0);
  EXPECT_EQ(m.std_dev, 0.0);
  EXPECT_DOUBLE_EQ(m.rmse, 1.0);
  EXPECT_EQ(m.count, 2u);
  EXPECT_THROW(metrics(std::vector<double>{}, 1.0), InputError);
}

TEST(Experiment, SingleReplicationHasNoSpread) {
  auto cfg = small_config();
  cfg.replications = 1;
  for (const auto& cell : run_experiment(cfg)) {
    EXPECT_EQ(cell.x_R.std_dev, 0.0);
    EXPECT_EQ(cell.beta.std_dev, 0.0);
  }
}

TEST(Experiment, RmseDecomposition) {
  for (const auto& cell : run_experiment(small_config())) {
    for (const auto* m : {&cell.x_R, &cell.beta}) {
      EXPECT_NEAR(m->rmse * m->rmse, m->std_dev * m->std_dev + m->bias * m->bias,
                  1e-12 * std::max(1.0, m->rmse * m->rmse));
    }
    EXPECT_EQ(cell.x_R.count + cell.x_R.failures, 60u);
  }
}

TEST(Experiment, DeterministicAndThreadIndependent) {
  auto cfg = small_config();
  cfg.threads = 1;
  const auto one = cells_csv(cfg);
  EXPECT_EQ(cells_csv(cfg), one);
  cfg.threads = 3;
  EXPECT_EQ(cells_csv(cfg), one);
  cfg.seed = 12;
  EXPECT_NE(cells_csv(cfg), one);
}

TEST(Experiment, CellsShareLifetimes) {
  // identical priors in two cells see identical samples, hence identical results
  auto cfg = small_config();
  cfg.prior_cases = {CaseLabel::I, CaseLabel::I};
  cfg.w_settings = {WSetting::parse("1.1/beta")};
  const auto cells = run_experiment(cfg);
  ASSERT_EQ(cells.size(), 2u);
  EXPECT_EQ(cells[0].x_R.rmse, cells[1].x_R.rmse);
}

TEST(Experiment, RejectsInadmissibleSettings) {
  auto cfg = small_config();
  cfg.true_beta = 1.0;
  cfg.prior_cases = {CaseLabel::I};
  cfg.w_settings = {WSetting::parse("unit")};
  EXPECT_THROW(run_experiment(cfg), ConstraintViolation);
  cfg.w_settings = paper_w_settings();
  cfg.r = 4;
  EXPECT_THROW(cfg.validate(), InputError);
}

TEST(Config, FromJson) {
  const auto cfg = config_from_json(nlohmann::json::parse(R"({
      "true_beta": 1.5, "n": 5, "r": 3, "seed": 9, "replications": 100,
      "prior_cases": ["I", "IV"], "w_rules": ["1.1/beta", "1/beta1+0.1"],
      "intervals": {"1": [1, 2], "2": [1.5, 2], "3": [1, 1.5]}, "rel_tol": 1e-9})"));
  EXPECT_EQ(cfg.true_beta, 1.5);
  EXPECT_EQ(cfg.n, 5u);
  EXPECT_EQ(cfg.r, 3u);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.prior_cases.size(), 2u);
  EXPECT_EQ(cfg.w_settings[1].kind(), WSetting::Kind::kInverseLowerPlus);
  ASSERT_TRUE(cfg.intervals.has_value());
  EXPECT_EQ((*cfg.intervals)[1].beta1(), 1.5);
  EXPECT_EQ(cfg.quadrature.rel_tol, 1e-9);
  EXPECT_EQ(config_from_json(nlohmann::json::parse(R"({"true_beta": 2, "n": 4, "seed": 1})")).r, 4u);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"true_beta": 2, "n": 4})")), InputError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"([1, 2])")), InputError);
}

TEST(Tables, Designs) {
  const auto t6b = table_design("6b");
  EXPECT_FALSE(t6b.bayes);
  EXPECT_EQ(t6b.true_beta, 2.0);
  const std::vector<std::pair<std::size_t, std::size_t>> rows = {
      {5, 3}, {10, 4}, {10, 6}, {20, 8}, {20, 12}, {40, 16}, {40, 24}};
  EXPECT_EQ(t6b.designs, rows);
  const auto t4b = table_design("4b");
  EXPECT_EQ(t4b.designs.front(), std::make_pair(std::size_t{3}, std::size_t{3}));
  EXPECT_EQ(t4b.designs.back(), std::make_pair(std::size_t{30}, std::size_t{30}));
  const auto t8 = table_design("8");
  EXPECT_TRUE(t8.bayes);
  EXPECT_EQ(t8.true_beta, 0.6);
  EXPECT_EQ(t8.designs.front(), std::make_pair(std::size_t{5}, std::size_t{3}));
  EXPECT_THROW(table_design("9"), InputError);
}

TEST(Tables, BayesLayout) {
  const auto table = reproduce_table("3", 20, 1);
  EXPECT_EQ(table.cells.size(), 36u);
  std::ostringstream out;
  write_table_csv(out, table, true);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("test,RQ_xR[w=1.1/beta]", 0), 0u);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 9) << line;
  }
  EXPECT_EQ(rows, 9);
}

TEST(Tables, MleRow) {
  MleRowOptions opts;
  opts.calibration_replications = 10000;
  const auto row = run_mle_row(1.0, 5, 3, 0.98, 300, 3, opts);
  EXPECT_EQ(row.calibration.n, 5u);
  EXPECT_EQ(row.calibration.seed, 3u);
  EXPECT_NEAR(row.ds_beta_bar, row.calibration.B * row.beta.std_dev, 1e-12);
  EXPECT_GT(row.x_R.rmse, 0.0);
}

TEST(PaperFormat, TwoSignificantDigits) {
  EXPECT_EQ(paper_format(0.38), ".38E+00");
  EXPECT_EQ(paper_format(13.0), ".13E+02");
  EXPECT_EQ(paper_format(1.2), ".12E+01");
  EXPECT_EQ(paper_format(0.0296), ".30E-01");
  EXPECT_EQ(paper_format(0.996), ".10E+01");
  EXPECT_EQ(paper_format(0.1), ".10E+00");
  EXPECT_EQ(paper_format(0.0), ".00E+00");
  EXPECT_EQ(paper_format(-2.5), "-.25E+01");
}

}  // namespace
}  // namespace weibayes::sim
