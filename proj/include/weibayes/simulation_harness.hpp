#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "weibayes/mle_baseline.hpp"
#include "weibayes/posterior_engine.hpp"
#include "weibayes/prior_elicitation.hpp"

namespace weibayes::sim {

/// Prior-information cases I..IX: interval type (1 centered, 2 upper biased,
/// 3 lower biased) crossed with xbar_R in {1, 10, 0.1} x true x_R.
enum class CaseLabel { I = 1, II, III, IV, V, VI, VII, VIII, IX };

inline constexpr std::array<CaseLabel, 9> kAllCases = {
    CaseLabel::I,  CaseLabel::II,  CaseLabel::III, CaseLabel::IV,  CaseLabel::V,
    CaseLabel::VI, CaseLabel::VII, CaseLabel::VIII, CaseLabel::IX};

CaseLabel parse_case(const std::string& label);
std::string to_string(CaseLabel label);

/// Shape intervals of types 1, 2 and 3 for one true beta.
using IntervalTable = std::array<BetaInterval, 3>;

/// Intervals used for true beta in {2, 1, 0.6}; nullopt for any other value.
std::optional<IntervalTable> paper_intervals(double true_beta);

struct CaseDefinition {
  CaseLabel label;
  BetaInterval interval;
  double xbar_R;
};

/// Throws InputError for a true beta without paper intervals unless
/// `intervals` is supplied.
CaseDefinition build_case(CaseLabel label, double true_beta, double true_x_R = 1.0,
                          const std::optional<IntervalTable>& intervals = std::nullopt);

/// Harness-level w setting. Unlike WRule it may depend on the case's
/// interval (1/beta1 + offset).
class WSetting {
 public:
  enum class Kind { kConstantOverBeta, kInverseLowerPlus, kFixed, kUnit, kPiecewise96 };

  /// Accepts "1.1/beta", "1/beta1+0.1", "unit", "piecewise96" or a number.
  static WSetting parse(const std::string& label);
  static WSetting constant_over_beta(double c) { return {Kind::kConstantOverBeta, c}; }
  static WSetting inverse_lower_plus(double offset) { return {Kind::kInverseLowerPlus, offset}; }

  WRule resolve(const BetaInterval& iv) const;
  std::string label() const;
  Kind kind() const noexcept { return kind_; }
  double value() const noexcept { return value_; }

 private:
  WSetting(Kind kind, double value) : kind_(kind), value_(value) {}
  Kind kind_;
  double value_;
};

/// 1.1/beta, 1.4/beta, 1.8/beta, 1/beta1 + 0.1 in table column order.
std::vector<WSetting> paper_w_settings();

struct ExperimentConfig {
  double true_beta = 1.0;
  double true_x_R = 1.0;
  double R = 0.98;
  std::size_t n = 3;
  std::size_t r = 3;
  std::size_t replications = 2000;
  std::vector<CaseLabel> prior_cases{kAllCases.begin(), kAllCases.end()};
  std::vector<WSetting> w_settings = paper_w_settings();
  std::uint64_t seed = 1;
  std::optional<IntervalTable> intervals;
  QuadratureSettings quadrature;
  std::size_t threads = 0;

  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);

struct PerformanceMetrics {
  double bias = 0.0;     ///< mean - true
  double std_dev = 0.0;  ///< population (1/N) standard deviation
  double rmse = 0.0;     ///< sqrt(std_dev^2 + bias^2)
  std::size_t count = 0;
  std::size_t failures = 0;
};

PerformanceMetrics metrics(std::span<const double> estimates, double true_value);

struct CellResult {
  CaseLabel label;
  std::string w_label;
  PerformanceMetrics x_R;
  PerformanceMetrics beta;
};

/// One replication loop: draw n lifetimes from the true model, censor at r,
/// estimate, and summarize against the true (x_R, beta). Replication i uses
/// the same lifetimes in every cell sharing (seed, n, r). Non-converged
/// estimates are excluded and counted in `failures`.
CellResult run_cell(const ExperimentConfig& cfg, const CaseDefinition& case_def,
                    const WSetting& setting);

/// Every (case, setting) pair of the config, cases outermost.
std::vector<CellResult> run_experiment(const ExperimentConfig& cfg);

struct MleRowOptions {
  std::size_t calibration_replications = 100000;
  std::optional<std::uint64_t> calibration_seed;  ///< defaults to the row seed
  CalibrationCache* cache = nullptr;
  std::size_t threads = 0;
};

struct MleRow {
  std::size_t n;
  std::size_t r;
  PerformanceMetrics x_R;
  PerformanceMetrics beta;
  double ds_beta_bar;
  UnbiasingEntry calibration;
};

MleRow run_mle_row(double true_beta, std::size_t n, std::size_t r, double R,
                   std::size_t replications, std::uint64_t seed,
                   const MleRowOptions& options = {});

/// Paper table layout ids: "3".."8" (Bayes) and "3b".."8b" (MLE).
struct TableDesign {
  std::string id;
  bool bayes;
  double true_beta;
  std::vector<std::pair<std::size_t, std::size_t>> designs;  ///< (n, r); one for Bayes tables
};

TableDesign table_design(const std::string& id);

struct TableResult {
  TableDesign design;
  std::vector<CellResult> cells;  ///< Bayes: 9 cases x 4 settings, row-major
  std::vector<MleRow> mle_rows;
};

TableResult reproduce_table(const std::string& id, std::size_t replications, std::uint64_t seed,
                            const MleRowOptions& mle_options = {}, std::size_t threads = 0);

/// Two significant digits in the ".38E+00" style.
std::string paper_format(double value);

void write_table_csv(std::ostream& out, const TableResult& table, bool paper_style);
void write_cells_csv(std::ostream& out, const ExperimentConfig& cfg,
                     std::span<const CellResult> cells, bool paper_style);

}  // namespace weibayes::sim
