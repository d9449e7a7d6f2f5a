// weibayes: Bayes and maximum likelihood estimation for the two-parameter
// Weibull model in its reliable-life form.
//
// Exit codes: 0 success, 2 invalid input, 3 prior constraint violation or no
// finite MLE, 4 numerical non-convergence.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "weibayes/censored_data.hpp"
#include "weibayes/errors.hpp"
#include "weibayes/mle_baseline.hpp"
#include "weibayes/posterior_engine.hpp"
#include "weibayes/prior_elicitation.hpp"
#include "weibayes/simulation_harness.hpp"

namespace fs = std::filesystem;
using namespace weibayes;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitConstraint = 3;
constexpr int kExitNonConvergence = 4;

void require_readable(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path)) {
    throw InputError(std::string(what) + " file '" + path + "' does not exist");
  }
}

void require_writable_target(const std::string& path) {
  if (path.empty()) return;
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) {
    throw InputError("output directory '" + parent.string() + "' does not exist");
  }
}

nlohmann::json read_json(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw InputError(std::string("cannot open ") + what + " file '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string(what) + " file '" + path + "': " + e.what());
  }
}

CensoredSample read_sample(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open sample file '" + path + "'");
  return read_sample_csv(in);
}

/// Writes to --out when given, otherwise stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InputError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

struct EstimateArgs {
  std::string sample;
  std::string prior;
  std::string out;
  double rel_tol = QuadratureSettings{}.rel_tol;
};

int cmd_estimate(const EstimateArgs& args) {
  require_readable(args.sample, "sample");
  require_readable(args.prior, "prior");
  require_writable_target(args.out);
  const auto data = read_sample(args.sample);
  const auto spec = prior_from_json(read_json(args.prior, "prior"));
  if (const auto warning = prior_weight_warning(spec, data.r())) {
    std::cerr << "warning: " << *warning << '\n';
  }
  QuadratureSettings q;
  q.rel_tol = args.rel_tol;
  const auto est = estimate(spec, data, q);
  Output out(args.out);
  out.stream() << to_json(est).dump(2) << '\n';
  if (!est.converged) {
    std::cerr << "error: posterior quadrature did not converge to rel_tol " << q.rel_tol << '\n';
    return kExitNonConvergence;
  }
  return kExitOk;
}

struct MleArgs {
  std::string sample;
  std::string out;
  double R = 0.98;
};

int cmd_mle(const MleArgs& args) {
  require_readable(args.sample, "sample");
  require_writable_target(args.out);
  const auto result = fit(read_sample(args.sample), args.R);
  Output out(args.out);
  out.stream() << to_json(result).dump(2) << '\n';
  if (!result.converged) {
    std::cerr << "error: profile equation did not converge\n";
    return kExitNonConvergence;
  }
  return kExitOk;
}

struct PriorPdfArgs {
  std::optional<double> a;
  std::optional<double> xbar_R;
  std::vector<double> w;
  double beta = 1.0;
  std::vector<double> grid;
  double x_min = 1e-3;
  double x_max = 1e3;
  std::size_t points = 2000;
  bool linear = false;
  std::string out;
};

int cmd_prior_pdf(const PriorPdfArgs& args) {
  require_writable_target(args.out);
  if (args.a && args.xbar_R) throw InputError("give either --a or --xbar-R, not both");
  if (!(args.beta > 0.0)) throw InputError("--beta must be positive");
  std::vector<double> ws = args.w;
  if (ws.empty()) {
    // 1.1(0.3)3.1
    for (int k = 0; 1.1 + 0.3 * k <= 3.1 + 1e-9; ++k) ws.push_back(1.1 + 0.3 * k);
  }
  for (double w : ws) {
    if (!(w > 0.0)) throw InputError("--w values must be positive");
  }

  std::vector<double> grid = args.grid;
  if (grid.empty()) {
    if (!(args.x_min > 0.0) || !(args.x_max > args.x_min) || args.points < 2) {
      throw InputError("grid needs 0 < --x-min < --x-max and --points >= 2");
    }
    for (std::size_t i = 0; i < args.points; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(args.points - 1);
      grid.push_back(args.linear ? args.x_min + t * (args.x_max - args.x_min)
                                 : args.x_min * std::pow(args.x_max / args.x_min, t));
    }
  }
  for (double x : grid) {
    if (!(x > 0.0)) throw InputError("grid points must be positive");
  }

  std::vector<double> scales;
  for (double w : ws) {
    scales.push_back(args.xbar_R ? hyper_a(*args.xbar_R, w, args.beta) : args.a.value_or(1.0));
  }
  Output out(args.out);
  auto& os = out.stream();
  os.precision(17);
  os << "w,x_R,density\n";
  for (std::size_t k = 0; k < ws.size(); ++k) {
    for (double x : grid) {
      os << ws[k] << ',' << x << ',' << igg_pdf(x, scales[k], ws[k], args.beta) << '\n';
    }
  }
  return kExitOk;
}

struct SimulateArgs {
  std::string config;
  std::string table;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replications;
  std::optional<double> rel_tol;
  bool paper_format = false;
  std::string out;
  std::string cache;
  std::size_t threads = 0;
};

int cmd_simulate(const SimulateArgs& args) {
  if (args.config.empty() == args.table.empty()) {
    throw InputError("simulate needs exactly one of --config or --table");
  }
  require_writable_target(args.out);
  require_writable_target(args.cache);
  if (!args.config.empty()) {
    require_readable(args.config, "config");
    auto cfg = sim::config_from_json(read_json(args.config, "config"));
    if (args.seed) cfg.seed = *args.seed;
    if (args.replications) cfg.replications = *args.replications;
    if (args.rel_tol) cfg.quadrature.rel_tol = *args.rel_tol;
    if (args.threads) cfg.threads = args.threads;
    cfg.validate();
    const auto cells = sim::run_experiment(cfg);
    Output out(args.out);
    sim::write_cells_csv(out.stream(), cfg, cells, args.paper_format);
    return kExitOk;
  }
  if (!args.seed) throw InputError("simulate --table requires --seed");
  sim::table_design(args.table);
  std::optional<CalibrationCache> cache;
  sim::MleRowOptions options;
  if (!args.cache.empty()) {
    cache.emplace(args.cache);
    options.cache = &*cache;
  }
  const auto table = sim::reproduce_table(args.table, args.replications.value_or(2000), *args.seed,
                                          options, args.threads);
  Output out(args.out);
  sim::write_table_csv(out.stream(), table, args.paper_format);
  return kExitOk;
}

struct CalibrateArgs {
  std::size_t n = 0;
  std::size_t r = 0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  std::string cache;
  std::string out;
  std::size_t threads = 0;
};

int cmd_calibrate_b(const CalibrateArgs& args) {
  require_writable_target(args.out);
  require_writable_target(args.cache);
  UnbiasingEntry entry{};
  if (!args.cache.empty()) {
    CalibrationCache cache(args.cache);
    entry = cache.get_or_calibrate(args.n, args.r, args.replications, args.seed, args.threads);
  } else {
    entry = calibrate_B(args.n, args.r, args.replications, args.seed, 1.0, args.threads);
  }
  Output out(args.out);
  out.stream() << calibration_csv_header() << '\n' << calibration_csv_row(entry) << '\n';
  if (entry.excluded > 0) {
    std::cerr << "note: " << entry.excluded << " replications had no finite MLE\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayes and ML estimation for the Weibull reliable-life model"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* estimate_cmd = app.add_subcommand("estimate", "Posterior-mean estimates of x_R and beta");
  estimate_cmd->add_option("--sample", est.sample, "Sample CSV (time,status)")->required();
  estimate_cmd->add_option("--prior", est.prior, "Prior specification JSON")->required();
  estimate_cmd->add_option("--rel-tol", est.rel_tol, "Quadrature relative tolerance");
  estimate_cmd->add_option("--out", est.out, "Output path (default stdout)");

  MleArgs mle;
  auto* mle_cmd = app.add_subcommand("mle", "Censored-data maximum likelihood fit");
  mle_cmd->add_option("--sample", mle.sample, "Sample CSV (time,status)")->required();
  mle_cmd->add_option("--reliability", mle.R, "Reliability level R for x_R");
  mle_cmd->add_option("--out", mle.out, "Output path (default stdout)");

  PriorPdfArgs pdf;
  auto* pdf_cmd = app.add_subcommand("prior-pdf", "Inverted generalized gamma prior density curves");
  pdf_cmd->add_option("--a", pdf.a, "Scale hyperparameter a (default 1)");
  pdf_cmd->add_option("--xbar-R", pdf.xbar_R, "Anticipated reliable life; a is derived per w");
  pdf_cmd->add_option("--w", pdf.w, "Weight hyperparameter(s) (default 1.1(0.3)3.1)");
  pdf_cmd->add_option("--beta", pdf.beta, "Shape beta (default 1)");
  pdf_cmd->add_option("--grid", pdf.grid, "Explicit x_R grid points")->delimiter(',');
  pdf_cmd->add_option("--x-min", pdf.x_min, "Grid start");
  pdf_cmd->add_option("--x-max", pdf.x_max, "Grid end");
  pdf_cmd->add_option("--points", pdf.points, "Grid size");
  pdf_cmd->add_flag("--linear", pdf.linear, "Linear instead of logarithmic spacing");
  pdf_cmd->add_option("--out", pdf.out, "Output path (default stdout)");

  SimulateArgs simulate;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo performance study");
  sim_cmd->add_option("--config", simulate.config, "Experiment config JSON");
  sim_cmd->add_option("--table", simulate.table, "Reproduce a table layout: 3..8, 3b..8b");
  sim_cmd->add_option("--seed", simulate.seed, "Random seed");
  sim_cmd->add_option("--replications", simulate.replications, "Monte Carlo replications");
  sim_cmd->add_option("--rel-tol", simulate.rel_tol, "Quadrature relative tolerance");
  sim_cmd->add_flag("--paper-format", simulate.paper_format, "Two-digit scientific output");
  sim_cmd->add_option("--cache", simulate.cache, "B_{n,r} calibration cache CSV");
  sim_cmd->add_option("--threads", simulate.threads, "Worker threads (0 = all cores)");
  sim_cmd->add_option("--out", simulate.out, "Output CSV (default stdout)");

  CalibrateArgs cal;
  auto* cal_cmd = app.add_subcommand("calibrate-b", "Monte Carlo unbiasing factor B_{n,r}");
  cal_cmd->add_option("n", cal.n, "Sample size")->required();
  cal_cmd->add_option("r", cal.r, "Number of failures")->required();
  cal_cmd->add_option("replications", cal.replications, "Replications (>= 10000)")->required();
  cal_cmd->add_option("seed", cal.seed, "Random seed")->required();
  cal_cmd->add_option("--cache", cal.cache, "Calibration cache CSV to read and update");
  cal_cmd->add_option("--threads", cal.threads, "Worker threads (0 = all cores)");
  cal_cmd->add_option("--out", cal.out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (estimate_cmd->parsed()) return cmd_estimate(est);
    if (mle_cmd->parsed()) return cmd_mle(mle);
    if (pdf_cmd->parsed()) return cmd_prior_pdf(pdf);
    if (sim_cmd->parsed()) return cmd_simulate(simulate);
    if (cal_cmd->parsed()) return cmd_calibrate_b(cal);
  } catch (const ConstraintViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConstraint;
  } catch (const NoFiniteMle& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConstraint;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitInput;
}
