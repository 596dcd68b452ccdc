// cards: fit regressions with data-driven coefficient grouping, run the
// simulation experiments, and evaluate the design diagnostics.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <json.hpp>

#include "cards/metrics.hpp"
#include "cards/oracle.hpp"
#include "cards/parallel.hpp"
#include "cards/preliminary.hpp"
#include "cards/report.hpp"
#include "cards/segmentation.hpp"
#include "cards/sim.hpp"
#include "cards/solver.hpp"
#include "cards/tuning.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace cards;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ParseError:
    case ErrorCode::NonNumeric:
    case ErrorCode::MissingResponse:
    case ErrorCode::IoError:
    case ErrorCode::ZeroColumn:
    case ErrorCode::Overlap:
    case ErrorCode::Missing:
    case ErrorCode::EmptyGroup:
    case ErrorCode::MismatchedUniverse:
      return 3;
    case ErrorCode::BadArgument:
    case ErrorCode::InvalidSpec:
      return 2;
    default:
      return 4;  // numerical failure
  }
}

PenaltySpec::Kind parse_kind(const std::string& name) {
  if (name == "scad") return PenaltySpec::Kind::Scad;
  if (name == "mcp") return PenaltySpec::Kind::Mcp;
  if (name == "l1") return PenaltySpec::Kind::L1;
  throw Error(ErrorCode::BadArgument, "unknown penalty '" + name + "'");
}

PenaltySpec make_spec(PenaltySpec::Kind kind, double lambda, double a) {
  switch (kind) {
    case PenaltySpec::Kind::Scad: return PenaltySpec::scad(lambda, a);
    case PenaltySpec::Kind::Mcp: return PenaltySpec::mcp(lambda, a);
    case PenaltySpec::Kind::L1: return PenaltySpec::l1(lambda);
  }
  throw Error(ErrorCode::BadArgument, "unknown penalty kind");
}

Vector preliminary_for(const Dataset& ds, bool sparse_path) {
  if (!sparse_path && ds.X.p() <= ds.X.n()) return fit_ols(ds.X, ds.y);
  // High-dimensional (or sparse-method) preliminary: BIC-tuned SCAD path.
  const Vector z = ds.X.values.transpose() * ds.y.values / ds.X.n();
  const double zmax = std::max(z.cwiseAbs().maxCoeff(), 1e-8);
  Vector best;
  double best_bic = std::numeric_limits<double>::infinity();
  for (int i = 29; i >= 0; --i) {
    const double f = static_cast<double>(i) / 29.0;
    const double lam = std::exp(std::log(0.01 * zmax) * (1.0 - f) + std::log(zmax) * f);
    Vector beta;
    try {
      beta = fit_scad_sparse(ds.X, ds.y, lam);
    } catch (const Error&) {
      continue;
    }
    const double rss = (ds.y.values - ds.X.values * beta).squaredNorm();
    if (rss <= 1e-12 * ds.y.values.squaredNorm()) continue;
    int df = 0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) df += beta[j] != 0.0 ? 1 : 0;
    const double bic = ds.X.n() * std::log(rss / ds.X.n()) +
                       std::log(static_cast<double>(ds.X.n())) * df;
    if (bic < best_bic) {
      best_bic = bic;
      best = beta;
    }
  }
  if (best.size() == 0) throw Error(ErrorCode::NoConvergence, "SCAD preliminary failed");
  return best;
}

struct FitArgs {
  std::string data, response, method = "bcards", penalty = "scad", tune, out = "fit_report.json";
  double lambda = -1.0, lambda1 = -1.0, lambda2 = -1.0, sparsity_lambda = -1.0, delta = -1.0;
  double a = -1.0;
  bool no_standardize = false, no_center = false;
};

int run_fit(const FitArgs& args) {
  const Dataset ds = parse_dataset_csv(args.data, args.response);
  const PenaltySpec::Kind kind = parse_kind(args.penalty);
  const double a = args.a > 0.0 ? args.a : (kind == PenaltySpec::Kind::Mcp ? 3.0 : 3.7);

  SolverConfig cfg;
  cfg.standardize = !args.no_standardize;
  cfg.center = !args.no_center;

  const bool is_scards = args.method == "scards";
  const Vector bt = preliminary_for(ds, is_scards);

  FitResult fit;
  if (!args.tune.empty()) {
    const Criterion crit = args.tune == "gcv" ? Criterion::Gcv : Criterion::Bic;
    TuneMethod tm;
    if (args.method == "bcards") tm = TuneMethod::Bcards;
    else if (args.method == "acards") tm = TuneMethod::Acards;
    else if (args.method == "scards") tm = TuneMethod::Scards;
    else if (args.method == "tv") tm = TuneMethod::Tv;
    else if (args.method == "fused") tm = TuneMethod::FusedOrdered;
    else throw Error(ErrorCode::BadArgument, "unknown method '" + args.method + "'");
    const TuneGrids grids = default_grids(tm, ds.X, ds.y, bt);
    fit = grid_search(tm, ds.X, ds.y, bt, grids, crit, cfg, kind, a).best;
  } else if (args.method == "bcards") {
    if (args.lambda < 0.0) throw Error(ErrorCode::BadArgument, "--lambda or --tune required");
    fit = fit_bcards(ds.X, ds.y, bt, make_spec(kind, args.lambda, a), cfg);
  } else if (args.method == "acards") {
    if (args.lambda1 < 0.0 || args.lambda2 < 0.0 || args.delta < 0.0) {
      throw Error(ErrorCode::BadArgument, "--lambda1, --lambda2 and --delta (or --tune) required");
    }
    fit = fit_acards(ds.X, ds.y, bt, args.delta, make_spec(kind, args.lambda1, a),
                     make_spec(kind, args.lambda2, a), cfg);
  } else if (args.method == "scards") {
    if (args.lambda1 < 0.0 || args.lambda2 < 0.0 || args.delta < 0.0 || args.sparsity_lambda < 0.0) {
      throw Error(ErrorCode::BadArgument,
                  "--lambda1, --lambda2, --delta and --sparsity-lambda (or --tune) required");
    }
    fit = fit_scards(ds.X, ds.y, bt, args.delta, make_spec(kind, args.lambda1, a),
                     make_spec(kind, args.lambda2, a), make_spec(kind, args.sparsity_lambda, a), cfg);
  } else if (args.method == "tv") {
    if (args.lambda < 0.0) throw Error(ErrorCode::BadArgument, "--lambda or --tune required");
    fit = fit_tv(ds.X, ds.y, make_spec(kind, args.lambda, a), cfg);
  } else if (args.method == "fused") {
    if (args.lambda < 0.0) throw Error(ErrorCode::BadArgument, "--lambda or --tune required");
    fit = fit_fused_ordered(ds.X, ds.y, bt, args.lambda, cfg);
  } else {
    throw Error(ErrorCode::BadArgument, "unknown method '" + args.method + "'");
  }

  write_fit_report(fit, ds.X.n(), ds.X.p(), args.out);
  std::cout << "wrote " << args.out << " (" << fit.partition.group_count() << " groups";
  if (!fit.partition.zero_group.empty()) {
    std::cout << " + zero group of " << fit.partition.zero_group.size();
  }
  std::cout << ", objective " << format_double(fit.objective) << ")\n";
  for (const auto& w : fit.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

struct SimArgs {
  int experiment = 1;
  double r = 1.0;
  int T = 80;
  int reps = 100;
  std::uint64_t seed = 1;
  int test_size = 10000;
  std::string methods, criterion = "bic";
  std::string out_csv = "sim_rows.csv", out_json = "sim_summary.json", svg, svg_metric = "pe";
};

int run_simulate(const SimArgs& args) {
  SimConfig cfg;
  cfg.experiment = args.experiment;
  cfg.r = args.r;
  cfg.T = args.T;
  cfg.reps = args.reps;
  cfg.master_seed = args.seed;
  cfg.test_size = args.test_size;
  cfg.criterion = args.criterion == "gcv" ? Criterion::Gcv : Criterion::Bic;
  if (!args.methods.empty()) {
    std::stringstream ss(args.methods);
    std::string name;
    while (std::getline(ss, name, ',')) {
      bool found = false;
      for (int m = 0; m <= static_cast<int>(SimMethod::Scards); ++m) {
        if (name == sim_method_name(static_cast<SimMethod>(m))) {
          cfg.methods.push_back(static_cast<SimMethod>(m));
          found = true;
          break;
        }
      }
      if (!found) throw Error(ErrorCode::BadArgument, "unknown method '" + name + "'");
    }
  }

  const SimReport report = run_replications(cfg);
  write_sim_report(report, args.out_csv, args.out_json);
  if (!args.svg.empty()) atomic_write(args.svg, sim_svg_boxplot(report, args.svg_metric));

  std::cout << "experiment " << cfg.experiment << ", " << cfg.reps << " reps, seed "
            << cfg.master_seed << "\n";
  std::printf("%-10s %12s %12s %12s\n", "method", "median PE", "median NMI", "median FP");
  for (size_t m = 0; m < report.methods.size(); ++m) {
    auto cell = [](double v) { return std::isfinite(v) ? format_double(v) : std::string("-"); };
    std::printf("%-10s %12s %12s %12s\n", sim_method_name(report.methods[m]),
                cell(report.median_pe[m]).c_str(), cell(report.median_nmi[m]).c_str(),
                cell(report.median_fp[m]).c_str());
  }
  if (report.failed_reps > 0) {
    std::cerr << "warning: " << report.failed_reps << " replication(s) had failures\n";
  }
  std::cerr << "wall time: " << report.wall_seconds << " s\n";
  return 0;
}

struct DiagArgs {
  std::string check, data, partition, penalty = "scad", variant = "bcards", out;
  double lambda = 1.0, a = -1.0;
  int direction = 1;
};

int run_diagnose(const DiagArgs& args) {
  const Dataset ds = parse_dataset_csv(args.data);
  const PartitionFile pf = parse_partition_json(args.partition);
  validate_partition(pf.part, ds.X.p());
  nlohmann::json out;
  out["schema"] = "cards-report/1";
  out["kind"] = "diagnose";
  out["check"] = args.check;

  // Group values: from the partition file when given, otherwise from the
  // grouped least-squares fit on this data.
  auto grouped_values = [&]() {
    GroupedCoefficients gc;
    gc.sizes.reserve(pf.part.groups.size());
    for (const auto& g : pf.part.groups) gc.sizes.push_back(static_cast<int>(g.size()));
    if (pf.values.has_value()) {
      gc.values = *pf.values;
      if (gc.values.size() != pf.part.group_count()) {
        throw Error(ErrorCode::BadArgument, "one value per group required");
      }
    } else {
      const FitResult fit = oracle_fit(ds.X, ds.y, pf.part);
      gc.values.resize(pf.part.group_count());
      for (int k = 0; k < pf.part.group_count(); ++k) {
        gc.values[k] = fit.coefficients[pf.part.groups[static_cast<size_t>(k)][0]];
      }
    }
    return gc;
  };

  if (args.check == "kkt") {
    const PenaltySpec::Kind kind = parse_kind(args.penalty);
    const double a = args.a > 0.0 ? args.a : (kind == PenaltySpec::Kind::Mcp ? 3.0 : 3.7);
    const RankMap tau = rank_map(fit_ols(ds.X, ds.y));
    const KktOracleReport rep =
        kkt_oracle_check(ds.X, ds.y, pf.part, tau, make_spec(kind, args.lambda, a));
    out["pass"] = rep.pass;
    out["flat_ok"] = rep.flat_ok;
    out["partial_ok"] = rep.partial_ok;
    out["worst_flat_margin"] = rep.worst_flat_margin;
    out["worst_partial_margin"] = rep.worst_partial_margin;
  } else if (args.check == "irrep") {
    const RankMap tau = rank_map(fit_ols(ds.X, ds.y));
    const IrrepReport rep = irrepresentability_check(ds.X, pf.part, tau, grouped_values());
    out["satisfied"] = rep.satisfied;
    out["margin"] = rep.margin;
    out["jump_signs_ok"] = rep.jump_signs_ok;
    out["d0"] = std::vector<double>(rep.d0.data(), rep.d0.data() + rep.d0.size());
  } else if (args.check == "regularity" || args.check == "lambda-bounds") {
    const RegularityReport rep = regularity_constants(ds.X, pf.part, grouped_values());
    out["sigma"] = std::vector<double>(rep.sigma.data(), rep.sigma.data() + rep.sigma.size());
    out["nu"] = std::vector<double>(rep.nu.data(), rep.nu.data() + rep.nu.size());
    out["c1"] = rep.c1;
    out["c2"] = rep.c2;
    out["b_n"] = std::isfinite(rep.b_n) ? nlohmann::json(rep.b_n) : nlohmann::json("inf");
    if (args.check == "lambda-bounds") {
      LambdaVariant variant;
      if (args.variant == "bcards") variant = LambdaVariant::Bcards;
      else if (args.variant == "acards-between") variant = LambdaVariant::AcardsBetween;
      else if (args.variant == "acards-within") variant = LambdaVariant::AcardsWithin;
      else throw Error(ErrorCode::BadArgument, "unknown variant '" + args.variant + "'");
      std::vector<int> sizes;
      for (const auto& g : pf.part.groups) sizes.push_back(static_cast<int>(g.size()));
      out["lambda_scale"] = lambda_bounds(rep, ds.X.n(), ds.X.p(), pf.part.group_count(), sizes,
                                          variant);
      out["variant"] = args.variant;
    }
  } else if (args.check == "variance") {
    if (args.direction < 1 || args.direction > ds.X.p()) {
      throw Error(ErrorCode::BadArgument, "--direction out of range");
    }
    Vector a_n = Vector::Zero(ds.X.p());
    a_n[args.direction - 1] = 1.0;
    const auto [v1, v2] = variance_pair(ds.X, pf.part, a_n);
    out["v1n"] = v1;
    out["v2n"] = v2;
    out["direction"] = args.direction;
  } else {
    throw Error(ErrorCode::BadArgument, "unknown check '" + args.check + "'");
  }

  const std::string text = out.dump(2) + "\n";
  if (args.out.empty()) {
    std::cout << text;
  } else {
    atomic_write(args.out, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
  if (cards::par::thread_cap() > 0) omp_set_num_threads(cards::par::thread_cap());
#endif

  CLI::App app{"CARDS: clustered-coefficient regression via data-driven segmentation"};
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "fit a model to a CSV dataset");
  fit_cmd->add_option("--data", fit_args.data, "input CSV")->required();
  fit_cmd->add_option("--response", fit_args.response, "response column name (default: first)");
  fit_cmd->add_option("--method", fit_args.method, "bcards|acards|scards|tv|fused");
  fit_cmd->add_option("--penalty", fit_args.penalty, "scad|mcp|l1");
  fit_cmd->add_option("--a", fit_args.a, "concavity parameter");
  fit_cmd->add_option("--lambda", fit_args.lambda, "penalty level (bcards/tv/fused)");
  fit_cmd->add_option("--lambda1", fit_args.lambda1, "between-segment level");
  fit_cmd->add_option("--lambda2", fit_args.lambda2, "within-segment level");
  fit_cmd->add_option("--sparsity-lambda", fit_args.sparsity_lambda, "coordinate level (scards)");
  fit_cmd->add_option("--delta", fit_args.delta, "segmentation gap threshold");
  fit_cmd->add_option("--tune", fit_args.tune, "bic|gcv grid tuning");
  fit_cmd->add_flag("--no-standardize", fit_args.no_standardize, "skip column rescaling");
  fit_cmd->add_flag("--no-center", fit_args.no_center, "skip centering / intercept");
  fit_cmd->add_option("--out", fit_args.out, "output JSON path");

  SimArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "run a Monte Carlo experiment");
  sim_cmd->add_option("--experiment", sim_args.experiment, "1|2|3")->required();
  sim_cmd->add_option("--r", sim_args.r, "signal level (experiments 1-2)");
  sim_cmd->add_option("--T", sim_args.T, "time points (experiment 3)");
  sim_cmd->add_option("--reps", sim_args.reps, "replications");
  sim_cmd->add_option("--seed", sim_args.seed, "master seed");
  sim_cmd->add_option("--test-size", sim_args.test_size, "test set size");
  sim_cmd->add_option("--methods", sim_args.methods, "comma list (default per experiment)");
  sim_cmd->add_option("--criterion", sim_args.criterion, "bic|gcv");
  sim_cmd->add_option("--out-csv", sim_args.out_csv, "per-rep rows CSV");
  sim_cmd->add_option("--out-json", sim_args.out_json, "summary JSON");
  sim_cmd->add_option("--svg", sim_args.svg, "boxplot SVG path");
  sim_cmd->add_option("--svg-metric", sim_args.svg_metric, "pe|nmi|fp");

  DiagArgs diag_args;
  auto* diag_cmd = app.add_subcommand("diagnose", "evaluate design/theory diagnostics");
  diag_cmd->add_option("--check", diag_args.check, "kkt|irrep|regularity|lambda-bounds|variance")
      ->required();
  diag_cmd->add_option("--data", diag_args.data, "input CSV")->required();
  diag_cmd->add_option("--partition", diag_args.partition, "partition JSON")->required();
  diag_cmd->add_option("--penalty", diag_args.penalty, "scad|mcp|l1 (kkt)");
  diag_cmd->add_option("--lambda", diag_args.lambda, "penalty level (kkt)");
  diag_cmd->add_option("--a", diag_args.a, "concavity parameter (kkt)");
  diag_cmd->add_option("--variant", diag_args.variant,
                       "bcards|acards-between|acards-within (lambda-bounds)");
  diag_cmd->add_option("--direction", diag_args.direction, "1-based coordinate (variance)");
  diag_cmd->add_option("--out", diag_args.out, "output JSON path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (fit_cmd->parsed()) return run_fit(fit_args);
    if (sim_cmd->parsed()) return run_simulate(sim_args);
    if (diag_cmd->parsed()) return run_diagnose(diag_args);
  } catch (const cards::Error& e) {
    std::cerr << "error [" << cards::error_code_name(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
