#pragma once

#include <cstdint>
#include <string>

#include "cards/solver.hpp"
#include "cards/tuning.hpp"
#include "cards/types.hpp"

namespace cards {

/// One simulated regression data set plus its ground truth and a test set.
struct RegressionInstance {
  DesignMatrix X;
  ResponseVector y;
  Vector beta_true;
  Partition truth;
  Matrix X_test;
  Vector y_test;
};

/// p=60, n=100; four consecutive blocks of 15 at -2r, -r, r, 2r; iid N(0,1)
/// design and noise. Stream depends only on (master_seed, rep).
RegressionInstance gen_experiment1(double r, std::uint64_t master_seed, int rep,
                                   int test_size = 10000);

/// p=100, n=150; first 60 coordinates as in experiment 1 plus a 40-strong
/// zero group.
RegressionInstance gen_experiment2(double r, std::uint64_t master_seed, int rep,
                                   int test_size = 10000);

/// Panel data: common regressors across locations.
struct PanelInstance {
  Matrix Y;       // locations x T
  Matrix X;       // T x q
  Matrix B_true;  // locations x q
  std::vector<Partition> truth;  // per coordinate, partitions of the locations
  Matrix X_test;  // T_test x q
  Matrix Y_test;  // locations x T_test
};

/// 100 locations, 5 coordinates, four location blocks of 25; coordinate j
/// takes values [-2,-1,1,2] + 0.1*(j-1).
PanelInstance gen_experiment3(int T, std::uint64_t master_seed, int rep, int test_size = 10000);

/// Per-location least squares, one row per location.
Matrix panel_ols(const PanelInstance& data);

/// Grouped least squares knowing each coordinate's true grouping.
Matrix panel_oracle(const PanelInstance& data);

struct PanelFit {
  Matrix B;
  std::vector<Partition> partitions;
  double rss = 0.0;
  int df = 0;
};

/// Joint CARDS fit over all location-coordinate coefficients: per-coordinate
/// pair graphs from the preliminary, summed penalties, one LLA/ADMM solve.
PanelFit fit_panel_cards(const PanelInstance& data, const Matrix& B_tilde,
                         const std::vector<double>& delta_per_coord, const PenaltySpec& spec1,
                         const PenaltySpec& spec2, const SolverConfig& config);

enum class SimMethod { Oracle, Oracle0, OracleG, Ols, Scad, Bcards, Acards, Tv, Fused, Scards };

const char* sim_method_name(SimMethod m);

struct SimConfig {
  int experiment = 1;
  double r = 1.0;
  int T = 80;
  int reps = 100;
  std::uint64_t master_seed = 1;
  int test_size = 10000;
  std::vector<SimMethod> methods;  // empty = experiment defaults
  Criterion criterion = Criterion::Bic;
};

struct SimRow {
  int rep = 0;
  SimMethod method = SimMethod::Oracle;
  double pe = 0.0;
  double nmi = 0.0;
  double fp = 0.0;    // NaN when not applicable
  bool failed = false;
};

struct SimReport {
  SimConfig config;
  std::vector<SimRow> rows;  // rep-major, method-minor
  std::vector<SimMethod> methods;
  std::vector<double> median_pe, median_nmi, median_fp;  // per method
  int failed_reps = 0;
  double wall_seconds = 0.0;  // console diagnostics only, never serialized
};

double median(std::vector<double> values);

/// Runs the experiment; replications execute concurrently, each on its own
/// RNG stream, and the report is identical for any thread count.
SimReport run_replications(const SimConfig& cfg);

}  // namespace cards
