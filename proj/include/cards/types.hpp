#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cards {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ErrorCode {
  ZeroColumn,
  Overlap,
  Missing,
  EmptyGroup,
  InvalidSpec,
  LambdaZero,
  SingularGram,
  SingularGroupedGram,
  NoConvergence,
  AllZero,
  NotApplicable,
  InconsistentOrder,
  MismatchedUniverse,
  DfTooLarge,
  ParseError,
  NonNumeric,
  MissingResponse,
  IoError,
  BadArgument,
};

/// All library failures are reported through this exception. `detail` carries
/// the offending 1-based index / iteration count where one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg, long detail = -1)
      : std::runtime_error(msg), code_(code), detail_(detail) {}

  ErrorCode code() const { return code_; }
  long detail() const { return detail_; }

 private:
  ErrorCode code_;
  long detail_;
};

const char* error_code_name(ErrorCode code);

/// n x p predictor matrix. When `standardized` is set, column j of `values`
/// equals the original column times `scale[j]` and has Euclidean norm
/// sqrt(n); a coefficient b fitted on the standardized columns maps back to
/// original units as beta[j] = scale[j] * b[j].
struct DesignMatrix {
  Matrix values;
  bool standardized = false;
  Vector scale;

  int n() const { return static_cast<int>(values.rows()); }
  int p() const { return static_cast<int>(values.cols()); }

  static DesignMatrix from(Matrix X);
};

struct ResponseVector {
  Vector values;
  static ResponseVector from(Vector y);
};

/// Rescales every column to norm sqrt(n), recording the factors. Idempotent.
DesignMatrix standardize(const DesignMatrix& X);

/// Index groups are 0-based internally; the CLI and reports print 1-based.
struct Partition {
  std::vector<std::vector<int>> groups;
  std::vector<int> zero_group;

  int group_count() const { return static_cast<int>(groups.size()); }
  int covered_size() const;
};

/// Checks disjointness and exact coverage of {0..p-1}. Throws Overlap(i),
/// Missing(i) or EmptyGroup(k) with 1-based detail.
void validate_partition(const Partition& part, int p);

/// Common coefficient value per group, aligned with Partition::groups.
struct GroupedCoefficients {
  Vector values;
  std::vector<int> sizes;
};

/// Permutation: order[j] = index holding the (j+1)-th smallest preliminary
/// coefficient. Ties break by ascending original index.
struct RankMap {
  std::vector<int> order;
};

struct Segmentation {
  std::vector<std::vector<int>> segments;  // each in rank order
  std::vector<int> zero_set;
  double delta = 0.0;

  int segment_count() const { return static_cast<int>(segments.size()); }
};

enum class PairTier { Between, Within };

struct PenalizedPair {
  int i, j;  // i < j
  PairTier tier;
};

struct PairGraph {
  std::vector<PenalizedPair> pairs;
  double lambda_between = 0.0;
  double lambda_within = 0.0;
};

/// Per ADMM solve: iteration count, final residuals and the stationarity
/// residual computed from the dual variables.
struct SolveStats {
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double kkt_residual = 0.0;
  bool converged = false;
};

struct FitSettings {
  std::string method;
  std::string penalty;  // "scad" / "mcp" / "l1" (between spec for hybrid fits)
  double lambda = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double sparsity_lambda = 0.0;
  double delta = 0.0;
  double a = 0.0;
  double extract_tol = 0.0;
  bool standardized = false;
  bool centered = false;
};

struct FitResult {
  Vector coefficients;         // original units
  Vector solver_coefficients;  // units the penalty saw (== coefficients if no
                               // standardization was applied)
  double intercept = 0.0;
  Partition partition;
  double objective = 0.0;
  int iterations = 0;  // LLA outer iterations
  std::vector<double> objective_trace;
  std::vector<SolveStats> inner_stats;
  std::vector<Vector> iterates;  // filled when config.record_iterates
  bool converged = false;
  std::vector<double> standard_errors;  // grouped SEs (oracle fit only)
  std::vector<std::string> warnings;
  FitSettings settings;
};

}  // namespace cards
