#include "cards/types.hpp"

#include <cmath>

namespace cards {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroColumn: return "ZeroColumn";
    case ErrorCode::Overlap: return "Overlap";
    case ErrorCode::Missing: return "Missing";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::LambdaZero: return "LambdaZero";
    case ErrorCode::SingularGram: return "SingularGram";
    case ErrorCode::SingularGroupedGram: return "SingularGroupedGram";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::AllZero: return "AllZero";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::InconsistentOrder: return "InconsistentOrder";
    case ErrorCode::MismatchedUniverse: return "MismatchedUniverse";
    case ErrorCode::DfTooLarge: return "DfTooLarge";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonNumeric: return "NonNumeric";
    case ErrorCode::MissingResponse: return "MissingResponse";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::BadArgument: return "BadArgument";
  }
  return "Unknown";
}

DesignMatrix DesignMatrix::from(Matrix X) {
  if (X.rows() < 1 || X.cols() < 1) {
    throw Error(ErrorCode::BadArgument, "design matrix must have n >= 1 and p >= 1");
  }
  if (!X.allFinite()) {
    throw Error(ErrorCode::BadArgument, "design matrix has non-finite entries");
  }
  DesignMatrix d;
  d.values = std::move(X);
  return d;
}

ResponseVector ResponseVector::from(Vector y) {
  if (!y.allFinite()) {
    throw Error(ErrorCode::BadArgument, "response has non-finite entries");
  }
  ResponseVector r;
  r.values = std::move(y);
  return r;
}

DesignMatrix standardize(const DesignMatrix& X) {
  const int n = X.n();
  const int p = X.p();
  const double root_n = std::sqrt(static_cast<double>(n));

  DesignMatrix out;
  out.values = X.values;
  out.scale = X.standardized ? X.scale : Vector::Ones(p);
  for (int j = 0; j < p; ++j) {
    const double norm = out.values.col(j).norm();
    if (norm < 1e-12 * root_n) {
      throw Error(ErrorCode::ZeroColumn, "column " + std::to_string(j + 1) + " has (near-)zero norm",
                  j + 1);
    }
    const double s = root_n / norm;
    out.values.col(j) *= s;
    out.scale[j] *= s;
  }
  out.standardized = true;
  return out;
}

int Partition::covered_size() const {
  int total = static_cast<int>(zero_group.size());
  for (const auto& g : groups) total += static_cast<int>(g.size());
  return total;
}

void validate_partition(const Partition& part, int p) {
  std::vector<char> seen(static_cast<size_t>(p), 0);
  auto visit = [&](int idx) {
    if (idx < 0 || idx >= p) {
      throw Error(ErrorCode::BadArgument, "index " + std::to_string(idx + 1) + " outside 1.." + std::to_string(p),
                  idx + 1);
    }
    if (seen[static_cast<size_t>(idx)]) {
      throw Error(ErrorCode::Overlap, "index " + std::to_string(idx + 1) + " appears in two groups", idx + 1);
    }
    seen[static_cast<size_t>(idx)] = 1;
  };
  for (size_t k = 0; k < part.groups.size(); ++k) {
    if (part.groups[k].empty()) {
      throw Error(ErrorCode::EmptyGroup, "group " + std::to_string(k + 1) + " is empty",
                  static_cast<long>(k + 1));
    }
    for (int idx : part.groups[k]) visit(idx);
  }
  for (int idx : part.zero_group) visit(idx);
  for (int i = 0; i < p; ++i) {
    if (!seen[static_cast<size_t>(i)]) {
      throw Error(ErrorCode::Missing, "index " + std::to_string(i + 1) + " not covered", i + 1);
    }
  }
}

}  // namespace cards
