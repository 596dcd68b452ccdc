#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "cards/preliminary.hpp"
#include "cards/types.hpp"
#include "support/test_utils.hpp"

using namespace cards;

TEST_CASE("standardize leaves norm-sqrt(n) columns unchanged") {
  Matrix X(4, 2);
  X.col(0) << 1, 1, 1, 1;  // norm 2 = sqrt(4)
  X.col(1) << 2, 0, 0, 0;  // norm 2
  const DesignMatrix out = standardize(DesignMatrix::from(X));
  CHECK(out.standardized);
  CHECK((out.values - X).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(out.scale[0] == doctest::Approx(1.0));
}

TEST_CASE("standardize rejects zero columns") {
  Matrix X = Matrix::Zero(4, 1);
  try {
    standardize(DesignMatrix::from(X));
    FAIL("expected ZeroColumn");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroColumn);
    CHECK(e.detail() == 1);
  }
}

TEST_CASE("standardize is idempotent and tracks scale factors") {
  auto eng = testutil::rng(11);
  const Matrix X = testutil::random_matrix(eng, 23, 7);
  const DesignMatrix once = standardize(DesignMatrix::from(X));
  const DesignMatrix twice = standardize(once);
  CHECK((twice.values - once.values).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((twice.scale - once.scale).cwiseAbs().maxCoeff() < 1e-12);
  const double root_n = std::sqrt(23.0);
  for (int j = 0; j < once.p(); ++j) {
    CHECK(once.values.col(j).norm() == doctest::Approx(root_n).epsilon(1e-10));
  }
}

TEST_CASE("coefficients round-trip through the recorded rescaling") {
  auto eng = testutil::rng(4);
  const Matrix X = testutil::random_matrix(eng, 40, 6);
  const Vector y = testutil::random_vector(eng, 40);
  const DesignMatrix std_once = standardize(DesignMatrix::from(X));

  const Vector b_std = fit_ols(std_once, ResponseVector::from(y));
  const Vector beta_raw = std_once.scale.cwiseProduct(b_std);
  // re-standardizing the raw design and refitting reproduces the fit
  const DesignMatrix again = standardize(DesignMatrix::from(X));
  const Vector b2 = fit_ols(again, ResponseVector::from(y));
  CHECK((b2 - b_std).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((beta_raw.cwiseQuotient(std_once.scale) - b_std).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("validate_partition accepts a complete disjoint partition") {
  Partition part;
  part.groups = {{0, 1}, {2}};
  CHECK_NOTHROW(validate_partition(part, 3));
  CHECK(part.covered_size() == 3);
}

TEST_CASE("validate_partition reports overlap, missing index and empty group") {
  Partition overlap;
  overlap.groups = {{0, 1}, {1, 2}};
  try {
    validate_partition(overlap, 3);
    FAIL("expected Overlap");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Overlap);
    CHECK(e.detail() == 2);
  }

  Partition missing;
  missing.groups = {{0}};
  try {
    validate_partition(missing, 3);
    FAIL("expected Missing");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Missing);
    CHECK(e.detail() == 2);
  }

  Partition empty;
  empty.groups = {{0, 1, 2}, {}};
  try {
    validate_partition(empty, 3);
    FAIL("expected EmptyGroup");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyGroup);
    CHECK(e.detail() == 2);
  }
}

TEST_CASE("group sizes always sum to p for valid partitions") {
  auto eng = testutil::rng(99);
  std::uniform_int_distribution<int> psize(1, 40);
  for (int t = 0; t < 50; ++t) {
    const int p = psize(eng);
    std::vector<int> perm(static_cast<size_t>(p));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), eng);
    Partition part;
    size_t pos = 0;
    std::uniform_int_distribution<int> chunk(1, 5);
    if (t % 3 == 0 && pos < perm.size()) {
      const size_t len = std::min<size_t>(static_cast<size_t>(chunk(eng)), perm.size() - pos);
      part.zero_group.assign(perm.begin() + static_cast<long>(pos),
                             perm.begin() + static_cast<long>(pos + len));
      pos += len;
    }
    while (pos < perm.size()) {
      const size_t len = std::min<size_t>(static_cast<size_t>(chunk(eng)), perm.size() - pos);
      part.groups.emplace_back(perm.begin() + static_cast<long>(pos),
                               perm.begin() + static_cast<long>(pos + len));
      pos += len;
    }
    if (part.groups.empty()) continue;
    CHECK_NOTHROW(validate_partition(part, p));
    CHECK(part.covered_size() == p);
  }
}
