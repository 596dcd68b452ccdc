#pragma once

#include <functional>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cards/types.hpp"

namespace testutil {

inline std::mt19937_64 rng(unsigned seed) { return std::mt19937_64(seed); }

inline cards::Matrix random_matrix(std::mt19937_64& eng, int n, int p) {
  std::normal_distribution<double> gauss;
  cards::Matrix X(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) X(i, j) = gauss(eng);
  }
  return X;
}

inline cards::Vector random_vector(std::mt19937_64& eng, int n) {
  std::normal_distribution<double> gauss;
  cards::Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = gauss(eng);
  return v;
}

/// Design with X'X = n I exactly (columns of a random orthonormal frame
/// scaled by sqrt(n)).
inline cards::Matrix orthogonal_design(std::mt19937_64& eng, int n, int p) {
  const cards::Matrix G = random_matrix(eng, n, p);
  Eigen::HouseholderQR<cards::Matrix> qr(G);
  cards::Matrix Q = qr.householderQ() * cards::Matrix::Identity(n, p);
  return std::sqrt(static_cast<double>(n)) * Q;
}

/// Coordinate-wise grid refinement: repeatedly scans each coordinate over a
/// shrinking grid around the current best point. Independent minimization
/// oracle for small problems.
inline cards::Vector grid_refine(const std::function<double(const cards::Vector&)>& f,
                                 cards::Vector x, double radius, int rounds = 60,
                                 int points = 21) {
  double best = f(x);
  for (int round = 0; round < rounds; ++round) {
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const double center = x[j];
      double arg_best = center;
      for (int g = 0; g < points; ++g) {
        const double cand = center - radius + 2.0 * radius * g / (points - 1);
        x[j] = cand;
        const double v = f(x);
        if (v < best) {
          best = v;
          arg_best = cand;
        }
      }
      x[j] = arg_best;
    }
    radius *= 0.6;
  }
  return x;
}

/// Central finite difference.
inline double fdiff(const std::function<double(double)>& f, double t, double h = 1e-6) {
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

/// Simpson integration on [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        int intervals = 20000) {
  if (intervals % 2 == 1) ++intervals;
  const double h = (b - a) / intervals;
  double acc = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace testutil
