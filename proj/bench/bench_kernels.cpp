// Compares the OpenMP kernels against the serial reference implementations,
// then times full weighted-graph solves both ways.

#include <cstdio>
#include <random>
#include <vector>

#include "cards/graph_lasso.hpp"
#include "cards/kernels.hpp"
#include "cards/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double now() {
#ifdef _OPENMP
  return omp_get_wtime();
#else
  return 0.0;
#endif
}

template <class F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = now();
    f();
    best = std::min(best, now() - t0);
  }
  return best;
}

}  // namespace

int main() {
#ifdef _OPENMP
  if (cards::par::thread_cap() > 0) omp_set_num_threads(cards::par::thread_cap());
  std::printf("threads: %d\n", cards::par::active_threads());
#else
  std::printf("threads: 1 (OpenMP disabled)\n");
#endif

  std::mt19937_64 eng(7);
  std::normal_distribution<double> gauss;

  std::printf("\n%-22s %10s %12s %12s %8s\n", "kernel", "size", "serial(ms)", "omp(ms)", "speedup");
  for (int p : {200, 2000, 20000}) {
    const int E = 8 * p;
    std::vector<std::pair<int, int>> edges;
    std::uniform_int_distribution<int> node(0, p - 1);
    for (int e = 0; e < E; ++e) {
      int i = node(eng), j = node(eng);
      if (i == j) j = (j + 1) % p;
      edges.emplace_back(i, j);
    }
    const auto es = cards::kernels::EdgeSet::build(p, edges);
    std::vector<double> beta(p), w(E, 0.3), z(E, 0.0), u(E, 0.0), rp(E), zd(E), out(p);
    for (auto& b : beta) b = gauss(eng);
    std::vector<double> val(E);
    for (auto& v : val) v = gauss(eng);

    const double ts = time_best_of(5, [&]() {
      cards::kernels::ref::edge_prox(es, beta.data(), w.data(), 1.0, z.data(), u.data(), rp.data(),
                                     zd.data());
      cards::kernels::ref::edge_divergence(es, val.data(), out.data());
      (void)cards::kernels::ref::sum_squares(rp.data(), E);
    });
    const double tp = time_best_of(5, [&]() {
      cards::kernels::edge_prox(es, beta.data(), w.data(), 1.0, z.data(), u.data(), rp.data(),
                                zd.data());
      cards::kernels::edge_divergence(es, val.data(), out.data());
      (void)cards::kernels::sum_squares(rp.data(), E);
    });
    std::printf("%-22s %10d %12.3f %12.3f %8.2f\n", "prox+div+norm", E, ts * 1e3, tp * 1e3,
                ts / tp);
  }

  std::printf("\n%-22s %10s %12s %12s %8s\n", "solver", "pairs", "serial(ms)", "omp(ms)", "speedup");
  for (int p : {60, 200, 400}) {
    const int n = 2 * p;
    cards::Matrix X(n, p);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) X(i, j) = gauss(eng);
    }
    cards::Vector beta0 = cards::Vector::Zero(p);
    for (int j = 0; j < p; ++j) beta0[j] = (j < p / 2) ? -1.0 : 1.0;
    cards::Vector noise(n);
    for (int i = 0; i < n; ++i) noise[i] = gauss(eng);
    const cards::Vector y = X * beta0 + noise;

    std::vector<std::pair<int, int>> pairs;
    for (int j = 0; j + 1 < p; ++j) pairs.emplace_back(j, j + 1);
    for (int j = 0; j + 7 < p; j += 3) pairs.emplace_back(j, j + 7);
    cards::Vector w = cards::Vector::Constant(static_cast<Eigen::Index>(pairs.size()), 0.05);

    const auto prob = cards::WeightedGraphProblem::from_data(X, y, pairs, w);
    cards::AdmmConfig cfg;
    cfg.tol = 1e-7;

    cards::AdmmConfig cfg_ref = cfg;
    cfg_ref.use_reference_kernels = true;
    const double ts = time_best_of(3, [&]() { cards::solve_weighted_graph_lasso(prob, cfg_ref); });
    const double tp = time_best_of(3, [&]() { cards::solve_weighted_graph_lasso(prob, cfg); });
    std::printf("%-22s %10zu %12.3f %12.3f %8.2f\n", "graph lasso admm", pairs.size(), ts * 1e3,
                tp * 1e3, ts / tp);
  }
  return 0;
}
