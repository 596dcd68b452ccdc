#include "cards/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "cards/parallel.hpp"

namespace cards::kernels {

namespace {
constexpr std::ptrdiff_t kBlock = 4096;
// Below this many elements a parallel region costs more than it saves.
constexpr int kParThreshold = 4096;

inline double soft(double a, double t) {
  if (a > t) return a - t;
  if (a < -t) return a + t;
  return 0.0;
}

inline bool go_parallel(std::ptrdiff_t n) { return n >= kParThreshold && par::active_threads() > 1; }
}  // namespace

EdgeSet EdgeSet::build(int p, const std::vector<std::pair<int, int>>& edges) {
  EdgeSet es;
  es.node_count = p;
  es.tail.reserve(edges.size());
  es.head.reserve(edges.size());
  for (const auto& [i, j] : edges) {
    es.tail.push_back(i);
    es.head.push_back(j);
  }
  const int E = es.edge_count();
  es.adj_start.assign(static_cast<size_t>(p) + 1, 0);
  for (int e = 0; e < E; ++e) {
    ++es.adj_start[static_cast<size_t>(es.tail[e]) + 1];
    ++es.adj_start[static_cast<size_t>(es.head[e]) + 1];
  }
  for (int i = 0; i < p; ++i) es.adj_start[static_cast<size_t>(i) + 1] += es.adj_start[i];
  es.adj_edge.resize(2 * static_cast<size_t>(E));
  es.adj_sign.resize(2 * static_cast<size_t>(E));
  std::vector<int> cursor(es.adj_start.begin(), es.adj_start.end() - 1);
  for (int e = 0; e < E; ++e) {
    int slot = cursor[es.tail[e]]++;
    es.adj_edge[slot] = e;
    es.adj_sign[slot] = 1;
    slot = cursor[es.head[e]]++;
    es.adj_edge[slot] = e;
    es.adj_sign[slot] = -1;
  }
  return es;
}

void edge_prox(const EdgeSet& es, const double* beta, const double* weight, double rho,
               double* z, double* u, double* rprim, double* zdiff) {
  const int E = es.edge_count();
  auto body = [&](int e) {
    const double d = beta[es.tail[e]] - beta[es.head[e]];
    const double a = d + u[e];
    const double zn = soft(a, weight[e] / rho);
    rprim[e] = d - zn;
    zdiff[e] = zn - z[e];
    z[e] = zn;
    u[e] = a - zn;
  };
  if (go_parallel(E)) {
    const int nt = par::active_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (int e = 0; e < E; ++e) body(e);
  } else {
    for (int e = 0; e < E; ++e) body(e);
  }
}

void coord_prox(const std::vector<int>& idx, const double* beta, const double* weight,
                double rho, double* z, double* u, double* rprim, double* zdiff) {
  const int m = static_cast<int>(idx.size());
  auto body = [&](int k) {
    const double d = beta[idx[k]];
    const double a = d + u[k];
    const double zn = soft(a, weight[k] / rho);
    rprim[k] = d - zn;
    zdiff[k] = zn - z[k];
    z[k] = zn;
    u[k] = a - zn;
  };
  if (go_parallel(m)) {
    const int nt = par::active_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (int k = 0; k < m; ++k) body(k);
  } else {
    for (int k = 0; k < m; ++k) body(k);
  }
}

void edge_divergence(const EdgeSet& es, const double* val, double* out) {
  const int p = es.node_count;
  auto body = [&](int i) {
    double acc = 0.0;
    for (int s = es.adj_start[i]; s < es.adj_start[static_cast<size_t>(i) + 1]; ++s) {
      acc += static_cast<double>(es.adj_sign[s]) * val[es.adj_edge[s]];
    }
    out[i] = acc;
  };
  if (go_parallel(p)) {
    const int nt = par::active_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (int i = 0; i < p; ++i) body(i);
  } else {
    for (int i = 0; i < p; ++i) body(i);
  }
}

void coord_scatter_add(const std::vector<int>& idx, const double* val, double* out) {
  const int m = static_cast<int>(idx.size());
  if (go_parallel(m)) {
    const int nt = par::active_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (int k = 0; k < m; ++k) out[idx[k]] += val[k];
  } else {
    for (int k = 0; k < m; ++k) out[idx[k]] += val[k];
  }
}

double sum_squares(const double* x, std::ptrdiff_t n) {
  const std::ptrdiff_t nblocks = (n + kBlock - 1) / kBlock;
  if (nblocks <= 1) return ref::sum_squares(x, n);
  std::vector<double> partial(static_cast<size_t>(nblocks), 0.0);
  const bool par_run = go_parallel(n);
  const int nt = par::active_threads();
#pragma omp parallel for schedule(static) num_threads(nt) if (par_run)
  for (std::ptrdiff_t b = 0; b < nblocks; ++b) {
    const std::ptrdiff_t lo = b * kBlock;
    const std::ptrdiff_t hi = std::min(n, lo + kBlock);
    double acc = 0.0;
    for (std::ptrdiff_t i = lo; i < hi; ++i) acc += x[i] * x[i];
    partial[static_cast<size_t>(b)] = acc;
  }
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

double max_abs(const double* x, std::ptrdiff_t n) {
  const std::ptrdiff_t nblocks = (n + kBlock - 1) / kBlock;
  if (nblocks <= 1) return ref::max_abs(x, n);
  std::vector<double> partial(static_cast<size_t>(nblocks), 0.0);
  const bool par_run = go_parallel(n);
  const int nt = par::active_threads();
#pragma omp parallel for schedule(static) num_threads(nt) if (par_run)
  for (std::ptrdiff_t b = 0; b < nblocks; ++b) {
    const std::ptrdiff_t lo = b * kBlock;
    const std::ptrdiff_t hi = std::min(n, lo + kBlock);
    double acc = 0.0;
    for (std::ptrdiff_t i = lo; i < hi; ++i) acc = std::max(acc, std::abs(x[i]));
    partial[static_cast<size_t>(b)] = acc;
  }
  double total = 0.0;
  for (double v : partial) total = std::max(total, v);
  return total;
}

namespace ref {

void edge_prox(const EdgeSet& es, const double* beta, const double* weight, double rho,
               double* z, double* u, double* rprim, double* zdiff) {
  for (int e = 0; e < es.edge_count(); ++e) {
    const double d = beta[es.tail[e]] - beta[es.head[e]];
    const double a = d + u[e];
    const double zn = soft(a, weight[e] / rho);
    rprim[e] = d - zn;
    zdiff[e] = zn - z[e];
    z[e] = zn;
    u[e] = a - zn;
  }
}

void coord_prox(const std::vector<int>& idx, const double* beta, const double* weight,
                double rho, double* z, double* u, double* rprim, double* zdiff) {
  for (size_t k = 0; k < idx.size(); ++k) {
    const double d = beta[idx[k]];
    const double a = d + u[k];
    const double zn = soft(a, weight[k] / rho);
    rprim[k] = d - zn;
    zdiff[k] = zn - z[k];
    z[k] = zn;
    u[k] = a - zn;
  }
}

void edge_divergence(const EdgeSet& es, const double* val, double* out) {
  std::fill(out, out + es.node_count, 0.0);
  for (int e = 0; e < es.edge_count(); ++e) {
    out[es.tail[e]] += val[e];
    out[es.head[e]] -= val[e];
  }
}

double sum_squares(const double* x, std::ptrdiff_t n) {
  double acc = 0.0;
  for (std::ptrdiff_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

double max_abs(const double* x, std::ptrdiff_t n) {
  double acc = 0.0;
  for (std::ptrdiff_t i = 0; i < n; ++i) acc = std::max(acc, std::abs(x[i]));
  return acc;
}

}  // namespace ref

}  // namespace cards::kernels
