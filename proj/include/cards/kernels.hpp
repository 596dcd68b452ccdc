#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace cards::kernels {

/// Difference-penalty support over nodes 0..p-1. Edge e contributes the term
/// beta[tail[e]] - beta[head[e]]. The CSR adjacency lets node sums be gathered
/// in a fixed order, so every kernel here is bitwise independent of the
/// OpenMP thread count.
struct EdgeSet {
  std::vector<int> tail, head;
  std::vector<int> adj_start;  // size node_count + 1
  std::vector<int> adj_edge;
  std::vector<signed char> adj_sign;
  int node_count = 0;

  static EdgeSet build(int p, const std::vector<std::pair<int, int>>& edges);
  int edge_count() const { return static_cast<int>(tail.size()); }
};

/// Soft-threshold sweep over the edge auxiliaries:
///   d = beta[tail]-beta[head]; a = d + u; zn = soft(a, weight/rho);
///   rprim = d - zn; zdiff = zn - z; z = zn; u = a - zn.
void edge_prox(const EdgeSet& es, const double* beta, const double* weight, double rho,
               double* z, double* u, double* rprim, double* zdiff);

/// Same sweep for coordinate auxiliaries s_j ~ beta[idx[k]].
void coord_prox(const std::vector<int>& idx, const double* beta, const double* weight,
                double rho, double* z, double* u, double* rprim, double* zdiff);

/// out[i] = sum over edges incident to i of sign * val[e]   (adjoint of the
/// difference operator; gather form).
void edge_divergence(const EdgeSet& es, const double* val, double* out);

/// out[idx[k]] += val[k]; indices are distinct.
void coord_scatter_add(const std::vector<int>& idx, const double* val, double* out);

/// Fixed-block compensated-order reductions: block partial sums are computed
/// independently and combined in block order, so the result does not depend
/// on how blocks are assigned to threads.
double sum_squares(const double* x, std::ptrdiff_t n);
double max_abs(const double* x, std::ptrdiff_t n);

/// Naive single-thread reference implementations, kept for tests and the
/// kernel benchmark.
namespace ref {
void edge_prox(const EdgeSet& es, const double* beta, const double* weight, double rho,
               double* z, double* u, double* rprim, double* zdiff);
void coord_prox(const std::vector<int>& idx, const double* beta, const double* weight,
                double rho, double* z, double* u, double* rprim, double* zdiff);
void edge_divergence(const EdgeSet& es, const double* val, double* out);
double sum_squares(const double* x, std::ptrdiff_t n);
double max_abs(const double* x, std::ptrdiff_t n);
}  // namespace ref

}  // namespace cards::kernels
