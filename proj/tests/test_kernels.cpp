#include <doctest.h>

#include <vector>

#include "cards/kernels.hpp"
#include "cards/parallel.hpp"
#include "support/test_utils.hpp"

using namespace cards::kernels;

TEST_CASE("edge set adjacency is consistent") {
  const auto es = EdgeSet::build(4, {{0, 1}, {1, 2}, {0, 3}});
  CHECK(es.edge_count() == 3);
  // node 0 touches edges 0 (+) and 2 (+); node 1 touches 0 (-) and 1 (+)
  CHECK(es.adj_start[0] == 0);
  CHECK(es.adj_start[4] == 6);
  std::vector<double> val = {1.0, 10.0, 100.0};
  std::vector<double> out(4);
  ref::edge_divergence(es, val.data(), out.data());
  CHECK(out[0] == doctest::Approx(101.0));
  CHECK(out[1] == doctest::Approx(9.0));
  CHECK(out[2] == doctest::Approx(-10.0));
  CHECK(out[3] == doctest::Approx(-100.0));

  std::vector<double> out2(4);
  edge_divergence(es, val.data(), out2.data());
  for (int i = 0; i < 4; ++i) CHECK(out[i] == out2[i]);
}

TEST_CASE("production kernels match the serial reference") {
  auto eng = testutil::rng(31);
  std::uniform_int_distribution<int> node(0, 9999);
  const int p = 10000, E = 50000;
  std::vector<std::pair<int, int>> edges;
  for (int e = 0; e < E; ++e) {
    int i = node(eng), j = node(eng);
    if (i == j) j = (j + 1) % p;
    edges.emplace_back(i, j);
  }
  const auto es = EdgeSet::build(p, edges);

  std::vector<double> beta(p), w(E), z1(E, 0.0), u1(E, 0.0), z2(E, 0.0), u2(E, 0.0);
  std::vector<double> rp1(E), zd1(E), rp2(E), zd2(E);
  std::normal_distribution<double> gauss;
  for (auto& b : beta) b = gauss(eng);
  for (auto& x : w) x = std::abs(gauss(eng)) * 0.2;

  edge_prox(es, beta.data(), w.data(), 1.3, z1.data(), u1.data(), rp1.data(), zd1.data());
  ref::edge_prox(es, beta.data(), w.data(), 1.3, z2.data(), u2.data(), rp2.data(), zd2.data());
  for (int e = 0; e < E; ++e) {
    CHECK(z1[e] == z2[e]);
    CHECK(u1[e] == u2[e]);
    CHECK(rp1[e] == rp2[e]);
  }

  std::vector<double> d1(p), d2(p);
  edge_divergence(es, zd1.data(), d1.data());
  ref::edge_divergence(es, zd2.data(), d2.data());
  for (int i = 0; i < p; ++i) CHECK(d1[i] == d2[i]);

  const double s_blocked = sum_squares(rp1.data(), E);
  const double s_naive = ref::sum_squares(rp2.data(), E);
  CHECK(s_blocked == doctest::Approx(s_naive).epsilon(1e-12));
  CHECK(max_abs(rp1.data(), E) == ref::max_abs(rp2.data(), E));
}

TEST_CASE("blocked reductions are bitwise identical across thread counts") {
  auto eng = testutil::rng(40);
  std::normal_distribution<double> gauss;
  std::vector<double> x(300000);
  for (auto& v : x) v = gauss(eng);

  cards::par::set_thread_cap(1);
  const double s1 = sum_squares(x.data(), static_cast<std::ptrdiff_t>(x.size()));
  const double m1 = max_abs(x.data(), static_cast<std::ptrdiff_t>(x.size()));
  cards::par::set_thread_cap(8);
  const double s8 = sum_squares(x.data(), static_cast<std::ptrdiff_t>(x.size()));
  const double m8 = max_abs(x.data(), static_cast<std::ptrdiff_t>(x.size()));
  cards::par::set_thread_cap(0);
  CHECK(s1 == s8);
  CHECK(m1 == m8);
}

TEST_CASE("coordinate prox matches its reference") {
  auto eng = testutil::rng(50);
  std::normal_distribution<double> gauss;
  const int p = 500;
  std::vector<int> idx(p);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> beta(p), w(p, 0.1), z1(p, 0.0), u1(p, 0.0), z2(p, 0.0), u2(p, 0.0);
  std::vector<double> rp1(p), zd1(p), rp2(p), zd2(p);
  for (auto& b : beta) b = gauss(eng);

  coord_prox(idx, beta.data(), w.data(), 0.7, z1.data(), u1.data(), rp1.data(), zd1.data());
  ref::coord_prox(idx, beta.data(), w.data(), 0.7, z2.data(), u2.data(), rp2.data(), zd2.data());
  for (int j = 0; j < p; ++j) {
    CHECK(z1[j] == z2[j]);
    CHECK(u1[j] == u2[j]);
  }
}
