#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qce/cluster.hpp"
#include "qce/errors.hpp"
#include "test_helpers.hpp"

using qce::BigInt;
using qce::Cluster;
using qce::Complex;
using qce::IncompatibilityGraph;

namespace {

IncompatibilityGraph complete_graph(int n) {
  IncompatibilityGraph h(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) h.add_edge(i, j);
  return h;
}

IncompatibilityGraph path_graph(int n) {
  IncompatibilityGraph h(n);
  for (int i = 0; i + 1 < n; ++i) h.add_edge(i, i + 1);
  return h;
}

IncompatibilityGraph cycle_graph(int n) {
  IncompatibilityGraph h = path_graph(n);
  h.add_edge(0, n - 1);
  return h;
}

IncompatibilityGraph random_graph(int n, double p, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  IncompatibilityGraph h(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (dist(rng) < p) h.add_edge(i, j);
  return h;
}

}  // namespace

TEST_CASE("Ursell spot values") {
  CHECK(qce::ursell_bruteforce(IncompatibilityGraph(1)).numerator == 1);

  const auto k2 = qce::ursell_bruteforce(complete_graph(2));
  CHECK(k2.numerator == -1);
  CHECK(k2.to_double() == doctest::Approx(-0.5));

  const auto k3 = qce::ursell_fast(complete_graph(3));
  CHECK(k3.numerator == 2);
  CHECK(k3.to_double() == doctest::Approx(1.0 / 3.0));

  const auto p3 = qce::ursell_fast(path_graph(3));
  CHECK(p3.numerator == 1);
  CHECK(p3.to_double() == doctest::Approx(1.0 / 6.0));

  IncompatibilityGraph two_isolated(2);
  CHECK(qce::ursell_fast(two_isolated).numerator == 0);
  CHECK(qce::ursell_bruteforce(two_isolated).numerator == 0);
}

TEST_CASE("ursell_fast equals ursell_bruteforce on structured families") {
  for (int n = 1; n <= 8; ++n) {
    if (n <= 6)  // brute force walks 2^{n(n-1)/2} subsets on complete graphs
      CHECK(qce::ursell_fast(complete_graph(n)) ==
            qce::ursell_bruteforce(complete_graph(n)));
    CHECK(qce::ursell_fast(path_graph(n)) == qce::ursell_bruteforce(path_graph(n)));
    if (n >= 3)
      CHECK(qce::ursell_fast(cycle_graph(n)) == qce::ursell_bruteforce(cycle_graph(n)));
  }
}

TEST_CASE("ursell_fast equals ursell_bruteforce on random graphs") {
  for (unsigned seed = 0; seed < 40; ++seed) {
    const int n = 2 + static_cast<int>(seed % 7);
    const auto h = random_graph(n, 0.45, 1000 + seed);
    CHECK(qce::ursell_fast(h) == qce::ursell_bruteforce(h));
  }
}

TEST_CASE("complete-graph Ursell closed form (-1)^{n-1}/n") {
  for (int n = 2; n <= 9; ++n) {
    const auto u = qce::ursell_fast(complete_graph(n));
    BigInt expected = 1;
    for (int i = 2; i <= n - 1; ++i) expected *= i;  // (n-1)!
    if (n % 2 == 0) expected = -expected;
    CHECK(u.numerator == expected);
  }
}

TEST_CASE("guards on the Ursell routines") {
  CHECK_THROWS_AS(qce::ursell_bruteforce(complete_graph(13)), qce::resource_error);
  CHECK_THROWS_AS(qce::ursell_fast(IncompatibilityGraph(21)), qce::resource_error);
}

TEST_CASE("ordering multiplicity") {
  Cluster singleton;
  singleton.polymer_indices = {4};
  singleton.counts = {1};
  CHECK(qce::ordering_multiplicity(singleton) == 1);

  Cluster twice;
  twice.polymer_indices = {4};
  twice.counts = {2};
  CHECK(qce::ordering_multiplicity(twice) == 1);

  Cluster pair;
  pair.polymer_indices = {1, 2};
  pair.counts = {1, 1};
  CHECK(qce::ordering_multiplicity(pair) == 2);

  Cluster mixed;
  mixed.polymer_indices = {1, 2};
  mixed.counts = {2, 1};
  CHECK(qce::ordering_multiplicity(mixed) == 3);  // 3!/2!
}

TEST_CASE("clusters of the single-edge model up to size 3") {
  const auto model = qce_test::single_edge_zz();
  const auto polymers = qce::enumerate_polymers(model, 2);
  REQUIRE(polymers.size() == 2);  // multiplicities 1 and 2
  const auto clusters = qce::enumerate_clusters(polymers, 3);
  // {gamma1}, {gamma2}, {gamma1, gamma1}.
  REQUIRE(clusters.size() == 3);
  int singletons = 0, pairs = 0;
  for (const auto& c : clusters) {
    int occurrences = 0;
    for (int k : c.counts) occurrences += k;
    CHECK(c.total_size < 3);
    CHECK(c.graph.connected());
    if (occurrences == 1) ++singletons;
    if (occurrences == 2) ++pairs;
  }
  CHECK(singletons == 2);
  CHECK(pairs == 1);
}

TEST_CASE("compatible polymers never form a cluster") {
  // Two disjoint edges: only the two singleton clusters exist at m = 2.
  const auto zz = qce::kron(qce::pauli_z(), qce::pauli_z());
  const qce::SpinModel model(2, qce_test::index_names(4),
                             {{"0", "1"}, {"2", "3"}}, {zz, zz});
  const auto polymers = qce::enumerate_polymers(model, 1);
  const auto clusters = qce::enumerate_clusters(polymers, 2);
  CHECK(clusters.size() == 2);
  for (const auto& c : clusters) CHECK(c.counts == std::vector<int>{1});
}

TEST_CASE("no clusters below total size one") {
  const auto model = qce_test::single_edge_zz();
  const auto polymers = qce::enumerate_polymers(model, 1);
  CHECK(qce::enumerate_clusters(polymers, 1).empty());
}

TEST_CASE("choose_truncation_order") {
  CHECK(qce::choose_truncation_order(10, 1e-3) == 10);
  CHECK(qce::choose_truncation_order(1, 100.0) == 1);
  for (int v : {1, 2, 4, 8, 16, 32})
    CHECK(qce::choose_truncation_order(2 * v, 1e-3) -
              qce::choose_truncation_order(v, 1e-3) <=
          1);
  CHECK_THROWS_AS(qce::choose_truncation_order(4, 0.0), qce::domain_error);
  CHECK_THROWS_AS(qce::choose_truncation_order(0, 0.1), qce::domain_error);
}

TEST_CASE("truncated expansion vanishes at beta = 0") {
  const auto model = qce_test::random_delta3_model(5, 1, 2);
  const auto res = qce::truncated_expansion(model, Complex(0, 0), 6);
  CHECK(std::abs(res.t_m) == 0.0);
  CHECK(res.log_z.real() == doctest::Approx(5.0 * std::log(2.0)));
  CHECK(res.apriori_error == doctest::Approx(5.0 * std::exp(-6.0)));
}

TEST_CASE("single edge: t_3 = beta^2/2 exactly and tail converges to log cosh") {
  const auto model = qce_test::single_edge_zz();
  const double beta = 1.0 / std::exp(4.0);
  const auto poly = qce::expansion_polynomial(model, 13);
  const Complex t3 = poly.evaluate(Complex(beta, 0.0), 3);
  CHECK(std::abs(t3 - beta * beta / 2.0) <= 1e-12);

  const double target = std::log(std::cosh(beta));
  for (int m = 2; m <= 12; ++m) {
    const Complex tm = poly.evaluate(Complex(beta, 0.0), m);
    CHECK(std::abs(tm - target) <= 2.0 * std::exp(-m));
  }
}

TEST_CASE("engine equals the clusterwise route") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto model = qce_test::random_delta3_model(4 + seed % 2, 1, 40 + seed);
    const Complex beta = (seed % 2) ? Complex(0.008, 0.0) : Complex(0.005, 0.004);
    for (int m : {2, 3, 5}) {
      const auto fast = qce::truncated_expansion(model, beta, m);
      const auto slow = qce::truncated_expansion_clusterwise(model, beta, m);
      const double scale = std::max({1e-14, std::abs(fast.t_m), std::abs(slow.t_m)});
      CHECK(std::abs(fast.t_m - slow.t_m) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("engine equals the clusterwise route on the ZZ path") {
  const auto model = qce_test::path_zz(4);
  const Complex beta(1.0 / std::exp(4.0), 0.0);
  for (int m : {3, 4, 6}) {
    const auto fast = qce::truncated_expansion(model, beta, m);
    const auto slow = qce::truncated_expansion_clusterwise(model, beta, m);
    CHECK(std::abs(fast.t_m - slow.t_m) <=
          1e-10 * std::max(1.0, std::abs(fast.t_m)));
  }
}

TEST_CASE("t_m is invariant under vertex and edge relabeling") {
  const auto model = qce_test::random_delta3_model(6, 2, 17);
  // Rebuild with reversed vertex names and reversed edge order.
  std::vector<std::string> names = model.vertex_names();
  std::reverse(names.begin(), names.end());
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<qce::OperatorMatrix> phis;
  for (int e = model.num_edges() - 1; e >= 0; --e) {
    const auto [u, v] = model.edge(e);
    edges.emplace_back(model.vertex_names()[u], model.vertex_names()[v]);
    phis.push_back(model.interaction(e));
  }
  const qce::SpinModel relabeled(2, names, edges, phis);
  const Complex beta(0.006, 0.002);
  for (int m : {3, 5, 7}) {
    const auto a = qce::truncated_expansion(model, beta, m);
    const auto b = qce::truncated_expansion(relabeled, beta, m);
    CHECK(std::abs(a.t_m - b.t_m) <= 1e-11 * std::max(1.0, std::abs(a.t_m)));
  }
}

TEST_CASE("cluster tail sums over a fixed polymer decrease with the cutoff") {
  const auto model = qce_test::path_zz(3);
  const Complex beta(1.0 / std::exp(4.0), 0.0);
  const int cap = 8;
  const auto polymers = qce::enumerate_polymers(model, cap - 1);
  std::vector<Complex> weights(polymers.size());
  for (std::size_t i = 0; i < polymers.size(); ++i)
    weights[i] = qce::polymer_weight(polymers[i], model, beta);
  const auto clusters = qce::enumerate_clusters(polymers, cap);

  // Tail over clusters containing polymer 0, by total-size cutoff.
  std::vector<double> tail(cap + 1, 0.0);
  for (const auto& c : clusters) {
    bool contains = false;
    for (int idx : c.polymer_indices) contains |= (idx == 0);
    if (!contains) continue;
    Complex product(1.0, 0.0);
    for (std::size_t i = 0; i < c.polymer_indices.size(); ++i)
      for (int rep = 0; rep < c.counts[i]; ++rep)
        product *= weights[c.polymer_indices[i]];
    const double mag = std::abs(static_cast<double>(qce::ordering_multiplicity(c)) *
                                qce::ursell_fast(c.graph).to_double() * product);
    for (int m = 0; m <= c.total_size; ++m) tail[m] += mag;
  }
  for (int m = 1; m <= cap; ++m) CHECK(tail[m] <= tail[m - 1] + 1e-18);
  CHECK(tail[0] < 1.0);  // far inside the region the series is tiny
}

TEST_CASE("tail consistency bound between truncation orders") {
  for (std::uint64_t seed : {11ULL, 12ULL}) {
    const auto model = qce_test::random_delta3_model(5, 1, seed);
    const double bound = 1.0 / (std::exp(4.0) * model.max_degree());
    const auto poly = qce::expansion_polynomial(model, 9);
    const Complex beta(bound, 0.0);
    const int v = model.num_vertices();
    for (int m = 2; m < 8; ++m)
      for (int mp = m + 1; mp <= 8; ++mp) {
        const Complex tm = poly.evaluate(beta, m);
        const Complex tmp = poly.evaluate(beta, mp);
        CHECK(std::abs(tm - tmp) <= v * (std::exp(-m) + std::exp(-mp)) + 1e-12);
      }
  }
}

TEST_CASE("estimate enforces the region unless overridden") {
  const auto model = qce_test::single_edge_zz();
  const Complex outside(0.2, 0.0);
  CHECK_THROWS_WITH_AS(qce::estimate(model, outside, 1e-3),
                       doctest::Contains("1/(e^4*Delta)"), qce::domain_error);
  const auto res = qce::estimate(model, outside, 1e-3, /*override_region=*/true);
  CHECK_FALSE(res.in_region);
  CHECK_FALSE(res.rigorous);
}

TEST_CASE("estimate handles beta = 0 and edgeless graphs") {
  const auto model = qce_test::path_zz(3);
  const auto res = qce::estimate(model, Complex(0, 0), 1e-4);
  CHECK(res.log_z.real() == doctest::Approx(3.0 * std::log(2.0)));
  CHECK(std::abs(res.t_m) == 0.0);

  const qce::SpinModel edgeless(3, qce_test::index_names(2), {}, {});
  const auto res2 = qce::estimate(edgeless, Complex(5.0, 0.0), 1e-3);
  CHECK(res2.log_z.real() == doctest::Approx(2.0 * std::log(3.0)));
}

TEST_CASE("expansion respects the engine order cap") {
  const auto model = qce_test::single_edge_zz();
  CHECK_THROWS_AS(qce::expansion_polynomial(model, 21), qce::resource_error);
}

TEST_CASE("polynomial coefficients are prefixes of higher-order runs") {
  // Equal up to rounding: the power-trace chain pairs matrix powers
  // differently for different caps, so the low coefficients agree to machine
  // precision rather than bit-for-bit.
  const auto model = qce_test::random_delta3_model(5, 2, 61);
  const auto low = qce::expansion_polynomial(model, 6);
  const auto high = qce::expansion_polynomial(model, 10);
  for (int k = 1; k < 6; ++k)
    CHECK(std::abs(low.coeff[k] - high.coeff[k]) <=
          1e-13 * std::max(1.0, std::abs(high.coeff[k])));
}

TEST_CASE("thread count does not change the result bits") {
  const auto model = qce_test::random_delta3_model(6, 2, 23);
  const Complex beta(0.006, 0.001);
  const auto a = qce::truncated_expansion(model, beta, 8, 1);
  const auto b = qce::truncated_expansion(model, beta, 8, 4);
  CHECK(a.t_m.real() == b.t_m.real());
  CHECK(a.t_m.imag() == b.t_m.imag());
}
