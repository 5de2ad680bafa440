#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <vector>

#include "qce/model.hpp"
#include "qce/polymer.hpp"

namespace qce {

using BigInt = boost::multiprecision::cpp_int;

// Graph on the occurrences of a cluster; symmetric, no self-loops stored
// (every polymer is incompatible with itself, which the cluster machinery
// accounts for without an explicit loop edge).
struct IncompatibilityGraph {
  int n = 0;
  std::vector<std::uint32_t> adj;  // bitmask rows

  explicit IncompatibilityGraph(int vertices);
  void add_edge(int i, int j);
  bool has_edge(int i, int j) const { return (adj[i] >> j) & 1u; }
  bool connected() const;
};

// Exact value numerator / n! of the Ursell function.
struct UrsellValue {
  BigInt numerator;
  int n = 0;

  BigInt denominator() const;
  double to_double() const;
  bool operator==(const UrsellValue& other) const;
};

// Signed count of spanning connected edge subsets over all 2^|E| subsets.
// Guarded at n <= 12 vertices and |E| <= 30.
UrsellValue ursell_bruteforce(const IncompatibilityGraph& h);

// Subset recursion c(S) = a(S) - sum_{T proper subset of S, T containing
// min(S)} c(T) a(S\T), a(S) = [induced subgraph edgeless]; phi = c(V)/n!.
// Guarded at n <= 20.
UrsellValue ursell_fast(const IncompatibilityGraph& h);

// Canonical multiset of polymers with connected incompatibility graph.
struct Cluster {
  std::vector<int> polymer_indices;  // distinct, ascending
  std::vector<int> counts;           // occurrences per index, >= 1
  int total_size = 0;                // sum of polymer sizes over occurrences
  IncompatibilityGraph graph{1};     // over occurrences, canonical order
};

// Number of ordered tuples realizing the multiset: (sum k)! / prod k!.
std::uint64_t ordering_multiplicity(const Cluster& c);

// Every cluster with total size < max_total, each exactly once, sorted by the
// canonical occurrence sequence. Polymers must cover sizes up to max_total-1.
std::vector<Cluster> enumerate_clusters(const std::vector<Polymer>& polymers,
                                        int max_total);

struct ExpansionDiagnostics {
  std::uint64_t support_count = 0;   // connected edge sets considered
  std::uint64_t polymer_count = 0;   // polymers of size < m (exact count)
  std::uint64_t cluster_terms = 0;   // summed cluster terms (grouped in the
                                     // default engine, individual clusterwise)
  double wall_seconds = 0.0;
};

// Coefficients of the truncated expansion as a polynomial in beta:
// t_m(beta) = sum_{k=1}^{m-1} (-beta)^k coeff[k]. Beta-independent, so one
// pass serves every temperature and every order up to `order`.
struct ExpansionPolynomial {
  int order = 1;               // m used for the truncation
  std::vector<double> coeff;   // size order, coeff[0] = 0
  ExpansionDiagnostics diagnostics;

  Complex evaluate(Complex beta, int m) const;  // partial sum for m <= order
  Complex evaluate(Complex beta) const { return evaluate(beta, order); }
};

ExpansionPolynomial expansion_polynomial(const SpinModel& model, int m,
                                         int threads = 1);

struct ExpansionResult {
  Complex t_m;
  int order = 1;
  double apriori_error = 0.0;  // |V| e^{-m}
  Complex log_z;               // |X| log d + t_m
  Complex beta;
  bool in_region = true;
  bool rigorous = true;        // a-priori bound only holds inside the region
  ExpansionDiagnostics diagnostics;
};

// Default engine: regroups the cluster sum by polymer support (exact
// rearrangement) and evaluates the resulting polynomial at beta.
ExpansionResult truncated_expansion(const SpinModel& model, Complex beta, int m,
                                    int threads = 1);

// Literal route: enumerate polymers and clusters, then sum
// ordering_multiplicity * ursell * product of polymer weights in canonical
// order. Exponentially slower; retained as the cross-check of the engine.
ExpansionResult truncated_expansion_clusterwise(const SpinModel& model, Complex beta,
                                                int m);

// Smallest m with |V| e^{-m} <= eps', eps' = log(1+eps) (eps/2 for eps >= 1),
// i.e. m = max(1, ceil(log(|V|/eps'))).
int choose_truncation_order(int num_vertices, double epsilon);

// End-to-end estimator: region check (unless overridden), order selection,
// truncated expansion. Outside the region the a-priori bound is flagged
// non-rigorous.
ExpansionResult estimate(const SpinModel& model, Complex beta, double epsilon,
                         bool override_region = false, int threads = 1,
                         std::optional<int> order_override = std::nullopt);

}  // namespace qce
