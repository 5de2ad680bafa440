#pragma once

#include <vector>

#include "qce/model.hpp"
#include "qce/operator_core.hpp"

namespace qce {

// Multiset of edges whose support induces a connected subgraph.
struct Polymer {
  std::vector<int> support;       // sorted distinct edge indices
  std::vector<int> multiplicity;  // parallel to support, each >= 1
  int size = 0;                   // sum of multiplicities
  std::vector<int> vertices;      // sorted vertices of the support

  // Validates connectivity and multiplicities; edges may arrive unsorted.
  static Polymer make(const SpinModel& model, std::vector<int> edges,
                      std::vector<int> multiplicities);
};

// Dense dimension allowed for weight evaluation; supports whose site space
// exceeds this are rejected with a resource error.
inline constexpr std::size_t kWeightDimCap = 1024;

// Site space of a support, capped at kWeightDimCap.
SiteSpace support_space(const SpinModel& model, const std::vector<int>& edge_ids);

// Every edge set of size 1..max_edges whose induced subgraph is connected,
// each exactly once, in deterministic order (ascending root edge, then
// depth-first extension by boundary edges).
std::vector<std::vector<int>> enumerate_connected_edge_sets(const SpinModel& model,
                                                            int max_edges);

// All polymers with size <= max_size, grouped by support in enumeration
// order; per support, sizes ascend and multiplicity splits are lexicographic.
std::vector<Polymer> enumerate_polymers(const SpinModel& model, int max_size);

// True iff the supports share a vertex. Reflexive by construction.
bool incompatible(const Polymer& a, const Polymer& b);

// Polymer weight via the subset inclusion-exclusion formula:
//   w = beta^n / (n! prod m_e!) * sum_{A subset of occurrences, A nonempty}
//       (-1)^{|A|} tr_norm[(sum_{i in A} Phi_i)^n],
// traces normalized over the polymer's own support space.
Complex polymer_weight(const Polymer& polymer, const SpinModel& model, Complex beta);

// Independent route: explicit sum over permutations of the ordered operator
// product. Guarded at size <= 7; must agree with polymer_weight.
Complex polymer_weight_oracle(const Polymer& polymer, const SpinModel& model,
                              Complex beta);

inline constexpr int kOracleSizeCap = 7;

}  // namespace qce
