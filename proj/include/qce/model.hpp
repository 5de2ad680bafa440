#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qce/operator_core.hpp"

namespace qce {

// Interaction graph with one Hermitian operator of norm <= 1 per edge and a
// uniform local dimension d. Immutable after construction.
class SpinModel {
public:
  // `edges` hold vertex names; orientation is kept as given (it fixes which
  // edge site is the first tensor factor of the interaction).
  // If `rescale` is set and some interaction has norm > 1, every interaction
  // is divided by the largest norm and the factor is recorded; otherwise
  // norms > 1 are rejected.
  SpinModel(int d, std::vector<std::string> vertex_names,
            std::vector<std::pair<std::string, std::string>> edges,
            std::vector<OperatorMatrix> interactions, bool rescale = false);

  int local_dim() const { return d_; }
  int num_vertices() const { return static_cast<int>(names_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<std::string>& vertex_names() const { return names_; }
  int vertex_index(const std::string& name) const;
  std::pair<int, int> edge(int e) const { return edges_[e]; }
  const OperatorMatrix& interaction(int e) const { return interactions_[e]; }
  int max_degree() const { return max_degree_; }
  int degree(int v) const { return degrees_[v]; }
  // Factor the input interactions were divided by (1 when untouched). The
  // caller rescales beta by the same factor to recover the original model.
  double rescale_factor() const { return rescale_factor_; }

  // Sorted vertex indices covered by the given edges.
  std::vector<int> support_vertices(const std::vector<int>& edge_ids) const;
  // Edge indices sharing at least one vertex with edge e (excluding e).
  const std::vector<int>& adjacent_edges(int e) const { return edge_adjacency_[e]; }
  SiteSpace full_space() const;
  std::string edge_label(int e) const;

private:
  int d_ = 0;
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<OperatorMatrix> interactions_;
  std::vector<int> degrees_;
  std::vector<std::vector<int>> edge_adjacency_;
  int max_degree_ = 0;
  double rescale_factor_ = 1.0;
};

// Inverse temperature against the convergence region |beta| <= 1/(e^4 Delta).
struct BetaSpec {
  Complex value;
  double radius_bound;  // infinite for edgeless graphs
  bool in_region;
};

BetaSpec validate_beta(const SpinModel& model, Complex beta);

// JSON interchange (schema documented in the README).
SpinModel load_model(const std::string& json_text);
SpinModel load_model_file(const std::string& path);
std::string emit_model(const SpinModel& model);

// Reproducible test instances. `name` in {tfim, xxz, random_hermitian},
// `graph` in {path, cycle, grid, random_regular}. Recognized parameters:
//   path/cycle: n; grid: rows, cols; random_regular: n, degree;
//   tfim: J, h; xxz: Jxy, Jz; random_hermitian: d.
SpinModel preset(const std::string& name, const std::string& graph,
                 const std::map<std::string, double>& params, std::uint64_t seed);

// Names and parameters of the available presets, for CLI listing.
std::string preset_catalog_json();

// Gaussian Hermitian matrix rescaled to operator norm exactly one,
// deterministic in the seed across platforms.
OperatorMatrix random_norm_one_hermitian(std::size_t dim, std::uint64_t seed);

// Single-qubit Pauli matrices and the Kronecker product, used by presets and
// closed-form test models.
OperatorMatrix pauli_x();
OperatorMatrix pauli_y();
OperatorMatrix pauli_z();
OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b);

}  // namespace qce
