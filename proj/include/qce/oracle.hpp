#pragma once

#include <optional>
#include <vector>

#include "qce/cluster.hpp"
#include "qce/model.hpp"

namespace qce {

// Full Hilbert-space dimension allowed for exact diagonalization.
inline constexpr std::size_t kOracleDimCap = 1u << 15;

struct ExactResult {
  Complex z;                       // Tr e^{-beta H}, unnormalized
  Complex log_z_principal;
  std::vector<double> eigenvalues;  // of H, ascending
  std::size_t dim = 0;              // d^{|X|}
};

// Sum of all edge interactions embedded into the full space.
OperatorMatrix build_hamiltonian(const SpinModel& model);

ExactResult exact_partition(const SpinModel& model, Complex beta);

// Re-evaluates z at another beta from a previous diagonalization.
ExactResult exact_partition_from_eigenvalues(std::vector<double> eigenvalues,
                                             Complex beta);

struct ComparisonReport {
  ExpansionResult estimated;
  ExactResult exact;
  double relative_error = 0.0;  // |exp(t_m) d^{|X|} / z - 1|
  double epsilon = 0.0;
  bool pass = false;
};

ComparisonReport compare(const SpinModel& model, Complex beta, double epsilon,
                         bool override_region = false, int threads = 1,
                         std::optional<int> order_override = std::nullopt);

}  // namespace qce
