#include "qce/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "qce/errors.hpp"

namespace qce {

OperatorMatrix build_hamiltonian(const SpinModel& model) {
  double dim = 1.0;
  for (int i = 0; i < model.num_vertices(); ++i) {
    dim *= model.local_dim();
    if (dim > static_cast<double>(kOracleDimCap))
      throw resource_error("oracle: full dimension d^|X| exceeds cap " +
                           std::to_string(kOracleDimCap));
  }
  const SiteSpace space = model.full_space();
  OperatorMatrix h(space.total_dim());
  for (int e = 0; e < model.num_edges(); ++e)
    h += tensor_embed(model.interaction(e), model.edge(e), space);
  return h;
}

ExactResult exact_partition(const SpinModel& model, Complex beta) {
  const OperatorMatrix h = build_hamiltonian(model);
  return exact_partition_from_eigenvalues(hermitian_eigenvalues(h), beta);
}

ExactResult exact_partition_from_eigenvalues(std::vector<double> eigenvalues,
                                             Complex beta) {
  ExactResult out;
  out.dim = eigenvalues.size();
  Complex z = 0.0;
  for (double lambda : eigenvalues) z += std::exp(-beta * lambda);
  out.z = z;
  out.log_z_principal = std::log(z);
  out.eigenvalues = std::move(eigenvalues);
  return out;
}

ComparisonReport compare(const SpinModel& model, Complex beta, double epsilon,
                         bool override_region, int threads,
                         std::optional<int> order_override) {
  ComparisonReport report;
  report.epsilon = epsilon;
  report.estimated = estimate(model, beta, epsilon, override_region, threads,
                              order_override);
  report.exact = exact_partition(model, beta);
  // exp(log_z_est)/z as exp(log_z_est - Log z); exp(Log z) = z exactly for
  // the principal branch, so the ratio is branch-free.
  const Complex ratio =
      std::exp(report.estimated.log_z - report.exact.log_z_principal);
  report.relative_error = std::abs(ratio - 1.0);
  report.pass = report.relative_error <= epsilon;
  return report;
}

}  // namespace qce
