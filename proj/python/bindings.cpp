#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qce/cli.hpp"
#include "qce/cluster.hpp"
#include "qce/errors.hpp"
#include "qce/model.hpp"
#include "qce/oracle.hpp"
#include "qce/polymer.hpp"

namespace py = pybind11;

namespace {

qce::OperatorMatrix matrix_from_rows(
    const std::vector<std::vector<qce::Complex>>& rows) {
  const std::size_t dim = rows.size();
  qce::OperatorMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    if (rows[i].size() != dim)
      throw qce::domain_error("matrix rows must all have the same length");
    for (std::size_t j = 0; j < dim; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

qce::IncompatibilityGraph graph_from_edges(
    int n, const std::vector<std::pair<int, int>>& edges) {
  qce::IncompatibilityGraph h(n);
  for (const auto& [a, b] : edges) h.add_edge(a, b);
  return h;
}

py::dict diagnostics_dict(const qce::ExpansionDiagnostics& d) {
  py::dict out;
  out["supports"] = d.support_count;
  out["polymers"] = d.polymer_count;
  out["cluster_terms"] = d.cluster_terms;
  out["wall_seconds"] = d.wall_seconds;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Truncated cluster expansion for quantum spin partition functions";
  m.attr("__version__") = "0.1.0";

  py::register_exception<qce::domain_error>(m, "DomainError", PyExc_ValueError);
  py::register_exception<qce::resource_error>(m, "ResourceError", PyExc_RuntimeError);
  py::register_exception<qce::numeric_error>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<qce::SpinModel>(m, "SpinModel")
      .def_property_readonly("num_vertices", &qce::SpinModel::num_vertices)
      .def_property_readonly("num_edges", &qce::SpinModel::num_edges)
      .def_property_readonly("local_dim", &qce::SpinModel::local_dim)
      .def_property_readonly("max_degree", &qce::SpinModel::max_degree)
      .def_property_readonly("rescale_factor", &qce::SpinModel::rescale_factor)
      .def("vertex_names", &qce::SpinModel::vertex_names)
      .def("edge", &qce::SpinModel::edge)
      .def("__repr__", [](const qce::SpinModel& model) {
        std::ostringstream out;
        out << "SpinModel(d=" << model.local_dim() << ", vertices="
            << model.num_vertices() << ", edges=" << model.num_edges() << ")";
        return out.str();
      });

  py::class_<qce::BetaSpec>(m, "BetaSpec")
      .def_readonly("value", &qce::BetaSpec::value)
      .def_readonly("radius_bound", &qce::BetaSpec::radius_bound)
      .def_readonly("in_region", &qce::BetaSpec::in_region);

  py::class_<qce::Polymer>(m, "Polymer")
      .def_readonly("support", &qce::Polymer::support)
      .def_readonly("multiplicity", &qce::Polymer::multiplicity)
      .def_readonly("size", &qce::Polymer::size)
      .def_readonly("vertices", &qce::Polymer::vertices);

  py::class_<qce::ExpansionResult>(m, "ExpansionResult")
      .def_readonly("t_m", &qce::ExpansionResult::t_m)
      .def_readonly("order", &qce::ExpansionResult::order)
      .def_readonly("apriori_error", &qce::ExpansionResult::apriori_error)
      .def_readonly("log_z", &qce::ExpansionResult::log_z)
      .def_readonly("beta", &qce::ExpansionResult::beta)
      .def_readonly("in_region", &qce::ExpansionResult::in_region)
      .def_readonly("rigorous", &qce::ExpansionResult::rigorous)
      .def_property_readonly("diagnostics", [](const qce::ExpansionResult& r) {
        return diagnostics_dict(r.diagnostics);
      });

  py::class_<qce::ExpansionPolynomial>(m, "ExpansionPolynomial")
      .def_readonly("order", &qce::ExpansionPolynomial::order)
      .def_readonly("coeff", &qce::ExpansionPolynomial::coeff)
      .def(
          "evaluate",
          [](const qce::ExpansionPolynomial& poly, qce::Complex beta,
             std::optional<int> order) {
            return poly.evaluate(beta, order.value_or(poly.order));
          },
          py::arg("beta"), py::arg("order") = std::nullopt);

  py::class_<qce::ExactResult>(m, "ExactResult")
      .def_readonly("z", &qce::ExactResult::z)
      .def_readonly("log_z_principal", &qce::ExactResult::log_z_principal)
      .def_readonly("eigenvalues", &qce::ExactResult::eigenvalues)
      .def_readonly("dim", &qce::ExactResult::dim);

  py::class_<qce::ComparisonReport>(m, "ComparisonReport")
      .def_readonly("estimated", &qce::ComparisonReport::estimated)
      .def_readonly("exact", &qce::ComparisonReport::exact)
      .def_readonly("relative_error", &qce::ComparisonReport::relative_error)
      .def_readonly("epsilon", &qce::ComparisonReport::epsilon)
      .def_property_readonly("passed",
                             [](const qce::ComparisonReport& r) { return r.pass; });

  m.def("load_model", &qce::load_model, py::arg("json_text"));
  m.def("load_model_file", &qce::load_model_file, py::arg("path"));
  m.def("emit_model", &qce::emit_model, py::arg("model"));
  m.def("preset", &qce::preset, py::arg("name"), py::arg("graph"),
        py::arg("params") = std::map<std::string, double>{}, py::arg("seed") = 0);
  m.def("validate_beta", &qce::validate_beta, py::arg("model"), py::arg("beta"));
  m.def("choose_truncation_order", &qce::choose_truncation_order,
        py::arg("num_vertices"), py::arg("epsilon"));

  m.def("estimate", &qce::estimate, py::arg("model"), py::arg("beta"),
        py::arg("epsilon"), py::arg("override_region") = false, py::arg("threads") = 1,
        py::arg("order") = std::nullopt);
  m.def("truncated_expansion", &qce::truncated_expansion, py::arg("model"),
        py::arg("beta"), py::arg("order"), py::arg("threads") = 1);
  m.def("truncated_expansion_clusterwise", &qce::truncated_expansion_clusterwise,
        py::arg("model"), py::arg("beta"), py::arg("order"));
  m.def("expansion_polynomial", &qce::expansion_polynomial, py::arg("model"),
        py::arg("order"), py::arg("threads") = 1);

  m.def("exact_partition", &qce::exact_partition, py::arg("model"), py::arg("beta"));
  m.def("compare", &qce::compare, py::arg("model"), py::arg("beta"),
        py::arg("epsilon"), py::arg("override_region") = false, py::arg("threads") = 1,
        py::arg("order") = std::nullopt);

  m.def("enumerate_connected_edge_sets", &qce::enumerate_connected_edge_sets,
        py::arg("model"), py::arg("max_edges"));
  m.def("enumerate_polymers", &qce::enumerate_polymers, py::arg("model"),
        py::arg("max_size"));
  m.def("make_polymer", &qce::Polymer::make, py::arg("model"), py::arg("edges"),
        py::arg("multiplicities"));
  m.def("incompatible", &qce::incompatible, py::arg("a"), py::arg("b"));
  m.def("polymer_weight", &qce::polymer_weight, py::arg("polymer"), py::arg("model"),
        py::arg("beta"));
  m.def("polymer_weight_oracle", &qce::polymer_weight_oracle, py::arg("polymer"),
        py::arg("model"), py::arg("beta"));

  m.def(
      "ursell",
      [](int n, const std::vector<std::pair<int, int>>& edges) {
        return qce::ursell_fast(graph_from_edges(n, edges)).to_double();
      },
      py::arg("n"), py::arg("edges"),
      "Ursell function of the graph on n vertices with the given edges");
  m.def(
      "ursell_exact",
      [](int n, const std::vector<std::pair<int, int>>& edges, bool bruteforce) {
        const qce::IncompatibilityGraph h = graph_from_edges(n, edges);
        const qce::UrsellValue u =
            bruteforce ? qce::ursell_bruteforce(h) : qce::ursell_fast(h);
        return py::make_tuple(py::cast(u.numerator.str()), u.n);
      },
      py::arg("n"), py::arg("edges"), py::arg("bruteforce") = false,
      "Exact Ursell value as (numerator string, n); the value is numerator/n!");

  m.def(
      "hermitian_eigenvalues",
      [](const std::vector<std::vector<qce::Complex>>& rows) {
        return qce::hermitian_eigenvalues(matrix_from_rows(rows));
      },
      py::arg("matrix"));
  m.def(
      "operator_norm",
      [](const std::vector<std::vector<qce::Complex>>& rows) {
        return qce::operator_norm(matrix_from_rows(rows));
      },
      py::arg("matrix"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv;
        argv.push_back("qce");
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code =
            qce::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line interface; returns (code, out, err)");
}
