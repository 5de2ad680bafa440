#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "qce/errors.hpp"
#include "qce/model.hpp"
#include "test_helpers.hpp"

using nlohmann::json;
using qce::Complex;
using qce::OperatorMatrix;

namespace {

json matrix_json(const OperatorMatrix& m) {
  json re = json::array(), im = json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    json rrow = json::array(), irow = json::array();
    for (std::size_t j = 0; j < m.dim(); ++j) {
      rrow.push_back(m(i, j).real());
      irow.push_back(m(i, j).imag());
    }
    re.push_back(rrow);
    im.push_back(irow);
  }
  return {{"dim", m.dim()}, {"re", re}, {"im", im}};
}

json single_edge_doc(const OperatorMatrix& phi) {
  return {{"d", 2},
          {"vertices", {"a", "b"}},
          {"edges", {{{"u", "a"}, {"v", "b"}, {"phi", matrix_json(phi)}}}}};
}

}  // namespace

TEST_CASE("load_model accepts the smallest valid document") {
  const auto zz = qce::kron(qce::pauli_z(), qce::pauli_z());
  const auto model = qce::load_model(single_edge_doc(zz).dump());
  CHECK(model.num_vertices() == 2);
  CHECK(model.num_edges() == 1);
  CHECK(model.max_degree() == 1);
  CHECK(model.local_dim() == 2);
  CHECK(model.rescale_factor() == 1.0);
}

TEST_CASE("load_model rescales over-norm interactions only when asked") {
  auto big = qce::kron(qce::pauli_z(), qce::pauli_z());
  big *= Complex(2.0, 0.0);
  auto doc = single_edge_doc(big);

  CHECK_THROWS_WITH_AS(qce::load_model(doc.dump()),
                       doctest::Contains("edge (a,b)"), qce::domain_error);

  doc["rescale"] = true;
  const auto model = qce::load_model(doc.dump());
  CHECK(model.rescale_factor() == doctest::Approx(2.0));
  CHECK(qce::operator_norm(model.interaction(0)) == doctest::Approx(1.0));
}

TEST_CASE("load_model rejects a non-Hermitian interaction naming the edge") {
  OperatorMatrix bad(4);
  bad(0, 1) = 1.0;  // missing conjugate partner
  CHECK_THROWS_WITH_AS(qce::load_model(single_edge_doc(bad).dump()),
                       doctest::Contains("not Hermitian"), qce::domain_error);
}

TEST_CASE("load_model rejects structural defects with locations") {
  const auto zz = qce::kron(qce::pauli_z(), qce::pauli_z());
  auto doc = single_edge_doc(zz);

  SUBCASE("dangling vertex") {
    doc["edges"][0]["v"] = "zz";
    CHECK_THROWS_WITH_AS(qce::load_model(doc.dump()), doctest::Contains("zz"),
                         qce::domain_error);
  }
  SUBCASE("self loop") {
    doc["edges"][0]["v"] = "a";
    CHECK_THROWS_AS(qce::load_model(doc.dump()), qce::domain_error);
  }
  SUBCASE("duplicate edge") {
    doc["edges"].push_back(doc["edges"][0]);
    CHECK_THROWS_WITH_AS(qce::load_model(doc.dump()), doctest::Contains("duplicate"),
                         qce::domain_error);
  }
  SUBCASE("wrong matrix dimension") {
    doc["edges"][0]["phi"] = matrix_json(qce::pauli_z());
    CHECK_THROWS_AS(qce::load_model(doc.dump()), qce::domain_error);
  }
  SUBCASE("missing field") {
    doc.erase("vertices");
    CHECK_THROWS_AS(qce::load_model(doc.dump()), qce::domain_error);
  }
  SUBCASE("invalid JSON") {
    CHECK_THROWS_AS(qce::load_model("{not json"), qce::domain_error);
  }
}

TEST_CASE("emit/load round trip is bit exact") {
  const auto model = qce_test::random_delta3_model(5, 2, 42);
  const std::string emitted = qce::emit_model(model);
  const auto reloaded = qce::load_model(emitted);
  CHECK(qce::emit_model(reloaded) == emitted);
  REQUIRE(reloaded.num_edges() == model.num_edges());
  for (int e = 0; e < model.num_edges(); ++e) {
    CHECK(reloaded.edge(e) == model.edge(e));
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        CHECK(reloaded.interaction(e)(i, j) == model.interaction(e)(i, j));
  }
}

TEST_CASE("tfim preset degenerates to Z(x)Z at h = 0") {
  const auto model = qce::preset("tfim", "path", {{"n", 2}, {"J", 1}, {"h", 0}}, 0);
  REQUIRE(model.num_edges() == 1);
  const auto zz = qce::kron(qce::pauli_z(), qce::pauli_z());
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(model.interaction(0)(i, j) == zz(i, j));
}

TEST_CASE("random_hermitian preset is deterministic per seed") {
  const auto a = qce::preset("random_hermitian", "cycle", {{"n", 4}}, 7);
  const auto b = qce::preset("random_hermitian", "cycle", {{"n", 4}}, 7);
  CHECK(qce::emit_model(a) == qce::emit_model(b));
  const auto c = qce::preset("random_hermitian", "cycle", {{"n", 4}}, 8);
  CHECK(qce::emit_model(a) != qce::emit_model(c));
}

TEST_CASE("tfim cycle preset satisfies the norm bound") {
  const auto model = qce::preset("tfim", "cycle", {{"n", 3}, {"J", 1}, {"h", 1}}, 0);
  CHECK(model.max_degree() == 2);
  for (int e = 0; e < model.num_edges(); ++e)
    CHECK(qce::operator_norm(model.interaction(e)) <= 1.0 + 1e-9);
  CHECK(model.rescale_factor() > 1.0);  // J=1,h=1 term has norm above one
}

TEST_CASE("presets satisfy model invariants across seeds and shapes") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const auto model =
        qce::preset("random_hermitian", "random_regular",
                    {{"n", 6}, {"degree", 3}}, seed);
    CHECK(model.num_vertices() == 6);
    CHECK(model.max_degree() == 3);
    for (int e = 0; e < model.num_edges(); ++e) {
      CHECK(model.interaction(e).is_hermitian());
      CHECK(qce::operator_norm(model.interaction(e)) <= 1.0 + 1e-9);
    }
  }
  const auto grid = qce::preset("xxz", "grid", {{"rows", 2}, {"cols", 3}}, 1);
  CHECK(grid.num_vertices() == 6);
  CHECK(grid.num_edges() == 7);
  CHECK(grid.max_degree() == 3);
}

TEST_CASE("preset rejects unknown names and bad parameters") {
  CHECK_THROWS_AS(qce::preset("nope", "path", {{"n", 3}}, 0), qce::domain_error);
  CHECK_THROWS_AS(qce::preset("tfim", "blob", {{"n", 3}}, 0), qce::domain_error);
  CHECK_THROWS_AS(qce::preset("tfim", "cycle", {{"n", 2}}, 0), qce::domain_error);
  CHECK_THROWS_AS(
      qce::preset("random_hermitian", "random_regular", {{"n", 5}, {"degree", 3}}, 0),
      qce::domain_error);
}

TEST_CASE("validate_beta matches the Theorem bound") {
  const double e4 = std::exp(4.0);

  SUBCASE("boundary is inside for Delta = 1") {
    const auto spec = qce::validate_beta(qce_test::single_edge_zz(), Complex(1.0 / e4, 0));
    CHECK(spec.in_region);
    CHECK(spec.radius_bound == doctest::Approx(1.0 / e4));
  }
  SUBCASE("Delta = 3 at beta = 0.01 is outside") {
    const auto model = qce_test::random_delta3_model(6, 3, 5);
    REQUIRE(model.max_degree() == 3);
    const auto spec = qce::validate_beta(model, Complex(0.01, 0.0));
    CHECK(spec.radius_bound == doctest::Approx(1.0 / (3.0 * e4)));
    CHECK_FALSE(spec.in_region);
  }
  SUBCASE("beta = 0 is always inside") {
    CHECK(qce::validate_beta(qce_test::path_zz(4), Complex(0, 0)).in_region);
  }
  SUBCASE("edgeless graphs have no constraint") {
    const qce::SpinModel model(2, qce_test::index_names(3), {}, {});
    const auto spec = qce::validate_beta(model, Complex(100.0, 0.0));
    CHECK(spec.in_region);
    CHECK(std::isinf(spec.radius_bound));
  }
}

TEST_CASE("complex magnitude decides region membership") {
  const auto model = qce_test::single_edge_zz();
  const double bound = 1.0 / std::exp(4.0);
  CHECK(qce::validate_beta(model, Complex(0.0, bound)).in_region);
  CHECK_FALSE(qce::validate_beta(model, Complex(bound, bound)).in_region);
}
