#include "qce/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qce/errors.hpp"

namespace qce {

namespace {

constexpr double kNormSlack = 1e-9;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in [0,1) from the top 53 bits; identical across platforms.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double gaussian(std::mt19937_64& rng) {
  // Box-Muller; std::normal_distribution is implementation-defined.
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

SpinModel::SpinModel(int d, std::vector<std::string> vertex_names,
                     std::vector<std::pair<std::string, std::string>> edges,
                     std::vector<OperatorMatrix> interactions, bool rescale)
    : d_(d), names_(std::move(vertex_names)) {
  if (d_ < 2) throw domain_error("model: local dimension d must be >= 2");
  if (names_.empty()) throw domain_error("model: at least one vertex required");
  for (int i = 0; i < static_cast<int>(names_.size()); ++i) {
    if (!index_.emplace(names_[i], i).second)
      throw domain_error("model: duplicate vertex '" + names_[i] + "'");
  }
  if (edges.size() != interactions.size())
    throw domain_error("model: every edge needs exactly one interaction");

  const std::size_t d2 = static_cast<std::size_t>(d_) * d_;
  degrees_.assign(names_.size(), 0);
  std::set<std::pair<int, int>> seen;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& [un, vn] = edges[e];
    const std::string label = "edge (" + un + "," + vn + ")";
    auto iu = index_.find(un);
    auto iv = index_.find(vn);
    if (iu == index_.end()) throw domain_error(label + ": vertex '" + un + "' not declared");
    if (iv == index_.end()) throw domain_error(label + ": vertex '" + vn + "' not declared");
    const int u = iu->second, v = iv->second;
    if (u == v) throw domain_error(label + ": self-loops are not allowed");
    if (!seen.insert({std::min(u, v), std::max(u, v)}).second)
      throw domain_error(label + ": duplicate edge");
    if (interactions[e].dim() != d2)
      throw domain_error(label + ": interaction dimension " +
                         std::to_string(interactions[e].dim()) + " != d^2 = " +
                         std::to_string(d2));
    if (!interactions[e].is_hermitian())
      throw domain_error(label + ": interaction is not Hermitian (defect " +
                         std::to_string(interactions[e].hermiticity_defect()) + ")");
    edges_.push_back({u, v});
    ++degrees_[u];
    ++degrees_[v];
  }
  interactions_ = std::move(interactions);
  max_degree_ = degrees_.empty() ? 0 : *std::max_element(degrees_.begin(), degrees_.end());

  double max_norm = 0.0;
  int worst = -1;
  for (std::size_t e = 0; e < interactions_.size(); ++e) {
    const double nu = operator_norm(interactions_[e]);
    if (nu > max_norm) {
      max_norm = nu;
      worst = static_cast<int>(e);
    }
  }
  if (max_norm > 1.0 + kNormSlack) {
    if (!rescale)
      throw domain_error(edge_label(worst) + ": interaction norm " +
                         std::to_string(max_norm) +
                         " exceeds 1 (set rescale to divide by the max norm)");
    for (auto& phi : interactions_) phi *= Complex(1.0 / max_norm, 0.0);
    rescale_factor_ = max_norm;
  }

  edge_adjacency_.assign(edges_.size(), {});
  std::vector<std::vector<int>> at_vertex(names_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    at_vertex[edges_[e].first].push_back(static_cast<int>(e));
    at_vertex[edges_[e].second].push_back(static_cast<int>(e));
  }
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    std::set<int> adj;
    for (int v : {edges_[e].first, edges_[e].second})
      for (int other : at_vertex[v])
        if (other != static_cast<int>(e)) adj.insert(other);
    edge_adjacency_[e].assign(adj.begin(), adj.end());
  }
}

int SpinModel::vertex_index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw domain_error("model: unknown vertex '" + name + "'");
  return it->second;
}

std::vector<int> SpinModel::support_vertices(const std::vector<int>& edge_ids) const {
  std::vector<int> verts;
  for (int e : edge_ids) {
    verts.push_back(edges_[e].first);
    verts.push_back(edges_[e].second);
  }
  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  return verts;
}

SiteSpace SpinModel::full_space() const {
  std::vector<int> sites(names_.size());
  for (std::size_t i = 0; i < sites.size(); ++i) sites[i] = static_cast<int>(i);
  return SiteSpace(std::move(sites), d_);
}

std::string SpinModel::edge_label(int e) const {
  return "edge (" + names_[edges_[e].first] + "," + names_[edges_[e].second] + ")";
}

BetaSpec validate_beta(const SpinModel& model, Complex beta) {
  const int delta = model.max_degree();
  if (delta == 0) {
    // Edgeless graph: Z = d^{|X|} for every beta, nothing to bound.
    return {beta, std::numeric_limits<double>::infinity(), true};
  }
  const double bound = 1.0 / (std::exp(4.0) * static_cast<double>(delta));
  return {beta, bound, std::abs(beta) <= bound};
}

namespace {

using nlohmann::json;

OperatorMatrix matrix_from_json(const json& phi, std::size_t expect_dim,
                                const std::string& where) {
  if (!phi.is_object() || !phi.contains("dim") || !phi.contains("re") || !phi.contains("im"))
    throw domain_error(where + ": phi must be an object with dim, re, im");
  const std::size_t dim = phi.at("dim").get<std::size_t>();
  if (dim != expect_dim)
    throw domain_error(where + ": phi.dim " + std::to_string(dim) + " != d^2 = " +
                       std::to_string(expect_dim));
  const auto& re = phi.at("re");
  const auto& im = phi.at("im");
  if (!re.is_array() || re.size() != dim || !im.is_array() || im.size() != dim)
    throw domain_error(where + ": re/im must be dim x dim arrays");
  OperatorMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const auto& rrow = re.at(i);
    const auto& irow = im.at(i);
    if (!rrow.is_array() || rrow.size() != dim || !irow.is_array() || irow.size() != dim)
      throw domain_error(where + ": re/im must be dim x dim arrays");
    for (std::size_t j = 0; j < dim; ++j)
      m(i, j) = Complex(rrow.at(j).get<double>(), irow.at(j).get<double>());
  }
  return m;
}

}  // namespace

SpinModel load_model(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& ex) {
    throw domain_error(std::string("model: invalid JSON: ") + ex.what());
  }
  try {
    if (!doc.is_object()) throw domain_error("model: document must be a JSON object");
    for (const auto& key : {"d", "vertices", "edges"})
      if (!doc.contains(key))
        throw domain_error(std::string("model: missing required field '") + key + "'");
    const int d = doc.at("d").get<int>();
    if (d < 2) throw domain_error("model: d must be >= 2");
    std::vector<std::string> vertices;
    for (const auto& v : doc.at("vertices")) {
      if (!v.is_string()) throw domain_error("model: vertices must be strings");
      vertices.push_back(v.get<std::string>());
    }
    const std::size_t d2 = static_cast<std::size_t>(d) * d;
    std::vector<std::pair<std::string, std::string>> edges;
    std::vector<OperatorMatrix> interactions;
    std::size_t idx = 0;
    for (const auto& e : doc.at("edges")) {
      const std::string where = "edges[" + std::to_string(idx) + "]";
      if (!e.is_object() || !e.contains("u") || !e.contains("v") || !e.contains("phi"))
        throw domain_error(where + ": each edge needs u, v, phi");
      edges.emplace_back(e.at("u").get<std::string>(), e.at("v").get<std::string>());
      interactions.push_back(matrix_from_json(e.at("phi"), d2, where));
      ++idx;
    }
    const bool rescale = doc.value("rescale", false);
    return SpinModel(d, std::move(vertices), std::move(edges), std::move(interactions),
                     rescale);
  } catch (const json::exception& ex) {
    throw domain_error(std::string("model: malformed document: ") + ex.what());
  }
}

SpinModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw domain_error("model: cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_model(buf.str());
}

std::string emit_model(const SpinModel& model) {
  json doc;
  doc["d"] = model.local_dim();
  doc["vertices"] = model.vertex_names();
  json edges = json::array();
  const std::size_t d2 =
      static_cast<std::size_t>(model.local_dim()) * model.local_dim();
  for (int e = 0; e < model.num_edges(); ++e) {
    const auto [u, v] = model.edge(e);
    json re = json::array(), im = json::array();
    const auto& phi = model.interaction(e);
    for (std::size_t i = 0; i < d2; ++i) {
      json rrow = json::array(), irow = json::array();
      for (std::size_t j = 0; j < d2; ++j) {
        rrow.push_back(phi(i, j).real());
        irow.push_back(phi(i, j).imag());
      }
      re.push_back(std::move(rrow));
      im.push_back(std::move(irow));
    }
    edges.push_back({{"u", model.vertex_names()[u]},
                     {"v", model.vertex_names()[v]},
                     {"phi", {{"dim", d2}, {"re", std::move(re)}, {"im", std::move(im)}}}});
  }
  doc["edges"] = std::move(edges);
  return doc.dump(2);
}

OperatorMatrix pauli_x() {
  OperatorMatrix m(2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

OperatorMatrix pauli_y() {
  OperatorMatrix m(2);
  m(0, 1) = Complex(0.0, -1.0);
  m(1, 0) = Complex(0.0, 1.0);
  return m;
}

OperatorMatrix pauli_z() {
  OperatorMatrix m(2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b) {
  const std::size_t na = a.dim(), nb = b.dim();
  OperatorMatrix out(na * nb);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex(0.0)) continue;
      for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t l = 0; l < nb; ++l)
          out(i * nb + k, j * nb + l) = aij * b(k, l);
    }
  return out;
}

OperatorMatrix random_norm_one_hermitian(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed));
  OperatorMatrix a(dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      a(i, j) = Complex(gaussian(rng), gaussian(rng));
  OperatorMatrix h(dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      h(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
  const double nu = operator_norm(h);
  if (nu == 0.0) {
    // Vanishing draw (measure zero): fall back to a diagonal involution.
    for (std::size_t i = 0; i < dim; ++i) h(i, i) = (i % 2 == 0) ? 1.0 : -1.0;
    return h;
  }
  h *= Complex(1.0 / nu, 0.0);
  return h;
}

namespace {

struct GraphSpec {
  std::vector<std::string> names;
  std::vector<std::pair<std::string, std::string>> edges;
};

double get_param(const std::map<std::string, double>& params, const std::string& key,
                 double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

int get_int_param(const std::map<std::string, double>& params, const std::string& key,
                  int fallback) {
  const double v = get_param(params, key, static_cast<double>(fallback));
  const int n = static_cast<int>(std::llround(v));
  if (std::abs(v - n) > 1e-9)
    throw domain_error("preset: parameter '" + key + "' must be an integer");
  return n;
}

GraphSpec build_graph(const std::string& graph, const std::map<std::string, double>& params,
                      std::uint64_t seed) {
  GraphSpec g;
  auto name = [](int i) { return std::to_string(i); };
  if (graph == "path") {
    const int n = get_int_param(params, "n", 2);
    if (n < 1) throw domain_error("preset: path needs n >= 1");
    for (int i = 0; i < n; ++i) g.names.push_back(name(i));
    for (int i = 0; i + 1 < n; ++i) g.edges.emplace_back(name(i), name(i + 1));
  } else if (graph == "cycle") {
    const int n = get_int_param(params, "n", 3);
    if (n < 3) throw domain_error("preset: cycle needs n >= 3");
    for (int i = 0; i < n; ++i) g.names.push_back(name(i));
    for (int i = 0; i < n; ++i) g.edges.emplace_back(name(i), name((i + 1) % n));
  } else if (graph == "grid") {
    const int rows = get_int_param(params, "rows", 2);
    const int cols = get_int_param(params, "cols", 2);
    if (rows < 1 || cols < 1) throw domain_error("preset: grid needs rows, cols >= 1");
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) g.names.push_back(name(r * cols + c));
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        if (c + 1 < cols) g.edges.emplace_back(name(r * cols + c), name(r * cols + c + 1));
        if (r + 1 < rows) g.edges.emplace_back(name(r * cols + c), name((r + 1) * cols + c));
      }
  } else if (graph == "random_regular") {
    const int n = get_int_param(params, "n", 4);
    const int degree = get_int_param(params, "degree", 3);
    if (n < 2 || degree < 1 || degree >= n || (n * degree) % 2 != 0)
      throw domain_error("preset: random_regular needs 1 <= degree < n and n*degree even");
    for (int i = 0; i < n; ++i) g.names.push_back(name(i));
    // Configuration model with rejection; deterministic in the seed.
    for (std::uint64_t attempt = 0; attempt < 5000; ++attempt) {
      std::mt19937_64 rng(splitmix64(seed * 1000003ULL + attempt));
      std::vector<int> stubs;
      for (int v = 0; v < n; ++v)
        for (int k = 0; k < degree; ++k) stubs.push_back(v);
      for (std::size_t i = stubs.size(); i > 1; --i)
        std::swap(stubs[i - 1], stubs[rng() % i]);
      std::set<std::pair<int, int>> used;
      bool ok = true;
      for (std::size_t i = 0; i + 1 < stubs.size() && ok; i += 2) {
        const int u = stubs[i], v = stubs[i + 1];
        if (u == v || !used.insert({std::min(u, v), std::max(u, v)}).second) ok = false;
      }
      if (!ok) continue;
      for (const auto& [u, v] : used) g.edges.emplace_back(name(u), name(v));
      return g;
    }
    throw domain_error("preset: random_regular pairing failed; try another seed");
  } else {
    throw domain_error("preset: unknown graph '" + graph + "'");
  }
  return g;
}

}  // namespace

SpinModel preset(const std::string& name, const std::string& graph,
                 const std::map<std::string, double>& params, std::uint64_t seed) {
  GraphSpec g = build_graph(graph, params, seed);
  int d = 2;
  std::vector<OperatorMatrix> interactions;
  if (name == "tfim") {
    const double j = get_param(params, "J", 1.0);
    const double h = get_param(params, "h", 0.0);
    const OperatorMatrix id2 = OperatorMatrix::identity(2);
    OperatorMatrix term = Complex(j, 0.0) * kron(pauli_z(), pauli_z()) +
                          Complex(h / 2.0, 0.0) * (kron(pauli_x(), id2) + kron(id2, pauli_x()));
    interactions.assign(g.edges.size(), term);
  } else if (name == "xxz") {
    const double jxy = get_param(params, "Jxy", 1.0);
    const double jz = get_param(params, "Jz", 1.0);
    OperatorMatrix term = Complex(jxy, 0.0) * (kron(pauli_x(), pauli_x()) +
                                               kron(pauli_y(), pauli_y())) +
                          Complex(jz, 0.0) * kron(pauli_z(), pauli_z());
    interactions.assign(g.edges.size(), term);
  } else if (name == "random_hermitian") {
    d = get_int_param(params, "d", 2);
    if (d < 2) throw domain_error("preset: random_hermitian needs d >= 2");
    const std::size_t d2 = static_cast<std::size_t>(d) * d;
    for (std::size_t e = 0; e < g.edges.size(); ++e)
      interactions.push_back(
          random_norm_one_hermitian(d2, splitmix64(seed) ^ splitmix64(e + 1)));
  } else {
    throw domain_error("preset: unknown preset '" + name + "'");
  }
  return SpinModel(d, std::move(g.names), std::move(g.edges), std::move(interactions),
                   /*rescale=*/true);
}

std::string preset_catalog_json() {
  nlohmann::json doc;
  doc["presets"] = {
      {{"name", "tfim"},
       {"params", {"J", "h"}},
       {"description", "J Z(x)Z + (h/2)(X(x)I + I(x)X) per edge, rescaled to norm <= 1"}},
      {{"name", "xxz"},
       {"params", {"Jxy", "Jz"}},
       {"description", "Jxy (XX + YY) + Jz ZZ per edge, rescaled to norm <= 1"}},
      {{"name", "random_hermitian"},
       {"params", {"d"}},
       {"description", "seeded Gaussian Hermitian edge terms with norm exactly 1"}}};
  doc["graphs"] = {
      {{"name", "path"}, {"params", {"n"}}},
      {{"name", "cycle"}, {"params", {"n"}}},
      {{"name", "grid"}, {"params", {"rows", "cols"}}},
      {{"name", "random_regular"}, {"params", {"n", "degree"}}}};
  return doc.dump(2);
}

}  // namespace qce
