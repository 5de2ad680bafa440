#include "qce/polymer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "qce/errors.hpp"

namespace qce {

namespace {

std::string edge_list_label(const SpinModel& model, const std::vector<int>& edges) {
  std::ostringstream out;
  out << "{";
  for (std::size_t i = 0; i < edges.size(); ++i)
    out << (i ? "," : "") << model.edge_label(edges[i]);
  out << "}";
  return out.str();
}

bool edges_connected(const SpinModel& model, const std::vector<int>& edges) {
  if (edges.empty()) return false;
  std::vector<char> in_set(model.num_edges(), 0);
  for (int e : edges) in_set[e] = 1;
  std::vector<int> stack{edges[0]};
  std::vector<char> seen(model.num_edges(), 0);
  seen[edges[0]] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const int e = stack.back();
    stack.pop_back();
    for (int other : model.adjacent_edges(e)) {
      if (!in_set[other] || seen[other]) continue;
      seen[other] = 1;
      ++reached;
      stack.push_back(other);
    }
  }
  return reached == edges.size();
}

Complex complex_int_pow(Complex base, int n) {
  Complex out(1.0, 0.0);
  for (int i = 0; i < n; ++i) out *= base;
  return out;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double b = 1.0;
  for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
  return std::round(b);
}

// tr_norm[m^n] computed from a chain of powers; cheaper than n-1 multiplies
// because tr(m^k) = sum_ij (m^a)_ij (m^b)_ji with a+b = k.
double power_trace_norm(const OperatorMatrix& m, int n) {
  const std::size_t dim = m.dim();
  if (n == 1) return m.trace().real() / static_cast<double>(dim);
  const int half = (n + 1) / 2;
  std::vector<OperatorMatrix> powers;
  powers.reserve(half);
  powers.push_back(m);
  for (int i = 1; i < half; ++i) powers.push_back(powers.back() * m);
  const OperatorMatrix& a = powers[half - 1];
  const OperatorMatrix& b = powers[n - half - 1];
  Complex t = 0.0;
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) t += a(i, j) * b(j, i);
  return t.real() / static_cast<double>(dim);
}

}  // namespace

Polymer Polymer::make(const SpinModel& model, std::vector<int> edges,
                      std::vector<int> multiplicities) {
  if (edges.empty()) throw domain_error("polymer: support must be nonempty");
  if (edges.size() != multiplicities.size())
    throw domain_error("polymer: one multiplicity per support edge required");
  std::vector<std::size_t> order(edges.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return edges[a] < edges[b]; });
  Polymer p;
  for (std::size_t i : order) {
    if (edges[i] < 0 || edges[i] >= model.num_edges())
      throw domain_error("polymer: edge index out of range");
    if (!p.support.empty() && p.support.back() == edges[i])
      throw domain_error("polymer: duplicate support edge");
    if (multiplicities[i] < 1) throw domain_error("polymer: multiplicities must be >= 1");
    p.support.push_back(edges[i]);
    p.multiplicity.push_back(multiplicities[i]);
    p.size += multiplicities[i];
  }
  if (!edges_connected(model, p.support))
    throw domain_error("polymer: support " + edge_list_label(model, p.support) +
                       " does not induce a connected subgraph");
  p.vertices = model.support_vertices(p.support);
  return p;
}

SiteSpace support_space(const SpinModel& model, const std::vector<int>& edge_ids) {
  const std::vector<int> verts = model.support_vertices(edge_ids);
  double dim = 1.0;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    dim *= model.local_dim();
    if (dim > static_cast<double>(kWeightDimCap))
      throw resource_error("support " + edge_list_label(model, edge_ids) +
                           ": dense dimension exceeds cap " +
                           std::to_string(kWeightDimCap));
  }
  return SiteSpace(verts, model.local_dim());
}

std::vector<std::vector<int>> enumerate_connected_edge_sets(const SpinModel& model,
                                                            int max_edges) {
  if (max_edges < 1) throw domain_error("enumerate_connected_edge_sets: max_edges >= 1");
  std::vector<std::vector<int>> out;
  const int num_edges = model.num_edges();
  std::vector<int> current;

  // Each connected set is produced exactly once: its lowest edge is the root,
  // and every extension bans the boundary edges already tried at that level.
  std::function<void(std::vector<char>&)> grow = [&](std::vector<char>& banned) {
    out.push_back(current);
    std::sort(out.back().begin(), out.back().end());
    if (static_cast<int>(current.size()) == max_edges) return;
    std::vector<int> boundary;
    std::vector<char> in_current(num_edges, 0);
    for (int e : current) in_current[e] = 1;
    for (int e : current)
      for (int other : model.adjacent_edges(e))
        if (!in_current[other] && !banned[other]) boundary.push_back(other);
    std::sort(boundary.begin(), boundary.end());
    boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());
    std::vector<char> local = banned;
    for (int e : boundary) {
      current.push_back(e);
      grow(local);
      current.pop_back();
      local[e] = 1;
    }
  };

  for (int root = 0; root < num_edges; ++root) {
    std::vector<char> banned(num_edges, 0);
    for (int e = 0; e < root; ++e) banned[e] = 1;
    current.assign(1, root);
    grow(banned);
  }
  return out;
}

namespace {

void compositions_into(int total, int parts, std::vector<int>& scratch,
                       const std::function<void(const std::vector<int>&)>& sink) {
  if (parts == 1) {
    scratch.push_back(total);
    sink(scratch);
    scratch.pop_back();
    return;
  }
  for (int first = 1; first <= total - (parts - 1); ++first) {
    scratch.push_back(first);
    compositions_into(total - first, parts - 1, scratch, sink);
    scratch.pop_back();
  }
}

}  // namespace

std::vector<Polymer> enumerate_polymers(const SpinModel& model, int max_size) {
  if (max_size < 1) throw domain_error("enumerate_polymers: max_size >= 1");
  std::vector<Polymer> out;
  for (const auto& support : enumerate_connected_edge_sets(model, max_size)) {
    const int n = static_cast<int>(support.size());
    std::vector<int> scratch;
    for (int k = n; k <= max_size; ++k) {
      compositions_into(k, n, scratch, [&](const std::vector<int>& mult) {
        Polymer p;
        p.support = support;
        p.multiplicity = mult;
        p.size = k;
        p.vertices = model.support_vertices(support);
        out.push_back(std::move(p));
      });
    }
  }
  return out;
}

bool incompatible(const Polymer& a, const Polymer& b) {
  std::size_t i = 0, j = 0;
  while (i < a.vertices.size() && j < b.vertices.size()) {
    if (a.vertices[i] == b.vertices[j]) return true;
    if (a.vertices[i] < b.vertices[j])
      ++i;
    else
      ++j;
  }
  return false;
}

Complex polymer_weight(const Polymer& polymer, const SpinModel& model, Complex beta) {
  const int n = polymer.size;
  const int s = static_cast<int>(polymer.support.size());
  const SiteSpace space = support_space(model, polymer.support);

  std::vector<OperatorMatrix> embedded;
  embedded.reserve(s);
  for (int e : polymer.support)
    embedded.push_back(tensor_embed(model.interaction(e), model.edge(e), space));

  // The 2^n subsets of occurrence indices collapse onto count vectors
  // c <= multiplicity; each contributes with weight prod_e C(m_e, c_e).
  std::vector<int> count(s, 0);
  double sum = 0.0;
  while (true) {
    int pos = 0;
    while (pos < s && count[pos] == polymer.multiplicity[pos]) {
      count[pos] = 0;
      ++pos;
    }
    if (pos == s) break;
    ++count[pos];

    OperatorMatrix m(space.total_dim());
    int selected = 0;
    double ways = 1.0;
    for (int i = 0; i < s; ++i) {
      selected += count[i];
      ways *= binomial(polymer.multiplicity[i], count[i]);
      if (count[i] > 0) {
        OperatorMatrix scaled = embedded[i];
        scaled *= Complex(static_cast<double>(count[i]), 0.0);
        m += scaled;
      }
    }
    const double sign = (selected % 2 == 0) ? 1.0 : -1.0;
    sum += sign * ways * power_trace_norm(m, n);
  }

  double denom = factorial(n);
  for (int mult : polymer.multiplicity) denom *= factorial(mult);
  return complex_int_pow(beta, n) * sum / denom;
}

Complex polymer_weight_oracle(const Polymer& polymer, const SpinModel& model,
                              Complex beta) {
  const int n = polymer.size;
  if (n > kOracleSizeCap)
    throw resource_error("polymer_weight_oracle: size " + std::to_string(n) +
                         " exceeds cap " + std::to_string(kOracleSizeCap));
  const SiteSpace space = support_space(model, polymer.support);
  const int s = static_cast<int>(polymer.support.size());

  std::vector<OperatorMatrix> embedded;
  embedded.reserve(s);
  for (int e : polymer.support)
    embedded.push_back(tensor_embed(model.interaction(e), model.edge(e), space));

  // Sum of ordered products over all distinct edge sequences of the multiset;
  // identical permutations cancel the prod m_e! in the denominator.
  std::vector<int> remaining = polymer.multiplicity;
  Complex acc = 0.0;
  std::function<void(int, const OperatorMatrix&)> walk =
      [&](int depth, const OperatorMatrix& prefix) {
        if (depth == n) {
          acc += normalized_trace(prefix, space);
          return;
        }
        for (int i = 0; i < s; ++i) {
          if (remaining[i] == 0) continue;
          --remaining[i];
          walk(depth + 1, depth == 0 ? embedded[i] : prefix * embedded[i]);
          ++remaining[i];
        }
      };
  walk(0, OperatorMatrix::identity(space.total_dim()));
  return complex_int_pow(-beta, n) * acc / factorial(n);
}

}  // namespace qce
