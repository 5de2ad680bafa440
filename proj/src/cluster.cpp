#include "qce/cluster.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "qce/errors.hpp"

namespace qce {

namespace {

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

double factorial_d(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

IncompatibilityGraph::IncompatibilityGraph(int vertices) : n(vertices) {
  if (n < 1) throw domain_error("IncompatibilityGraph: at least one vertex");
  if (n > 32) throw resource_error("IncompatibilityGraph: more than 32 vertices");
  adj.assign(n, 0);
}

void IncompatibilityGraph::add_edge(int i, int j) {
  if (i < 0 || j < 0 || i >= n || j >= n)
    throw domain_error("incompatibility edge out of range");
  if (i == j) return;  // reflexivity is implicit
  adj[i] |= (1u << j);
  adj[j] |= (1u << i);
}

bool IncompatibilityGraph::connected() const {
  std::uint32_t seen = 1u;
  std::uint32_t frontier = 1u;
  const std::uint32_t all = (n == 32) ? ~0u : ((1u << n) - 1u);
  while (frontier) {
    std::uint32_t next = 0;
    for (int i = 0; i < n; ++i)
      if ((frontier >> i) & 1u) next |= adj[i];
    frontier = next & ~seen;
    seen |= frontier;
  }
  return seen == all;
}

BigInt UrsellValue::denominator() const {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double UrsellValue::to_double() const {
  return numerator.convert_to<double>() / denominator().convert_to<double>();
}

bool UrsellValue::operator==(const UrsellValue& other) const {
  return numerator * other.denominator() == other.numerator * denominator();
}

UrsellValue ursell_bruteforce(const IncompatibilityGraph& h) {
  if (h.n > 12) throw resource_error("ursell_bruteforce: more than 12 vertices");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < h.n; ++i)
    for (int j = i + 1; j < h.n; ++j)
      if (h.has_edge(i, j)) edges.emplace_back(i, j);
  if (edges.size() > 30) throw resource_error("ursell_bruteforce: more than 30 edges");

  long long signed_count = 0;
  const std::uint32_t subsets = 1u << edges.size();
  std::vector<int> parent(h.n);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::uint32_t mask = 0; mask < subsets; ++mask) {
    for (int v = 0; v < h.n; ++v) parent[v] = v;
    int components = h.n;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (!((mask >> e) & 1u)) continue;
      const int a = find(edges[e].first);
      const int b = find(edges[e].second);
      if (a != b) {
        parent[a] = b;
        --components;
      }
    }
    if (components == 1)
      signed_count += (std::popcount(mask) % 2 == 0) ? 1 : -1;
  }
  return {BigInt(signed_count), h.n};
}

namespace {

// Subset recursion for n! * phi(H): c(S) = a(S) - sum_{T proper subset of S
// containing min(S)} c(T) a(S\T), with a(S) = 1 iff H[S] has no edge. c(V)
// is the signed count of spanning connected edge subsets.
template <class Int>
Int ursell_numerator_recursive(const std::vector<std::uint32_t>& adj, int n) {
  const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1u);
  std::vector<char> a(static_cast<std::size_t>(full) + 1u);
  a[0] = 1;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    const int low = std::countr_zero(mask);
    const std::uint32_t rest = mask & (mask - 1);
    a[mask] = a[rest] && ((adj[low] & rest) == 0);
  }
  std::vector<Int> c(static_cast<std::size_t>(full) + 1u, Int(0));
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    const std::uint32_t lowbit = mask & (~mask + 1u);
    const std::uint32_t rest = mask ^ lowbit;
    Int value = a[mask] ? Int(1) : Int(0);
    if (rest != 0) {
      for (std::uint32_t sub = rest;; sub = (sub - 1) & rest) {
        if (sub != rest) {
          const std::uint32_t t = lowbit | sub;
          if (a[mask ^ t]) value -= c[t];
        }
        if (sub == 0) break;
      }
    }
    c[mask] = value;
  }
  return c[full];
}

}  // namespace

UrsellValue ursell_fast(const IncompatibilityGraph& h) {
  if (h.n > 20) throw resource_error("ursell_fast: more than 20 vertices");
  return {ursell_numerator_recursive<BigInt>(h.adj, h.n), h.n};
}

std::uint64_t ordering_multiplicity(const Cluster& c) {
  int total = 0;
  for (int k : c.counts) total += k;
  if (total > 20) throw resource_error("ordering_multiplicity: more than 20 occurrences");
  auto binom_u64 = [](int n, int k) {
    unsigned long long b = 1;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
  };
  std::uint64_t result = 1;
  int acc = 0;
  for (int k : c.counts) {
    acc += k;
    result *= binom_u64(acc, k);
  }
  return result;
}

std::vector<Cluster> enumerate_clusters(const std::vector<Polymer>& polymers,
                                        int max_total) {
  if (max_total < 1) throw domain_error("enumerate_clusters: max_total >= 1");
  const int count = static_cast<int>(polymers.size());
  std::set<std::vector<int>> seen;

  // Grown in any order that keeps the incompatibility graph touching, with
  // dedup on the canonical occurrence sequence; the greedy order alone can
  // miss clusters whose connectivity routes through later polymers.
  std::function<void(std::vector<int>&, int, int)> grow = [&](std::vector<int>& occ,
                                                              int total, int anchor) {
    if (!seen.insert(occ).second) return;
    for (int b = anchor; b < count; ++b) {
      if (total + polymers[b].size >= max_total) continue;
      bool touches = false;
      for (int idx : occ)
        if (incompatible(polymers[idx], polymers[b])) {
          touches = true;
          break;
        }
      if (!touches) continue;
      std::vector<int> extended = occ;
      extended.insert(std::upper_bound(extended.begin(), extended.end(), b), b);
      grow(extended, total + polymers[b].size, anchor);
    }
  };

  for (int anchor = 0; anchor < count; ++anchor) {
    if (polymers[anchor].size >= max_total) continue;
    std::vector<int> occ{anchor};
    grow(occ, polymers[anchor].size, anchor);
  }

  std::vector<Cluster> out;
  for (const auto& occ : seen) {
    Cluster c;
    c.graph = IncompatibilityGraph(static_cast<int>(occ.size()));
    for (std::size_t i = 0; i < occ.size(); ++i) {
      for (std::size_t j = i + 1; j < occ.size(); ++j)
        if (incompatible(polymers[occ[i]], polymers[occ[j]]))
          c.graph.add_edge(static_cast<int>(i), static_cast<int>(j));
      if (c.polymer_indices.empty() || c.polymer_indices.back() != occ[i]) {
        c.polymer_indices.push_back(occ[i]);
        c.counts.push_back(1);
      } else {
        ++c.counts.back();
      }
      c.total_size += polymers[occ[i]].size;
    }
    if (!c.graph.connected()) continue;  // acceptance test for the growth
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Expansion engine.
//
// The cluster sum is regrouped by polymer support: for a support S the
// weights of all polymers on S with total size k collapse to
//   W_S[k] = (-beta)^k / k! * sum_{R subset of S} (-1)^{|S \ R|} ptr_k(R),
// with ptr_k(R) the normalized trace of (sum_{e in R} Phi(e))^k. A cluster
// then becomes a multiset of supports, its weight the coefficient of the
// polynomial product of the W_S, and its Ursell factor is unchanged because
// the incompatibility graph only depends on supports. The grouped sum is a
// term-for-term rearrangement of the clusterwise sum, beta entering solely
// through (-beta)^k.
// ---------------------------------------------------------------------------

namespace {

constexpr int kEngineOrderCap = 20;

struct Poly {
  std::vector<double> c;  // degree 0..cap
  int low = 0;            // lowest possibly nonzero degree; > cap means zero
};

Poly poly_mul(const Poly& a, const std::vector<double>& what, int what_low, int cap) {
  Poly out;
  out.low = a.low + what_low;
  out.c.assign(cap + 1, 0.0);
  if (out.low > cap) return out;
  for (int i = a.low; i <= cap - what_low; ++i) {
    const double ai = a.c[i];
    if (ai == 0.0) continue;
    for (int j = what_low; i + j <= cap; ++j) out.c[i + j] += ai * what[j];
  }
  return out;
}

struct SupportInfo {
  std::vector<int> verts;    // sorted vertex indices
  int min_size = 0;          // edge count = smallest polymer size
  std::vector<double> what;  // W-hat coefficients, index 0..cap
};

// phi * (ordered multiplicity) for the occurrence graph obtained by taking
// r_i copies of each chosen support: numerator / prod r_i! exactly, since
// the tuple count (sum r)!/prod r! cancels the 1/(sum r)! inside phi.
double ursell_occurrence_factor(const std::vector<std::uint32_t>& chosen_adj,
                                const std::vector<int>& r) {
  const int p = static_cast<int>(r.size());
  int j = 0;
  for (int v : r) j += v;
  if (j == 1) return 1.0;

  std::vector<std::uint32_t> rows(j, 0);
  std::vector<int> offset(p);
  int at = 0;
  for (int i = 0; i < p; ++i) {
    offset[i] = at;
    at += r[i];
  }
  for (int i = 0; i < p; ++i)
    for (int a = 0; a < r[i]; ++a) {
      const int row = offset[i] + a;
      for (int b = 0; b < r[i]; ++b)
        if (a != b) rows[row] |= (1u << (offset[i] + b));
      for (int k = 0; k < p; ++k) {
        if (k == i || !((chosen_adj[i] >> k) & 1u)) continue;
        for (int b = 0; b < r[k]; ++b) rows[row] |= (1u << (offset[k] + b));
      }
    }

  double denom = 1.0;
  for (int v : r) denom *= factorial_d(v);

  const std::uint32_t full = (1u << j) - 1u;
  bool complete = true;
  for (int i = 0; i < j && complete; ++i)
    complete = (rows[i] | (1u << i)) == full;
  if (complete) {
    const double num = ((j - 1) % 2 == 0 ? 1.0 : -1.0) * factorial_d(j - 1);
    return num / denom;
  }
  if (j <= 11) {
    // Values are bounded by 2^{edges(H)} <= 2^55, safe in 64 bits.
    const long long num = ursell_numerator_recursive<long long>(rows, j);
    return static_cast<double>(num) / denom;
  }
  const BigInt num = ursell_numerator_recursive<BigInt>(rows, j);
  return num.convert_to<double>() / denom;
}

}  // namespace

Complex ExpansionPolynomial::evaluate(Complex beta, int m) const {
  if (m < 1 || m > order) throw domain_error("ExpansionPolynomial: order out of range");
  Complex t = 0.0;
  Complex power = 1.0;
  for (int k = 1; k < m; ++k) {
    power *= -beta;
    t += power * coeff[k];
  }
  return t;
}

ExpansionPolynomial expansion_polynomial(const SpinModel& model, int m, int threads) {
  if (m < 1) throw domain_error("expansion order m must be >= 1");
  if (m > kEngineOrderCap)
    throw resource_error("expansion order " + std::to_string(m) + " exceeds engine cap " +
                         std::to_string(kEngineOrderCap));
  const auto start = std::chrono::steady_clock::now();
  const int cap = m - 1;  // largest cluster size contributing

  ExpansionPolynomial poly;
  poly.order = m;
  poly.coeff.assign(m, 0.0);

  if (cap < 1 || model.num_edges() == 0) {
    poly.diagnostics.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return poly;
  }

  const auto sets = enumerate_connected_edge_sets(model, cap);
  const int num_sets = static_cast<int>(sets.size());
  std::map<std::vector<int>, int> set_index;
  for (int i = 0; i < num_sets; ++i) set_index.emplace(sets[i], i);

  // Normalized power sums of the edge-sum operator per connected set, all
  // orders at once from a half-length power chain.
  std::vector<std::vector<double>> ptr(num_sets);
  parallel_for(num_sets, threads, [&](int i) {
    const SiteSpace space = support_space(model, sets[i]);
    const std::size_t dim = space.total_dim();
    OperatorMatrix msum(dim);
    for (int e : sets[i])
      msum += tensor_embed(model.interaction(e), model.edge(e), space);
    const int half = (cap + 1) / 2;
    std::vector<OperatorMatrix> powers;
    powers.reserve(half);
    powers.push_back(msum);
    for (int k = 1; k < half; ++k) powers.push_back(powers.back() * msum);
    auto& row = ptr[i];
    row.assign(cap + 1, 0.0);
    row[0] = 1.0;
    for (int k = 1; k <= cap; ++k) {
      if (k <= half) {
        row[k] = powers[k - 1].trace().real() / static_cast<double>(dim);
      } else {
        const OperatorMatrix& a = powers[(k + 1) / 2 - 1];
        const OperatorMatrix& b = powers[k / 2 - 1];
        Complex t = 0.0;
        for (std::size_t x = 0; x < dim; ++x)
          for (std::size_t y = 0; y < dim; ++y) t += a(x, y) * b(y, x);
        row[k] = t.real() / static_cast<double>(dim);
      }
    }
  });

  const int stride = cap + 1;
  std::vector<double> binom(static_cast<std::size_t>(stride) * stride, 0.0);
  for (int n = 0; n <= cap; ++n) {
    binom[n * stride] = 1.0;
    for (int k = 1; k <= n; ++k)
      binom[n * stride + k] = binom[(n - 1) * stride + k - 1] + binom[(n - 1) * stride + k];
  }
  std::vector<double> inv_factorial(cap + 1, 1.0);
  for (int k = 1; k <= cap; ++k) inv_factorial[k] = inv_factorial[k - 1] / k;

  // W-hat per support: inclusion-exclusion over edge subsets, power sums of
  // disconnected subsets assembled from components by binomial convolution.
  std::vector<SupportInfo> sup(num_sets);
  parallel_for(num_sets, threads, [&](int i) {
    SupportInfo& info = sup[i];
    info.verts = model.support_vertices(sets[i]);
    const int s = static_cast<int>(sets[i].size());
    info.min_size = s;
    info.what.assign(cap + 1, 0.0);

    std::vector<std::uint32_t> adj(s, 0);
    for (int a = 0; a < s; ++a)
      for (int b = a + 1; b < s; ++b) {
        const auto [u1, v1] = model.edge(sets[i][a]);
        const auto [u2, v2] = model.edge(sets[i][b]);
        if (u1 == u2 || u1 == v2 || v1 == u2 || v1 == v2) {
          adj[a] |= (1u << b);
          adj[b] |= (1u << a);
        }
      }

    const std::uint32_t full = (1u << s) - 1u;
    std::vector<std::vector<double>> table(static_cast<std::size_t>(full) + 1u);
    table[0].assign(cap + 1, 0.0);
    table[0][0] = 1.0;
    std::vector<double> u_sum(cap + 1, 0.0);
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
      std::uint32_t comp = mask & (~mask + 1u);
      while (true) {
        std::uint32_t grown = comp;
        for (int b = 0; b < s; ++b)
          if ((comp >> b) & 1u) grown |= (adj[b] & mask);
        if (grown == comp) break;
        comp = grown;
      }
      auto& row = table[mask];
      if (comp == mask) {
        std::vector<int> subset;
        for (int b = 0; b < s; ++b)
          if ((mask >> b) & 1u) subset.push_back(sets[i][b]);
        row = ptr[set_index.at(subset)];
      } else {
        const auto& first = table[comp];
        const auto& rest = table[mask ^ comp];
        row.assign(cap + 1, 0.0);
        for (int k = 0; k <= cap; ++k) {
          double acc = 0.0;
          for (int j = 0; j <= k; ++j)
            acc += binom[k * stride + j] * first[j] * rest[k - j];
          row[k] = acc;
        }
      }
      const double sign = ((s - std::popcount(mask)) % 2 == 0) ? 1.0 : -1.0;
      for (int k = s; k <= cap; ++k) u_sum[k] += sign * row[k];
    }
    for (int k = s; k <= cap; ++k) info.what[k] = u_sum[k] * inv_factorial[k];
  });

  // Incompatibility neighbors among supports (vertex sharing).
  std::vector<std::vector<int>> by_vertex(model.num_vertices());
  for (int i = 0; i < num_sets; ++i)
    for (int v : sup[i].verts) by_vertex[v].push_back(i);
  std::vector<std::vector<int>> neighbors(num_sets);
  parallel_for(num_sets, threads, [&](int i) {
    std::vector<int> out;
    for (int v : sup[i].verts)
      for (int nb : by_vertex[v])
        if (nb != i) out.push_back(nb);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    neighbors[i] = std::move(out);
  });

  std::vector<std::vector<double>> bucket(num_sets);
  std::vector<std::uint64_t> term_count(num_sets, 0);

  // Connected multisets of supports, each exactly once: connected sets of
  // distinct supports via anchored growth with sibling bans (connectivity of
  // the occurrence multiset equals connectivity of its distinct supports),
  // then per-support occurrence counts r_i >= 1 inside `assign`.
  parallel_for(num_sets, threads, [&](int anchor) {
    if (sup[anchor].min_size > cap) return;
    std::vector<double> local(cap + 1, 0.0);
    std::uint64_t terms = 0;

    std::vector<int> chosen{anchor};
    std::vector<std::uint32_t> chosen_adj{0};
    std::vector<char> in_chosen(num_sets, 0);
    std::vector<char> banned(num_sets, 0);
    in_chosen[anchor] = 1;
    for (int i = 0; i < anchor; ++i) banned[i] = 1;

    std::vector<int> rvec;
    std::function<void(std::size_t, const Poly&, int)> assign =
        [&](std::size_t i, const Poly& acc, int need) {
          if (i == chosen.size()) {
            const double factor = ursell_occurrence_factor(chosen_adj, rvec);
            ++terms;
            for (int k = acc.low; k <= cap; ++k) local[k] += factor * acc.c[k];
            return;
          }
          const SupportInfo& si = sup[chosen[i]];
          const int need_rest = need - si.min_size;
          Poly cur = poly_mul(acc, si.what, si.min_size, cap);
          rvec.push_back(1);
          while (cur.low <= cap && cur.low + need_rest <= cap) {
            assign(i + 1, cur, need_rest);
            cur = poly_mul(cur, si.what, si.min_size, cap);
            ++rvec.back();
          }
          rvec.pop_back();
        };

    int need_total = sup[anchor].min_size;
    auto process = [&] {
      Poly one;
      one.c.assign(cap + 1, 0.0);
      one.c[0] = 1.0;
      one.low = 0;
      assign(0, one, need_total);
    };

    std::function<void(const std::vector<int>&, int)> grow =
        [&](const std::vector<int>& candidates, int budget) {
          process();
          if (budget < 1) return;
          std::vector<int> banned_here;
          for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
            const int c = candidates[ci];
            if (banned[c] || sup[c].min_size > budget) continue;
            std::uint32_t bits = 0;
            for (std::size_t i = 0; i < chosen.size(); ++i) {
              const auto& va = sup[chosen[i]].verts;
              const auto& vb = sup[c].verts;
              std::size_t x = 0, y = 0;
              while (x < va.size() && y < vb.size()) {
                if (va[x] == vb[y]) {
                  bits |= (1u << i);
                  break;
                }
                if (va[x] < vb[y])
                  ++x;
                else
                  ++y;
              }
            }
            for (std::size_t i = 0; i < chosen.size(); ++i)
              if ((bits >> i) & 1u) chosen_adj[i] |= (1u << chosen.size());
            chosen_adj.push_back(bits);
            chosen.push_back(c);
            in_chosen[c] = 1;
            need_total += sup[c].min_size;

            // Child candidates: remaining ones merged with c's neighbors.
            std::vector<int> child;
            child.reserve(candidates.size() + neighbors[c].size());
            std::size_t x = ci + 1, y = 0;
            const auto& nc = neighbors[c];
            while (x < candidates.size() || y < nc.size()) {
              int take;
              if (y == nc.size() || (x < candidates.size() && candidates[x] <= nc[y])) {
                take = candidates[x];
                if (y < nc.size() && nc[y] == take) ++y;
                ++x;
              } else {
                take = nc[y];
                ++y;
              }
              if (banned[take] || in_chosen[take]) continue;
              child.push_back(take);
            }
            grow(child, budget - sup[c].min_size);

            need_total -= sup[c].min_size;
            in_chosen[c] = 0;
            chosen.pop_back();
            chosen_adj.pop_back();
            const std::uint32_t keep = (1u << chosen.size()) - 1u;
            for (auto& rowbits : chosen_adj) rowbits &= keep;
            banned[c] = 1;
            banned_here.push_back(c);
          }
          for (int b : banned_here) banned[b] = 0;
        };

    std::vector<int> initial;
    for (int nb : neighbors[anchor])
      if (!banned[nb]) initial.push_back(nb);
    grow(initial, cap - sup[anchor].min_size);

    bucket[anchor] = std::move(local);
    term_count[anchor] = terms;
  });

  for (int anchor = 0; anchor < num_sets; ++anchor) {
    if (bucket[anchor].empty()) continue;
    for (int k = 1; k <= cap; ++k) poly.coeff[k] += bucket[anchor][k];
    poly.diagnostics.cluster_terms += term_count[anchor];
  }
  poly.diagnostics.support_count = static_cast<std::uint64_t>(num_sets);
  for (int i = 0; i < num_sets; ++i) {
    const int s = static_cast<int>(sets[i].size());
    poly.diagnostics.polymer_count += static_cast<std::uint64_t>(binom[cap * stride + s]);
  }
  poly.diagnostics.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return poly;
}

namespace {

ExpansionResult package_result(const SpinModel& model, Complex beta, int m, Complex t,
                               ExpansionDiagnostics diag) {
  ExpansionResult r;
  r.t_m = t;
  r.order = m;
  r.apriori_error = model.num_vertices() * std::exp(-static_cast<double>(m));
  r.log_z = t + static_cast<double>(model.num_vertices()) *
                    std::log(static_cast<double>(model.local_dim()));
  r.beta = beta;
  const BetaSpec spec = validate_beta(model, beta);
  r.in_region = spec.in_region;
  r.rigorous = spec.in_region;
  r.diagnostics = diag;
  return r;
}

}  // namespace

ExpansionResult truncated_expansion(const SpinModel& model, Complex beta, int m,
                                    int threads) {
  const ExpansionPolynomial poly = expansion_polynomial(model, m, threads);
  return package_result(model, beta, m, poly.evaluate(beta, m), poly.diagnostics);
}

ExpansionResult truncated_expansion_clusterwise(const SpinModel& model, Complex beta,
                                                int m) {
  if (m < 1) throw domain_error("expansion order m must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  ExpansionDiagnostics diag;
  Complex t = 0.0;
  if (m >= 2 && model.num_edges() > 0) {
    const auto polymers = enumerate_polymers(model, m - 1);
    std::vector<Complex> weights(polymers.size());
    for (std::size_t i = 0; i < polymers.size(); ++i)
      weights[i] = polymer_weight(polymers[i], model, beta);
    const auto clusters = enumerate_clusters(polymers, m);
    for (const auto& c : clusters) {
      const double phi = ursell_fast(c.graph).to_double();
      Complex product(1.0, 0.0);
      for (std::size_t i = 0; i < c.polymer_indices.size(); ++i)
        for (int rep = 0; rep < c.counts[i]; ++rep)
          product *= weights[c.polymer_indices[i]];
      t += static_cast<double>(ordering_multiplicity(c)) * phi * product;
    }
    diag.polymer_count = polymers.size();
    diag.cluster_terms = clusters.size();
    std::set<std::vector<int>> supports;
    for (const auto& p : polymers) supports.insert(p.support);
    diag.support_count = supports.size();
  }
  diag.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return package_result(model, beta, m, t, diag);
}

int choose_truncation_order(int num_vertices, double epsilon) {
  if (epsilon <= 0.0) throw domain_error("choose_truncation_order: epsilon must be > 0");
  if (num_vertices < 1) throw domain_error("choose_truncation_order: |V| must be >= 1");
  const double eps_prime = (epsilon < 1.0) ? std::log1p(epsilon) : epsilon / 2.0;
  const double raw = std::log(static_cast<double>(num_vertices) / eps_prime);
  return std::max(1, static_cast<int>(std::ceil(raw)));
}

ExpansionResult estimate(const SpinModel& model, Complex beta, double epsilon,
                         bool override_region, int threads,
                         std::optional<int> order_override) {
  if (epsilon <= 0.0) throw domain_error("estimate: epsilon must be > 0");
  const BetaSpec spec = validate_beta(model, beta);
  if (!spec.in_region && !override_region) {
    throw domain_error(
        "beta outside the convergence region: |beta| = " + std::to_string(std::abs(beta)) +
        " > 1/(e^4*Delta) = " + std::to_string(spec.radius_bound) + " (Delta = " +
        std::to_string(model.max_degree()) + "); pass the region override to proceed");
  }
  const int m = order_override ? *order_override
                               : choose_truncation_order(model.num_vertices(), epsilon);
  if (m < 1) throw domain_error("estimate: order must be >= 1");
  return truncated_expansion(model, beta, m, threads);
}

}  // namespace qce
