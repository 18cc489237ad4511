#include "traintrack/strata.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <set>

#include "traintrack/error.hpp"

namespace tt {

bool TransitionMatrix::is_zero() const {
  for (const auto& row : m) {
    for (auto x : row) {
      if (x != 0) return false;
    }
  }
  return true;
}

TransitionMatrix transition_matrix(const GraphMap& f, std::span<const int> edges) {
  TransitionMatrix t;
  t.edges.assign(edges.begin(), edges.end());
  const std::size_t n = edges.size();
  t.m.assign(n, std::vector<std::int64_t>(n, 0));
  for (std::size_t j = 0; j < n; ++j) {
    for (EdgeId e : f.image(edges[j])) {
      for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(e) == edges[i]) ++t.m[i][j];
      }
    }
  }
  return t;
}

namespace {

// Tarjan's algorithm; components come out in reverse topological order of
// the "points to" relation, i.e. sinks first.
std::vector<std::vector<int>> strongly_connected(const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
  std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
  std::vector<int> stack;
  std::vector<std::vector<int>> comps;
  int counter = 0;
  std::function<void(int)> visit = [&](int v) {
    const auto uv = static_cast<std::size_t>(v);
    index[uv] = low[uv] = counter++;
    stack.push_back(v);
    on_stack[uv] = 1;
    for (int w : adj[uv]) {
      const auto uw = static_cast<std::size_t>(w);
      if (index[uw] < 0) {
        visit(w);
        low[uv] = std::min(low[uv], low[uw]);
      } else if (on_stack[uw]) {
        low[uv] = std::min(low[uv], index[uw]);
      }
    }
    if (low[uv] == index[uv]) {
      std::vector<int> comp;
      int w = -1;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[static_cast<std::size_t>(w)] = 0;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      comps.push_back(std::move(comp));
    }
  };
  for (int v = 0; v < n; ++v) {
    if (index[static_cast<std::size_t>(v)] < 0) visit(v);
  }
  return comps;
}

std::vector<std::vector<int>> support(const IntMatrix& m) {
  std::vector<std::vector<int>> adj(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m[i].size(); ++j) {
      if (m[i][j] != 0) adj[i].push_back(static_cast<int>(j));
    }
  }
  return adj;
}

double rayleigh(const IntMatrix& m, const std::vector<double>& v, std::vector<double>& vm) {
  const std::size_t n = v.size();
  vm.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) vm[j] += v[i] * static_cast<double>(m[i][j]);
  }
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    num += vm[j] * v[j];
    den += v[j] * v[j];
  }
  return num / den;
}

}  // namespace

bool is_irreducible(const IntMatrix& m) {
  if (m.empty()) return false;
  for (const auto& row : m) {
    if (row.size() != m.size()) return false;
  }
  const auto comps = strongly_connected(support(m));
  if (comps.size() != 1) return false;
  if (m.size() == 1) return m[0][0] != 0;
  return true;
}

PFData pf_eigen(const IntMatrix& m, double tol, long max_iter) {
  if (!is_irreducible(m)) throw ValidationError("pf_eigen: matrix is not irreducible");
  const std::size_t n = m.size();
  PFData out;
  if (n == 1) {
    out.lambda = static_cast<double>(m[0][0]);
    out.v = {1.0};
    return out;
  }
  // M + I is primitive for irreducible M, so the shifted iteration converges
  // even when M is periodic.
  std::vector<double> v(n, 1.0), w(n), vm;
  double lambda = 0.0;
  for (long it = 1; it <= max_iter; ++it) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = v[j];
      for (std::size_t i = 0; i < n; ++i) s += v[i] * static_cast<double>(m[i][j]);
      w[j] = s;
    }
    const double top = *std::max_element(w.begin(), w.end());
    for (std::size_t j = 0; j < n; ++j) v[j] = w[j] / top;
    lambda = rayleigh(m, v, vm);
    double residual = 0.0;
    for (std::size_t j = 0; j < n; ++j) residual = std::max(residual, std::abs(vm[j] - lambda * v[j]));
    if (residual <= tol * lambda * 1.0) {  // |v|_inf == 1 after normalization
      out.iterations = it;
      const double lo = *std::min_element(v.begin(), v.end());
      for (auto& x : v) x /= lo;
      out.lambda = rayleigh(m, v, vm);
      out.v = std::move(v);
      return out;
    }
  }
  throw ValidationError("pf_eigen: power iteration did not converge");
}

const char* to_string(StratumType t) {
  switch (t) {
    case StratumType::zero: return "zero";
    case StratumType::polynomial: return "polynomial";
    case StratumType::exponential: return "exponential";
  }
  return "?";
}

bool Stratum::contains(EdgeId e) const {
  return std::binary_search(edges.begin(), edges.end(), std::abs(e));
}

Filtration::Filtration(std::vector<Stratum> strata, int edge_count)
    : strata_(std::move(strata)), height_(static_cast<std::size_t>(edge_count), 0) {
  for (const auto& s : strata_) {
    for (int k : s.edges) height_.at(static_cast<std::size_t>(k - 1)) = s.index;
  }
  for (int h : height_) {
    if (h == 0) throw ValidationError("filtration does not cover every edge");
  }
}

int Filtration::height(std::span<const EdgeId> p) const {
  int h = 0;
  for (EdgeId e : p) h = std::max(h, height(e));
  return h;
}

Filtration compute_filtration(const GraphMap& f, double tol) {
  const Graph& g = f.graph();
  const int n = g.edge_count();
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    std::set<int> deps;
    for (EdgeId e : f.image(k)) deps.insert(std::abs(e) - 1);
    adj[static_cast<std::size_t>(k - 1)].assign(deps.begin(), deps.end());
  }
  const auto comps = strongly_connected(adj);
  std::vector<int> comp_of(static_cast<std::size_t>(n));
  for (std::size_t c = 0; c < comps.size(); ++c) {
    for (int v : comps[c]) comp_of[static_cast<std::size_t>(v)] = static_cast<int>(c);
  }
  // Kahn's algorithm: a component is placed once everything it maps into is.
  std::vector<std::set<int>> needs(comps.size());
  std::vector<std::vector<int>> needed_by(comps.size());
  for (int v = 0; v < n; ++v) {
    const int cv = comp_of[static_cast<std::size_t>(v)];
    for (int w : adj[static_cast<std::size_t>(v)]) {
      const int cw = comp_of[static_cast<std::size_t>(w)];
      if (cw != cv && needs[static_cast<std::size_t>(cv)].insert(cw).second) {
        needed_by[static_cast<std::size_t>(cw)].push_back(cv);
      }
    }
  }
  using Item = std::pair<int, int>;  // (min edge, component)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> ready;
  std::vector<std::size_t> missing(comps.size());
  for (std::size_t c = 0; c < comps.size(); ++c) {
    missing[c] = needs[c].size();
    if (missing[c] == 0) ready.emplace(comps[c].front(), static_cast<int>(c));
  }
  std::vector<Stratum> strata;
  while (!ready.empty()) {
    const int c = ready.top().second;
    ready.pop();
    Stratum s;
    s.index = static_cast<int>(strata.size()) + 1;
    for (int v : comps[static_cast<std::size_t>(c)]) s.edges.push_back(v + 1);
    s.matrix = transition_matrix(f, s.edges);
    if (s.matrix.is_zero()) {
      s.type = StratumType::zero;
    } else {
      auto pf = pf_eigen(s.matrix.m, tol);
      if (pf.lambda > 1.0 + 1e-9) {
        s.type = StratumType::exponential;
        s.lambda = pf.lambda;
        s.eigenvector = std::move(pf.v);
      } else {
        s.type = StratumType::polynomial;
        s.lambda = 1.0;
        if (s.edges.size() == 1) {
          const int k = s.edges.front();
          const auto img = f.image(k);
          if (img.front() == k) {
            s.poly_edge = k;
            s.suffix.assign(img.begin() + 1, img.end());
          } else if (img.back() == k) {
            // f(E) = u E, so f(E^-1) = E^-1 u^-1.
            s.poly_edge = -k;
            for (auto it = img.rbegin() + 1; it != img.rend(); ++it) s.suffix.push_back(-*it);
          }
        }
      }
    }
    strata.push_back(std::move(s));
    for (int d : needed_by[static_cast<std::size_t>(c)]) {
      if (--missing[static_cast<std::size_t>(d)] == 0) ready.emplace(comps[static_cast<std::size_t>(d)].front(), d);
    }
  }
  return Filtration(std::move(strata), n);
}

double Metric::length(std::span<const EdgeId> p) const {
  double s = 0.0;
  for (EdgeId e : p) s += length(e);
  return s;
}

double Metric::r_length(std::span<const EdgeId> p, const Filtration& filt, int r) const {
  double s = 0.0;
  for (EdgeId e : p) {
    if (filt.in_H(e, r)) s += length(e);
  }
  return s;
}

Metric assign_metric(const GraphMap& f, const Filtration& filt) {
  std::vector<double> lengths(static_cast<std::size_t>(f.graph().edge_count()), 1.0);
  for (const auto& s : filt.strata()) {
    if (s.type != StratumType::exponential) continue;
    for (std::size_t i = 0; i < s.edges.size(); ++i) lengths[static_cast<std::size_t>(s.edges[i] - 1)] = s.eigenvector[i];
  }
  return Metric(std::move(lengths));
}

bool is_r_illegal(const TurnClassification& tc, const Filtration& filt, int r, EdgeId in, EdgeId out) {
  if (!filt.in_H(in, r) && !filt.in_H(out, r)) return false;
  return !tc.is_legal(in, out);
}

bool is_r_legal(const TurnClassification& tc, const Filtration& filt, int r, std::span<const EdgeId> p,
                bool cyclic) {
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (is_r_illegal(tc, filt, r, p[i - 1], p[i])) return false;
  }
  if (cyclic && !p.empty() && is_r_illegal(tc, filt, r, p.back(), p.front())) return false;
  return true;
}

RttReport verify_rtt(const GraphMap& f, const Filtration& filt, int cond2_bound, int cond3_bound) {
  const Graph& g = f.graph();
  const auto tc = classify_turns(f);
  RttReport report;
  report.cond2_bound = cond2_bound;
  report.cond3_bound = cond3_bound;
  constexpr std::size_t kMaxListed = 20;
  const auto& names = g.edge_names();

  for (const auto& s : filt.strata()) {
    if (s.type != StratumType::exponential) continue;
    const int r = s.index;
    RttStratumResult res;
    res.stratum = r;

    for (int k : s.edges) {
      const auto img = f.image(k);
      const std::pair<EdgeId, const char*> ends[] = {{img.front(), "first"}, {img.back(), "last"}};
      for (const auto& [e, which] : ends) {
        if (filt.in_H(e, r)) continue;
        res.condition1 = false;
        report.violations.push_back(RttViolation{
            1, r, k, {},
            std::string("edge ") + g.edge(k).name + ": " + which + " edge of f(" + g.edge(k).name + ") is " +
                names.format(std::span<const EdgeId>(&e, 1)) + ", not in H_" + std::to_string(r)});
      }
    }

    // Condition 2: vertices where H_r meets G_{r-1}.
    std::vector<char> frontier(static_cast<std::size_t>(g.vertex_count()), 0);
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      bool upper = false, lower = false;
      for (EdgeId e : g.directions(v)) {
        upper = upper || filt.in_H(e, r);
        lower = lower || filt.height(e) < r;
      }
      frontier[static_cast<std::size_t>(v)] = upper && lower;
    }
    std::size_t listed = 0;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      if (!frontier[static_cast<std::size_t>(v)]) continue;
      walk_tight_paths(
          g, cond2_bound, [&](EdgeId e) { return filt.height(e) < r; },
          [&](std::span<const EdgeId> beta) {
            if (!frontier[static_cast<std::size_t>(g.terminus(beta.back()))]) return true;
            ++res.paths_checked2;
            if (tighten_edges(raw_image(f, beta)).empty()) {
              res.condition2 = false;
              if (listed++ < kMaxListed) {
                report.violations.push_back(RttViolation{2, r, 0, {beta.begin(), beta.end()},
                                                         "[f(" + format_path(g, beta) + ")] is trivial"});
              }
            }
            return true;
          },
          v);
    }

    // Condition 3: r-legal paths in G_r stay r-legal.
    listed = 0;
    walk_tight_paths(
        g, cond3_bound, [&](EdgeId e) { return filt.height(e) <= r; },
        [&](std::span<const EdgeId> rho) {
          if (rho.size() >= 2 && is_r_illegal(tc, filt, r, rho[rho.size() - 2], rho.back())) return false;
          if (std::none_of(rho.begin(), rho.end(), [&](EdgeId e) { return filt.in_H(e, r); })) return true;
          ++res.paths_checked3;
          const auto img = tighten_edges(raw_image(f, rho));
          if (!is_r_legal(tc, filt, r, img)) {
            res.condition3 = false;
            if (listed++ < kMaxListed) {
              report.violations.push_back(RttViolation{3, r, 0, {rho.begin(), rho.end()},
                                                       "[f(" + format_path(g, rho) + ")] is not " +
                                                           std::to_string(r) + "-legal"});
            }
          }
          return true;
        });
    report.strata.push_back(res);
  }
  return report;
}

bool ImprovedReport::ok() const {
  return std::all_of(properties.begin(), properties.end(), [](const ImprovedProperty& p) { return p.pass; });
}

}  // namespace tt
