#include "traintrack/nielsen.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "traintrack/error.hpp"

namespace tt {

bool GraphPoint::same_as(const GraphPoint& o, double tol) const {
  if (is_vertex() || o.is_vertex()) return vertex == o.vertex;
  return edge == o.edge && std::abs(fraction - o.fraction) <= tol;
}

GraphPoint NielsenPathRecord::start_point(const Graph& g) const {
  const EdgeId e = path.edges.front();
  if (head >= 1.0) return GraphPoint{g.origin(e), 0, 0.0};
  return e > 0 ? GraphPoint{-1, e, 1.0 - head} : GraphPoint{-1, -e, head};
}

GraphPoint NielsenPathRecord::end_point(const Graph& g) const {
  const EdgeId e = path.edges.back();
  if (tail >= 1.0) return GraphPoint{g.terminus(e), 0, 0.0};
  return e > 0 ? GraphPoint{-1, e, tail} : GraphPoint{-1, -e, 1.0 - tail};
}

NielsenPathRecord NielsenPathRecord::reversed(const Graph& g) const {
  NielsenPathRecord r = *this;
  r.path = path.reversed(g);
  std::swap(r.head, r.tail);
  return r;
}

namespace {

std::vector<EdgeId> reverse_path(std::span<const EdgeId> p) {
  std::vector<EdgeId> r(p.rbegin(), p.rend());
  for (auto& e : r) e = -e;
  return r;
}

int count_illegal(const TurnClassification& tc, std::span<const EdgeId> p) {
  int n = 0;
  for (std::size_t i = 1; i < p.size(); ++i) n += tc.is_legal(p[i - 1], p[i]) ? 0 : 1;
  return n;
}

// Tightened images [f^j(E)] for j = 1..P, indexed [j][k] for positive k.
struct IterImages {
  std::vector<std::vector<std::vector<EdgeId>>> img;
  // True when the untightened f^j(E) is already tight.
  std::vector<std::vector<char>> clean;

  IterImages(const GraphMap& f, int P) {
    const int n = f.graph().edge_count();
    img.resize(static_cast<std::size_t>(P) + 1);
    clean.resize(static_cast<std::size_t>(P) + 1);
    img[0].resize(static_cast<std::size_t>(n) + 1);
    clean[0].assign(static_cast<std::size_t>(n) + 1, 1);
    for (int k = 1; k <= n; ++k) img[0][static_cast<std::size_t>(k)] = {k};
    for (int j = 1; j <= P; ++j) {
      img[static_cast<std::size_t>(j)].resize(static_cast<std::size_t>(n) + 1);
      clean[static_cast<std::size_t>(j)].assign(static_cast<std::size_t>(n) + 1, 1);
      for (int k = 1; k <= n; ++k) {
        const auto raw = raw_image(f, img[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(k)]);
        auto tight = tighten_edges(raw);
        clean[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] =
            clean[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(k)] && tight.size() == raw.size();
        img[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = std::move(tight);
      }
    }
  }

  const std::vector<EdgeId>& of(int j, int k) const {
    return img[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
  }
  bool is_clean(int j, EdgeId e) const {
    return clean[static_cast<std::size_t>(j)][static_cast<std::size_t>(std::abs(e))] != 0;
  }
  void append(int j, EdgeId e, std::vector<EdgeId>& out) const {
    const auto& s = of(j, std::abs(e));
    if (e > 0) {
      out.insert(out.end(), s.begin(), s.end());
    } else {
      for (auto it = s.rbegin(); it != s.rend(); ++it) out.push_back(-*it);
    }
  }
};

// Stack of letters with cancellation and an undo log per appended block.
class TightStack {
 public:
  struct Mark {
    std::size_t pushed = 0;
    std::vector<EdgeId> popped;
  };

  Mark append(const std::vector<EdgeId>& block, bool forward) {
    Mark m;
    auto put = [&](EdgeId x) {
      if (!s_.empty() && s_.back() == -x) {
        m.popped.push_back(s_.back());
        s_.pop_back();
      } else {
        s_.push_back(x);
        ++m.pushed;
      }
    };
    if (forward) {
      for (EdgeId x : block) put(x);
    } else {
      for (auto it = block.rbegin(); it != block.rend(); ++it) put(-*it);
    }
    return m;
  }
  void undo(const Mark& m) {
    s_.resize(s_.size() - m.pushed);
    for (auto it = m.popped.rbegin(); it != m.popped.rend(); ++it) s_.push_back(*it);
  }
  const std::vector<EdgeId>& letters() const noexcept { return s_; }

 private:
  std::vector<EdgeId> s_;
};

// Piecewise-linear position along g(E) = [f^p(E)] of the point at fraction s
// of E, assuming f maps each edge at constant speed onto its image and the
// iterated image has no cancellation.
class EdgeFlow {
 public:
  EdgeFlow(const GraphMap& f, const Metric& metric, int P) : f_(f), metric_(metric) {
    const int n = f.graph().edge_count();
    image_len_.assign(static_cast<std::size_t>(P) + 1, std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
    for (int k = 1; k <= n; ++k) image_len_[0][static_cast<std::size_t>(k)] = metric.length(k);
    for (int j = 1; j <= P; ++j) {
      for (int k = 1; k <= n; ++k) {
        double s = 0.0;
        for (EdgeId x : f.image(k)) s += image_len_[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(std::abs(x))];
        image_len_[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = s;
      }
    }
    breaks_.resize(static_cast<std::size_t>(P) + 1);
  }

  double image_length(int p, EdgeId e) const {
    return image_len_[static_cast<std::size_t>(p)][static_cast<std::size_t>(std::abs(e))];
  }

  // Position along [f^p(e)] of the point at fraction s of oriented edge e.
  double position(int p, EdgeId e, double s) const {
    if (e < 0) return image_length(p, e) - position(p, -e, 1.0 - s);
    if (p == 0) return s * metric_.length(e);
    const auto img = f_.image(e);
    double total = 0.0;
    for (EdgeId x : img) total += metric_.length(x);
    double u = s * total;
    double offset = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) {
      const double l = metric_.length(img[i]);
      if (u <= l || i + 1 == img.size()) return offset + position(p - 1, img[i], std::clamp(u / l, 0.0, 1.0));
      u -= l;
      offset += image_length(p - 1, img[i]);
    }
    return offset;
  }

  // Fractions of positive edge k at which position(p, k, .) changes slope.
  const std::vector<double>& breakpoints(int p, int k) {
    auto& table = breaks_[static_cast<std::size_t>(p)];
    if (auto it = table.find(k); it != table.end()) return it->second;
    std::vector<double> out{0.0, 1.0};
    if (p > 0) {
      const auto img = f_.image(k);
      double total = 0.0;
      for (EdgeId x : img) total += metric_.length(x);
      double c = 0.0;
      for (EdgeId x : img) {
        const double l = metric_.length(x);
        for (double b : breakpoints(p - 1, std::abs(x))) {
          const double local = x > 0 ? b : 1.0 - b;
          out.push_back((c + local * l) / total);
        }
        c += l;
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return std::abs(a - b) < 1e-15; }),
                out.end());
    }
    return table.emplace(k, std::move(out)).first->second;
  }

 private:
  const GraphMap& f_;
  const Metric& metric_;
  std::vector<std::vector<double>> image_len_;
  std::vector<std::map<int, std::vector<double>>> breaks_;
};

class InpSearch {
 public:
  InpSearch(const GraphMap& f, const Metric& metric, const TurnClassification& tc, const IterImages& images,
            int len_bound, double tol)
      : g_(f.graph()), metric_(metric), tc_(tc), images_(images), flow_(f, metric, static_cast<int>(images.img.size()) - 1),
        len_bound_(len_bound), tol_(tol) {}

  struct Found {
    std::vector<EdgeId> edges;
    double head, tail;
    int period;
  };

  std::vector<Found> run(const Turn& seed, int p) {
    found_.clear();
    p_ = p;
    if (!images_.is_clean(p, seed.first) || !images_.is_clean(p, seed.second)) return {};
    Side a{{seed.first}, {}}, b{{seed.second}, {}};
    images_.append(p, seed.first, a.image);
    images_.append(p, seed.second, b.image);
    joint(a, b);
    return found_;
  }

 private:
  struct Side {
    std::vector<EdgeId> edges;
    std::vector<EdgeId> image;
  };

  std::vector<EdgeId> continuations(const Side& s) const {
    std::vector<EdgeId> out;
    const EdgeId last = s.edges.back();
    for (EdgeId x : g_.directions(g_.terminus(last))) {
      if (x == -last || !tc_.is_legal(last, x) || !images_.is_clean(p_, x)) continue;
      const auto& img = images_.of(p_, std::abs(x));
      const EdgeId first = x > 0 ? img.front() : -img.back();
      if (!s.image.empty() && s.image.back() == -first) continue;
      out.push_back(x);
    }
    return out;
  }

  static std::size_t lcp(const std::vector<EdgeId>& u, const std::vector<EdgeId>& v) {
    std::size_t i = 0;
    while (i < u.size() && i < v.size() && u[i] == v[i]) ++i;
    return i;
  }

  void joint(Side& a, Side& b) {
    if (static_cast<int>(a.edges.size() + b.edges.size()) > len_bound_) return;
    const std::size_t t = lcp(a.image, b.image);
    if (t < a.image.size() && t < b.image.size()) {
      if (t == 0 || a.image[t] != a.edges.front() || b.image[t] != b.edges.front()) return;
      auto ends_a = solve_side(a, t, len_bound_ - 1);
      if (ends_a.empty()) return;
      auto ends_b = solve_side(b, t, len_bound_ - 1);
      for (const auto& [ea, sa] : ends_a) {
        for (const auto& [eb, sb] : ends_b) {
          if (static_cast<int>(ea.size() + eb.size()) > len_bound_) continue;
          Found fd;
          fd.edges = reverse_path(ea);
          fd.edges.insert(fd.edges.end(), eb.begin(), eb.end());
          fd.head = sa;
          fd.tail = sb;
          fd.period = p_;
          found_.push_back(std::move(fd));
        }
      }
      return;
    }
    // One image is a prefix of the other; the shorter side has to grow.
    Side& grow = a.image.size() <= b.image.size() ? a : b;
    for (EdgeId x : continuations(grow)) {
      const std::size_t mark = grow.image.size();
      grow.edges.push_back(x);
      images_.append(p_, x, grow.image);
      joint(a, b);
      grow.edges.pop_back();
      grow.image.resize(mark);
    }
  }

  // Ray endpoints with g(alpha) = T alpha where T = first t letters of the image.
  // Endpoints lie no earlier than the last edge added while the images
  // were still prefix-comparable.
  std::vector<std::pair<std::vector<EdgeId>, double>> solve_side(Side side, std::size_t t, int max_len) {
    std::vector<std::pair<std::vector<EdgeId>, double>> out;
    dfs_side(side, t, side.edges.size(), max_len, out);
    return out;
  }

  void dfs_side(Side& side, std::size_t t, std::size_t min_depth, int max_len,
                std::vector<std::pair<std::vector<EdgeId>, double>>& out) {
    const std::size_t k = side.edges.size();
    for (std::size_t i = 0; i < k && t + i < side.image.size(); ++i) {
      if (side.image[t + i] != side.edges[i]) return;
    }
    if (k >= min_depth) {
      for (double s : endpoints(side, t)) out.emplace_back(side.edges, s);
    }
    if (static_cast<int>(k) >= max_len) return;
    for (EdgeId x : continuations(side)) {
      const std::size_t mark = side.image.size();
      side.edges.push_back(x);
      images_.append(p_, x, side.image);
      dfs_side(side, t, min_depth, max_len, out);
      side.edges.pop_back();
      side.image.resize(mark);
    }
  }

  // Fractions s of the last edge a_k with g(a_1..a_{k-1} + s a_k) = T a_1..a_{k-1} + s a_k.
  std::vector<double> endpoints(const Side& side, std::size_t t) {
    std::vector<double> out;
    const std::size_t k = side.edges.size();
    const auto& S = side.image;
    if (t + k - 1 >= S.size()) return out;
    std::vector<double> cum(S.size() + 1, 0.0);
    for (std::size_t i = 0; i < S.size(); ++i) cum[i + 1] = cum[i] + metric_.length(S[i]);
    double P = 0.0, Q = 0.0;
    std::size_t q = 0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      P += metric_.length(side.edges[i]);
      q += images_.of(p_, std::abs(side.edges[i])).size();
    }
    Q = cum[q];
    const EdgeId ak = side.edges.back();
    const double lk = metric_.length(ak);
    const double rhs = cum[t] + P - Q;
    auto h = [&](double s) { return flow_.position(p_, ak, s) - s * lk; };
    std::vector<double> bps = flow_.breakpoints(p_, std::abs(ak));
    if (ak < 0) {
      for (auto& b : bps) b = 1.0 - b;
      std::sort(bps.begin(), bps.end());
    }
    std::vector<double> roots;
    for (std::size_t i = 1; i < bps.size(); ++i) {
      const double s0 = bps[i - 1], s1 = bps[i];
      const double h0 = h(s0) - rhs, h1 = h(s1) - rhs;
      if (std::abs(h1) <= tol_ * std::max(1.0, std::abs(rhs))) {
        roots.push_back(s1);
      } else if ((h0 < 0) != (h1 < 0) && std::abs(h0) > tol_ * std::max(1.0, std::abs(rhs))) {
        roots.push_back(s0 + (s1 - s0) * (-h0) / (h1 - h0));
      }
    }
    for (double s : roots) {
      if (s <= tol_) continue;
      const double x = Q + flow_.position(p_, ak, s);
      // Edge of S containing x, with x in (cum[j], cum[j+1]].
      std::size_t j = 0;
      while (j + 1 < S.size() && cum[j + 1] < x - tol_ * std::max(1.0, x)) ++j;
      if (j != t + k - 1 || S[j] != ak) continue;
      const double phi = (x - cum[j]) / metric_.length(S[j]);
      if (std::abs(phi - s) > 1e-7) continue;
      out.push_back(s >= 1.0 - 1e-9 ? 1.0 : s);
    }
    return out;
  }

  const Graph& g_;
  const Metric& metric_;
  const TurnClassification& tc_;
  const IterImages& images_;
  EdgeFlow flow_;
  int len_bound_;
  double tol_;
  int p_ = 1;
  std::vector<Found> found_;
};

bool same_record(const NielsenPathRecord& a, const NielsenPathRecord& b, double tol) {
  return a.path.edges == b.path.edges && std::abs(a.head - b.head) <= tol && std::abs(a.tail - b.tail) <= tol;
}

}  // namespace

std::optional<int> nielsen_period(const GraphMap& f, std::span<const EdgeId> p, int period_bound) {
  if (p.empty()) return std::nullopt;
  std::vector<EdgeId> q(p.begin(), p.end());
  for (int k = 1; k <= period_bound; ++k) {
    q = tighten_edges(raw_image(f, q));
    if (std::equal(q.begin(), q.end(), p.begin(), p.end())) return k;
  }
  return std::nullopt;
}

std::optional<PreNielsenWitness> pre_nielsen_witness(const GraphMap& f, std::span<const EdgeId> p, int iter_bound,
                                                     int period_bound) {
  std::vector<EdgeId> q(p.begin(), p.end());
  for (int j = 0; j <= iter_bound; ++j) {
    if (q.empty()) return std::nullopt;
    if (auto k = nielsen_period(f, q, period_bound)) return PreNielsenWitness{j, *k};
    q = tighten_edges(raw_image(f, q));
  }
  return std::nullopt;
}

bool is_pre_nielsen(const GraphMap& f, std::span<const EdgeId> p, int iter_bound, int period_bound) {
  return pre_nielsen_witness(f, p, iter_bound, period_bound).has_value();
}

NielsenInventory find_nielsen_paths(const GraphMap& f, const Filtration& filt, const Metric& metric,
                                    const NielsenSearchOptions& opts) {
  if (opts.len_bound < 1 || opts.period_bound < 1) throw ValidationError("Nielsen search bounds must be >= 1");
  const Graph& g = f.graph();
  const int P = opts.period_bound;
  const IterImages images(f, P);
  const auto tc = classify_turns(f);

  NielsenInventory inv;
  inv.len_bound = opts.len_bound;
  inv.period_bound = P;

  auto make_record = [&](std::vector<EdgeId> edges, double head, double tail, int period) {
    NielsenPathRecord r;
    r.path = EdgePath{g.origin(edges.front()), std::move(edges)};
    r.head = head;
    r.tail = tail;
    r.period = period;
    r.height = filt.height(r.path.edges);
    r.illegal_turn_count = count_illegal(tc, r.path.edges);
    return r;
  };

  // Exhaustive pass over vertex paths, one [f^j] stack per j.
  std::vector<TightStack> stacks(static_cast<std::size_t>(P) + 1);
  std::vector<std::vector<TightStack::Mark>> marks;
  std::vector<EdgeId> path;
  bool stop = false;
  auto rec = [&](auto&& self, VertexId v) -> void {
    for (EdgeId e : g.directions(v)) {
      if (stop) return;
      if (!path.empty() && e == -path.back()) continue;
      if (++inv.paths_examined > opts.path_budget) {
        inv.complete = false;
        stop = true;
        return;
      }
      path.push_back(e);
      std::vector<TightStack::Mark> m(static_cast<std::size_t>(P) + 1);
      int period = 0;
      for (int j = 1; j <= P; ++j) {
        auto& st = stacks[static_cast<std::size_t>(j)];
        m[static_cast<std::size_t>(j)] = st.append(images.of(j, std::abs(e)), e > 0);
        if (period == 0 && st.letters() == path) period = j;
      }
      if (period != 0) {
        const auto rev = reverse_path(path);
        if (!letters_less(rev, path)) inv.records.push_back(make_record(path, 1.0, 1.0, period));
      }
      if (static_cast<int>(path.size()) < opts.len_bound) self(self, g.terminus(e));
      for (int j = P; j >= 1; --j) stacks[static_cast<std::size_t>(j)].undo(m[static_cast<std::size_t>(j)]);
      path.pop_back();
    }
  };
  for (VertexId v = 0; v < g.vertex_count() && !stop; ++v) rec(rec, v);

  for (auto& r : inv.records) {
    bool divisible = false;
    for (std::size_t i = 1; i < r.path.edges.size() && !divisible; ++i) {
      std::span<const EdgeId> all(r.path.edges);
      divisible = nielsen_period(f, all.subspan(0, i), P) && nielsen_period(f, all.subspan(i), P);
    }
    r.indivisible = !divisible;
  }

  // Two-legal-rays pass from each illegal turn.
  InpSearch search(f, metric, tc, images, opts.len_bound, opts.tol);
  for (const Turn& t : tc.illegal()) {
    for (int p = 1; p <= P; ++p) {
      for (auto& fd : search.run(t, p)) {
        auto r = make_record(std::move(fd.edges), fd.head, fd.tail, fd.period);
        if (r.vertex_endpoints() && nielsen_period(f, r.path.edges, P) != fd.period) continue;
        auto rev = r.reversed(g);
        if (letters_less(rev.path.edges, r.path.edges)) r = std::move(rev);
        r.indivisible = true;
        bool seen = false;
        for (auto& old : inv.records) {
          if (same_record(old, r, 1e-7)) {
            seen = true;
            old.indivisible = true;
          }
        }
        if (!seen) inv.records.push_back(std::move(r));
      }
    }
  }
  std::stable_sort(inv.records.begin(), inv.records.end(), [](const auto& a, const auto& b) {
    if (a.path.edges.size() != b.path.edges.size()) return a.path.edges.size() < b.path.edges.size();
    return letters_less(a.path.edges, b.path.edges);
  });
  return inv;
}

NielsenInventory find_nielsen_paths(const GraphMap& f, int len_bound, int period_bound) {
  const auto filt = compute_filtration(f);
  const auto metric = assign_metric(f, filt);
  NielsenSearchOptions opts;
  opts.len_bound = len_bound;
  opts.period_bound = period_bound;
  return find_nielsen_paths(f, filt, metric, opts);
}

NpReport check_np_constraints(const GraphMap& f, const NielsenPathRecord& record, const Filtration& filt,
                              const NpPreconditions& pre) {
  if (!pre.improved_verified || !pre.atoroidal) {
    throw ValidationError(
        "check_np_constraints needs an improved train track map representing an atoroidal class");
  }
  NpReport report;
  const Graph& g = f.graph();
  const int r = record.height;
  if (r < 1 || filt.stratum(r).type != StratumType::exponential) return report;
  const auto& edges = record.path.edges;
  const bool crosses = std::any_of(edges.begin(), edges.end(), [&](EdgeId e) { return filt.in_H(e, r); });
  const bool ends_in_H = filt.in_H(edges.front(), r) && filt.in_H(edges.back(), r);
  const bool legalrest = record.indivisible && crosses;
  if (!ends_in_H && !legalrest) return report;

  const GraphPoint a = record.start_point(g), b = record.end_point(g);
  auto describe = [&](const GraphPoint& p) {
    if (p.is_vertex()) return "vertex " + g.vertex_name(p.vertex);
    return "a point of edge " + g.edge(p.edge).name;
  };
  if (a.same_as(b)) report.violations.push_back("endpoints coincide at " + describe(a));

  auto touches = [&](const GraphPoint& p, auto pred) {
    if (!p.is_vertex()) return pred(p.edge);
    const auto& dirs = g.directions(p.vertex);
    return std::any_of(dirs.begin(), dirs.end(), pred);
  };
  auto in_lower = [&](const GraphPoint& p) { return touches(p, [&](EdgeId e) { return filt.height(e) < r; }); };
  auto in_Hr = [&](const GraphPoint& p) { return touches(p, [&](EdgeId e) { return filt.in_H(e, r); }); };

  // Components of G_{r-1} that are trees.
  std::vector<int> parent(static_cast<std::size_t>(g.vertex_count()));
  for (std::size_t v = 0; v < parent.size(); ++v) parent[v] = static_cast<int>(v);
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
    return v;
  };
  for (int k = 1; k <= g.edge_count(); ++k) {
    if (filt.height(k) < r) parent[static_cast<std::size_t>(find(g.origin(k)))] = find(g.terminus(k));
  }
  std::vector<int> nv(parent.size(), 0), ne(parent.size(), 0);
  for (VertexId v = 0; v < g.vertex_count(); ++v) ++nv[static_cast<std::size_t>(find(v))];
  for (int k = 1; k <= g.edge_count(); ++k) {
    if (filt.height(k) < r) ++ne[static_cast<std::size_t>(find(g.origin(k)))];
  }
  auto contractible = [&](const GraphPoint& p) {
    const auto c = static_cast<std::size_t>(find(p.is_vertex() ? p.vertex : g.origin(p.edge)));
    return ne[c] == nv[c] - 1;
  };

  if (ends_in_H && in_lower(a) && in_lower(b) && !contractible(a) && !contractible(b)) {
    report.violations.push_back("both endpoints lie in G_" + std::to_string(r - 1) +
                                " and neither lies in a contractible component");
  }
  if (legalrest && in_lower(a) && in_Hr(a) && in_lower(b) && in_Hr(b)) {
    report.violations.push_back("both endpoints of an indivisible Nielsen path lie in H_" + std::to_string(r) +
                                " meet G_" + std::to_string(r - 1));
  }
  return report;
}

const char* to_string(PieceKind k) {
  switch (k) {
    case PieceKind::edge_gamma: return "E gamma";
    case PieceKind::gamma_edgebar: return "gamma E^-1";
    case PieceKind::edge_gamma_edgebar: return "E gamma E^-1";
    case PieceKind::lower: return "lower";
  }
  return "?";
}

Splitting split_basic_paths(const GraphMap& f, const Circuit& sigma, int r, const Filtration& filt) {
  (void)f;
  const auto& s = filt.stratum(r);
  if (s.type != StratumType::polynomial || s.edges.size() != 1) {
    throw ValidationError("split_basic_paths needs a polynomial single-edge stratum");
  }
  if (!filt.in_G(sigma.edges(), r)) throw ValidationError("split_basic_paths: circuit leaves G_" + std::to_string(r));
  const EdgeId E = s.poly_edge.value_or(s.edges.front());
  const auto& c = sigma.vec();
  const std::size_t n = c.size();
  std::vector<std::size_t> cuts;
  for (std::size_t i = 0; i < n; ++i) {
    if (c[i] == E) cuts.push_back(i);
    if (c[i] == -E) cuts.push_back((i + 1) % n);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  Splitting out;
  if (cuts.empty()) {
    out.pieces.push_back(SplitPiece{PieceKind::lower, c});
    return out;
  }
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const std::size_t from = cuts[i];
    const std::size_t to = i + 1 < cuts.size() ? cuts[i + 1] : cuts[0] + n;
    SplitPiece piece;
    for (std::size_t j = from; j < to; ++j) piece.edges.push_back(c[j % n]);
    const bool starts = piece.edges.front() == E;
    const bool ends = piece.edges.back() == -E;
    piece.kind = starts ? (ends && piece.edges.size() > 1 ? PieceKind::edge_gamma_edgebar : PieceKind::edge_gamma)
                        : (ends ? PieceKind::gamma_edgebar : PieceKind::lower);
    out.pieces.push_back(std::move(piece));
  }
  return out;
}

bool verify_splitting(const GraphMap& f, const Splitting& split, int k_max) {
  std::vector<std::vector<EdgeId>> cur;
  for (const auto& p : split.pieces) cur.push_back(p.edges);
  for (int k = 1; k <= k_max; ++k) {
    std::vector<EdgeId> all;
    for (auto& piece : cur) {
      piece = tighten_edges(raw_image(f, piece));
      all.insert(all.end(), piece.begin(), piece.end());
    }
    if (all.empty()) return false;
    for (std::size_t i = 1; i < all.size(); ++i) {
      if (all[i] == -all[i - 1]) return false;
    }
    if (all.size() > 1 && all.front() == -all.back()) return false;
  }
  return true;
}

}  // namespace tt
