#include "traintrack/graph_map.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "traintrack/error.hpp"

namespace tt {

namespace {

std::vector<std::string> edge_name_list(const std::vector<EdgeSpec>& edges) {
  std::vector<std::string> names;
  names.reserve(edges.size());
  for (const auto& e : edges) names.push_back(e.name);
  return names;
}

}  // namespace

Graph::Graph(std::vector<std::string> vertex_names, std::vector<EdgeSpec> edges,
             std::optional<std::vector<Word>> marking)
    : vertex_names_(std::move(vertex_names)), edges_(std::move(edges)), marking_(std::move(marking)),
      edge_names_(edge_name_list(edges_)) {
  const int nv = vertex_count();
  if (nv == 0) throw ValidationError("graph has no vertices");
  for (std::size_t i = 0; i < vertex_names_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (vertex_names_[i] == vertex_names_[j]) throw ValidationError("duplicate vertex '" + vertex_names_[i] + "'");
    }
  }
  directions_.assign(static_cast<std::size_t>(nv), {});
  for (int k = 1; k <= edge_count(); ++k) {
    const auto& e = edges_[static_cast<std::size_t>(k - 1)];
    if (e.origin < 0 || e.origin >= nv || e.terminus < 0 || e.terminus >= nv) {
      throw ValidationError("edge '" + e.name + "' has an endpoint outside the vertex set");
    }
    directions_[static_cast<std::size_t>(e.origin)].push_back(k);
    directions_[static_cast<std::size_t>(e.terminus)].push_back(-k);
  }
  for (auto& d : directions_) std::sort(d.begin(), d.end(), letter_less);
  for (VertexId v = 0; v < nv; ++v) {
    if (valence(v) < 2) throw ValidationError("vertex '" + vertex_name(v) + "' has valence below two");
  }
  // Connectivity.
  std::vector<bool> seen(static_cast<std::size_t>(nv), false);
  std::deque<VertexId> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    for (EdgeId e : directions(v)) {
      const VertexId w = terminus(e);
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = true;
        queue.push_back(w);
      }
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) throw ValidationError("graph is not connected");
  if (marking_ && static_cast<int>(marking_->size()) != edge_count()) {
    throw ValidationError("marking must assign a word to every edge");
  }
}

VertexId Graph::origin(EdgeId e) const {
  const auto& s = edges_.at(static_cast<std::size_t>(std::abs(e) - 1));
  return e > 0 ? s.origin : s.terminus;
}

VertexId Graph::terminus(EdgeId e) const {
  const auto& s = edges_.at(static_cast<std::size_t>(std::abs(e) - 1));
  return e > 0 ? s.terminus : s.origin;
}

VertexId Graph::vertex_index(std::string_view name) const {
  for (std::size_t i = 0; i < vertex_names_.size(); ++i) {
    if (vertex_names_[i] == name) return static_cast<VertexId>(i);
  }
  return -1;
}

Word Graph::mark(EdgeId e) const {
  if (!marking_) throw ValidationError("graph has no marking");
  const Word& w = (*marking_)[static_cast<std::size_t>(std::abs(e) - 1)];
  return e > 0 ? w : w.inverse();
}

Word Graph::mark(std::span<const EdgeId> path) const {
  Word out;
  for (EdgeId e : path) out = out * mark(e);
  return out;
}

// ---------------------------------------------------------------------------

bool EdgePath::is_tight() const {
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i] == -edges[i - 1]) return false;
  }
  return true;
}

EdgePath EdgePath::reversed(const Graph& g) const {
  EdgePath r{end(g), {}};
  r.edges.reserve(edges.size());
  for (auto it = edges.rbegin(); it != edges.rend(); ++it) r.edges.push_back(-*it);
  return r;
}

void check_path(const Graph& g, const EdgePath& p) {
  if (p.start < 0 || p.start >= g.vertex_count()) throw ValidationError("path start outside the graph");
  VertexId at = p.start;
  for (EdgeId e : p.edges) {
    if (e == 0 || std::abs(e) > g.edge_count()) throw ValidationError("edge id outside the graph");
    if (g.origin(e) != at) throw ValidationError("path endpoints do not match at " + format_path(g, std::span(&e, 1)));
    at = g.terminus(e);
  }
}

EdgePath make_path(const Graph& g, std::vector<EdgeId> edges) {
  if (edges.empty()) throw ValidationError("make_path needs at least one edge");
  if (edges.front() == 0 || std::abs(edges.front()) > g.edge_count()) throw ValidationError("edge id outside the graph");
  EdgePath p{g.origin(edges.front()), std::move(edges)};
  check_path(g, p);
  return p;
}

std::vector<EdgeId> tighten_edges(std::span<const EdgeId> edges) {
  std::vector<EdgeId> out;
  out.reserve(edges.size());
  for (EdgeId e : edges) {
    if (!out.empty() && out.back() == -e) {
      out.pop_back();
    } else {
      out.push_back(e);
    }
  }
  return out;
}

EdgePath tighten(const Graph& g, const EdgePath& p) {
  check_path(g, p);
  return EdgePath{p.start, tighten_edges(p.edges)};
}

namespace {

// Removes e ... e^-1 pairs wrapping around the ends of a tight edge list.
void cyclically_tighten(std::vector<EdgeId>& s) {
  std::size_t lo = 0;
  std::size_t hi = s.size();
  while (hi - lo >= 2 && s[lo] == -s[hi - 1]) {
    ++lo;
    --hi;
  }
  if (lo > 0) s = std::vector<EdgeId>(s.begin() + static_cast<std::ptrdiff_t>(lo), s.begin() + static_cast<std::ptrdiff_t>(hi));
}

}  // namespace

Circuit Circuit::from_loop(const Graph& g, std::vector<EdgeId> edges) {
  if (edges.empty()) throw ValidationError("a circuit needs at least one edge");
  check_path(g, EdgePath{g.origin(edges.front()), edges});
  if (g.terminus(edges.back()) != g.origin(edges.front())) throw ValidationError("edge loop is not closed");
  auto tight = tighten_edges(edges);
  cyclically_tighten(tight);
  if (tight.empty()) throw ValidationError("loop is homotopically trivial");
  canonicalize_rotation(tight);
  Circuit c;
  c.edges_ = std::move(tight);
  return c;
}

// ---------------------------------------------------------------------------

GraphMap::GraphMap(Graph graph, std::vector<VertexId> vertex_map, std::vector<std::vector<EdgeId>> edge_images,
                   std::string label)
    : graph_(std::move(graph)), vertex_map_(std::move(vertex_map)), forward_(std::move(edge_images)),
      label_(std::move(label)) {
  const Graph& g = graph_;
  if (static_cast<int>(vertex_map_.size()) != g.vertex_count()) {
    throw ValidationError("vertex map must cover every vertex");
  }
  for (VertexId v : vertex_map_) {
    if (v < 0 || v >= g.vertex_count()) throw ValidationError("vertex map leaves the graph");
  }
  if (static_cast<int>(forward_.size()) != g.edge_count()) throw ValidationError("every edge needs an image");
  backward_.resize(forward_.size());
  for (int k = 1; k <= g.edge_count(); ++k) {
    const auto& img = forward_[static_cast<std::size_t>(k - 1)];
    const std::string& name = g.edge(k).name;
    if (img.empty()) throw ValidationError("image of edge '" + name + "' has length zero");
    EdgePath p{vertex_image(g.origin(k)), img};
    try {
      check_path(g, p);
    } catch (const ValidationError& e) {
      throw ValidationError("image of edge '" + name + "': " + e.what());
    }
    if (!p.is_tight()) throw ValidationError("image of edge '" + name + "' is not tight");
    if (p.end(g) != vertex_image(g.terminus(k))) {
      throw ValidationError("image of edge '" + name + "' does not end at the image of its terminal vertex");
    }
    auto& back = backward_[static_cast<std::size_t>(k - 1)];
    for (auto it = img.rbegin(); it != img.rend(); ++it) back.push_back(-*it);
  }
}

std::span<const EdgeId> GraphMap::image(EdgeId e) const {
  const auto idx = static_cast<std::size_t>(std::abs(e) - 1);
  return e > 0 ? std::span<const EdgeId>(forward_.at(idx)) : std::span<const EdgeId>(backward_.at(idx));
}

std::vector<EdgeId> raw_image(const GraphMap& f, std::span<const EdgeId> edges) {
  std::vector<EdgeId> out;
  for (EdgeId e : edges) {
    const auto img = f.image(e);
    out.insert(out.end(), img.begin(), img.end());
  }
  return out;
}

EdgePath map_path(const GraphMap& f, const EdgePath& p) {
  std::vector<EdgeId> out;
  for (EdgeId e : p.edges) {
    for (EdgeId x : f.image(e)) {
      if (!out.empty() && out.back() == -x) {
        out.pop_back();
      } else {
        out.push_back(x);
      }
    }
  }
  return EdgePath{f.vertex_image(p.start), std::move(out)};
}

Circuit map_circuit(const GraphMap& f, const Circuit& c) {
  return Circuit::from_loop(f.graph(), tighten_edges(raw_image(f, c.edges())));
}

EdgePath iterate_path(const GraphMap& f, const EdgePath& p, int k) {
  if (k < 0) throw ValidationError("iterate_path: k must be nonnegative");
  EdgePath out = p;
  for (int i = 0; i < k; ++i) out = map_path(f, out);
  return out;
}

Circuit iterate_circuit(const GraphMap& f, const Circuit& c, int k) {
  if (k < 0) throw ValidationError("iterate_circuit: k must be nonnegative");
  Circuit out = c;
  for (int i = 0; i < k; ++i) out = map_circuit(f, out);
  return out;
}

Turn derivative(const GraphMap& f, const Turn& t) {
  return Turn::of(first_image_edge(f, t.first), first_image_edge(f, t.second));
}

TurnClassification::TurnClassification(const GraphMap& f) {
  const Graph& g = f.graph();
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const auto& dirs = g.directions(v);
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      for (std::size_t j = i + 1; j < dirs.size(); ++j) turns_.push_back(Turn::of(dirs[i], dirs[j]));
    }
  }
  std::sort(turns_.begin(), turns_.end());
  // Follow each Df orbit until it degenerates or revisits a turn.
  for (const Turn& t : turns_) {
    std::set<Turn> orbit;
    Turn cur = t;
    int steps = 0;
    bool illegal = false;
    while (true) {
      if (cur.degenerate()) {
        illegal = true;
        break;
      }
      if (!orbit.insert(cur).second) break;
      cur = derivative(f, cur);
      ++steps;
    }
    max_orbit_steps_ = std::max(max_orbit_steps_, steps);
    if (illegal) illegal_.insert(t);
  }
}

TurnClassification classify_turns(const GraphMap& f) { return TurnClassification(f); }

Circuit preimage_circuit(const GraphMap& f, const GraphMap& f_inv, const Circuit& sigma, int k) {
  if (!(f.graph() == f_inv.graph())) throw ValidationError("preimage_circuit: maps live on different graphs");
  const Circuit pre = iterate_circuit(f_inv, sigma, k);
  if (iterate_circuit(f, pre, k) != sigma) {
    throw ValidationError("preimage_circuit: inverse map is inconsistent with the forward map");
  }
  return pre;
}

GraphMap rose_of(const Automorphism& phi, const Alphabet& basis) {
  if (basis.rank() != phi.rank()) throw ValidationError("rose_of: basis and automorphism rank differ");
  std::vector<EdgeSpec> edges;
  std::vector<Word> marking;
  std::vector<std::vector<EdgeId>> images;
  for (int i = 1; i <= phi.rank(); ++i) {
    edges.push_back(EdgeSpec{basis.name(i), 0, 0});
    marking.push_back(Word{i});
    images.push_back(phi.images()[static_cast<std::size_t>(i - 1)].vec());
  }
  Graph g({"v"}, std::move(edges), std::move(marking));
  return GraphMap(std::move(g), {0}, std::move(images), phi.label());
}

GraphMap rose_of(const Automorphism& phi) { return rose_of(phi, Alphabet::standard(phi.rank())); }

namespace {

Word substitute(const std::vector<Word>& images, const Word& w) {
  Word out;
  for (Letter x : w.letters()) {
    const Word& img = images[static_cast<std::size_t>(std::abs(x) - 1)];
    out = out * (x > 0 ? img : img.inverse());
  }
  return out;
}

}  // namespace

Automorphism induced_automorphism(const GraphMap& f) {
  const Graph& g = f.graph();
  if (!g.has_marking()) throw ValidationError("induced_automorphism: graph has no marking");
  const int rank = g.rank();
  for (const auto& w : g.marking()) {
    if (w.max_index() > rank) throw ValidationError("marking uses a generator beyond the rank of the graph");
  }
  // Breadth-first spanning tree rooted at vertex 0.
  std::vector<EdgeId> parent_edge(static_cast<std::size_t>(g.vertex_count()), 0);
  std::vector<bool> in_tree(static_cast<std::size_t>(g.edge_count() + 1), false);
  std::vector<bool> seen(static_cast<std::size_t>(g.vertex_count()), false);
  std::deque<VertexId> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    for (EdgeId e : g.directions(v)) {
      const VertexId w = g.terminus(e);
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = true;
        parent_edge[static_cast<std::size_t>(w)] = e;
        in_tree[static_cast<std::size_t>(std::abs(e))] = true;
        queue.push_back(w);
      }
    }
  }
  auto tree_path = [&](VertexId v) {  // from vertex 0 to v
    std::vector<EdgeId> p;
    while (v != 0) {
      const EdgeId e = parent_edge[static_cast<std::size_t>(v)];
      p.push_back(e);
      v = g.origin(e);
    }
    std::reverse(p.begin(), p.end());
    return p;
  };
  auto reverse_path = [](std::vector<EdgeId> p) {
    std::reverse(p.begin(), p.end());
    for (auto& e : p) e = -e;
    return p;
  };

  const auto tau = tree_path(f.vertex_image(0));
  std::vector<Word> source;  // marking of each basic loop
  std::vector<Word> target;  // marking of tau f(loop) tau^-1
  for (int k = 1; k <= g.edge_count(); ++k) {
    if (in_tree[static_cast<std::size_t>(k)]) continue;
    std::vector<EdgeId> loop = tree_path(g.origin(k));
    loop.push_back(k);
    const auto back = reverse_path(tree_path(g.terminus(k)));
    loop.insert(loop.end(), back.begin(), back.end());
    source.push_back(g.mark(tighten_edges(loop)));
    std::vector<EdgeId> img = tau;
    const auto fl = raw_image(f, loop);
    img.insert(img.end(), fl.begin(), fl.end());
    const auto tau_back = reverse_path(tau);
    img.insert(img.end(), tau_back.begin(), tau_back.end());
    target.push_back(g.mark(tighten_edges(img)));
  }
  std::optional<Automorphism> marking_inverse;
  try {
    const Automorphism mu(rank, source);
    marking_inverse = nielsen_inverse_search(mu, 8 * rank + 16);
  } catch (const ValidationError&) {
  }
  if (!marking_inverse) throw ValidationError("marking does not identify pi_1 with a basis of F");
  std::vector<Word> images;
  for (const auto& w : marking_inverse->images()) images.push_back(substitute(target, w));
  for (const auto& w : images) {
    if (w.empty()) throw ValidationError("graph map does not induce an automorphism");
  }
  return Automorphism(rank, std::move(images), std::nullopt, f.label());
}

bool represents(const GraphMap& f, const Automorphism& phi) {
  return same_outer_class(induced_automorphism(f), phi);
}

std::string format_path(const Graph& g, std::span<const EdgeId> edges) {
  return g.edge_names().format(edges);
}

}  // namespace tt
