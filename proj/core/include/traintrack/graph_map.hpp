#pragma once

#include <compare>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "traintrack/free_group.hpp"

namespace tt {

/// Oriented edge: +k is edge k (1-based) in its stored direction, -k its reversal.
using EdgeId = Letter;
/// 0-based vertex index.
using VertexId = int;

struct EdgeSpec {
  std::string name;
  VertexId origin = 0;
  VertexId terminus = 0;
  friend bool operator==(const EdgeSpec&, const EdgeSpec&) = default;
};

/// Finite connected graph, every vertex of valence >= 2, with an optional
/// marking: one word of F per edge. The marking is a homomorphism from
/// edge paths to F; loops read off through a spanning tree give the
/// identification of pi_1 with F.
class Graph {
 public:
  Graph(std::vector<std::string> vertex_names, std::vector<EdgeSpec> edges,
        std::optional<std::vector<Word>> marking = std::nullopt);

  int vertex_count() const noexcept { return static_cast<int>(vertex_names_.size()); }
  int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
  /// Rank of the fundamental group, E - V + 1.
  int rank() const noexcept { return edge_count() - vertex_count() + 1; }

  VertexId origin(EdgeId e) const;
  VertexId terminus(EdgeId e) const;
  /// Oriented edges whose origin is `v`, ordered by letter_key.
  const std::vector<EdgeId>& directions(VertexId v) const { return directions_.at(static_cast<std::size_t>(v)); }
  int valence(VertexId v) const { return static_cast<int>(directions(v).size()); }

  const std::string& vertex_name(VertexId v) const { return vertex_names_.at(static_cast<std::size_t>(v)); }
  const std::vector<std::string>& vertex_names() const noexcept { return vertex_names_; }
  const EdgeSpec& edge(int k) const { return edges_.at(static_cast<std::size_t>(k - 1)); }
  const std::vector<EdgeSpec>& edges() const noexcept { return edges_; }
  VertexId vertex_index(std::string_view name) const;  // -1 when unknown
  /// Edge names as an alphabet, for parsing and printing edge paths.
  const Alphabet& edge_names() const noexcept { return edge_names_; }

  bool has_marking() const noexcept { return marking_.has_value(); }
  const std::vector<Word>& marking() const { return *marking_; }
  Word mark(EdgeId e) const;
  Word mark(std::span<const EdgeId> path) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.vertex_names_ == b.vertex_names_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<std::string> vertex_names_;
  std::vector<EdgeSpec> edges_;
  std::optional<std::vector<Word>> marking_;
  std::vector<std::vector<EdgeId>> directions_;
  Alphabet edge_names_;
};

/// Edge path; an empty edge list is the constant path at `start`.
struct EdgePath {
  VertexId start = 0;
  std::vector<EdgeId> edges;

  bool empty() const noexcept { return edges.empty(); }
  std::size_t size() const noexcept { return edges.size(); }
  VertexId end(const Graph& g) const { return edges.empty() ? start : g.terminus(edges.back()); }
  /// No subword e e^-1.
  bool is_tight() const;
  EdgePath reversed(const Graph& g) const;

  friend bool operator==(const EdgePath&, const EdgePath&) = default;
};

/// Builds a path from a nonempty edge list; throws ValidationError when
/// consecutive endpoints do not match.
EdgePath make_path(const Graph& g, std::vector<EdgeId> edges);
/// Throws ValidationError when endpoints do not match or an edge is out of range.
void check_path(const Graph& g, const EdgePath& p);

/// Cyclically tight closed edge path in canonical (least) rotation.
class Circuit {
 public:
  /// Tightens cyclically and canonicalizes. Throws ValidationError when the
  /// loop is not closed or tightens to nothing.
  static Circuit from_loop(const Graph& g, std::vector<EdgeId> edges);

  std::span<const EdgeId> edges() const noexcept { return edges_; }
  const std::vector<EdgeId>& vec() const noexcept { return edges_; }
  std::size_t size() const noexcept { return edges_.size(); }
  EdgePath as_path(const Graph& g) const { return EdgePath{g.origin(edges_.front()), edges_}; }

  friend bool operator==(const Circuit&, const Circuit&) = default;
  friend bool operator<(const Circuit& a, const Circuit& b) { return letters_less(a.edges_, b.edges_); }

 private:
  std::vector<EdgeId> edges_;
};

/// Unordered pair of oriented edges leaving the same vertex.
struct Turn {
  EdgeId first = 0;
  EdgeId second = 0;

  static Turn of(EdgeId a, EdgeId b) {
    return letter_less(b, a) ? Turn{b, a} : Turn{a, b};
  }
  bool degenerate() const noexcept { return first == second; }

  friend bool operator==(const Turn&, const Turn&) = default;
  friend bool operator<(const Turn& a, const Turn& b) {
    if (a.first != b.first) return letter_less(a.first, b.first);
    return letter_less(a.second, b.second);
  }
};

/// Turn crossed between consecutive edges `in` and `out` of a path.
inline Turn turn_between(EdgeId in, EdgeId out) { return Turn::of(-in, out); }

/// Graph self-map sending vertices to vertices and each edge to a tight path
/// of positive length.
class GraphMap {
 public:
  GraphMap(Graph graph, std::vector<VertexId> vertex_map, std::vector<std::vector<EdgeId>> edge_images,
           std::string label = {});

  const Graph& graph() const noexcept { return graph_; }
  VertexId vertex_image(VertexId v) const { return vertex_map_.at(static_cast<std::size_t>(v)); }
  const std::vector<VertexId>& vertex_map() const noexcept { return vertex_map_; }
  std::span<const EdgeId> image(EdgeId e) const;
  const std::string& label() const noexcept { return label_; }

 private:
  Graph graph_;
  std::vector<VertexId> vertex_map_;
  std::vector<std::vector<EdgeId>> forward_;
  std::vector<std::vector<EdgeId>> backward_;
  std::string label_;
};

/// Cancels e e^-1 pairs with a stack scan.
std::vector<EdgeId> tighten_edges(std::span<const EdgeId> edges);
/// Tight path homotopic rel endpoints. Throws ValidationError on endpoint mismatch.
EdgePath tighten(const Graph& g, const EdgePath& p);

/// f applied edgewise, without tightening.
std::vector<EdgeId> raw_image(const GraphMap& f, std::span<const EdgeId> edges);
/// [f(p)].
EdgePath map_path(const GraphMap& f, const EdgePath& p);
/// [f(sigma)], tightened cyclically.
Circuit map_circuit(const GraphMap& f, const Circuit& c);
/// [f^k(p)], k >= 0.
EdgePath iterate_path(const GraphMap& f, const EdgePath& p, int k);
Circuit iterate_circuit(const GraphMap& f, const Circuit& c, int k);

/// First edge of f(e).
inline EdgeId first_image_edge(const GraphMap& f, EdgeId e) { return f.image(e).front(); }
/// Df.
Turn derivative(const GraphMap& f, const Turn& t);

/// Turns at every vertex with their legality under iterates of Df.
class TurnClassification {
 public:
  explicit TurnClassification(const GraphMap& f);

  /// All nondegenerate turns.
  const std::vector<Turn>& turns() const noexcept { return turns_; }
  const std::set<Turn>& illegal() const noexcept { return illegal_; }
  bool is_legal(const Turn& t) const { return !t.degenerate() && !illegal_.contains(t); }
  bool is_legal(EdgeId in, EdgeId out) const { return is_legal(turn_between(in, out)); }
  /// Longest number of Df steps needed to settle any orbit.
  int max_orbit_steps() const noexcept { return max_orbit_steps_; }

 private:
  std::vector<Turn> turns_;
  std::set<Turn> illegal_;
  int max_orbit_steps_ = 0;
};

TurnClassification classify_turns(const GraphMap& f);

/// sigma^-k computed as [g^k(sigma)] where g = f_inv, then checked against
/// [f^k(sigma^-k)] = sigma. Throws ValidationError when the check fails.
Circuit preimage_circuit(const GraphMap& f, const GraphMap& f_inv, const Circuit& sigma, int k);

/// One vertex, one loop per generator, identity marking, edge images spell phi.
GraphMap rose_of(const Automorphism& phi, const Alphabet& basis);
GraphMap rose_of(const Automorphism& phi);

/// Automorphism induced through the marking, a representative of its outer
/// class. Throws ValidationError when the marking is missing or is not a
/// basis of F.
Automorphism induced_automorphism(const GraphMap& f);

/// induced_automorphism(f) and phi agree in Out(F). `phi` needs a verified inverse.
bool represents(const GraphMap& f, const Automorphism& phi);

std::string format_path(const Graph& g, std::span<const EdgeId> edges);

/// Depth-first walk over the tight paths with 1..max_len edges that start at
/// `start` (every vertex when start < 0). `allowed(e)` filters edges and
/// `visit(path)` returns false to stop extending the current path.
template <class Allowed, class Visit>
void walk_tight_paths(const Graph& g, int max_len, Allowed&& allowed, Visit&& visit, VertexId start = -1) {
  std::vector<EdgeId> path;
  path.reserve(static_cast<std::size_t>(max_len));
  auto rec = [&](auto&& self, VertexId v) -> void {
    for (EdgeId e : g.directions(v)) {
      if (!path.empty() && e == -path.back()) continue;
      if (!allowed(e)) continue;
      path.push_back(e);
      if (visit(std::span<const EdgeId>(path)) && static_cast<int>(path.size()) < max_len) self(self, g.terminus(e));
      path.pop_back();
    }
  };
  if (max_len <= 0) return;
  if (start >= 0) {
    rec(rec, start);
  } else {
    for (VertexId v = 0; v < g.vertex_count(); ++v) rec(rec, v);
  }
}

}  // namespace tt
