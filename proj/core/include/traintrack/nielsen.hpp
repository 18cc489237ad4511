#pragma once

#include <optional>
#include <string>
#include <vector>

#include "traintrack/graph_map.hpp"
#include "traintrack/strata.hpp"

namespace tt {

/// A point of the graph: a vertex, or an interior point of a positive edge.
struct GraphPoint {
  VertexId vertex = -1;  // >= 0 for a vertex
  EdgeId edge = 0;       // > 0 for an interior point
  double fraction = 0;   // position along `edge` from its origin, in (0, 1)

  bool is_vertex() const noexcept { return vertex >= 0; }
  bool same_as(const GraphPoint& o, double tol = 1e-9) const;
};

/// Periodic Nielsen path. `path` lists the edges it meets; the first and last
/// may be crossed only partially, with `head` the fraction of the first edge
/// (measured back from its terminal end) and `tail` the fraction of the last
/// edge (from its origin) that belong to the path.
struct NielsenPathRecord {
  EdgePath path;
  double head = 1.0;
  double tail = 1.0;
  int period = 1;
  bool indivisible = false;
  int height = 0;
  int illegal_turn_count = 0;

  bool vertex_endpoints() const noexcept { return head == 1.0 && tail == 1.0; }
  GraphPoint start_point(const Graph& g) const;
  GraphPoint end_point(const Graph& g) const;
  NielsenPathRecord reversed(const Graph& g) const;
};

struct NielsenSearchOptions {
  int len_bound = 8;
  int period_bound = 6;
  /// Cap on the number of vertex paths examined by the exhaustive pass.
  std::size_t path_budget = 20'000'000;
  double tol = 1e-9;
};

struct NielsenInventory {
  std::vector<NielsenPathRecord> records;
  int len_bound = 0;
  int period_bound = 0;
  /// False when the exhaustive pass stopped at the path budget.
  bool complete = true;
  std::size_t paths_examined = 0;
};

/// Every tight vertex path with at most len_bound edges and [f^k(p)] = p for
/// some k <= period_bound (one of p and its reversal), plus indivisible
/// Nielsen paths found by growing two legal rays from each illegal turn.
/// The ray search admits endpoints inside edges.
NielsenInventory find_nielsen_paths(const GraphMap& f, const Filtration& filt, const Metric& metric,
                                    const NielsenSearchOptions& opts);
NielsenInventory find_nielsen_paths(const GraphMap& f, int len_bound, int period_bound);

/// Least k in 1..period_bound with [f^k(p)] = p, if any. `p` must be tight
/// and nonconstant.
std::optional<int> nielsen_period(const GraphMap& f, std::span<const EdgeId> p, int period_bound);

struct PreNielsenWitness {
  int iterate = 0;  // j with [f^j(p)] Nielsen
  int period = 0;
};

/// [f^j(p)] is a Nielsen path of period <= period_bound for some j <= iter_bound.
std::optional<PreNielsenWitness> pre_nielsen_witness(const GraphMap& f, std::span<const EdgeId> p, int iter_bound,
                                                     int period_bound);
bool is_pre_nielsen(const GraphMap& f, std::span<const EdgeId> p, int iter_bound, int period_bound = 6);

/// What the caller vouches for before the endpoint constraints may be checked.
struct NpPreconditions {
  bool improved_verified = false;  // verify_rtt and verify_improved passed
  bool atoroidal = false;          // the represented class is atoroidal
};

struct NpReport {
  std::vector<std::string> violations;
  bool ok() const noexcept { return violations.empty(); }
};

/// Endpoint constraints for Nielsen paths of an improved train track map
/// representing an atoroidal class. Throws ValidationError when the caller
/// does not vouch for both preconditions.
NpReport check_np_constraints(const GraphMap& f, const NielsenPathRecord& record, const Filtration& filt,
                              const NpPreconditions& pre);

enum class PieceKind { edge_gamma, gamma_edgebar, edge_gamma_edgebar, lower };
const char* to_string(PieceKind k);

struct SplitPiece {
  PieceKind kind = PieceKind::lower;
  std::vector<EdgeId> edges;
};

/// Decomposition of a circuit into consecutive pieces, read cyclically.
struct Splitting {
  std::vector<SplitPiece> pieces;
};

/// Cuts sigma at the initial endpoint of every occurrence of E_r and the
/// terminal endpoint of every occurrence of its inverse. H_r must be a
/// polynomial single-edge stratum and sigma must lie in G_r. A circuit that
/// avoids E_r comes back as one lower piece.
Splitting split_basic_paths(const GraphMap& f, const Circuit& sigma, int r, const Filtration& filt);

/// For k = 1..k_max, the pieces' tightened f^k images concatenate (cyclically)
/// without any cancellation at the cut points.
bool verify_splitting(const GraphMap& f, const Splitting& split, int k_max);

}  // namespace tt
