#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "traintrack/graph_map.hpp"

namespace tt {

/// Dense nonnegative integer matrix, row-major, entries m[i][j].
using IntMatrix = std::vector<std::vector<std::int64_t>>;

/// Transition matrix of a set of edges: entry (i, j) counts how often
/// f(E_j) crosses E_i in either direction.
struct TransitionMatrix {
  std::vector<int> edges;  // positive edge ids, row/column order
  IntMatrix m;

  std::size_t size() const noexcept { return edges.size(); }
  bool is_zero() const;
};

TransitionMatrix transition_matrix(const GraphMap& f, std::span<const int> edges);
/// Support digraph strongly connected. The 1x1 zero matrix is not irreducible.
bool is_irreducible(const IntMatrix& m);

struct PFData {
  double lambda = 0.0;
  std::vector<double> v;  // left eigenvector, min entry 1
  long iterations = 0;
};

/// Perron-Frobenius eigenvalue and left eigenvector of an irreducible matrix
/// by power iteration on M + I. Throws ValidationError for reducible input or
/// when the residual does not drop below tol * lambda * |v| in `max_iter` steps.
PFData pf_eigen(const IntMatrix& m, double tol = 1e-12, long max_iter = 1'000'000);

enum class StratumType { zero, polynomial, exponential };
const char* to_string(StratumType t);

struct Stratum {
  int index = 0;           // 1-based position in the filtration
  std::vector<int> edges;  // positive edge ids, increasing
  StratumType type = StratumType::zero;
  TransitionMatrix matrix;
  std::optional<double> lambda;  // absent for zero strata
  std::vector<double> eigenvector;  // exponential strata only, aligned with `edges`
  // Polynomial single-edge strata with f(E) = E u: E (possibly reversed) and u.
  std::optional<EdgeId> poly_edge;
  std::vector<EdgeId> suffix;

  bool contains(EdgeId e) const;
};

class Filtration {
 public:
  Filtration() = default;
  Filtration(std::vector<Stratum> strata, int edge_count);

  const std::vector<Stratum>& strata() const noexcept { return strata_; }
  int size() const noexcept { return static_cast<int>(strata_.size()); }
  const Stratum& stratum(int r) const { return strata_.at(static_cast<std::size_t>(r - 1)); }
  /// Index r of the stratum holding edge |e|.
  int height(EdgeId e) const { return height_.at(static_cast<std::size_t>(std::abs(e) - 1)); }
  /// Largest height over the edges of `p`, 0 for the empty path.
  int height(std::span<const EdgeId> p) const;
  bool in_H(EdgeId e, int r) const { return height(e) == r; }
  bool in_G(EdgeId e, int r) const { return height(e) <= r; }
  bool in_G(std::span<const EdgeId> p, int r) const { return height(p) <= r; }

 private:
  std::vector<Stratum> strata_;
  std::vector<int> height_;
};

/// Strongly connected components of the edge dependency digraph, lower
/// strata first; ties between incomparable components go to the smaller
/// minimal edge id.
Filtration compute_filtration(const GraphMap& f, double tol = 1e-12);

/// Edge lengths: PF eigenvector entries on exponential strata, 1 elsewhere.
class Metric {
 public:
  Metric() = default;
  explicit Metric(std::vector<double> lengths) : lengths_(std::move(lengths)) {}
  static Metric unit(int edge_count) { return Metric(std::vector<double>(static_cast<std::size_t>(edge_count), 1.0)); }

  double length(EdgeId e) const { return lengths_.at(static_cast<std::size_t>(std::abs(e) - 1)); }
  double length(std::span<const EdgeId> p) const;
  /// Length of the edges of `p` that lie in H_r.
  double r_length(std::span<const EdgeId> p, const Filtration& filt, int r) const;
  const std::vector<double>& lengths() const noexcept { return lengths_; }

 private:
  std::vector<double> lengths_;
};

Metric assign_metric(const GraphMap& f, const Filtration& filt);

/// Turn (in, out) is r-illegal when it is illegal and one of its edges lies in H_r.
bool is_r_illegal(const TurnClassification& tc, const Filtration& filt, int r, EdgeId in, EdgeId out);
/// No r-illegal turn along `p` (read cyclically when `cyclic`).
bool is_r_legal(const TurnClassification& tc, const Filtration& filt, int r, std::span<const EdgeId> p,
                bool cyclic = false);

struct RttViolation {
  int condition = 0;  // 1, 2 or 3
  int stratum = 0;
  EdgeId edge = 0;           // condition 1
  std::vector<EdgeId> path;  // conditions 2 and 3
  std::string message;
};

struct RttStratumResult {
  int stratum = 0;
  bool condition1 = true;
  bool condition2 = true;
  bool condition3 = true;
  std::size_t paths_checked2 = 0;
  std::size_t paths_checked3 = 0;
};

struct RttReport {
  int cond2_bound = 12;
  int cond3_bound = 8;
  std::vector<RttStratumResult> strata;  // exponential strata only
  std::vector<RttViolation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

/// Relative train track conditions for every exponential stratum. Condition 1
/// is checked exactly; conditions 2 and 3 over tight paths with at most
/// `cond2_bound` and `cond3_bound` edges.
RttReport verify_rtt(const GraphMap& f, const Filtration& filt, int cond2_bound = 12, int cond3_bound = 8);

struct ImprovedProperty {
  int number = 0;  // 1..5
  bool pass = true;
  std::string detail;
};

struct ImprovedReport {
  int len_bound = 0;
  int period_bound = 0;
  std::vector<ImprovedProperty> properties;
  bool ok() const;
};

/// Bounded checks of the five improved train track properties. Property 1 and
/// 5 use the Nielsen path search with the given bounds; a pass means no
/// counterexample within those bounds.
ImprovedReport verify_improved(const GraphMap& f, const Filtration& filt, const Metric& metric, int len_bound,
                               int period_bound);

}  // namespace tt
