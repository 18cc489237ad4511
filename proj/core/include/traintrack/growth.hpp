#pragma once

#include <optional>
#include <string>
#include <vector>

#include "traintrack/graph_map.hpp"
#include "traintrack/nielsen.hpp"
#include "traintrack/strata.hpp"

namespace tt {

/// A graph map with its filtration, metric and turn data computed once.
struct MapContext {
  explicit MapContext(GraphMap map);

  GraphMap f;
  Filtration filt;
  Metric metric;
  TurnClassification turns;

  /// One exponential stratum containing every edge.
  bool is_absolute() const;
  /// Growth rate of H_r; throws ValidationError unless H_r is exponential.
  double lambda(int r) const;
  /// Highest exponential stratum, 0 when there is none.
  int top_exponential() const;
};

struct PathStats {
  double L = 0;         // metric length
  double L_r = 0;       // length of the edges in H_r
  int i = 0;            // illegal turns
  int i_r = 0;          // r-illegal turns
  double script_L = 0;  // length of the longest legal segment
  double script_L_r = 0;  // r-length of the longest r-legal segment
};

/// Statistics of a tight path, read cyclically when `cyclic`. Without `r`
/// the r-quantities repeat the absolute ones. Throws ValidationError on a
/// constant path or a path leaving G_r.
PathStats path_stats(const MapContext& ctx, std::span<const EdgeId> p, std::optional<int> r = std::nullopt,
                     bool cyclic = false);
PathStats path_stats(const MapContext& ctx, const Circuit& c, std::optional<int> r = std::nullopt);

/// Maximal (r-)legal segments as [begin, end) index ranges; for circuits a
/// segment may wrap, in which case end > size.
std::vector<std::pair<std::size_t, std::size_t>> legal_segments(const MapContext& ctx, std::span<const EdgeId> p,
                                                                int r, bool cyclic);

struct CancellationData {
  double C_f = 0;
  int window = 0;       // stabilization window W
  bool stable = false;  // false: C_f is only a lower bound
  std::vector<double> max_by_window;  // index W - 1
  std::vector<std::pair<int, double>> critical;  // (r, 2 C_f / (lambda_r - 1)) per exponential stratum

  double critical_length(int r) const;
};

/// Largest metric length cancelled when tightening [f(alpha)][f(beta)] over
/// tight concatenations alpha beta with at most W edges on each side.
double max_cancellation(const MapContext& ctx, int W);

/// Grows W from 1 until the maximum is unchanged from W to W + 1 and below
/// lambda_min * (W - 1) * l_min, or until pair_len_bound.
CancellationData bcc_estimate(const MapContext& ctx, int pair_len_bound);

struct ValidationRow {
  std::string circuit;
  int k = 0;
  double L = 0, Lr = 0;
  int i = 0, ir = 0;
  double scriptL = 0;
  double bound = 0;
  double margin = 0;
  bool pass = true;
};

struct ValidationReport {
  std::string lemma;
  std::vector<ValidationRow> rows;
  std::vector<std::string> notes;

  std::size_t violations() const;
  bool ok() const { return violations() == 0; }
};

/// For each circuit and k <= k_max: L(sigma^-k) < L(sigma) / lambda^k + L^c,
/// with scriptL measured on sigma^-k = [g^k(sigma)], g a homotopy inverse.
/// Needs an absolute train track map.
ValidationReport validate_bw1(const MapContext& ctx, const GraphMap& f_inv, const std::vector<Circuit>& circuits,
                              int k_max, const CancellationData& cancel, int jobs = 1);
/// Relative form for the exponential stratum H_r: scriptL_r(sigma^-k) < scriptL_r(sigma) + L^c_r.
ValidationReport validate_bw2(const MapContext& ctx, const GraphMap& f_inv, const std::vector<Circuit>& circuits,
                              int k_max, const CancellationData& cancel, int r, int jobs = 1);

struct IllenResult {
  double C = 0;
  std::size_t used = 0;
  std::size_t skipped = 0;  // outside 1 <= scriptL <= L or without illegal turns
};

/// Least C with C^-1 i <= L <= C i over the admissible part of the sample.
/// Throws ValidationError when nothing in the sample is admissible.
IllenResult validate_illen(const MapContext& ctx, const std::vector<std::vector<EdgeId>>& sample, double L);
IllenResult validate_illen2(const MapContext& ctx, const std::vector<std::vector<EdgeId>>& sample, double L, int r);

enum class TrichotomyCase { long_legal_segment, fewer_illegal_turns, pre_nielsen_splitting, unresolved };
const char* to_string(TrichotomyCase c);

struct TrichotomyVerdict {
  TrichotomyCase kind = TrichotomyCase::unresolved;
  std::vector<EdgeId> image;  // [f^M(rho)]
  double image_script_L = 0;
  int i_before = 0;
  int i_after = 0;
  // Case 3: rho = tau1 rho' tau2, rho' cut into pieces.
  std::vector<EdgeId> tau1, tau2;
  std::vector<std::vector<EdgeId>> pieces;
  std::vector<bool> piece_is_lower;  // segment in G_{r-1} rather than pre-Nielsen
};

struct TrichotomyOptions {
  int iter_bound = 6;    // pre-Nielsen search depth
  int period_bound = 6;  // Nielsen period bound
};

/// Cases in order: a legal segment of [f^M(rho)] longer than L; fewer
/// illegal turns; rho = tau1 rho' tau2 with rho' split into pre-Nielsen
/// paths with one illegal turn each (and, relative to H_r, segments in
/// G_{r-1}). Case 3 cuts only at vertices and prefers the longest rho'.
TrichotomyVerdict trichotomy_classify(const MapContext& ctx, std::span<const EdgeId> rho, int M, double L,
                                      std::optional<int> r = std::nullopt, const TrichotomyOptions& opts = {});

struct BackgrowthRow {
  std::string circuit;
  int n = 0;
  int i0 = 0;      // i(sigma), or i_r
  int i_n = -1;    // i(sigma^-nM); -1 when skipped for size
  double bound = 0;  // (8/7)^n i0, or (10/9)^n i0
  bool pass = true;
};

struct BackgrowthReport {
  int M = 0;
  bool M_found = false;
  std::vector<BackgrowthRow> rows;
  std::size_t used = 0;
  std::size_t skipped = 0;
  std::vector<std::string> notes;
  bool ok() const;
};

struct BackgrowthOptions {
  double L0 = 0;
  int M = 0;  // 0: search 1..M_search_max for the least M that passes
  int M_search_max = 12;
  int n_max = 3;
  std::size_t letter_budget = 2'000'000;
};

/// (8/7)^n i(sigma) <= i(sigma^-nM) over circuits with scriptL <= L0 and i >= 4.
/// Throws ValidationError when no circuit of the sample qualifies.
BackgrowthReport validate_backgrowth(const MapContext& ctx, const GraphMap& f_inv, const std::vector<Circuit>& sample,
                                     const BackgrowthOptions& opts, int jobs = 1);
/// (10/9)^n i_r(sigma) <= i_r(sigma^-nM) over circuits in G_r with scriptL_r <= L0 and i_r >= 5.
BackgrowthReport validate_bgrowth2(const MapContext& ctx, const GraphMap& f_inv, const std::vector<Circuit>& sample,
                                   const BackgrowthOptions& opts, int r, int jobs = 1);

enum class DecompositionCase {
  legal_segments,          // i = 0 or L / i >= L0
  illegal_dense,           // L / i < L0, i >= 4
  short_bucket,            // L / i < L0, i < 4
  zero_stratum,
  lower_dominant,          // L(sigma_1) / L(sigma_2) >= L0
  r_legal_segments,        // L_r / i_r >= L0
  r_illegal_dense,         // L_r / i_r < L0, i_r >= 5
  r_short_bucket,          // L_r / i_r < L0, i_r < 5
  polynomial_split,
};
const char* to_string(DecompositionCase c);

struct DecompositionReport {
  DecompositionCase kind = DecompositionCase::short_bucket;
  int stratum = 0;
  std::vector<std::vector<EdgeId>> S;
  double fraction = 0;                // L(S) / L(sigma)
  std::optional<double> bound;        // the fraction bound the proof states for this case
  bool bound_holds = true;
};

/// Length of the longest tight path with length strictly below L0.
double longest_path_below(const MapContext& ctx, double L0);
/// Largest metric distance between two vertices.
double metric_diameter(const MapContext& ctx);

/// Case split of the hyperbolicity proof applied to one circuit, returning
/// the collection S of subpaths and checking the stated fraction bound.
DecompositionReport growth_decomposition(const MapContext& ctx, const Circuit& sigma, double L0);

}  // namespace tt
