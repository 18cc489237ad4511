#include "traintrack/growth.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <iomanip>
#include <sstream>

#include "parallel.hpp"
#include "traintrack/error.hpp"

namespace tt {

namespace {

constexpr double kSlack = 1e-9;

using Range = std::pair<std::size_t, std::size_t>;

// Maximal runs between cut boundaries. Boundary j sits in front of edge j;
// for circuits boundary 0 is the closing turn. An uncut circuit is one run.
std::vector<Range> runs_between_cuts(std::size_t n, bool cyclic, const std::function<bool(std::size_t)>& cut) {
  std::vector<Range> out;
  if (n == 0) return out;
  if (!cyclic) {
    std::size_t b = 0;
    for (std::size_t j = 1; j < n; ++j) {
      if (cut(j)) {
        out.emplace_back(b, j);
        b = j;
      }
    }
    out.emplace_back(b, n);
    return out;
  }
  std::vector<std::size_t> cuts;
  for (std::size_t j = 0; j < n; ++j) {
    if (cut(j)) cuts.push_back(j);
  }
  if (cuts.empty()) {
    out.emplace_back(0, n);
    return out;
  }
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    const std::size_t b = cuts[k];
    const std::size_t e = k + 1 < cuts.size() ? cuts[k + 1] : cuts[0] + n;
    out.emplace_back(b, e);
  }
  return out;
}

EdgeId at(std::span<const EdgeId> p, std::size_t i) { return p[i % p.size()]; }

std::vector<EdgeId> slice(std::span<const EdgeId> p, Range r) {
  std::vector<EdgeId> out;
  out.reserve(r.second - r.first);
  for (std::size_t i = r.first; i < r.second; ++i) out.push_back(at(p, i));
  return out;
}

double range_length(const MapContext& ctx, std::span<const EdgeId> p, Range r, int stratum) {
  double s = 0;
  for (std::size_t i = r.first; i < r.second; ++i) {
    const EdgeId e = at(p, i);
    if (stratum <= 0 || ctx.filt.in_H(e, stratum)) s += ctx.metric.length(e);
  }
  return s;
}

// Turn in front of edge j (j = 0 wraps for circuits).
bool illegal_before(const MapContext& ctx, std::span<const EdgeId> p, std::size_t j, int r) {
  const EdgeId in = p[(j + p.size() - 1) % p.size()];
  const EdgeId out = p[j];
  if (r > 0) return is_r_illegal(ctx.turns, ctx.filt, r, in, out);
  return !ctx.turns.is_legal(in, out);
}

std::string circuit_label(const MapContext& ctx, const Circuit& c) { return format_path(ctx.f.graph(), c.vec()); }

bool in_G(const MapContext& ctx, std::span<const EdgeId> p, int r) { return ctx.filt.in_G(p, r); }

}  // namespace

MapContext::MapContext(GraphMap map)
    : f(std::move(map)), filt(compute_filtration(f)), metric(assign_metric(f, filt)), turns(f) {}

bool MapContext::is_absolute() const {
  return filt.size() == 1 && filt.stratum(1).type == StratumType::exponential;
}

double MapContext::lambda(int r) const {
  if (r < 1 || r > filt.size() || filt.stratum(r).type != StratumType::exponential) {
    throw ValidationError("stratum " + std::to_string(r) + " is not exponential");
  }
  return *filt.stratum(r).lambda;
}

int MapContext::top_exponential() const {
  for (int r = filt.size(); r >= 1; --r) {
    if (filt.stratum(r).type == StratumType::exponential) return r;
  }
  return 0;
}

std::vector<std::pair<std::size_t, std::size_t>> legal_segments(const MapContext& ctx, std::span<const EdgeId> p,
                                                                int r, bool cyclic) {
  return runs_between_cuts(p.size(), cyclic, [&](std::size_t j) { return illegal_before(ctx, p, j, r); });
}

PathStats path_stats(const MapContext& ctx, std::span<const EdgeId> p, std::optional<int> r, bool cyclic) {
  if (p.empty()) throw ValidationError("path_stats: constant path");
  if (r && !in_G(ctx, p, *r)) throw ValidationError("path_stats: path leaves G_" + std::to_string(*r));
  PathStats s;
  s.L = ctx.metric.length(p);
  const std::size_t n = p.size();
  const std::size_t first_turn = cyclic ? 0 : 1;
  for (std::size_t j = first_turn; j < n; ++j) {
    if (illegal_before(ctx, p, j, 0)) ++s.i;
  }
  for (const auto& seg : legal_segments(ctx, p, 0, cyclic)) s.script_L = std::max(s.script_L, range_length(ctx, p, seg, 0));
  if (!r) {
    s.L_r = s.L;
    s.i_r = s.i;
    s.script_L_r = s.script_L;
    return s;
  }
  s.L_r = ctx.metric.r_length(p, ctx.filt, *r);
  for (std::size_t j = first_turn; j < n; ++j) {
    if (illegal_before(ctx, p, j, *r)) ++s.i_r;
  }
  for (const auto& seg : legal_segments(ctx, p, *r, cyclic)) {
    s.script_L_r = std::max(s.script_L_r, range_length(ctx, p, seg, *r));
  }
  return s;
}

PathStats path_stats(const MapContext& ctx, const Circuit& c, std::optional<int> r) {
  return path_stats(ctx, c.edges(), r, true);
}

// ---------------------------------------------------------------------------
// Bounded cancellation

double CancellationData::critical_length(int r) const {
  for (const auto& [s, len] : critical) {
    if (s == r) return len;
  }
  throw ValidationError("no critical length for stratum " + std::to_string(r));
}

double max_cancellation(const MapContext& ctx, int W) {
  // The loss for alpha beta is twice the common prefix of [f(alpha^-1)] and
  // [f(beta)], two paths from the same vertex with different first edges.
  // The largest common prefix between groups is found between neighbours
  // in sorted order.
  const Graph& g = ctx.f.graph();
  struct Item {
    VertexId v;
    EdgeId first;
    std::vector<EdgeId> image;
  };
  std::vector<Item> items;
  walk_tight_paths(
      g, W, [](EdgeId) { return true; },
      [&](std::span<const EdgeId> p) {
        items.push_back({g.origin(p[0]), p[0], tighten_edges(raw_image(ctx.f, p))});
        return true;
      });
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (items[a].v != items[b].v) return items[a].v < items[b].v;
    return letters_less(items[a].image, items[b].image);
  });
  double best = 0;
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    const Item& x = items[order[k]];
    const Item& y = items[order[k + 1]];
    if (x.v != y.v || x.first == y.first) continue;
    double len = 0;
    for (std::size_t i = 0; i < x.image.size() && i < y.image.size() && x.image[i] == y.image[i]; ++i) {
      len += ctx.metric.length(x.image[i]);
    }
    best = std::max(best, len);
  }
  return 2 * best;
}

CancellationData bcc_estimate(const MapContext& ctx, int pair_len_bound) {
  if (pair_len_bound < 1) throw ValidationError("bcc_estimate: pair_len_bound must be at least 1");
  double lambda_min = std::numeric_limits<double>::infinity();
  for (const auto& s : ctx.filt.strata()) {
    if (s.type == StratumType::exponential) lambda_min = std::min(lambda_min, *s.lambda);
  }
  if (!std::isfinite(lambda_min)) lambda_min = 1.0;
  const auto& lens = ctx.metric.lengths();
  const double l_min = *std::min_element(lens.begin(), lens.end());

  CancellationData out;
  for (int W = 1; W <= pair_len_bound; ++W) {
    out.max_by_window.push_back(max_cancellation(ctx, W));
    if (W < 2) continue;
    const double prev = out.max_by_window[static_cast<std::size_t>(W - 2)];
    const double cur = out.max_by_window.back();
    const int stable_w = W - 1;
    if (std::abs(cur - prev) <= kSlack * std::max(1.0, cur) && prev < lambda_min * (stable_w - 1) * l_min - kSlack * std::max(1.0, prev)) {
      out.stable = true;
      out.window = stable_w;
      break;
    }
  }
  out.C_f = out.max_by_window.back();
  if (!out.stable) out.window = pair_len_bound;
  for (const auto& s : ctx.filt.strata()) {
    if (s.type == StratumType::exponential) out.critical.emplace_back(s.index, 2 * out.C_f / (*s.lambda - 1));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Backward length validators

std::size_t ValidationReport::violations() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.pass; }));
}

ValidationReport validate_bw1(const MapContext& ctx, const GraphMap& f_inv, const std::vector<Circuit>& circuits,
                              int k_max, const CancellationData& cancel, int jobs) {
  if (!ctx.is_absolute()) throw ValidationError("validate_bw1: needs a train track map with one exponential stratum");
  const double lambda = ctx.lambda(1);
  const double Lc = cancel.critical_length(1);
  ValidationReport rep;
  rep.lemma = "bw1";
  std::vector<std::vector<ValidationRow>> per(circuits.size());
  std::vector<int> weak_failures(circuits.size(), 0);
  detail::parallel_for(circuits.size(), jobs, [&](std::size_t idx) {
    const Circuit& sigma = circuits[idx];
    const double sL = path_stats(ctx, sigma).script_L;
    const std::string label = circuit_label(ctx, sigma);
    for (int k = 1; k <= k_max; ++k) {
      const Circuit pre = preimage_circuit(ctx.f, f_inv, sigma, k);
      const PathStats st = path_stats(ctx, pre);
      ValidationRow row{label, k, st.L, st.L_r, st.i, st.i_r, st.script_L, 0, 0, true};
      row.bound = sL / std::pow(lambda, k) + Lc;
      row.margin = row.bound - st.script_L;
      const bool weak = st.script_L < sL + Lc - kSlack * std::max(1.0, sL + Lc);
      if (!weak) ++weak_failures[idx];
      row.pass = row.margin > kSlack * std::max(1.0, row.bound) && weak;
      per[idx].push_back(std::move(row));
    }
  });
  int weak_total = 0;
  for (std::size_t i = 0; i < per.size(); ++i) {
    rep.rows.insert(rep.rows.end(), per[i].begin(), per[i].end());
    weak_total += weak_failures[i];
  }
  std::ostringstream note;
  note << std::setprecision(12) << "L^c = " << Lc << ", weak form violated in " << weak_total << " rows";
  rep.notes.push_back(note.str());
  return rep;
}

ValidationReport validate_bw2(const MapContext& ctx, const GraphMap& f_inv, const std::vector<Circuit>& circuits,
                              int k_max, const CancellationData& cancel, int r, int jobs) {
  ctx.lambda(r);  // throws unless H_r is exponential
  const double Lc = cancel.critical_length(r);
  ValidationReport rep;
  rep.lemma = "bw2";
  std::vector<std::vector<ValidationRow>> per(circuits.size());
  detail::parallel_for(circuits.size(), jobs, [&](std::size_t idx) {
    const Circuit& sigma = circuits[idx];
    const double sL = path_stats(ctx, sigma, r).script_L_r;
    const std::string label = circuit_label(ctx, sigma);
    for (int k = 1; k <= k_max; ++k) {
      const Circuit pre = preimage_circuit(ctx.f, f_inv, sigma, k);
      ValidationRow row;
      row.circuit = label;
      row.k = k;
      row.bound = sL + Lc;
      if (!in_G(ctx, pre.edges(), r)) {
        row.pass = false;
        row.margin = -std::numeric_limits<double>::infinity();
        per[idx].push_back(row);
        continue;
      }
      const PathStats st = path_stats(ctx, pre, r);
      row.L = st.L;
      row.Lr = st.L_r;
      row.i = st.i;
      row.ir = st.i_r;
      row.scriptL = st.script_L_r;
      row.margin = row.bound - st.script_L_r;
      row.pass = row.margin > kSlack * std::max(1.0, row.bound);
      per[idx].push_back(std::move(row));
    }
  });
  for (auto& rows : per) rep.rows.insert(rep.rows.end(), rows.begin(), rows.end());
  std::ostringstream note;
  note << std::setprecision(12) << "L^c_" << r << " = " << Lc;
  rep.notes.push_back(note.str());
  return rep;
}

// ---------------------------------------------------------------------------
// Illegal turns against length

namespace {

IllenResult illen_impl(const MapContext& ctx, const std::vector<std::vector<EdgeId>>& sample, double L,
                       std::optional<int> r) {
  IllenResult out;
  for (const auto& p : sample) {
    if (p.empty() || (r && !in_G(ctx, p, *r))) {
      ++out.skipped;
      continue;
    }
    const PathStats st = path_stats(ctx, p, r);
    const double script = r ? st.script_L_r : st.script_L;
    const double len = r ? st.L_r : st.L;
    const int i = r ? st.i_r : st.i;
    if (i <= 0 || script < 1 - kSlack || script > L + kSlack) {
      ++out.skipped;
      continue;
    }
    ++out.used;
    out.C = std::max({out.C, len / i, i / len});
  }
  if (out.used == 0) throw ValidationError("validate_illen: no admissible path in the sample");
  return out;
}

}  // namespace

IllenResult validate_illen(const MapContext& ctx, const std::vector<std::vector<EdgeId>>& sample, double L) {
  return illen_impl(ctx, sample, L, std::nullopt);
}

IllenResult validate_illen2(const MapContext& ctx, const std::vector<std::vector<EdgeId>>& sample, double L, int r) {
  ctx.lambda(r);
  return illen_impl(ctx, sample, L, r);
}

// ---------------------------------------------------------------------------
// Trichotomy

const char* to_string(TrichotomyCase c) {
  switch (c) {
    case TrichotomyCase::long_legal_segment: return "long-legal-segment";
    case TrichotomyCase::fewer_illegal_turns: return "fewer-illegal-turns";
    case TrichotomyCase::pre_nielsen_splitting: return "pre-nielsen-splitting";
    case TrichotomyCase::unresolved: return "unresolved";
  }
  return "?";
}

TrichotomyVerdict trichotomy_classify(const MapContext& ctx, std::span<const EdgeId> rho, int M, double L,
                                      std::optional<int> r, const TrichotomyOptions& opts) {
  if (M < 1) throw ValidationError("trichotomy_classify: M must be at least 1");
  if (rho.empty()) throw ValidationError("trichotomy_classify: constant path");
  const std::vector<EdgeId> tight = tighten_edges(rho);
  if (!std::equal(rho.begin(), rho.end(), tight.begin(), tight.end())) {
    throw ValidationError("trichotomy_classify: path is not tight");
  }
  const int level = r.value_or(0);
  if (r) {
    ctx.lambda(*r);
    if (!in_G(ctx, rho, *r)) throw ValidationError("trichotomy_classify: path leaves G_r");
    if (ctx.metric.r_length(rho, ctx.filt, *r) < 1 - kSlack) {
      throw ValidationError("trichotomy_classify: relative form needs L_r(rho) >= 1");
    }
  }
  make_path(ctx.f.graph(), tight);  // throws on a broken path

  TrichotomyVerdict v;
  const PathStats before = path_stats(ctx, rho, r);
  v.i_before = r ? before.i_r : before.i;
  std::vector<EdgeId> img(rho.begin(), rho.end());
  for (int k = 0; k < M; ++k) img = tighten_edges(raw_image(ctx.f, img));
  v.image = img;
  if (!img.empty()) {
    const PathStats after = path_stats(ctx, img, r);
    v.image_script_L = r ? after.script_L_r : after.script_L;
    v.i_after = r ? after.i_r : after.i;
  }
  if (v.image_script_L > L + kSlack * std::max(1.0, L)) {
    v.kind = TrichotomyCase::long_legal_segment;
    return v;
  }
  if (v.i_after < v.i_before) {
    v.kind = TrichotomyCase::fewer_illegal_turns;
    return v;
  }

  // Case 3 over vertex cut points: prefix sums of (r-)length and illegal turns.
  const std::size_t n = rho.size();
  std::vector<double> len(n + 1, 0);
  std::vector<int> ill(n + 1, 0);  // ill[j]: illegal turns in front of edges 1..j-1
  std::vector<bool> bad(n + 1, false);
  for (std::size_t j = 0; j < n; ++j) {
    const EdgeId e = rho[j];
    len[j + 1] = len[j] + ((!r || ctx.filt.in_H(e, *r)) ? ctx.metric.length(e) : 0.0);
    bad[j] = j > 0 && illegal_before(ctx, rho, j, level);
  }
  for (std::size_t j = 1; j <= n; ++j) ill[j] = ill[j - 1] + (j - 1 > 0 && bad[j - 1] ? 1 : 0);
  // Illegal turns strictly inside [a, b).
  auto inside = [&](std::size_t a, std::size_t b) { return b > a ? ill[b] - ill[a + 1] : 0; };
  auto tau_ok = [&](std::size_t a, std::size_t b) {
    return len[b] - len[a] <= 2 * L + kSlack && inside(a, b) <= 1;
  };
  auto lower_piece = [&](std::size_t a, std::size_t b) {
    if (!r || *r <= 1) return false;
    return in_G(ctx, rho.subspan(a, b - a), *r - 1);
  };
  std::vector<std::vector<int>> piece_kind(n + 1, std::vector<int>(n + 1, -1));  // -1 unknown, 0 no, 1 pre-N, 2 lower
  auto piece = [&](std::size_t a, std::size_t b) {
    int& k = piece_kind[a][b];
    if (k >= 0) return k;
    k = 0;
    if (lower_piece(a, b)) {
      k = 2;
    } else if (inside(a, b) == 1 &&
               is_pre_nielsen(ctx.f, rho.subspan(a, b - a), opts.iter_bound, opts.period_bound)) {
      k = 1;
    }
    return k;
  };

  std::size_t best_a = 0, best_b = 0;
  bool found = false;
  std::vector<std::ptrdiff_t> parent(n + 1);
  std::vector<std::ptrdiff_t> best_parent;
  for (std::size_t a = 0; a <= n; ++a) {
    if (!tau_ok(0, a)) break;  // longer prefixes only get worse
    std::fill(parent.begin(), parent.end(), -1);
    std::vector<bool> reach(n + 1, false);
    reach[a] = true;
    for (std::size_t c = a; c <= n; ++c) {
      if (!reach[c]) continue;
      if (c > a && c < n && bad[c]) continue;  // pieces meet at legal turns
      for (std::size_t d = c + 1; d <= n; ++d) {
        if (reach[d]) continue;
        if (piece(c, d)) {
          reach[d] = true;
          parent[d] = static_cast<std::ptrdiff_t>(c);
        }
      }
    }
    for (std::size_t b = n + 1; b-- > a;) {
      if (!reach[b] || !tau_ok(b, n)) continue;
      if (!found || b - a > best_b - best_a) {
        found = true;
        best_a = a;
        best_b = b;
        best_parent = parent;
      }
      break;
    }
  }
  if (!found) return v;
  v.kind = TrichotomyCase::pre_nielsen_splitting;
  v.tau1.assign(rho.begin(), rho.begin() + static_cast<std::ptrdiff_t>(best_a));
  v.tau2.assign(rho.begin() + static_cast<std::ptrdiff_t>(best_b), rho.end());
  for (std::size_t d = best_b; d > best_a;) {
    const auto c = static_cast<std::size_t>(best_parent[d]);
    v.pieces.emplace_back(rho.begin() + static_cast<std::ptrdiff_t>(c), rho.begin() + static_cast<std::ptrdiff_t>(d));
    v.piece_is_lower.push_back(piece_kind[c][d] == 2);
    d = c;
  }
  std::reverse(v.pieces.begin(), v.pieces.end());
  std::reverse(v.piece_is_lower.begin(), v.piece_is_lower.end());
  return v;
}

// ---------------------------------------------------------------------------
// Backward growth of illegal turns

bool BackgrowthReport::ok() const {
  return M_found && std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.pass; });
}

namespace {

BackgrowthReport backgrowth_impl(const MapContext& ctx, const GraphMap& f_inv, const std::vector<Circuit>& sample,
                                 const BackgrowthOptions& opts, std::optional<int> r, int jobs) {
  if (opts.n_max < 0) throw ValidationError("validate_backgrowth: n_max must be nonnegative");
  if (opts.M < 0 || opts.M_search_max < 1) throw ValidationError("validate_backgrowth: bad exponent bounds");
  if (!(ctx.f.graph() == f_inv.graph())) throw ValidationError("validate_backgrowth: maps live on different graphs");
  const int min_turns = r ? 5 : 4;
  const double ratio = r ? 10.0 / 9.0 : 8.0 / 7.0;

  BackgrowthReport rep;
  std::vector<std::size_t> used;
  std::vector<int> i0;
  for (std::size_t idx = 0; idx < sample.size(); ++idx) {
    const Circuit& c = sample[idx];
    if (r && !in_G(ctx, c.edges(), *r)) {
      ++rep.skipped;
      continue;
    }
    const PathStats st = path_stats(ctx, c, r);
    const double script = r ? st.script_L_r : st.script_L;
    const int i = r ? st.i_r : st.i;
    if (script > opts.L0 + kSlack || i < min_turns) {
      ++rep.skipped;
      continue;
    }
    used.push_back(idx);
    i0.push_back(i);
  }
  rep.used = used.size();
  if (used.empty()) throw ValidationError("validate_backgrowth: no admissible circuit in the sample");

  // Illegal turn counts of sigma^-k for k up to the largest exponent needed;
  // -1 past the letter budget.
  const int m_hi = opts.M > 0 ? opts.M : opts.M_search_max;
  const int k_hi = m_hi * opts.n_max;
  std::vector<std::vector<int>> turns(used.size());
  std::vector<std::string> labels(used.size());
  detail::parallel_for(used.size(), jobs, [&](std::size_t u) {
    const Circuit& sigma = sample[used[u]];
    labels[u] = circuit_label(ctx, sigma);
    auto& t = turns[u];
    t.assign(static_cast<std::size_t>(k_hi + 1), -1);
    t[0] = i0[u];
    Circuit c = sigma;
    for (int k = 1; k <= k_hi; ++k) {
      std::size_t estimate = 0;
      for (EdgeId e : c.edges()) estimate += f_inv.image(e).size();
      if (estimate > opts.letter_budget) break;
      c = map_circuit(f_inv, c);
      if (r && !in_G(ctx, c.edges(), *r)) break;
      const PathStats st = path_stats(ctx, c, r);
      t[static_cast<std::size_t>(k)] = r ? st.i_r : st.i;
    }
  });

  auto rows_for = [&](int M) {
    std::vector<BackgrowthRow> rows;
    for (std::size_t u = 0; u < used.size(); ++u) {
      for (int n = 0; n <= opts.n_max; ++n) {
        BackgrowthRow row;
        row.circuit = labels[u];
        row.n = n;
        row.i0 = i0[u];
        row.i_n = turns[u][static_cast<std::size_t>(n * M)];
        row.bound = std::pow(ratio, n) * row.i0;
        row.pass = row.i_n < 0 || row.i_n + kSlack >= row.bound;
        rows.push_back(std::move(row));
      }
    }
    return rows;
  };
  auto all_pass = [](const std::vector<BackgrowthRow>& rows) {
    return std::all_of(rows.begin(), rows.end(), [](const auto& x) { return x.pass; });
  };

  if (opts.M > 0) {
    rep.M = opts.M;
    rep.rows = rows_for(opts.M);
    rep.M_found = all_pass(rep.rows);
  } else {
    for (int M = 1; M <= opts.M_search_max; ++M) {
      rep.M = M;
      rep.rows = rows_for(M);
      if (all_pass(rep.rows)) {
        rep.M_found = true;
        break;
      }
    }
    if (!rep.M_found) {
      rep.notes.push_back("no exponent M <= " + std::to_string(opts.M_search_max) + " works on the sample");
    }
  }
  const auto skipped_rows =
      std::count_if(rep.rows.begin(), rep.rows.end(), [](const auto& x) { return x.i_n < 0; });
  if (skipped_rows > 0) rep.notes.push_back(std::to_string(skipped_rows) + " rows exceeded the letter budget");
  return rep;
}

}  // namespace

BackgrowthReport validate_backgrowth(const MapContext& ctx, const GraphMap& f_inv, const std::vector<Circuit>& sample,
                                     const BackgrowthOptions& opts, int jobs) {
  return backgrowth_impl(ctx, f_inv, sample, opts, std::nullopt, jobs);
}

BackgrowthReport validate_bgrowth2(const MapContext& ctx, const GraphMap& f_inv, const std::vector<Circuit>& sample,
                                   const BackgrowthOptions& opts, int r, int jobs) {
  ctx.lambda(r);
  return backgrowth_impl(ctx, f_inv, sample, opts, r, jobs);
}

// ---------------------------------------------------------------------------
// Circuit decomposition

const char* to_string(DecompositionCase c) {
  switch (c) {
    case DecompositionCase::legal_segments: return "legal-segments";
    case DecompositionCase::illegal_dense: return "illegal-dense";
    case DecompositionCase::short_bucket: return "short-bucket";
    case DecompositionCase::zero_stratum: return "zero-stratum";
    case DecompositionCase::lower_dominant: return "lower-dominant";
    case DecompositionCase::r_legal_segments: return "r-legal-segments";
    case DecompositionCase::r_illegal_dense: return "r-illegal-dense";
    case DecompositionCase::r_short_bucket: return "r-short-bucket";
    case DecompositionCase::polynomial_split: return "polynomial-split";
  }
  return "?";
}

double longest_path_below(const MapContext& ctx, double L0) {
  // Breadth-first over (last edge, edge counts); the counts fix the length,
  // so the state space stays polynomial in L0.
  const Graph& g = ctx.f.graph();
  const auto E = static_cast<std::size_t>(g.edge_count());
  auto length_of = [&](const std::vector<int>& st) {
    double s = 0;
    for (std::size_t k = 0; k < E; ++k) s += st[k + 1] * ctx.metric.lengths()[k];
    return s;
  };
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> frontier;
  for (int k = 1; k <= g.edge_count(); ++k) {
    for (EdgeId e : {k, -k}) {
      std::vector<int> st(E + 1, 0);
      st[0] = e;
      st[static_cast<std::size_t>(k)] = 1;
      if (length_of(st) < L0 && seen.insert(st).second) frontier.push_back(std::move(st));
    }
  }
  double best = 0;
  while (!frontier.empty()) {
    std::vector<std::vector<int>> next;
    for (const auto& st : frontier) {
      best = std::max(best, length_of(st));
      const EdgeId last = st[0];
      for (EdgeId e : g.directions(g.terminus(last))) {
        if (e == -last) continue;
        std::vector<int> nx = st;
        nx[0] = e;
        ++nx[static_cast<std::size_t>(std::abs(e))];
        if (length_of(nx) < L0 && seen.insert(nx).second) next.push_back(std::move(nx));
      }
    }
    frontier = std::move(next);
  }
  return best;
}

double metric_diameter(const MapContext& ctx) {
  const Graph& g = ctx.f.graph();
  const int V = g.vertex_count();
  double diam = 0;
  for (VertexId s = 0; s < V; ++s) {
    std::vector<double> dist(static_cast<std::size_t>(V), std::numeric_limits<double>::infinity());
    using Item = std::pair<double, VertexId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[static_cast<std::size_t>(s)] = 0;
    pq.emplace(0.0, s);
    while (!pq.empty()) {
      auto [d, v] = pq.top();
      pq.pop();
      if (d > dist[static_cast<std::size_t>(v)]) continue;
      for (EdgeId e : g.directions(v)) {
        const VertexId w = g.terminus(e);
        const double nd = d + ctx.metric.length(e);
        if (nd < dist[static_cast<std::size_t>(w)]) {
          dist[static_cast<std::size_t>(w)] = nd;
          pq.emplace(nd, w);
        }
      }
    }
    for (double d : dist) {
      if (std::isfinite(d)) diam = std::max(diam, d);
    }
  }
  return diam;
}

namespace {

// Longest tight path inside the zero strata. Those edges form a forest, so a
// maximal subpath of a circuit inside one of its trees is no longer than this.
double zero_forest_span(const MapContext& ctx) {
  std::vector<bool> zero(static_cast<std::size_t>(ctx.f.graph().edge_count()) + 1, false);
  int count = 0;
  for (const auto& s : ctx.filt.strata()) {
    if (s.type != StratumType::zero) continue;
    for (int e : s.edges) {
      zero[static_cast<std::size_t>(e)] = true;
      ++count;
    }
  }
  if (count == 0) return 0;
  double best = 0;
  std::vector<double> stack;
  walk_tight_paths(
      ctx.f.graph(), count, [&](EdgeId e) { return zero[static_cast<std::size_t>(std::abs(e))]; },
      [&](std::span<const EdgeId> p) {
        stack.resize(p.size() - 1);
        stack.push_back((stack.empty() ? 0.0 : stack.back()) + ctx.metric.length(p.back()));
        best = std::max(best, stack.back());
        return true;
      });
  return best;
}

void take(const MapContext& ctx, std::span<const EdgeId> c, const std::vector<Range>& ranges, DecompositionReport& rep) {
  double total = 0;
  for (const auto& rg : ranges) {
    rep.S.push_back(slice(c, rg));
    total += range_length(ctx, c, rg, 0);
  }
  rep.fraction = total / ctx.metric.length(c);
}

// Runs of consecutive short segments between the long ones, as ranges; an
// all-short circuit is one run covering it. `internal` counts the cut turns
// strictly inside a run.
struct Run {
  Range range;
  int internal = 0;
};

std::vector<Run> short_runs(std::size_t n, const std::vector<Range>& segs, const std::vector<bool>& is_long,
                            bool uncut) {
  std::vector<Run> out;
  const std::size_t m = segs.size();
  if (uncut) {
    if (!is_long[0]) out.push_back({{0, n}, 0});
    return out;
  }
  const auto first_long = std::find(is_long.begin(), is_long.end(), true);
  if (first_long == is_long.end()) {
    // Every segment short: one run around the circuit, every cut inside it.
    out.push_back({{segs[0].first, segs[0].first + n}, static_cast<int>(m)});
    return out;
  }
  const std::size_t start = static_cast<std::size_t>(first_long - is_long.begin());
  std::optional<Run> cur;
  for (std::size_t t = 1; t <= m; ++t) {
    const std::size_t k = (start + t) % m;
    if (is_long[k] || t == m) {
      if (cur) {
        out.push_back(*cur);
        cur.reset();
      }
      continue;
    }
    // Segment ranges may need lifting by n to stay increasing around the wrap.
    Range rg = segs[k];
    if (cur) {
      while (rg.first < cur->range.second) {
        rg.first += n;
        rg.second += n;
      }
      cur->range.second = rg.second;
      ++cur->internal;
    } else {
      cur = Run{rg, 0};
    }
  }
  return out;
}

void bucket_all(const MapContext& ctx, const Circuit& sigma, DecompositionReport& rep) {
  rep.S.push_back(sigma.vec());
  rep.fraction = 1.0;
  (void)ctx;
}

}  // namespace

DecompositionReport growth_decomposition(const MapContext& ctx, const Circuit& sigma, double L0) {
  if (L0 <= 0) throw ValidationError("growth_decomposition: L0 must be positive");
  const auto c = sigma.edges();
  const std::size_t n = c.size();
  DecompositionReport rep;
  const int r = ctx.filt.height(c);
  rep.stratum = r;
  const Stratum& H = ctx.filt.stratum(r);

  if (H.type == StratumType::zero) {
    rep.kind = DecompositionCase::zero_stratum;
    return rep;
  }
  if (H.type == StratumType::polynomial) {
    rep.kind = DecompositionCase::polynomial_split;
    const Splitting sp = split_basic_paths(ctx.f, sigma, r, ctx.filt);
    for (const auto& piece : sp.pieces) rep.S.push_back(piece.edges);
    rep.fraction = 1.0;
    return rep;
  }

  auto segments_of = [&](int level) {
    return runs_between_cuts(n, true, [&](std::size_t j) { return illegal_before(ctx, c, j, level); });
  };
  auto uncut_at = [&](int level) {
    for (std::size_t j = 0; j < n; ++j) {
      if (illegal_before(ctx, c, j, level)) return false;
    }
    return true;
  };

  if (ctx.is_absolute()) {
    const PathStats st = path_stats(ctx, sigma);
    if (st.i == 0 || st.L / st.i >= L0) {
      rep.kind = DecompositionCase::legal_segments;
      if (st.i == 0) {
        bucket_all(ctx, sigma, rep);
      } else {
        std::vector<Range> keep;
        for (const auto& rg : segments_of(0)) {
          if (range_length(ctx, c, rg, 0) >= L0) keep.push_back(rg);
        }
        take(ctx, c, keep, rep);
      }
      rep.bound = 1 - longest_path_below(ctx, L0) / L0;
    } else if (st.i >= 4) {
      rep.kind = DecompositionCase::illegal_dense;
      const auto segs = segments_of(0);
      std::vector<bool> is_long;
      for (const auto& rg : segs) is_long.push_back(range_length(ctx, c, rg, 0) > 6 * L0);
      std::vector<Range> keep;
      for (const auto& run : short_runs(n, segs, is_long, false)) {
        if (run.internal >= 4) keep.push_back(run.range);
      }
      take(ctx, c, keep, rep);
      rep.bound = 1 / (6 * L0);
    } else {
      rep.kind = DecompositionCase::short_bucket;
      bucket_all(ctx, sigma, rep);
    }
    if (rep.bound) rep.bound_holds = rep.fraction >= *rep.bound - kSlack;
    return rep;
  }

  // Relative exponential stratum. sigma_1 lies in G_{r-1}, or in G_{r-2} when
  // H_{r-1} is a zero stratum, and sigma_2 in H_r.
  int low = r - 1;
  if (low >= 1 && ctx.filt.stratum(low).type == StratumType::zero) --low;
  std::vector<Range> lower;
  double L1 = 0;
  {
    const auto pieces = runs_between_cuts(n, true, [&](std::size_t j) {
      const bool prev = ctx.filt.in_G(c[(j + n - 1) % n], low);
      const bool cur = ctx.filt.in_G(c[j], low);
      return prev != cur;
    });
    for (const auto& rg : pieces) {
      if (low >= 1 && ctx.filt.in_G(at(c, rg.first), low)) {
        lower.push_back(rg);
        L1 += range_length(ctx, c, rg, 0);
      }
    }
  }
  const PathStats st = path_stats(ctx, sigma, r);
  const double L2 = st.L_r;
  if (L1 / L2 >= L0) {
    rep.kind = DecompositionCase::lower_dominant;
    std::vector<Range> keep;
    for (const auto& rg : lower) {
      if (range_length(ctx, c, rg, 0) >= L0) keep.push_back(rg);
    }
    take(ctx, c, keep, rep);
    const double diam = std::max(metric_diameter(ctx), zero_forest_span(ctx));
    rep.bound = (1 - longest_path_below(ctx, L0) / L0) * L0 / (1 + L0 + diam);
  } else if (st.i_r == 0 || st.L_r / st.i_r >= L0) {
    rep.kind = DecompositionCase::r_legal_segments;
    std::vector<Range> keep;
    for (const auto& rg : segments_of(r)) {
      if (range_length(ctx, c, rg, r) >= L0) keep.push_back(rg);
    }
    take(ctx, c, keep, rep);
  } else if (st.i_r >= 5) {
    rep.kind = DecompositionCase::r_illegal_dense;
    const auto segs = segments_of(r);
    std::vector<bool> is_long;
    for (const auto& rg : segs) is_long.push_back(range_length(ctx, c, rg, r) > 7 * L0);
    std::vector<Range> keep;
    for (const auto& run : short_runs(n, segs, is_long, uncut_at(r))) {
      if (run.internal >= 5) keep.push_back(run.range);
    }
    take(ctx, c, keep, rep);
  } else {
    rep.kind = DecompositionCase::r_short_bucket;
    bucket_all(ctx, sigma, rep);
  }
  if (rep.bound) rep.bound_holds = rep.fraction >= *rep.bound - kSlack;
  return rep;
}

}  // namespace tt
