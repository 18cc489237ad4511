#include <algorithm>
#include <numeric>

#include "traintrack/nielsen.hpp"
#include "traintrack/strata.hpp"

namespace tt {

namespace {

// Edges of G_r lying in tree components of G_r.
std::vector<int> contractible_edges(const Graph& g, const Filtration& filt, int r) {
  std::vector<int> parent(static_cast<std::size_t>(g.vertex_count()));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)];
    return v;
  };
  for (int k = 1; k <= g.edge_count(); ++k) {
    if (filt.in_G(k, r)) parent[static_cast<std::size_t>(find(g.origin(k)))] = find(g.terminus(k));
  }
  std::vector<int> nv(parent.size(), 0), ne(parent.size(), 0);
  for (VertexId v = 0; v < g.vertex_count(); ++v) ++nv[static_cast<std::size_t>(find(v))];
  for (int k = 1; k <= g.edge_count(); ++k) {
    if (filt.in_G(k, r)) ++ne[static_cast<std::size_t>(find(g.origin(k)))];
  }
  std::vector<int> out;
  for (int k = 1; k <= g.edge_count(); ++k) {
    if (!filt.in_G(k, r)) continue;
    const auto c = static_cast<std::size_t>(find(g.origin(k)));
    if (ne[c] == nv[c] - 1) out.push_back(k);
  }
  return out;
}

}  // namespace

ImprovedReport verify_improved(const GraphMap& f, const Filtration& filt, const Metric& metric, int len_bound,
                               int period_bound) {
  const Graph& g = f.graph();
  ImprovedReport report;
  report.len_bound = len_bound;
  report.period_bound = period_bound;
  NielsenSearchOptions opts;
  opts.len_bound = len_bound;
  opts.period_bound = period_bound;
  const auto inv = find_nielsen_paths(f, filt, metric, opts);
  const std::string bounds =
      " (paths <= " + std::to_string(len_bound) + " edges, periods <= " + std::to_string(period_bound) + ")";

  ImprovedProperty p1{1, true, ""};
  for (const auto& r : inv.records) {
    if (r.period != 1) {
      p1.pass = false;
      p1.detail = "Nielsen path " + format_path(g, r.path.edges) + " has period " + std::to_string(r.period);
      break;
    }
  }
  if (p1.pass) p1.detail = std::to_string(inv.records.size()) + " Nielsen paths, all of period one" + bounds;
  report.properties.push_back(p1);

  ImprovedProperty p2{2, true, "zero strata are exactly the contractible parts"};
  for (const auto& s : filt.strata()) {
    const auto tree = contractible_edges(g, filt, s.index);
    const bool is_union = !tree.empty() && tree == s.edges;
    if ((s.type == StratumType::zero) != is_union) {
      p2.pass = false;
      p2.detail = "H_" + std::to_string(s.index) +
                  (s.type == StratumType::zero ? " is zero but not the union of the contractible components of G_"
                                               : " is not zero but is the union of the contractible components of G_") +
                  std::to_string(s.index);
      break;
    }
  }
  report.properties.push_back(p2);

  ImprovedProperty p3{3, true, "every zero stratum is followed by an exponential one"};
  for (int r = 2; r <= filt.size(); ++r) {
    if (filt.stratum(r - 1).type == StratumType::zero && filt.stratum(r).type != StratumType::exponential) {
      p3.pass = false;
      p3.detail = "H_" + std::to_string(r - 1) + " is zero but H_" + std::to_string(r) + " is " +
                  to_string(filt.stratum(r).type);
      break;
    }
  }
  report.properties.push_back(p3);

  ImprovedProperty p4{4, true, "polynomial strata are single edges E with f(E) = E u"};
  for (const auto& s : filt.strata()) {
    if (s.type != StratumType::polynomial) continue;
    const std::string name = "H_" + std::to_string(s.index);
    if (s.edges.size() != 1) {
      p4.pass = false;
      p4.detail = name + " has " + std::to_string(s.edges.size()) + " edges";
    } else if (!s.poly_edge) {
      p4.pass = false;
      p4.detail = "f(" + g.edge(s.edges.front()).name + ") neither starts nor ends with " + g.edge(s.edges.front()).name;
    } else if (filt.height(s.suffix) >= s.index) {
      p4.pass = false;
      p4.detail = "suffix of f(" + g.edge(s.edges.front()).name + ") leaves G_" + std::to_string(s.index - 1);
    }
    if (!p4.pass) break;
  }
  report.properties.push_back(p4);

  ImprovedProperty p5{5, true, ""};
  std::string counts;
  for (const auto& s : filt.strata()) {
    if (s.type != StratumType::exponential) continue;
    const auto n = std::count_if(inv.records.begin(), inv.records.end(),
                                 [&](const NielsenPathRecord& r) { return r.indivisible && r.height == s.index; });
    if (!counts.empty()) counts += ", ";
    counts += "H_" + std::to_string(s.index) + ": " + std::to_string(n);
    if (n > 1) p5.pass = false;
  }
  p5.detail = "indivisible Nielsen paths per exponential stratum: " + (counts.empty() ? std::string("none") : counts) + bounds;
  report.properties.push_back(p5);
  return report;
}

}  // namespace tt
