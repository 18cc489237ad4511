#include "traintrack/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "traintrack/error.hpp"
#include "traintrack/growth.hpp"
#include "traintrack/hyperbolicity.hpp"
#include "traintrack/nielsen.hpp"
#include "traintrack/strata.hpp"
#include "traintrack/text_format.hpp"

namespace tt::cli {

namespace {

using nlohmann::ordered_json;

// Bad flags or unusable input; maps to exit code 2.
struct InputError : Error {
  using Error::Error;
};

struct RunConfig {
  std::string subcommand;
  std::string input;
  std::string format;  // empty: the command's default
  int max_class_len = 0;
  int max_period = 0;
  int m_max = 0;
  int k_max = 5;
  int len_bound = 8;
  int period_bound = 6;
  int cond2_bound = 12;
  int cond3_bound = 8;
  double l0 = 0;  // 0: derived from the critical lengths
  double tol = 1e-12;
  int jobs = 1;
  std::uint64_t seed = 1;
  int pairs = 8;
  int samples = 200;
  int max_len = 12;
  int stratum = 0;
  int exponent = 0;
  int n_max = 3;
  bool strict = false;
  bool exhaustive = false;
  std::string lemma;
  std::string word;
  std::string path;
  int from = 0;
  int to = 6;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// Rounds to 12 significant digits so that JSON output is stable.
ordered_json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::strtod(fmt(x).c_str(), nullptr);
}

struct Input {
  std::optional<GraphMap> map;
  std::optional<Automorphism> phi;
  Alphabet basis;  // generator names of phi
  bool from_graph = false;
  std::vector<std::string> warnings;
};

Input load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  Input out;
  if (looks_like_graph_map(text)) {
    auto file = parse_graph_map(text);
    out.from_graph = true;
    out.warnings = std::move(file.warnings);
    out.basis = file.basis;
    if (file.map.graph().has_marking()) {
      try {
        out.phi = induced_automorphism(file.map);
      } catch (const ValidationError& e) {
        out.warnings.push_back(std::string("no induced automorphism: ") + e.what());
      }
    }
    out.map.emplace(std::move(file.map));
  } else {
    auto file = parse_automorphism(text);
    out.warnings = std::move(file.warnings);
    out.basis = file.basis;
    out.map.emplace(rose_of(file.phi, file.basis));
    out.phi.emplace(std::move(file.phi));
  }
  return out;
}

const Automorphism& need_phi(const Input& in) {
  if (!in.phi) throw InputError("this command needs an automorphism (an .aut file or a marked graph map)");
  return *in.phi;
}

Automorphism need_inverse(const Input& in) {
  const Automorphism& phi = need_phi(in);
  if (phi.inverse_verified()) return phi;
  if (auto found = nielsen_inverse_search(phi, 8)) return phi.with_inverse(found->images());
  throw InputError("this command needs a verified inverse; add 'inv:' lines");
}

GraphMap need_inverse_map(const Input& in) {
  if (in.from_graph) throw InputError("this validator needs an automorphism file with 'inv:' lines");
  const Automorphism phi = need_inverse(in);
  return rose_of(phi.inverse(), in.basis);
}

// Random closed tight walks, cyclically tightened; duplicates are dropped.
std::vector<Circuit> sample_circuits(const MapContext& ctx, std::size_t count, int max_len, std::mt19937_64& rng,
                                     int max_height) {
  const Graph& g = ctx.f.graph();
  std::set<Circuit> seen;
  std::vector<Circuit> out;
  std::uniform_int_distribution<int> len_dist(1, max_len);
  std::uniform_int_distribution<int> vertex_dist(0, g.vertex_count() - 1);
  for (std::size_t attempt = 0; out.size() < count && attempt < count * 500; ++attempt) {
    const int n = len_dist(rng);
    VertexId v = vertex_dist(rng);
    const VertexId start = v;
    std::vector<EdgeId> w;
    for (int k = 0; k < n; ++k) {
      std::vector<EdgeId> options;
      for (EdgeId e : g.directions(v)) {
        if ((w.empty() || e != -w.back()) && (max_height <= 0 || ctx.filt.in_G(e, max_height))) options.push_back(e);
      }
      if (options.empty()) break;
      const EdgeId e = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
      w.push_back(e);
      v = g.terminus(e);
    }
    if (w.empty() || v != start) continue;
    try {
      Circuit c = Circuit::from_loop(g, w);
      if (seen.insert(c).second) out.push_back(std::move(c));
    } catch (const ValidationError&) {
    }
  }
  return out;
}

std::vector<std::vector<EdgeId>> sample_paths(const MapContext& ctx, std::size_t count, int max_len,
                                              std::mt19937_64& rng, int max_height) {
  const Graph& g = ctx.f.graph();
  std::vector<std::vector<EdgeId>> out;
  std::uniform_int_distribution<int> len_dist(1, max_len);
  std::uniform_int_distribution<int> vertex_dist(0, g.vertex_count() - 1);
  for (std::size_t attempt = 0; out.size() < count && attempt < count * 100; ++attempt) {
    const int n = len_dist(rng);
    VertexId v = vertex_dist(rng);
    std::vector<EdgeId> w;
    for (int k = 0; k < n; ++k) {
      std::vector<EdgeId> options;
      for (EdgeId e : g.directions(v)) {
        if ((w.empty() || e != -w.back()) && (max_height <= 0 || ctx.filt.in_G(e, max_height))) options.push_back(e);
      }
      if (options.empty()) break;
      const EdgeId e = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
      w.push_back(e);
      v = g.terminus(e);
    }
    if (!w.empty()) out.push_back(std::move(w));
  }
  return out;
}

std::vector<std::vector<EdgeId>> all_paths(const MapContext& ctx, int max_len, int max_height) {
  std::vector<std::vector<EdgeId>> out;
  walk_tight_paths(
      ctx.f.graph(), max_len, [&](EdgeId e) { return max_height <= 0 || ctx.filt.in_G(e, max_height); },
      [&](std::span<const EdgeId> p) {
        out.emplace_back(p.begin(), p.end());
        return true;
      });
  return out;
}

std::string path_text(const GraphMap& f, std::span<const EdgeId> p) { return format_path(f.graph(), p); }

std::vector<EdgeId> parse_path(const GraphMap& f, const std::string& text) {
  try {
    auto letters = f.graph().edge_names().parse_letters(text);
    if (letters.empty()) throw InputError("empty path");
    make_path(f.graph(), letters);
    return letters;
  } catch (const ValidationError& e) {
    throw InputError(std::string("bad path: ") + e.what());
  }
}

// Generic text rendering of a JSON report, one "key: value" line per leaf.
void print_text(const ordered_json& j, std::ostream& out, const std::string& prefix = "") {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) print_text(v, out, prefix.empty() ? k : prefix + "." + k);
  } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i) print_text(j[i], out, prefix + "[" + std::to_string(i) + "]");
  } else {
    out << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

void emit(const RunConfig& cfg, const ordered_json& j, std::ostream& out) {
  if (cfg.format == "text") {
    print_text(j, out);
  } else {
    out << j.dump(2) << "\n";
  }
}

ordered_json warnings_json(const Input& in) { return in.warnings; }

// ---------------------------------------------------------------------------

int cmd_analyze(const RunConfig& cfg, std::ostream& out) {
  Input in = load(cfg.input);
  const GraphMap& f = *in.map;
  const Graph& g = f.graph();
  const Filtration filt = compute_filtration(f, cfg.tol);
  const Metric metric = assign_metric(f, filt);
  const TurnClassification tc(f);
  const RttReport rtt = verify_rtt(f, filt, cfg.cond2_bound, cfg.cond3_bound);
  const ImprovedReport imp = verify_improved(f, filt, metric, cfg.len_bound, cfg.period_bound);

  ordered_json j;
  j["input"] = cfg.input;
  j["vertices"] = g.vertex_count();
  j["edges"] = g.edge_count();
  j["rank"] = g.rank();
  ordered_json strata = ordered_json::array();
  for (const auto& s : filt.strata()) {
    ordered_json sj;
    sj["index"] = s.index;
    sj["type"] = to_string(s.type);
    ordered_json names = ordered_json::array();
    for (int e : s.edges) names.push_back(g.edge(e).name);
    sj["edges"] = names;
    sj["lambda"] = s.lambda ? num(*s.lambda) : ordered_json(nullptr);
    if (!s.eigenvector.empty()) {
      ordered_json v = ordered_json::array();
      for (double x : s.eigenvector) v.push_back(num(x));
      sj["eigenvector"] = v;
    }
    if (s.poly_edge) {
      sj["poly_edge"] = path_text(f, std::vector<EdgeId>{*s.poly_edge});
      sj["suffix"] = s.suffix.empty() ? "1" : path_text(f, s.suffix);
    }
    strata.push_back(sj);
  }
  j["strata"] = strata;
  ordered_json lengths;
  for (int e = 1; e <= g.edge_count(); ++e) lengths[g.edge(e).name] = num(metric.length(e));
  j["metric"] = lengths;
  ordered_json illegal = ordered_json::array();
  for (const auto& t : tc.illegal()) {
    illegal.push_back({path_text(f, std::vector<EdgeId>{t.first}), path_text(f, std::vector<EdgeId>{t.second})});
  }
  j["turns"] = {{"count", tc.turns().size()}, {"illegal", illegal}, {"max_orbit_steps", tc.max_orbit_steps()}};
  ordered_json viol = ordered_json::array();
  for (const auto& v : rtt.violations) {
    ordered_json vj;
    vj["condition"] = v.condition;
    vj["stratum"] = v.stratum;
    if (v.edge != 0) vj["edge"] = path_text(f, std::vector<EdgeId>{v.edge});
    if (!v.path.empty()) vj["path"] = path_text(f, v.path);
    vj["message"] = v.message;
    viol.push_back(vj);
  }
  j["rtt"] = {{"ok", rtt.ok()}, {"cond2_bound", rtt.cond2_bound}, {"cond3_bound", rtt.cond3_bound},
              {"violations", viol}};
  ordered_json props = ordered_json::array();
  for (const auto& p : imp.properties) props.push_back({{"property", p.number}, {"pass", p.pass}, {"detail", p.detail}});
  j["improved"] = {{"ok", imp.ok()}, {"len_bound", imp.len_bound}, {"period_bound", imp.period_bound},
                   {"properties", props}};
  if (in.phi && g.has_marking()) j["distortion_constant"] = num(distortion_constant(f, metric));
  j["warnings"] = warnings_json(in);
  emit(cfg, j, out);
  if (!rtt.ok()) return kViolation;
  if (cfg.strict && !imp.ok()) return kViolation;
  return kCompleted;
}

int cmd_probe(const RunConfig& cfg, std::ostream& out) {
  Input in = load(cfg.input);
  const Automorphism& phi = need_phi(in);
  const auto rep = atoroidality_probe(phi, cfg.max_class_len, cfg.max_period, cfg.jobs);
  auto witnesses = [&](const std::vector<PeriodicWitness>& ws) {
    ordered_json arr = ordered_json::array();
    for (const auto& w : ws) {
      ordered_json wj;
      wj["class"] = in.basis.format(w.cls);
      wj["period"] = w.period;
      wj["inverse_at"] = w.inverse_at ? ordered_json(*w.inverse_at) : ordered_json(nullptr);
      arr.push_back(wj);
    }
    return arr;
  };
  ordered_json j;
  j["input"] = cfg.input;
  j["verdict"] = to_string(rep.verdict);
  j["max_class_len"] = rep.max_class_len;
  j["max_period"] = rep.max_period;
  j["classes_checked"] = rep.classes_checked;
  j["witnesses"] = witnesses(rep.witnesses);
  j["inverse_only"] = witnesses(rep.inverse_only);
  j["warnings"] = warnings_json(in);
  emit(cfg, j, out);
  return kCompleted;
}

int cmd_certify(const RunConfig& cfg, std::ostream& out) {
  Input in = load(cfg.input);
  const Automorphism phi = need_inverse(in);
  const auto cert = certificate_search(phi, cfg.m_max, cfg.max_class_len, cfg.jobs);
  if (cfg.format == "csv") {
    out << "class,norm,fwd,bwd,ratio\n";
    for (const auto& r : cert.table) {
      out << in.basis.format(r.cls) << "," << r.norm << "," << r.fwd << "," << r.bwd << "," << fmt(r.ratio) << "\n";
    }
    return kCompleted;
  }
  ordered_json j;
  j["input"] = cfg.input;
  j["verdict"] = to_string(cert.verdict);
  j["M"] = cert.M;
  j["lambda"] = num(cert.lambda);
  j["max_class_len"] = cert.max_class_len;
  j["M_max"] = cert.M_max;
  ordered_json r = ordered_json::array();
  for (double x : cert.r_by_M) r.push_back(num(x));
  j["r_by_M"] = r;
  // The rows that attain r(M).
  ordered_json worst = ordered_json::array();
  for (const auto& row : cert.table) {
    if (std::abs(row.ratio - cert.lambda) <= 1e-12 * std::max(1.0, cert.lambda)) {
      worst.push_back({{"class", in.basis.format(row.cls)}, {"norm", row.norm}, {"fwd", row.fwd}, {"bwd", row.bwd}});
      if (worst.size() >= 20) break;
    }
  }
  j["minimizers"] = worst;
  j["warnings"] = warnings_json(in);
  emit(cfg, j, out);
  return kCompleted;
}

int cmd_growth(const RunConfig& cfg, std::ostream& out) {
  Input in = load(cfg.input);
  if (cfg.word.empty()) throw InputError("growth needs --word");
  Automorphism phi = cfg.from < 0 ? need_inverse(in) : need_phi(in);
  Word g;
  try {
    g = reduce(in.basis.parse_letters(cfg.word), phi.rank());
  } catch (const ValidationError& e) {
    throw InputError(std::string("bad word: ") + e.what());
  }
  const auto lens = growth_table(phi, g, cfg.from, cfg.to);
  if (cfg.format != "csv") {
    ordered_json j;
    j["input"] = cfg.input;
    j["word"] = in.basis.format(g);
    ordered_json rows = ordered_json::array();
    for (int k = cfg.from; k <= cfg.to; ++k) rows.push_back({{"k", k}, {"length", lens[static_cast<std::size_t>(k - cfg.from)]}});
    j["series"] = rows;
    emit(cfg, j, out);
    return kCompleted;
  }
  out << "k,length\n";
  for (int k = cfg.from; k <= cfg.to; ++k) out << k << "," << lens[static_cast<std::size_t>(k - cfg.from)] << "\n";
  return kCompleted;
}

int cmd_nielsen(const RunConfig& cfg, std::ostream& out) {
  Input in = load(cfg.input);
  const GraphMap& f = *in.map;
  const Filtration filt = compute_filtration(f, cfg.tol);
  const Metric metric = assign_metric(f, filt);
  NielsenSearchOptions opts;
  opts.len_bound = cfg.len_bound;
  opts.period_bound = cfg.period_bound;
  const auto inv = find_nielsen_paths(f, filt, metric, opts);
  ordered_json j;
  j["input"] = cfg.input;
  j["len_bound"] = inv.len_bound;
  j["period_bound"] = inv.period_bound;
  j["complete"] = inv.complete;
  j["paths_examined"] = inv.paths_examined;
  ordered_json recs = ordered_json::array();
  for (const auto& r : inv.records) {
    ordered_json rj;
    rj["path"] = path_text(f, r.path.edges);
    rj["head"] = num(r.head);
    rj["tail"] = num(r.tail);
    rj["period"] = r.period;
    rj["indivisible"] = r.indivisible;
    rj["height"] = r.height;
    rj["illegal_turns"] = r.illegal_turn_count;
    recs.push_back(rj);
  }
  j["records"] = recs;
  j["warnings"] = warnings_json(in);
  emit(cfg, j, out);
  return kCompleted;
}

// ---------------------------------------------------------------------------
// validate

void csv_rows(const std::vector<ValidationRow>& rows, std::ostream& out) {
  out << "circuit,k,L,Lr,i,ir,scriptL,bound,margin,pass\n";
  for (const auto& r : rows) {
    out << r.circuit << "," << r.k << "," << fmt(r.L) << "," << fmt(r.Lr) << "," << r.i << "," << r.ir << ","
        << fmt(r.scriptL) << "," << fmt(r.bound) << "," << fmt(r.margin) << "," << (r.pass ? "true" : "false")
        << "\n";
  }
}

ordered_json rows_json(const std::vector<ValidationRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({{"circuit", r.circuit}, {"k", r.k}, {"L", num(r.L)}, {"Lr", num(r.Lr)}, {"i", r.i}, {"ir", r.ir},
                   {"scriptL", num(r.scriptL)}, {"bound", num(r.bound)}, {"margin", num(r.margin)},
                   {"pass", r.pass}});
  }
  return arr;
}

int report_rows(const RunConfig& cfg, const std::string& lemma, const std::vector<ValidationRow>& rows,
                const std::vector<std::string>& notes, std::ostream& out) {
  const auto bad = std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.pass; });
  if (cfg.format == "csv") {
    csv_rows(rows, out);
  } else {
    ordered_json j;
    j["input"] = cfg.input;
    j["lemma"] = lemma;
    j["rows"] = rows.size();
    j["violations"] = bad;
    j["notes"] = notes;
    j["table"] = rows_json(rows);
    emit(cfg, j, out);
  }
  return bad == 0 ? kCompleted : kViolation;
}

int default_stratum(const RunConfig& cfg, const MapContext& ctx) {
  const int r = cfg.stratum > 0 ? cfg.stratum : ctx.top_exponential();
  if (r < 1 || r > ctx.filt.size() || ctx.filt.stratum(r).type != StratumType::exponential) {
    throw InputError("no exponential stratum " + std::to_string(r));
  }
  return r;
}

double default_l0(const RunConfig& cfg, const CancellationData& cd) {
  if (cfg.l0 > 0) return cfg.l0;
  double m = 0;
  for (const auto& [r, len] : cd.critical) m = std::max(m, len);
  return m + 1;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  Input in = load(cfg.input);
  MapContext ctx(*in.map);
  std::mt19937_64 rng(cfg.seed);
  const std::string& lemma = cfg.lemma;

  if (lemma == "bcc") {
    const auto cd = bcc_estimate(ctx, cfg.pairs);
    const double observed = max_cancellation(ctx, cfg.pairs);
    const bool holds = observed <= cd.C_f + 1e-9 * std::max(1.0, cd.C_f);
    ordered_json j;
    j["input"] = cfg.input;
    j["lemma"] = "bcc";
    j["C_f"] = num(cd.C_f);
    j["window"] = cd.window;
    j["stable"] = cd.stable;
    ordered_json mw = ordered_json::array();
    for (double x : cd.max_by_window) mw.push_back(num(x));
    j["max_by_window"] = mw;
    ordered_json crit = ordered_json::array();
    for (const auto& [r, len] : cd.critical) crit.push_back({{"stratum", r}, {"critical_length", num(len)}});
    j["critical"] = crit;
    j["pairs"] = cfg.pairs;
    j["max_cancellation_at_pairs"] = num(observed);
    j["pass"] = holds;
    if (!cd.stable) j["note"] = "window did not stabilize; C_f is a lower bound";
    emit(cfg, j, out);
    return holds ? kCompleted : kViolation;
  }
  if (lemma == "bw1" || lemma == "bw2") {
    const GraphMap f_inv = need_inverse_map(in);
    const auto cd = bcc_estimate(ctx, cfg.pairs);
    if (lemma == "bw1") {
      const auto circuits = sample_circuits(ctx, static_cast<std::size_t>(cfg.samples), cfg.max_len, rng, 0);
      const auto rep = validate_bw1(ctx, f_inv, circuits, cfg.k_max, cd, cfg.jobs);
      return report_rows(cfg, "bw1", rep.rows, rep.notes, out);
    }
    const int r = default_stratum(cfg, ctx);
    const auto circuits = sample_circuits(ctx, static_cast<std::size_t>(cfg.samples), cfg.max_len, rng, r);
    const auto rep = validate_bw2(ctx, f_inv, circuits, cfg.k_max, cd, r, cfg.jobs);
    return report_rows(cfg, "bw2", rep.rows, rep.notes, out);
  }
  if (lemma == "illen") {
    const double L = cfg.l0 > 0 ? cfg.l0 : 3.0;
    const int r = cfg.stratum;
    const auto sample = cfg.exhaustive ? all_paths(ctx, cfg.max_len, r)
                                       : sample_paths(ctx, static_cast<std::size_t>(cfg.samples), cfg.max_len, rng, r);
    IllenResult res;
    try {
      res = r > 0 ? validate_illen2(ctx, sample, L, r) : validate_illen(ctx, sample, L);
    } catch (const ValidationError& e) {
      throw InputError(e.what());
    }
    ordered_json j;
    j["input"] = cfg.input;
    j["lemma"] = r > 0 ? "illen2" : "illen";
    j["L"] = num(L);
    j["C"] = num(res.C);
    j["used"] = res.used;
    j["skipped"] = res.skipped;
    emit(cfg, j, out);
    return kCompleted;
  }
  if (lemma == "backgrowth") {
    const GraphMap f_inv = need_inverse_map(in);
    const auto cd = bcc_estimate(ctx, cfg.pairs);
    BackgrowthOptions opts;
    opts.L0 = default_l0(cfg, cd);
    opts.M = cfg.exponent;
    opts.M_search_max = cfg.m_max > 0 ? cfg.m_max : 12;
    opts.n_max = cfg.n_max;
    const bool relative = cfg.stratum > 0 || !ctx.is_absolute();
    const int r = relative ? default_stratum(cfg, ctx) : 0;
    const auto circuits = sample_circuits(ctx, static_cast<std::size_t>(cfg.samples), cfg.max_len, rng, r);
    const auto rep = relative ? validate_bgrowth2(ctx, f_inv, circuits, opts, r, cfg.jobs)
                              : validate_backgrowth(ctx, f_inv, circuits, opts, cfg.jobs);
    if (cfg.format == "csv") {
      out << "circuit,k,L,Lr,i,ir,scriptL,bound,margin,pass\n";
      for (const auto& row : rep.rows) {
        out << row.circuit << "," << row.n * rep.M << ",,," << row.i_n << "," << row.i_n << ",," << fmt(row.bound)
            << "," << (row.i_n < 0 ? std::string() : fmt(row.i_n - row.bound)) << ","
            << (row.pass ? "true" : "false") << "\n";
      }
    } else {
      ordered_json j;
      j["input"] = cfg.input;
      j["lemma"] = relative ? "bgrowth2" : "backgrowth";
      j["L0"] = num(opts.L0);
      j["M"] = rep.M;
      j["M_found"] = rep.M_found;
      j["used"] = rep.used;
      j["skipped"] = rep.skipped;
      j["notes"] = rep.notes;
      ordered_json rows = ordered_json::array();
      for (const auto& row : rep.rows) {
        rows.push_back({{"circuit", row.circuit}, {"n", row.n}, {"i0", row.i0},
                        {"i_n", row.i_n < 0 ? ordered_json(nullptr) : ordered_json(row.i_n)},
                        {"bound", num(row.bound)}, {"pass", row.pass}});
      }
      j["table"] = rows;
      emit(cfg, j, out);
    }
    return rep.ok() ? kCompleted : kViolation;
  }
  if (lemma == "tricho") {
    const double L = cfg.l0 > 0 ? cfg.l0 : default_l0(cfg, bcc_estimate(ctx, cfg.pairs));
    const int M = cfg.exponent > 0 ? cfg.exponent : 1;
    const std::optional<int> r = cfg.stratum > 0 ? std::optional<int>(cfg.stratum) : std::nullopt;
    std::vector<std::vector<EdgeId>> paths;
    if (!cfg.path.empty()) {
      paths.push_back(parse_path(ctx.f, cfg.path));
    } else {
      for (auto& p : sample_paths(ctx, static_cast<std::size_t>(cfg.samples), cfg.max_len, rng, r.value_or(0))) {
        const PathStats st = path_stats(ctx, p, r);
        if ((r ? st.i_r : st.i) <= 6 && (!r || st.L_r >= 1)) paths.push_back(std::move(p));
      }
    }
    TrichotomyOptions topts;
    topts.period_bound = cfg.period_bound;
    ordered_json rows = ordered_json::array();
    int unresolved = 0;
    if (cfg.format == "csv") out << "circuit,k,L,Lr,i,ir,scriptL,bound,margin,pass\n";
    for (const auto& p : paths) {
      const auto v = trichotomy_classify(ctx, p, M, L, r, topts);
      const PathStats st = path_stats(ctx, p, r);
      const bool ok = v.kind != TrichotomyCase::unresolved;
      if (!ok) ++unresolved;
      if (cfg.format == "csv") {
        out << path_text(ctx.f, p) << "," << M << "," << fmt(st.L) << "," << fmt(st.L_r) << "," << v.i_before << ","
            << v.i_after << "," << fmt(v.image_script_L) << "," << fmt(L) << "," << fmt(L - v.image_script_L) << ","
            << (ok ? "true" : "false") << "\n";
        continue;
      }
      ordered_json pieces = ordered_json::array();
      for (const auto& piece : v.pieces) pieces.push_back(path_text(ctx.f, piece));
      rows.push_back({{"path", path_text(ctx.f, p)},
                      {"case", to_string(v.kind)},
                      {"i_before", v.i_before},
                      {"i_after", v.i_after},
                      {"image_scriptL", num(v.image_script_L)},
                      {"tau1", v.tau1.empty() ? "1" : path_text(ctx.f, v.tau1)},
                      {"tau2", v.tau2.empty() ? "1" : path_text(ctx.f, v.tau2)},
                      {"pieces", pieces}});
    }
    if (cfg.format != "csv") {
      ordered_json j;
      j["input"] = cfg.input;
      j["lemma"] = r ? "tricho2" : "tricho1";
      j["M"] = M;
      j["L"] = num(L);
      j["paths"] = paths.size();
      j["unresolved"] = unresolved;
      j["table"] = rows;
      emit(cfg, j, out);
    }
    return unresolved == 0 ? kCompleted : kViolation;
  }
  if (lemma == "decomp") {
    const double L0 = default_l0(cfg, bcc_estimate(ctx, cfg.pairs));
    const auto circuits = sample_circuits(ctx, static_cast<std::size_t>(cfg.samples), cfg.max_len, rng, 0);
    int failures = 0;
    ordered_json rows = ordered_json::array();
    if (cfg.format == "csv") out << "circuit,k,L,Lr,i,ir,scriptL,bound,margin,pass\n";
    for (const auto& c : circuits) {
      const auto d = growth_decomposition(ctx, c, L0);
      if (!d.bound_holds) ++failures;
      const PathStats st = path_stats(ctx, c);
      if (cfg.format == "csv") {
        out << path_text(ctx.f, c.vec()) << ",0," << fmt(st.L) << "," << fmt(st.L_r) << "," << st.i << "," << st.i_r
            << "," << fmt(st.script_L) << "," << (d.bound ? fmt(*d.bound) : std::string()) << ","
            << (d.bound ? fmt(d.fraction - *d.bound) : std::string()) << "," << (d.bound_holds ? "true" : "false")
            << "\n";
        continue;
      }
      rows.push_back({{"circuit", path_text(ctx.f, c.vec())},
                      {"case", to_string(d.kind)},
                      {"stratum", d.stratum},
                      {"pieces", d.S.size()},
                      {"fraction", num(d.fraction)},
                      {"bound", d.bound ? num(*d.bound) : ordered_json(nullptr)},
                      {"pass", d.bound_holds}});
    }
    if (cfg.format != "csv") {
      ordered_json j;
      j["input"] = cfg.input;
      j["lemma"] = "decomp";
      j["L0"] = num(L0);
      j["circuits"] = circuits.size();
      j["violations"] = failures;
      j["table"] = rows;
      emit(cfg, j, out);
    }
    return failures == 0 ? kCompleted : kViolation;
  }
  throw InputError("unknown lemma '" + lemma + "'");
}

void check_config(const RunConfig& cfg) {
  auto positive = [](int v, const char* name) {
    if (v < 1) throw InputError(std::string(name) + " must be positive");
  };
  positive(cfg.max_class_len, "--max-class-len");
  positive(cfg.max_period, "--max-period");
  positive(cfg.m_max, "--m-max");
  positive(cfg.k_max, "--k-max");
  positive(cfg.len_bound, "--len-bound");
  positive(cfg.period_bound, "--period-bound");
  positive(cfg.pairs, "--pairs");
  positive(cfg.samples, "--samples");
  positive(cfg.max_len, "--max-len");
  if (cfg.jobs < 0) throw InputError("--jobs must be nonnegative");
  if (cfg.l0 < 0) throw InputError("--l0 must be positive");
  if (!(cfg.tol > 0 && cfg.tol <= 1e-3)) throw InputError("--tol must lie in (0, 1e-3]");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Train track maps and automorphisms of free groups"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--jobs", cfg.jobs, "Worker threads (0: all cores)");
  app.add_option("--tol", cfg.tol, "Eigenvalue tolerance");
  app.add_option("--seed", cfg.seed, "Sampling seed");

  auto input = [&](CLI::App* sub) { sub->add_option("file", cfg.input, "Input file")->required(); };

  auto* analyze = app.add_subcommand("analyze", "Strata, metric, turns and train track checks");
  input(analyze);
  analyze->add_option("--len-bound", cfg.len_bound, "Nielsen path length bound");
  analyze->add_option("--period-bound", cfg.period_bound, "Nielsen period bound");
  analyze->add_option("--cond2-bound", cfg.cond2_bound, "Path length bound for condition 2");
  analyze->add_option("--cond3-bound", cfg.cond3_bound, "Path length bound for condition 3");
  analyze->add_flag("--strict", cfg.strict, "Exit 1 when an improved property fails");

  cfg.max_class_len = 4;
  cfg.max_period = 2;
  auto* probe = app.add_subcommand("probe", "Search for periodic conjugacy classes");
  input(probe);
  probe->add_option("-L,--max-class-len", cfg.max_class_len, "Longest class");
  probe->add_option("-P,--max-period", cfg.max_period, "Largest period");

  auto* certify = app.add_subcommand("certify", "Search for a hyperbolicity certificate");
  input(certify);
  certify->add_option("-M,--m-max", cfg.m_max, "Largest exponent");
  certify->add_option("-L,--max-class-len", cfg.max_class_len, "Longest class");

  auto* growth = app.add_subcommand("growth", "Conjugacy lengths along an orbit");
  input(growth);
  growth->add_option("--word", cfg.word, "Group element")->required();
  growth->add_option("--from", cfg.from, "First exponent");
  growth->add_option("--to", cfg.to, "Last exponent");

  auto* nielsen = app.add_subcommand("nielsen", "Periodic Nielsen path inventory");
  input(nielsen);
  nielsen->add_option("--len-bound", cfg.len_bound, "Path length bound");
  nielsen->add_option("--period-bound", cfg.period_bound, "Period bound");

  auto* validate = app.add_subcommand("validate", "Check a growth lemma on samples");
  input(validate);
  validate->add_option("lemma", cfg.lemma, "bcc, bw1, bw2, illen, backgrowth, tricho or decomp")
      ->required()
      ->check(CLI::IsMember({"bcc", "bw1", "bw2", "illen", "backgrowth", "tricho", "decomp"}));
  validate->add_option("--pairs", cfg.pairs, "Concatenation length bound for C_f");
  validate->add_option("--k-max", cfg.k_max, "Largest preimage exponent");
  validate->add_option("--l0", cfg.l0, "Length threshold L0 (default: largest critical length + 1)");
  validate->add_option("--samples", cfg.samples, "Number of sampled circuits or paths");
  validate->add_option("--max-len", cfg.max_len, "Longest sampled circuit or path");
  validate->add_option("--stratum", cfg.stratum, "Exponential stratum for the relative forms");
  validate->add_option("--exponent", cfg.exponent, "Exponent M (backgrowth: 0 searches)");
  validate->add_option("-M,--m-max", cfg.m_max, "Largest exponent tried by the search");
  validate->add_option("--n-max", cfg.n_max, "Largest n for backgrowth");
  validate->add_option("--period-bound", cfg.period_bound, "Nielsen period bound");
  validate->add_option("--path", cfg.path, "Single path for tricho");
  validate->add_flag("--exhaustive", cfg.exhaustive, "illen: every tight path up to --max-len");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kCompleted : kInputError;
  }
  if (cfg.format.empty()) {
    const bool table = growth->parsed() || (validate->parsed() && cfg.lemma != "bcc" && cfg.lemma != "illen");
    cfg.format = table ? "csv" : "json";
  }
  if (cfg.m_max == 0) cfg.m_max = certify->parsed() ? 20 : 12;
  if (certify->parsed() && certify->count("-L") == 0) cfg.max_class_len = 8;
  if (probe->parsed() && probe->count("-L") == 0) cfg.max_class_len = 4;

  try {
    check_config(cfg);
    if (analyze->parsed()) return cmd_analyze(cfg, out);
    if (probe->parsed()) return cmd_probe(cfg, out);
    if (certify->parsed()) return cmd_certify(cfg, out);
    if (growth->parsed()) return cmd_growth(cfg, out);
    if (nielsen->parsed()) return cmd_nielsen(cfg, out);
    if (validate->parsed()) return cmd_validate(cfg, out);
  } catch (const ParseError& e) {
    err << cfg.input << ": " << e.what() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace tt::cli
