#include "traintrack/text_format.hpp"

#include <map>
#include <sstream>

#include "traintrack/error.hpp"

namespace tt {

namespace {

struct Line {
  std::size_t number;
  std::string key;
  std::string value;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    ++number;
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError(number, "expected 'key: value'");
    out.push_back(Line{number, std::string(trim(line.substr(0, colon))), std::string(trim(line.substr(colon + 1)))});
  }
  return out;
}

std::vector<std::string> tokens(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

std::pair<std::string, std::string> split_arrow(const Line& line) {
  const auto arrow = line.value.find("->");
  if (arrow == std::string::npos) throw ParseError(line.number, "expected 'name -> image'");
  return {std::string(trim(std::string_view(line.value).substr(0, arrow))),
          std::string(trim(std::string_view(line.value).substr(arrow + 2)))};
}

bool is_reduced(const std::vector<Letter>& s) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] == -s[i - 1]) return false;
  }
  return true;
}

}  // namespace

AutomorphismFile parse_automorphism(std::string_view text) {
  const auto lines = split_lines(text);
  std::optional<Alphabet> basis;
  std::map<int, Word> images;
  std::map<int, Word> inverse;
  std::vector<std::string> warnings;
  for (const auto& line : lines) {
    if (line.key == "basis") {
      if (basis) throw ParseError(line.number, "basis declared twice");
      try {
        basis.emplace(tokens(line.value));
      } catch (const ValidationError& e) {
        throw ParseError(line.number, e.what());
      }
      if (basis->rank() == 0) throw ParseError(line.number, "empty basis");
    } else if (line.key == "map" || line.key == "inv") {
      if (!basis) throw ParseError(line.number, "'" + line.key + ":' before 'basis:'");
      auto [lhs, rhs] = split_arrow(line);
      const int index = basis->index_of(lhs);
      if (index == 0) throw ParseError(line.number, "unknown generator '" + lhs + "'");
      std::vector<Letter> letters;
      try {
        letters = basis->parse_letters(rhs);
      } catch (const ValidationError& e) {
        throw ParseError(line.number, e.what());
      }
      if (!is_reduced(letters)) {
        warnings.push_back("line " + std::to_string(line.number) + ": image of '" + lhs +
                           "' is not reduced; reducing");
      }
      auto& target = line.key == "map" ? images : inverse;
      if (!target.emplace(index, Word(letters)).second) {
        throw ParseError(line.number, "generator '" + lhs + "' mapped twice");
      }
    } else {
      throw ParseError(line.number, "unknown key '" + line.key + "'");
    }
  }
  if (!basis) throw ParseError(0, "missing 'basis:' line");
  std::vector<Word> img;
  for (int i = 1; i <= basis->rank(); ++i) {
    auto it = images.find(i);
    if (it == images.end()) throw ParseError(0, "no 'map:' line for generator '" + basis->name(i) + "'");
    img.push_back(it->second);
  }
  std::optional<std::vector<Word>> inv;
  if (!inverse.empty()) {
    inv.emplace();
    for (int i = 1; i <= basis->rank(); ++i) {
      auto it = inverse.find(i);
      if (it == inverse.end()) throw ParseError(0, "no 'inv:' line for generator '" + basis->name(i) + "'");
      inv->push_back(it->second);
    }
  }
  try {
    Automorphism phi(basis->rank(), std::move(img), std::move(inv));
    if (phi.inverse_images() && !phi.inverse_verified()) {
      throw ParseError(0, "'inv:' lines do not invert the map");
    }
    return AutomorphismFile{*basis, std::move(phi), std::move(warnings)};
  } catch (const ValidationError& e) {
    throw ParseError(0, e.what());
  }
}

std::string format_automorphism(const Alphabet& basis, const Automorphism& phi) {
  std::ostringstream out;
  out << "basis:";
  for (const auto& n : basis.names()) out << ' ' << n;
  out << '\n';
  for (int i = 1; i <= phi.rank(); ++i) {
    out << "map: " << basis.name(i) << " -> " << basis.format(phi.images()[static_cast<std::size_t>(i - 1)]) << '\n';
  }
  if (phi.inverse_images()) {
    for (int i = 1; i <= phi.rank(); ++i) {
      out << "inv: " << basis.name(i) << " -> "
          << basis.format((*phi.inverse_images())[static_cast<std::size_t>(i - 1)]) << '\n';
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------

bool looks_like_graph_map(std::string_view text) {
  for (const auto& line : split_lines(text)) {
    if (line.key == "vertex" || line.key == "edge") return true;
  }
  return false;
}

GraphMapFile parse_graph_map(std::string_view text) {
  const auto lines = split_lines(text);
  std::vector<std::string> vertices;
  std::vector<EdgeSpec> edges;
  std::optional<Alphabet> basis;
  std::vector<std::string> warnings;

  auto vertex_of = [&](const std::string& name, std::size_t line) {
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      if (vertices[i] == name) return static_cast<VertexId>(i);
    }
    throw ParseError(line, "unknown vertex '" + name + "'");
  };

  // First pass: the graph itself.
  for (const auto& line : lines) {
    if (line.key == "vertex") {
      for (auto& v : tokens(line.value)) vertices.push_back(v);
    } else if (line.key == "edge") {
      auto t = tokens(line.value);
      if (t.size() != 3) throw ParseError(line.number, "expected 'edge: name origin terminus'");
      edges.push_back(EdgeSpec{t[0], vertex_of(t[1], line.number), vertex_of(t[2], line.number)});
    } else if (line.key == "basis") {
      if (basis) throw ParseError(line.number, "basis declared twice");
      try {
        basis.emplace(tokens(line.value));
      } catch (const ValidationError& e) {
        throw ParseError(line.number, e.what());
      }
    } else if (line.key != "image" && line.key != "mark" && line.key != "fvertex") {
      throw ParseError(line.number, "unknown key '" + line.key + "'");
    }
  }
  if (vertices.empty()) throw ParseError(0, "no 'vertex:' lines");
  if (edges.empty()) throw ParseError(0, "no 'edge:' lines");

  Alphabet edge_names;
  try {
    std::vector<std::string> names;
    for (const auto& e : edges) names.push_back(e.name);
    edge_names = Alphabet(std::move(names));
  } catch (const ValidationError& e) {
    throw ParseError(0, e.what());
  }

  std::map<int, std::vector<EdgeId>> images;
  std::map<int, Word> marks;
  std::map<VertexId, VertexId> fvertex;
  for (const auto& line : lines) {
    if (line.key == "image" || line.key == "mark") {
      auto [lhs, rhs] = split_arrow(line);
      const int k = edge_names.index_of(lhs);
      if (k == 0) throw ParseError(line.number, "unknown edge '" + lhs + "'");
      if (line.key == "image") {
        std::vector<EdgeId> path;
        try {
          path = edge_names.parse_letters(rhs);
        } catch (const ValidationError& e) {
          throw ParseError(line.number, e.what());
        }
        if (path.empty()) throw ParseError(line.number, "image of '" + lhs + "' is empty");
        for (std::size_t i = 1; i < path.size(); ++i) {
          const auto& a = edges[static_cast<std::size_t>(std::abs(path[i - 1]) - 1)];
          const auto& b = edges[static_cast<std::size_t>(std::abs(path[i]) - 1)];
          const VertexId end_a = path[i - 1] > 0 ? a.terminus : a.origin;
          const VertexId start_b = path[i] > 0 ? b.origin : b.terminus;
          if (end_a != start_b) throw ParseError(line.number, "image of '" + lhs + "' is not a connected path");
        }
        if (!is_reduced(path)) {
          warnings.push_back("line " + std::to_string(line.number) + ": image of '" + lhs +
                             "' is not tight; tightening");
          path = tighten_edges(path);
          if (path.empty()) throw ParseError(line.number, "image of '" + lhs + "' tightens to a point");
        }
        if (!images.emplace(k, std::move(path)).second) throw ParseError(line.number, "edge '" + lhs + "' mapped twice");
      } else {
        if (!basis) throw ParseError(line.number, "'mark:' needs a 'basis:' line");
        try {
          if (!marks.emplace(k, Word(basis->parse_letters(rhs))).second) {
            throw ParseError(line.number, "edge '" + lhs + "' marked twice");
          }
        } catch (const ValidationError& e) {
          throw ParseError(line.number, e.what());
        }
      }
    } else if (line.key == "fvertex") {
      auto [lhs, rhs] = split_arrow(line);
      const VertexId from = vertex_of(lhs, line.number);
      const VertexId to = vertex_of(std::string(rhs), line.number);
      if (!fvertex.emplace(from, to).second) throw ParseError(line.number, "vertex '" + lhs + "' mapped twice");
    }
  }

  std::vector<std::vector<EdgeId>> image_list;
  for (int k = 1; k <= static_cast<int>(edges.size()); ++k) {
    auto it = images.find(k);
    if (it == images.end()) throw ParseError(0, "no 'image:' line for edge '" + edges[static_cast<std::size_t>(k - 1)].name + "'");
    image_list.push_back(it->second);
  }
  // Vertex images not listed explicitly are read off edge images.
  std::vector<VertexId> vmap(vertices.size(), -1);
  for (auto [from, to] : fvertex) vmap[static_cast<std::size_t>(from)] = to;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& img = image_list[k];
    const auto& first = edges[static_cast<std::size_t>(std::abs(img.front()) - 1)];
    const auto& last = edges[static_cast<std::size_t>(std::abs(img.back()) - 1)];
    const VertexId o = img.front() > 0 ? first.origin : first.terminus;
    const VertexId t = img.back() > 0 ? last.terminus : last.origin;
    auto& vo = vmap[static_cast<std::size_t>(edges[k].origin)];
    auto& vt = vmap[static_cast<std::size_t>(edges[k].terminus)];
    if (vo == -1) vo = o;
    if (vt == -1) vt = t;
  }
  for (std::size_t v = 0; v < vmap.size(); ++v) {
    if (vmap[v] == -1) throw ParseError(0, "cannot determine the image of vertex '" + vertices[v] + "'");
  }

  std::optional<std::vector<Word>> marking;
  if (!marks.empty()) {
    marking.emplace();
    for (int k = 1; k <= static_cast<int>(edges.size()); ++k) {
      auto it = marks.find(k);
      if (it == marks.end()) throw ParseError(0, "no 'mark:' line for edge '" + edges[static_cast<std::size_t>(k - 1)].name + "'");
      marking->push_back(it->second);
    }
  }
  try {
    Graph g(vertices, edges, std::move(marking));
    GraphMap f(std::move(g), std::move(vmap), std::move(image_list));
    return GraphMapFile{std::move(f), basis.value_or(Alphabet{}), std::move(warnings)};
  } catch (const ValidationError& e) {
    throw ParseError(0, e.what());
  }
}

std::string format_graph_map(const GraphMap& f, const Alphabet& basis) {
  const Graph& g = f.graph();
  std::ostringstream out;
  out << "vertex:";
  for (const auto& v : g.vertex_names()) out << ' ' << v;
  out << '\n';
  for (const auto& e : g.edges()) out << "edge: " << e.name << ' ' << g.vertex_name(e.origin) << ' ' << g.vertex_name(e.terminus) << '\n';
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    out << "fvertex: " << g.vertex_name(v) << " -> " << g.vertex_name(f.vertex_image(v)) << '\n';
  }
  for (int k = 1; k <= g.edge_count(); ++k) out << "image: " << g.edge(k).name << " -> " << format_path(g, f.image(k)) << '\n';
  if (g.has_marking() && basis.rank() > 0) {
    out << "basis:";
    for (const auto& n : basis.names()) out << ' ' << n;
    out << '\n';
    for (int k = 1; k <= g.edge_count(); ++k) out << "mark: " << g.edge(k).name << " -> " << basis.format(g.mark(k)) << '\n';
  }
  return out.str();
}

}  // namespace tt
