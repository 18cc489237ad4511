#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "traintrack/free_group.hpp"
#include "traintrack/graph_map.hpp"

namespace tt {

// Line-oriented text formats. Blank lines and lines starting with '#' are
// ignored everywhere.
//
// Automorphism:
//   basis: a b c
//   map: a -> b
//   map: c -> a b
//   inv: a -> c a^-1        (optional; all generators or none)
//
// Graph map:
//   vertex: v1 v2
//   edge: e1 v1 v2
//   image: e1 -> e2 e3^-1
//   mark: e1 -> a b^-1      (optional; needs a basis: line)
//   fvertex: v1 -> v2
//   basis: a b              (names the letters used by mark: lines)

struct AutomorphismFile {
  Alphabet basis;
  Automorphism phi;
  std::vector<std::string> warnings;
};

/// Throws ParseError carrying the offending line number.
AutomorphismFile parse_automorphism(std::string_view text);
std::string format_automorphism(const Alphabet& basis, const Automorphism& phi);

struct GraphMapFile {
  GraphMap map;
  Alphabet basis;  // empty when the file has no marking
  std::vector<std::string> warnings;
};

GraphMapFile parse_graph_map(std::string_view text);
std::string format_graph_map(const GraphMap& f, const Alphabet& basis);

/// True when the text looks like a graph map (has a vertex: or edge: line).
bool looks_like_graph_map(std::string_view text);

}  // namespace tt
