#pragma once

// Fixture loading and hand-rolled random generators shared by the unit,
// property and acceptance tests. Every generator takes the engine by
// reference so a test fixes its seed once.

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "traintrack/error.hpp"
#include "traintrack/free_group.hpp"
#include "traintrack/graph_map.hpp"
#include "traintrack/growth.hpp"
#include "traintrack/hyperbolicity.hpp"
#include "traintrack/text_format.hpp"

#ifndef TRAINTRACK_FIXTURE_DIR
#error "TRAINTRACK_FIXTURE_DIR must point at the fixtures directory"
#endif

namespace tt::test {

using Rng = std::mt19937_64;

inline std::string fixture_path(const std::string& name) { return std::string(TRAINTRACK_FIXTURE_DIR) + "/" + name; }

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name));
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline AutomorphismFile load_aut(const std::string& name) { return parse_automorphism(read_fixture(name)); }
inline GraphMapFile load_gm(const std::string& name) { return parse_graph_map(read_fixture(name)); }
inline GraphMap load_rose(const std::string& name) {
  auto a = load_aut(name);
  return rose_of(a.phi, a.basis);
}

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline Letter random_letter(Rng& rng, int rank) {
  const int i = uniform(rng, 1, rank);
  return uniform(rng, 0, 1) ? i : -i;
}

/// Reduced word of length exactly `len`.
inline Word random_word(Rng& rng, int rank, int len) {
  std::vector<Letter> w;
  while (static_cast<int>(w.size()) < len) {
    const Letter x = random_letter(rng, rank);
    if (!w.empty() && x == -w.back()) continue;
    w.push_back(x);
  }
  return Word(std::move(w));
}

/// Raw (possibly unreduced) letter sequence.
inline std::vector<Letter> random_raw(Rng& rng, int rank, int len) {
  std::vector<Letter> w;
  for (int i = 0; i < len; ++i) w.push_back(random_letter(rng, rank));
  return w;
}

/// One elementary Nielsen move with its inverse images: a transvection
/// x_i -> x_i x_j^s or x_i -> x_j^s x_i, or the inversion x_i -> x_i^-1.
inline Automorphism random_elementary(Rng& rng, int rank) {
  std::vector<Word> img, inv;
  for (int k = 1; k <= rank; ++k) {
    img.push_back(Word{k});
    inv.push_back(Word{k});
  }
  const int i = uniform(rng, 1, rank);
  const auto slot = static_cast<std::size_t>(i - 1);
  if (rank == 1 || uniform(rng, 0, 4) == 0) {
    img[slot] = Word{-i};
    inv[slot] = Word{-i};
  } else {
    int j = uniform(rng, 1, rank - 1);
    if (j >= i) ++j;
    const int s = uniform(rng, 0, 1) ? 1 : -1;
    if (uniform(rng, 0, 1)) {
      img[slot] = Word{i, s * j};
      inv[slot] = Word{i, -s * j};
    } else {
      img[slot] = Word{s * j, i};
      inv[slot] = Word{-s * j, i};
    }
  }
  return Automorphism(rank, std::move(img), std::move(inv));
}

/// Product of `moves` elementary moves; carries a verified inverse.
inline Automorphism random_automorphism(Rng& rng, int rank, int moves) {
  Automorphism phi = Automorphism::identity(rank);
  for (int m = 0; m < moves; ++m) phi = compose(random_elementary(rng, rank), phi);
  return phi;
}

/// Random tight edge path with exactly `len` edges.
inline std::vector<EdgeId> random_tight_path(Rng& rng, const Graph& g, int len) {
  std::vector<EdgeId> p;
  VertexId v = uniform(rng, 0, g.vertex_count() - 1);
  while (static_cast<int>(p.size()) < len) {
    const auto& dirs = g.directions(v);
    const EdgeId e = dirs[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(dirs.size()) - 1))];
    if (!p.empty() && e == -p.back()) continue;
    p.push_back(e);
    v = g.terminus(e);
  }
  return p;
}

/// Random legal path with exactly `len` edges, or empty when the walk gets
/// stuck (every continuation illegal).
inline std::vector<EdgeId> random_legal_path(Rng& rng, const Graph& g, const TurnClassification& tc, int len) {
  std::vector<EdgeId> p;
  VertexId v = uniform(rng, 0, g.vertex_count() - 1);
  while (static_cast<int>(p.size()) < len) {
    std::vector<EdgeId> next;
    for (EdgeId e : g.directions(v)) {
      if (p.empty() || tc.is_legal(p.back(), e)) next.push_back(e);
    }
    if (next.empty()) return {};
    const EdgeId e = next[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(next.size()) - 1))];
    p.push_back(e);
    v = g.terminus(e);
  }
  return p;
}

/// Random circuit whose tightened length is between 1 and max_len edges.
inline Circuit random_circuit(Rng& rng, const Graph& g, int max_len) {
  for (;;) {
    const int len = uniform(rng, 1, max_len);
    auto p = random_tight_path(rng, g, len);
    if (g.terminus(p.back()) != g.origin(p.front())) continue;
    try {
      return Circuit::from_loop(g, std::move(p));
    } catch (const ValidationError&) {
      // tightened to nothing
    }
  }
}

inline std::vector<Circuit> random_circuits(Rng& rng, const Graph& g, int max_len, int count) {
  std::vector<Circuit> out;
  for (int i = 0; i < count; ++i) out.push_back(random_circuit(rng, g, max_len));
  return out;
}

/// x -> c x c^-1 applied after phi.
inline Automorphism conjugated(const Automorphism& phi, const Word& c) {
  return compose(Automorphism::inner(phi.rank(), c), phi);
}

}  // namespace tt::test
