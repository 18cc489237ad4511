#include "doctest.h"
#include "test_support.hpp"

using namespace tt;

TEST_CASE("automorphism files round trip") {
  const auto fib = test::load_aut("fib.aut");
  CHECK(fib.basis.names() == std::vector<std::string>{"a", "b"});
  CHECK(fib.phi.inverse_verified());
  CHECK(fib.warnings.empty());
  const auto again = parse_automorphism(format_automorphism(fib.basis, fib.phi));
  CHECK(again.phi.images() == fib.phi.images());
  CHECK(again.phi.inverse_images() == fib.phi.inverse_images());

  for (const char* name : {"identity.aut", "fib_inv.aut", "plas.aut", "poly.aut"}) {
    CAPTURE(name);
    CHECK(test::load_aut(name).phi.inverse_verified());
  }
}

TEST_CASE("unreduced images are reduced with a warning") {
  const auto f = parse_automorphism("basis: a b\nmap: a -> a b b^-1\nmap: b -> b\n");
  CHECK(f.phi.images()[0] == Word{1});
  REQUIRE(f.warnings.size() == 1);
  CHECK(f.warnings[0].find("line 2") != std::string::npos);
}

TEST_CASE("automorphism parse errors carry line numbers") {
  auto line_of = [](const char* text) {
    try {
      (void)parse_automorphism(text);
    } catch (const ParseError& e) {
      return static_cast<long>(e.line());
    }
    return -1L;
  };
  CHECK(line_of("basis: a b\nmap: a -> a\nmap: q -> b\n") == 3);
  CHECK(line_of("map: a -> a\n") == 1);
  CHECK(line_of("basis: a b\nmap a\n") == 2);
  CHECK(line_of("basis: a b\nmap: a -> a\nmap: a -> b\n") == 3);
  CHECK(line_of("basis: a b\nmap: a -> a\n") == 0);  // b missing
  CHECK(line_of("basis: a b\nmap: a -> a\nmap: b -> b\ninv: a -> b\ninv: b -> a\n") == 0);
  CHECK(line_of("# only a comment\n\nbasis: a\nmap: a -> a\n") == -1);
}

TEST_CASE("graph map files") {
  const auto gm = test::load_gm("fib_subdivided.gm");
  const Graph& g = gm.map.graph();
  CHECK(g.vertex_count() == 2);
  CHECK(g.edge_count() == 3);
  CHECK(g.rank() == 2);
  CHECK(g.has_marking());
  CHECK(gm.map.vertex_image(g.vertex_index("w")) == g.vertex_index("w"));
  const auto again = parse_graph_map(format_graph_map(gm.map, gm.basis));
  CHECK(again.map.graph() == g);
  for (int e = 1; e <= g.edge_count(); ++e) {
    CHECK(std::vector<EdgeId>(again.map.image(e).begin(), again.map.image(e).end()) ==
          std::vector<EdgeId>(gm.map.image(e).begin(), gm.map.image(e).end()));
  }
  CHECK(looks_like_graph_map(test::read_fixture("broken.gm")));
  CHECK_FALSE(looks_like_graph_map(test::read_fixture("fib.aut")));
}

TEST_CASE("graph map parse errors") {
  CHECK_THROWS_AS(parse_graph_map("vertex: v\nedge: a v w\nimage: a -> a\n"), ParseError);
  CHECK_THROWS_AS(parse_graph_map("vertex: v\nedge: a v v\n"), ParseError);
  CHECK_THROWS_AS(parse_graph_map("vertex: v\nedge: a v v\nedge: b v v\nimage: a -> a b^-1 b a^-1\nimage: b -> b\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_graph_map("vertex: v w\nedge: a v w\nedge: b w v\nimage: a -> a b\nimage: b -> b\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_graph_map("vertex: v\nedge: a v v\nedge: b v v\nimage: a -> a\nimage: b -> b\nmark: a -> x\n"),
                  ParseError);
}
