#include <cmath>
#include <set>

#include "doctest.h"
#include "test_support.hpp"

using namespace tt;
using tt::test::Rng;

namespace {

const EdgeId a = 1, b = 2, A = -1, B = -2;
const double kGolden = (1 + std::sqrt(5.0)) / 2;

// Brute force over all tight pairs, computed outside this library.
const double kFibCf = 3.2360679775;
const double kFibCritical = 10.472135955;
const double kPlasCf = 2.64943591449;
const double kPlasCritical = 16.31838249397;

MapContext fib_ctx() { return MapContext(test::load_rose("fib.aut")); }

}  // namespace

TEST_CASE("map context") {
  const MapContext fib = fib_ctx();
  CHECK(fib.is_absolute());
  CHECK(fib.top_exponential() == 1);
  CHECK(fib.lambda(1) == doctest::Approx(kGolden));

  const MapContext poly(test::load_rose("poly.aut"));
  CHECK_FALSE(poly.is_absolute());
  CHECK(poly.top_exponential() == 0);
  CHECK_THROWS_AS((void)poly.lambda(2), ValidationError);

  const MapContext sub(test::load_rose("relative.aut"));
  CHECK_FALSE(sub.is_absolute());
  CHECK(sub.top_exponential() == 2);
}

TEST_CASE("path statistics") {
  const MapContext ctx = fib_ctx();
  const PathStats ab = path_stats(ctx, std::vector<EdgeId>{a, b});
  CHECK(ab.L == doctest::Approx(kGolden + 1));
  CHECK(ab.i == 0);
  CHECK(ab.script_L == doctest::Approx(kGolden + 1));

  const PathStats inp = path_stats(ctx, std::vector<EdgeId>{A, B, a, b});
  CHECK(inp.i == 1);
  CHECK(inp.L == doctest::Approx(2 * kGolden + 2));
  CHECK(inp.script_L == doctest::Approx(kGolden + 1));

  const Circuit comm = Circuit::from_loop(ctx.f.graph(), {a, b, A, B});
  const PathStats cs = path_stats(ctx, comm);
  CHECK(cs.i == 1);
  CHECK(cs.script_L == doctest::Approx(2 * kGolden + 2));  // the legal segment wraps

  CHECK_THROWS_AS((void)path_stats(ctx, std::vector<EdgeId>{}), ValidationError);
  const auto segs = legal_segments(ctx, std::vector<EdgeId>{A, B, a, b}, 1, false);
  REQUIRE(segs.size() == 2);
  CHECK(segs[0] == std::pair<std::size_t, std::size_t>{0, 2});
}

TEST_CASE("path statistics invariants") {
  Rng rng(0x57);
  const MapContext ctx(test::load_rose("relative.aut"));
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = test::random_tight_path(rng, ctx.f.graph(), test::uniform(rng, 1, 14));
    const PathStats s = path_stats(ctx, p, 2);
    CHECK(s.L_r <= s.L + 1e-12);
    CHECK(s.i_r <= s.i);
    CHECK(s.script_L <= s.L + 1e-12);
    CHECK(s.script_L_r <= s.L_r + 1e-12);
    CHECK(s.i >= 0);
    CHECK(s.L_r >= 0);
  }
}

TEST_CASE("bounded cancellation constants") {
  const MapContext fib = fib_ctx();
  const CancellationData fd = bcc_estimate(fib, 8);
  CHECK(fd.stable);
  CHECK(fd.window == 4);
  CHECK(std::abs(fd.C_f - kFibCf) < 1e-9);
  CHECK(std::abs(fd.critical_length(1) - kFibCritical) < 1e-8);
  CHECK(fd.C_f == doctest::Approx(2 * kGolden).epsilon(1e-12));
  CHECK_THROWS_AS((void)fd.critical_length(2), ValidationError);

  const MapContext plas(test::load_rose("plas.aut"));
  const CancellationData pd = bcc_estimate(plas, 8);
  CHECK(pd.stable);
  CHECK(std::abs(pd.C_f - kPlasCf) < 1e-9);
  CHECK(std::abs(pd.critical_length(1) - kPlasCritical) < 1e-8);

  // C_f dominates the observed cancellation beyond the window
  CHECK(max_cancellation(fib, 7) <= fd.C_f + 1e-12);
  CHECK(max_cancellation(plas, 6) <= pd.C_f + 1e-12);
  CHECK_THROWS_AS((void)bcc_estimate(fib, 0), ValidationError);
}

TEST_CASE("backward legal segment bounds") {
  Rng rng(0xB1);
  const MapContext ctx = fib_ctx();
  const GraphMap inv = test::load_rose("fib_inv.aut");
  const auto cancel = bcc_estimate(ctx, 8);
  const auto circuits = test::random_circuits(rng, ctx.f.graph(), 12, 100);
  const auto rep = validate_bw1(ctx, inv, circuits, 4, cancel, 2);
  CHECK(rep.rows.size() == 400);
  CHECK(rep.ok());
  for (const auto& row : rep.rows) CHECK(row.margin > 0);

  const auto rep2 = validate_bw2(ctx, inv, circuits, 4, cancel, 1, 2);
  CHECK(rep2.ok());

  const MapContext poly(test::load_rose("poly.aut"));
  CHECK_THROWS_AS((void)validate_bw1(poly, test::load_rose("poly.aut"), circuits, 1, cancel), ValidationError);
}

TEST_CASE("relative validators") {
  Rng rng(0xB2);
  const auto aut = test::load_aut("relative.aut");
  const MapContext ctx(rose_of(aut.phi, aut.basis));
  const GraphMap inv = rose_of(aut.phi.inverse(), aut.basis);
  const auto cancel = bcc_estimate(ctx, 6);
  REQUIRE(cancel.critical.size() == 1);
  CHECK(cancel.critical[0].first == 2);
  std::vector<Circuit> circuits;
  while (circuits.size() < 80) {
    const Circuit c = test::random_circuit(rng, ctx.f.graph(), 12);
    if (ctx.filt.height(c.edges()) == 2) circuits.push_back(c);
  }
  const auto bw2 = validate_bw2(ctx, inv, circuits, 3, cancel, 2);
  CHECK(bw2.ok());
  CHECK_THROWS_AS((void)validate_bw1(ctx, inv, circuits, 1, cancel), ValidationError);

  std::vector<std::vector<EdgeId>> paths;
  for (const auto& c : circuits) paths.emplace_back(c.edges().begin(), c.edges().end());
  const IllenResult il = validate_illen2(ctx, paths, 4.0, 2);
  CHECK(il.used > 0);
  CHECK(il.C >= 1.0);

  const auto v = trichotomy_classify(ctx, std::vector<EdgeId>{3, 1, 2}, 8, cancel.critical_length(2), 2);
  CHECK(v.kind == TrichotomyCase::long_legal_segment);
}

TEST_CASE("illegal turns versus length") {
  Rng rng(0x11);
  const MapContext ctx = fib_ctx();
  std::vector<std::vector<EdgeId>> sample;
  for (int i = 0; i < 300; ++i) sample.push_back(test::random_tight_path(rng, ctx.f.graph(), test::uniform(rng, 2, 12)));
  const IllenResult res = validate_illen(ctx, sample, 3.0);
  CHECK(res.used > 0);
  CHECK(res.used + res.skipped == sample.size());
  CHECK(res.C >= 1.0);
  // legal segments of length <= 3 give L <= 3 (i + 1) <= 6 i, and i < L
  CHECK(res.C <= 6.0 + 1e-9);
  CHECK_THROWS_AS((void)validate_illen(ctx, {{a, b}}, 3.0), ValidationError);
}

TEST_CASE("trichotomy on FIB fixtures") {
  const MapContext ctx = fib_ctx();
  const double L = bcc_estimate(ctx, 8).critical_length(1);

  const auto legal = trichotomy_classify(ctx, std::vector<EdgeId>{a, a, b}, 6, L);
  CHECK(legal.kind == TrichotomyCase::long_legal_segment);
  CHECK(legal.image_script_L > L);

  const auto fewer = trichotomy_classify(ctx, std::vector<EdgeId>{A, b}, 1, L);
  CHECK(fewer.kind == TrichotomyCase::fewer_illegal_turns);
  CHECK(fewer.i_after < fewer.i_before);

  const auto inp = trichotomy_classify(ctx, std::vector<EdgeId>{A, B, a, b}, 2, L);
  CHECK(inp.kind == TrichotomyCase::pre_nielsen_splitting);
  REQUIRE(inp.pieces.size() == 1);
  CHECK(inp.pieces[0] == std::vector<EdgeId>{A, B, a, b});
  CHECK(inp.tau1.empty());

  CHECK_THROWS_AS((void)trichotomy_classify(ctx, std::vector<EdgeId>{a, A}, 1, L), ValidationError);
  CHECK_THROWS_AS((void)trichotomy_classify(ctx, std::vector<EdgeId>{a}, 0, L), ValidationError);
}

TEST_CASE("trichotomy verdicts match their definitions") {
  Rng rng(0x7C);
  for (const char* name : {"fib.aut", "plas.aut"}) {
    CAPTURE(name);
    const MapContext ctx(test::load_rose(name));
    const double L = bcc_estimate(ctx, 6).critical_length(1);
    for (int trial = 0; trial < 60; ++trial) {
      const auto p = test::random_tight_path(rng, ctx.f.graph(), test::uniform(rng, 1, 8));
      if (path_stats(ctx, p).i > 6) continue;
      const auto v = trichotomy_classify(ctx, p, 3, L);
      CAPTURE(format_path(ctx.f.graph(), p));
      CHECK(v.kind != TrichotomyCase::unresolved);
      if (v.kind == TrichotomyCase::long_legal_segment) CHECK(v.image_script_L > L);
      if (v.kind == TrichotomyCase::fewer_illegal_turns) {
        CHECK(v.image_script_L <= L);
        CHECK(v.i_after < v.i_before);
      }
    }
  }
}

TEST_CASE("backgrowth of illegal turns") {
  Rng rng(0xBA);
  const MapContext ctx = fib_ctx();
  const GraphMap inv = test::load_rose("fib_inv.aut");
  const auto sample = test::random_circuits(rng, ctx.f.graph(), 30, 200);
  BackgrowthOptions opts;
  opts.L0 = 11;
  const auto rep = validate_backgrowth(ctx, inv, sample, opts, 2);
  CHECK(rep.M_found);
  CHECK(rep.ok());
  CHECK(rep.used > 0);
  CHECK(rep.used + rep.skipped == sample.size());
  for (const auto& row : rep.rows) {
    if (row.i_n >= 0) CHECK(row.i_n >= row.bound - 1e-9);
  }

  const std::vector<Circuit> tiny{Circuit::from_loop(ctx.f.graph(), {a})};
  CHECK_THROWS_AS((void)validate_backgrowth(ctx, inv, tiny, opts), ValidationError);
}

TEST_CASE("growth decomposition") {
  Rng rng(0xDC);
  SUBCASE("absolute") {
    const MapContext ctx = fib_ctx();
    const double L0 = 11;
    CHECK(longest_path_below(ctx, L0) == doctest::Approx(3 * kGolden + 6));
    CHECK(metric_diameter(ctx) == 0);
    int dense = 0;
    for (int trial = 0; trial < 300; ++trial) {
      const Circuit c = test::random_circuit(rng, ctx.f.graph(), trial < 150 ? 12 : 200);
      const auto d = growth_decomposition(ctx, c, L0);
      dense += d.kind == DecompositionCase::illegal_dense ? 1 : 0;
      CHECK(d.bound_holds);
      if (d.bound) CHECK(d.fraction >= *d.bound - 1e-9);
      CHECK(d.fraction <= 1 + 1e-12);
    }
    CHECK(dense > 0);
    CHECK_THROWS_AS((void)growth_decomposition(ctx, Circuit::from_loop(ctx.f.graph(), {a}), 0), ValidationError);
  }
  SUBCASE("relative") {
    const MapContext ctx(test::load_rose("relative.aut"));
    std::set<DecompositionCase> seen;
    for (int trial = 0; trial < 300; ++trial) {
      const Circuit c = test::random_circuit(rng, ctx.f.graph(), trial < 150 ? 12 : 80);
      if (ctx.filt.height(c.edges()) < 2) continue;
      const auto d = growth_decomposition(ctx, c, 12);
      seen.insert(d.kind);
      CHECK(d.stratum == 2);
      CHECK(d.kind >= DecompositionCase::lower_dominant);
      CHECK(d.bound_holds);
    }
    CHECK(seen.size() >= 2);
  }
  SUBCASE("polynomial") {
    const MapContext ctx(test::load_rose("poly.aut"));
    const Circuit c = Circuit::from_loop(ctx.f.graph(), {b, a, a, B, a});
    const auto d = growth_decomposition(ctx, c, 5);
    CHECK(d.kind == DecompositionCase::polynomial_split);
    CHECK_FALSE(d.S.empty());
    CHECK(growth_decomposition(ctx, Circuit::from_loop(ctx.f.graph(), {a}), 5).kind ==
          DecompositionCase::polynomial_split);
  }
}
