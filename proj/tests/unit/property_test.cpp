// Cross-module properties over randomly generated automorphisms, paths and
// circuits. Seeds are fixed so failures replay.

#include <algorithm>

#include "doctest.h"
#include "test_support.hpp"
#include "traintrack/hyperbolicity.hpp"

using namespace tt;
using tt::test::Rng;

TEST_CASE("text format round trips random automorphisms") {
  Rng rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const int rank = test::uniform(rng, 1, 5);
    const Automorphism phi = test::random_automorphism(rng, rank, test::uniform(rng, 0, 10));
    const Alphabet basis = Alphabet::standard(rank);
    const auto back = parse_automorphism(format_automorphism(basis, phi));
    CHECK(back.phi.images() == phi.images());
    CHECK(back.phi.inverse_verified());
  }
}

TEST_CASE("roses represent their automorphism") {
  Rng rng(102);
  for (int trial = 0; trial < 60; ++trial) {
    const int rank = test::uniform(rng, 2, 4);
    const Automorphism phi = test::random_automorphism(rng, rank, test::uniform(rng, 1, 8));
    const GraphMap f = rose_of(phi);
    CHECK(represents(f, phi));
    CHECK(same_outer_class(induced_automorphism(f), phi));
    const Word w = test::random_word(rng, rank, 7);
    CHECK(same_outer_class(test::conjugated(phi, w), phi));
  }
}

TEST_CASE("turn legality is forward invariant for random maps") {
  Rng rng(103);
  for (int trial = 0; trial < 60; ++trial) {
    const Automorphism phi = test::random_automorphism(rng, test::uniform(rng, 2, 4), test::uniform(rng, 1, 8));
    const GraphMap f = rose_of(phi);
    const TurnClassification tc(f);
    for (const Turn& t : tc.turns()) {
      if (tc.is_legal(t)) CHECK(tc.is_legal(derivative(f, t)));
      if (!tc.is_legal(t) && !derivative(f, t).degenerate()) CHECK_FALSE(tc.is_legal(derivative(f, t)));
    }
  }
}

TEST_CASE("filtrations of random maps are invariant and irreducible") {
  Rng rng(104);
  for (int trial = 0; trial < 60; ++trial) {
    const Automorphism phi = test::random_automorphism(rng, test::uniform(rng, 2, 4), test::uniform(rng, 1, 8));
    const GraphMap f = rose_of(phi);
    const Filtration filt = compute_filtration(f);
    for (int e = 1; e <= f.graph().edge_count(); ++e) {
      for (EdgeId x : f.image(e)) CHECK(filt.height(x) <= filt.height(e));
    }
    for (const Stratum& s : filt.strata()) {
      CHECK((s.matrix.is_zero() || is_irreducible(s.matrix.m)));
      if (s.type == StratumType::exponential) {
        CHECK(*s.lambda > 1);
        CHECK(*std::min_element(s.eigenvector.begin(), s.eigenvector.end()) == doctest::Approx(1.0));
      }
    }
  }
}

TEST_CASE("bounded cancellation holds for pairs beyond the window") {
  Rng rng(105);
  for (const char* name : {"fib.aut", "plas.aut"}) {
    CAPTURE(name);
    const MapContext ctx(test::load_rose(name));
    const Graph& g = ctx.f.graph();
    const CancellationData cd = bcc_estimate(ctx, 6);
    REQUIRE(cd.stable);
    for (int trial = 0; trial < 2000; ++trial) {
      auto alpha = test::random_tight_path(rng, g, test::uniform(rng, 1, 20));
      auto beta = test::random_tight_path(rng, g, test::uniform(rng, 1, 20));
      if (beta.front() == -alpha.back()) continue;
      const auto fa = map_path(ctx.f, make_path(g, alpha)).edges;
      const auto fb = map_path(ctx.f, make_path(g, beta)).edges;
      std::vector<EdgeId> joined = fa;
      joined.insert(joined.end(), fb.begin(), fb.end());
      const double loss = ctx.metric.length(fa) + ctx.metric.length(fb) - ctx.metric.length(tighten_edges(joined));
      CHECK(loss <= cd.C_f + 1e-9);
    }
  }
}

TEST_CASE("probe and certificate agree") {
  Rng rng(106);
  int with_witness = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const Automorphism phi = test::random_automorphism(rng, 2, test::uniform(rng, 1, 6));
    const auto probe = atoroidality_probe(phi, 3, 4, 2);
    const auto cert = certificate_search(phi, 8, 3, 2);
    for (const auto& w : probe.witnesses) {
      ++with_witness;
      for (int M = w.period; M <= cert.M; M += w.period) {
        CHECK(cert.r_by_M[static_cast<std::size_t>(M - 1)] <= 1.0);
      }
      CHECK(cert.verdict == CertificateVerdict::no_certificate_within_bounds);
    }
  }
  CHECK(with_witness > 0);
}

TEST_CASE("verdicts depend only on the outer class") {
  Rng rng(107);
  for (int trial = 0; trial < 15; ++trial) {
    const Automorphism phi = test::random_automorphism(rng, 2, test::uniform(rng, 1, 6));
    const Automorphism psi = test::conjugated(phi, test::random_word(rng, 2, test::uniform(rng, 1, 4)));
    const auto p1 = atoroidality_probe(phi, 3, 3);
    const auto p2 = atoroidality_probe(psi, 3, 3);
    CHECK(p1.verdict == p2.verdict);
    CHECK(p1.witnesses.size() == p2.witnesses.size());
    const auto c1 = certificate_search(phi, 6, 3);
    const auto c2 = certificate_search(psi, 6, 3);
    CHECK(c1.verdict == c2.verdict);
    CHECK(c1.r_by_M == c2.r_by_M);
  }
}

TEST_CASE("growth tables of inverse automorphisms mirror each other") {
  Rng rng(108);
  for (int trial = 0; trial < 40; ++trial) {
    const int rank = test::uniform(rng, 2, 3);
    const Automorphism phi = test::random_automorphism(rng, rank, test::uniform(rng, 1, 4));
    const Word g = test::random_word(rng, rank, test::uniform(rng, 1, 5));
    const auto fwd = growth_table(phi, g, -3, 3);
    const auto bwd = growth_table(phi.inverse(), g, -3, 3);
    CHECK(std::vector<std::size_t>(fwd.rbegin(), fwd.rend()) == bwd);
    CHECK(fwd[3] == CyclicWord(g).length());
  }
}

TEST_CASE("legal paths stay legal and stretch by lambda") {
  Rng rng(0x1E);
  for (const char* name : {"fib.aut", "plas.aut"}) {
    CAPTURE(name);
    const GraphMap f = test::load_rose(name);
    const Filtration filt = compute_filtration(f);
    const Metric metric = assign_metric(f, filt);
    const TurnClassification tc(f);
    const double lambda = *filt.stratum(1).lambda;
    for (int trial = 0; trial < 200; ++trial) {
      const auto p = test::random_legal_path(rng, f.graph(), tc, test::uniform(rng, 1, 12));
      if (p.empty()) continue;
      const auto raw = raw_image(f, p);
      CHECK(tighten_edges(raw) == raw);
      for (std::size_t i = 1; i < raw.size(); ++i) CHECK(tc.is_legal(raw[i - 1], raw[i]));
      CHECK(metric.length(raw) == doctest::Approx(lambda * metric.length(p)).epsilon(1e-9));
    }
  }
}
