#include "doctest.h"
#include "test_support.hpp"

using namespace tt;
using tt::test::Rng;

namespace {
const Letter a = 1, b = 2, c = 3, A = -1, B = -2;
}

TEST_CASE("letter order and Booth rotation") {
  CHECK(letter_less(1, -1));
  CHECK(letter_less(-1, 2));
  CHECK_FALSE(letter_less(2, -1));
  std::vector<Letter> s{b, a, a};
  CHECK(least_rotation(s) == 1);
  std::vector<Letter> t{a, b, a, b};
  CHECK(least_rotation(t) == 0);
  std::vector<Letter> u{B, a, b};
  canonicalize_rotation(u);
  CHECK(u == std::vector<Letter>{a, b, B});
}

TEST_CASE("words reduce freely") {
  CHECK(Word{a, b, B, A}.empty());
  CHECK(Word{a, b, B, b}.vec() == std::vector<Letter>{a, b});
  CHECK((Word{a, b} * Word{B, c}).vec() == std::vector<Letter>{a, c});
  CHECK(Word{a, b}.inverse().vec() == std::vector<Letter>{B, A});
  CHECK(Word{a, -3}.max_index() == 3);
  CHECK_THROWS_AS(reduce(std::vector<Letter>{a, c}, 2), ValidationError);
  CHECK_THROWS_AS(reduce(std::vector<Letter>{0}, 2), ValidationError);
}

TEST_CASE("cyclic reduction splits off the conjugator") {
  const Word w{b, a, b, a, B};
  const auto cr = cyclic_reduce(w);
  CHECK(cr.core.vec() == std::vector<Letter>{a, b, a});
  CHECK(cr.conjugator.vec() == std::vector<Letter>{b});
  CHECK(cr.cls.vec() == std::vector<Letter>{a, a, b});
  CHECK(cr.conjugator * cr.core * cr.conjugator.inverse() == w);
  CHECK(CyclicWord(Word{a, A}).empty());
  CHECK(CyclicWord(Word{a, b, A, B}).inverse() == CyclicWord(Word{b, a, B, A}));
}

TEST_CASE("alphabet parsing and printing") {
  const Alphabet al = Alphabet::standard(3);
  CHECK(al.index_of("c") == 3);
  CHECK(al.index_of("d") == 0);
  CHECK(al.parse_letters("a b^-1 c") == std::vector<Letter>{a, B, c});
  CHECK(al.parse_letters("1").empty());
  CHECK(al.format(Word{a, B}) == "a b^-1");
  CHECK(al.format(Word{}) == "1");
  CHECK_THROWS_AS(al.parse_letters("a q"), ValidationError);
  CHECK(Alphabet::standard(27).name(27) == "x27");
}

TEST_CASE("automorphisms apply, compose and invert") {
  const Automorphism fib(2, {Word{a, b}, Word{a}}, std::vector<Word>{Word{b}, Word{B, a}});
  CHECK(fib.inverse_verified());
  CHECK(apply(fib, Word{a, b}).vec() == std::vector<Letter>{a, b, a});
  CHECK(apply(fib, Word{A}).vec() == std::vector<Letter>{B, A});
  CHECK(iterate(fib, Word{a}, 3).vec() == std::vector<Letter>{a, b, a, a, b});
  CHECK(iterate(fib, iterate(fib, Word{a}, 4), -4) == Word{a});
  const Automorphism sq = compose(fib, fib);
  CHECK(sq.images()[0] == iterate(fib, Word{a}, 2));
  CHECK(sq.inverse_verified());
  CHECK(fib.inverse().images()[1] == Word{B, a});

  const Automorphism wrong(2, {Word{a, b}, Word{a}}, std::vector<Word>{Word{a}, Word{b}});
  CHECK_FALSE(wrong.inverse_verified());
  CHECK_THROWS_AS((void)wrong.inverse(), ValidationError);
  CHECK_THROWS_AS((void)iterate(wrong, Word{a}, -1), ValidationError);
  CHECK_THROWS_AS(Automorphism(2, {Word{a}}), ValidationError);
}

TEST_CASE("inverse search finds short inverses") {
  const Automorphism fib(2, {Word{a, b}, Word{a}});
  const auto inv = nielsen_inverse_search(fib, 6);
  REQUIRE(inv.has_value());
  CHECK(inv->inverse_verified());
  CHECK(iterate(*inv, Word{a, b, b}, -1) == apply(fib, Word{a, b, b}));

  const Automorphism plas(3, {Word{b}, Word{c}, Word{a, b}});
  const auto pinv = nielsen_inverse_search(plas, 8);
  REQUIRE(pinv.has_value());
  CHECK(pinv->images().at(0) == Word{c, A});
}

TEST_CASE("outer classes") {
  const Automorphism fib(2, {Word{a, b}, Word{a}}, std::vector<Word>{Word{b}, Word{B, a}});
  const Automorphism conj = compose(Automorphism::inner(2, Word{b, a, B}), fib);
  CHECK(same_outer_class(conj, fib));
  CHECK_FALSE(same_outer_class(compose(fib, fib), fib));
  CHECK(same_outer_class(Automorphism::inner(2, Word{a, b}), Automorphism::identity(2)));
}

TEST_CASE("free group invariants on random samples") {
  Rng rng(0xF1);
  const Automorphism fib(2, {Word{a, b}, Word{a}}, std::vector<Word>{Word{b}, Word{B, a}});
  for (int trial = 0; trial < 300; ++trial) {
    const int rank = test::uniform(rng, 1, 4);
    const auto raw = test::random_raw(rng, rank, test::uniform(rng, 0, 20));
    const Word w(raw);
    CHECK(Word(w.vec()) == w);  // idempotent
    const Word u = test::random_word(rng, rank, test::uniform(rng, 0, 8));
    const Word v = test::random_word(rng, rank, test::uniform(rng, 0, 8));
    CHECK((u * v).length() <= u.length() + v.length());
    CHECK(CyclicWord(w).length() <= w.length());
    CHECK((w * w.inverse()).empty());

    const Word g = test::random_word(rng, rank, test::uniform(rng, 0, 6));
    CHECK(CyclicWord(g * w * g.inverse()) == CyclicWord(w));

    // canonical form is rotation invariant
    auto core = cyclic_reduce(w).core.vec();
    if (!core.empty()) {
      const auto k = static_cast<std::ptrdiff_t>(test::uniform(rng, 0, static_cast<int>(core.size()) - 1));
      std::rotate(core.begin(), core.begin() + k, core.end());
      CHECK(CyclicWord(Word(core)) == CyclicWord(w));
    }
  }
  for (int trial = 0; trial < 200; ++trial) {
    const Word u = test::random_word(rng, 2, test::uniform(rng, 0, 6));
    const Word v = test::random_word(rng, 2, test::uniform(rng, 0, 6));
    CHECK(apply(fib, u * v) == apply(fib, u) * apply(fib, v));
    const int m = test::uniform(rng, -5, 5);
    const int n = test::uniform(rng, -5, 5);
    CHECK(iterate(fib, iterate(fib, u, m), n) == iterate(fib, u, m + n));
  }
}

TEST_CASE("random automorphisms carry verified inverses") {
  Rng rng(0xA7);
  for (int trial = 0; trial < 100; ++trial) {
    const int rank = test::uniform(rng, 2, 4);
    const Automorphism phi = test::random_automorphism(rng, rank, test::uniform(rng, 1, 8));
    REQUIRE(phi.inverse_verified());
    const Word w = test::random_word(rng, rank, 6);
    CHECK(iterate(phi, iterate(phi, w, 1), -1) == w);
    CHECK(iterate(phi, iterate(phi, w, -2), 2) == w);
  }
}
