#include <doctest.h>

#include <map>
#include <set>

#include "cep/catalog.hpp"
#include "support.hpp"

using namespace cep;
using namespace cep::testing;

namespace {

ElemSet all_of(const FiniteSemiring& sr) {
  ElemSet s(sr.size());
  std::iota(s.begin(), s.end(), Elem{0});
  return s;
}

// k-fold products by enumerating every word of length k.
ElemSet brute_products(const FiniteSemiring& sr, std::size_t k) {
  std::set<Elem> out;
  for (const auto& w : words_up_to(sr.size(), k)) {
    if (w.size() != k) continue;
    Elem x = static_cast<Elem>(w[0]);
    for (std::size_t i = 1; i < w.size(); ++i) x = sr.times(x, static_cast<Elem>(w[i]));
    out.insert(x);
  }
  return {out.begin(), out.end()};
}

}  // namespace

TEST_CASE("semiring text round trip") {
  for (const auto& f : fixture_semirings()) {
    CAPTURE(f.label);
    const auto text = to_text(f.sr);
    const auto back = parse_semiring(text);
    CHECK(back.name == f.sr.name);
    CHECK(back.elements == f.sr.elements);
    CHECK(back.add == f.sr.add);
    CHECK(back.mul == f.sr.mul);
    CHECK(to_text(back) == text);
  }
}

TEST_CASE("semiring parse errors") {
  CHECK_THROWS_AS(parse_semiring("semiring x\nelements 0 1\nadd\n0 1\n1 1\n"), ParseError);
  CHECK_THROWS_AS(parse_semiring("semiring x\nelements 0 1\nadd\n0 1\n1 2\nmul\n0 0\n0 1\n"), ParseError);
  CHECK_THROWS_AS(parse_semiring("semiring x\nelements 0 1\nadd\n0 1\nmul\n0 0\n0 1\n"), ParseError);
  CHECK_THROWS_AS(parse_semiring("semigroup x\nelements 0\nop\n0\n"), ParseError);
  CHECK_THROWS_AS(parse_semiring("semiring x\nelements 0 0\nadd\n0 0\n0 0\nmul\n0 0\n0 0\n"), ParseError);
  CHECK_NOTHROW(parse_semiring("# comment\nsemiring x  # trailing\nelements 0\nadd\n0\nmul\n0\n"));
}

TEST_CASE("every fixture satisfies the semiring axioms") {
  for (const auto& f : fixture_semirings()) {
    CAPTURE(f.label);
    CHECK(validate_semiring(f.sr).ok());
  }
}

TEST_CASE("validation reports the broken law") {
  // XNOR as multiplication: a group, but it does not distribute over or.
  auto xnor = make_semiring("xnor", {"0", "1"}, [](Elem a, Elem b) { return a | b; },
                            [](Elem a, Elem b) { return Elem(a == b); });
  const auto rep = validate_semiring(xnor);
  REQUIRE_FALSE(rep.ok());
  std::set<std::string> axioms;
  for (const auto& v : rep.violations) axioms.insert(v.axiom);
  CHECK(axioms.count("left distributivity") == 1);
  CHECK(axioms.count("multiplicative associativity") == 0);
  CHECK_FALSE(describe(xnor, rep.violations.front()).empty());

  // Setting 0·1 = 1 in B2 leaves x·y = y, which is still a semiring.
  auto right_zero = make_semiring("right", {"0", "1"}, [](Elem a, Elem b) { return a | b; },
                                  [](Elem, Elem b) { return b; });
  CHECK(validate_semiring(right_zero).ok());

  auto noncomm = boolean_semiring();
  noncomm.add.at(0, 1) = 0;
  CHECK(validate_semiring(noncomm).violations.front().axiom == "additive commutativity");
}

TEST_CASE("semigroup validation") {
  CHECK(validate_semigroup(symmetric_group(3)).ok());
  auto bad = make_semigroup("bad", {"0", "1", "2"}, [](Elem a, Elem b) { return Elem((a + 2 * b) % 3); });
  CHECK_FALSE(validate_semigroup(bad).ok());
}

TEST_CASE("stability data matches repeated addition and multiplication") {
  for (const auto& f : fixture_semirings()) {
    CAPTURE(f.label);
    const auto& sr = f.sr;
    const auto p = stability(sr);
    const auto mulsg = sr.multiplicative();
    for (Elem x = 0; x < sr.size(); ++x) {
      const Elem w = power(mulsg, x, p.omega);
      CHECK(sr.times(w, w) == w);
    }
    const auto b = coefficient_semiring(p);
    for (Elem x = 0; x < sr.size(); ++x)
      for (std::uint64_t k1 = 1; k1 <= 24; ++k1)
        for (std::uint64_t k2 = 1; k2 <= 24; ++k2)
          if (b.same_class(k1, k2)) CHECK(multiple(sr, k1, x) == multiple(sr, k2, x));
  }
}

TEST_CASE("power cycles agree with iteration") {
  const auto sg = symmetric_group(3);
  for (Elem x = 0; x < sg.size(); ++x) {
    const auto c = power_cycle(sg, x);
    CHECK(power(sg, x, c.index) == power(sg, x, c.index + c.period));
    for (std::uint64_t i = 1; i < c.index + c.period; ++i)
      for (std::uint64_t j = i + 1; j < c.index + c.period; ++j) CHECK(power(sg, x, i) != power(sg, x, j));
  }
}

TEST_CASE("coefficient semirings B(k,d)") {
  for (std::uint64_t k = 1; k <= 4; ++k)
    for (std::uint64_t d = 1; d <= 4; ++d) {
      CoefficientSemiring b(k, d);
      CHECK(b.size() == k + d);
      for (std::uint64_t n = 0; n < 40; ++n) {
        const auto c = b.canonical(n);
        CHECK(c < k + d);
        if (n < k) {
          CHECK(c == n);
        } else {
          CHECK(c >= k);
          CHECK((n - c) % d == 0);
        }
      }
      for (std::uint64_t x = 0; x < b.size(); ++x)
        for (std::uint64_t y = 0; y < b.size(); ++y) {
          CHECK(b.add(x, y) == b.canonical(x + y));
          CHECK(b.mul(x, y) == b.canonical(x * y));
          for (std::uint64_t z = 0; z < b.size(); ++z)
            CHECK(b.mul(x, b.add(y, z)) == b.add(b.mul(x, y), b.mul(x, z)));
        }
    }
}

TEST_CASE("k-fold products and their stabilisation") {
  for (const auto& f : fixture_semirings()) {
    if (f.sr.size() > 8) continue;
    CAPTURE(f.label);
    for (std::size_t k = 1; k <= 3; ++k) CHECK(power_set_products(f.sr, k).set == brute_products(f.sr, k));
    const auto p = power_set_products(f.sr, 1);
    CHECK(power_set_products(f.sr, p.stable_at).set == power_set_products(f.sr, p.stable_at + 1).set);
    if (p.stable_at > 1)
      CHECK(power_set_products(f.sr, p.stable_at - 1).set != power_set_products(f.sr, p.stable_at).set);
  }
}

TEST_CASE("R·E(R)·R and generated subsemirings") {
  for (const auto& f : fixture_semirings()) {
    CAPTURE(f.label);
    const auto& sr = f.sr;
    std::set<Elem> brute;
    for (Elem s = 0; s < sr.size(); ++s)
      for (Elem e : idempotents(sr))
        for (Elem t = 0; t < sr.size(); ++t) brute.insert(sr.times(sr.times(s, e), t));
    CHECK(rer(sr) == ElemSet(brute.begin(), brute.end()));
    const auto gen = generated_subsemiring(sr, rer(sr));
    CHECK(is_closed(sr, gen));
    CHECK(is_ideal(sr, gen));
  }
}

TEST_CASE("generated subsemiring is the least closed superset") {
  const auto sr = truncated_max_plus(4);
  // Brute force: intersect all closed subsets containing the seed.
  for (Elem seed = 0; seed < sr.size(); ++seed) {
    ElemSet least = all_of(sr);
    for (unsigned mask = 1; mask < (1u << sr.size()); ++mask) {
      ElemSet s;
      for (Elem i = 0; i < sr.size(); ++i)
        if (mask >> i & 1) s.push_back(i);
      if (contains(s, seed) && is_closed(sr, s) && s.size() < least.size()) least = s;
    }
    CHECK(generated_subsemiring(sr, std::vector<Elem>{seed}) == least);
  }
}

TEST_CASE("identities and idempotents") {
  const auto b2 = boolean_semiring();
  CHECK(additive_identity(b2) == b2.index_of("0"));
  CHECK(multiplicative_identity(b2) == b2.index_of("1"));
  CHECK(idempotents(b2) == ElemSet{0, 1});
  const auto t = truncated_max_plus(4);
  CHECK_FALSE(multiplicative_identity(t));
  CHECK(idempotents(t) == ElemSet{t.index_of("4")});
}

TEST_CASE("subsemiring and direct product") {
  const auto z6 = ring_zd(6);
  const ElemSet evens{0, 2, 4};
  REQUIRE(is_closed(z6, evens));
  const auto sub = subsemiring(z6, evens, "2Z6");
  CHECK(validate_semiring(sub).ok());
  CHECK(sub.size() == 3);
  const auto prod = direct_product(boolean_semiring(), ring_zd(3));
  CHECK(prod.size() == 6);
  CHECK(validate_semiring(prod).ok());
}
