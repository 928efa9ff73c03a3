#include <doctest.h>

#include "cep/catalog.hpp"
#include "cep/classify.hpp"
#include "cep/powerset.hpp"
#include "cep/reduction.hpp"
#include "support.hpp"

using namespace cep;
using namespace cep::testing;

namespace {

auto shared(FiniteSemiring sr) { return std::make_shared<const FiniteSemiring>(std::move(sr)); }

using Poly = std::map<Word, std::uint64_t>;

// Full expansion of every gate in the free semiring over the constants.
std::vector<Poly> expand(const Circuit& c) {
  std::vector<Poly> p(c.size());
  for (GateId g : c.topological_order()) {
    const Rhs& r = c.rhs(g);
    if (r.kind == Rhs::Kind::Const) {
      p[g][{r.value}] = 1;
    } else if (r.kind == Rhs::Kind::Add) {
      p[g] = p[r.left];
      for (const auto& [w, k] : p[r.right]) p[g][w] += k;
    } else {
      for (const auto& [u, ku] : p[r.left])
        for (const auto& [v, kv] : p[r.right]) {
          Word w = u;
          w.insert(w.end(), v.begin(), v.end());
          p[g][w] += ku * kv;
        }
    }
  }
  return p;
}

Elem poly_value(const FiniteSemiring& sr, const Poly& p) {
  std::optional<Elem> acc;
  for (const auto& [w, k] : p) {
    const Elem x = multiple(sr, k, word_value(sr, w));
    acc = acc ? sr.plus(*acc, x) : x;
  }
  return *acc;
}

Circuit small_circuit(std::shared_ptr<const FiniteSemiring> sr, Rng& rng, std::size_t gates) {
  CircuitShape shape;
  shape.gates = gates;
  shape.const_share = 0.35;
  return random_circuit(sr, rng, shape);
}

std::vector<std::shared_ptr<const FiniteSemiring>> free_fixtures() {
  std::vector<std::shared_ptr<const FiniteSemiring>> out;
  for (auto& f : zero_one_free_fixtures())
    if (f.sr.size() <= 16) out.push_back(shared(std::move(f.sr)));
  return out;
}

}  // namespace

TEST_CASE("long-product threshold") {
  for (const auto& f : fixture_semirings()) {
    CAPTURE(f.label);
    CHECK(long_product_threshold(f.sr) == power_set_products(f.sr, 1).stable_at);
    CHECK(long_product_threshold(f.sr, true) == f.sr.size());
  }
  CHECK(long_product_threshold(two_letter_absorbing()) == 2);
  CHECK(long_product_threshold(truncated_max_plus(4)) == 4);
  CHECK(long_product_threshold(max_max(4)) == 1);
}

TEST_CASE("short/long split against full expansion") {
  Rng rng(11);
  for (const auto& sr : free_fixtures()) {
    const std::size_t m = std::max<std::size_t>(2, long_product_threshold(*sr));
    for (int i = 0; i < 40; ++i) {
      const auto c = small_circuit(sr, rng, 2 + rng() % 8);
      const auto full = expand(c);
      const auto a = short_long_analyze(c, m);
      const auto truth = eval_naive(c).values;
      for (GateId g = 0; g < c.size(); ++g) {
        CHECK(poly_value(*sr, full[g]) == truth[g]);
        Poly shorts;
        bool longs = false;
        for (const auto& [w, k] : full[g]) {
          if (w.size() < m) shorts[w] = k;
          else longs = true;
        }
        const auto& parts = a.gates[g];
        CHECK(parts.long_present == longs);
        CHECK(parts.long_by_reachability == longs);
        REQUIRE(parts.short_part.has_value() == !shorts.empty());
        if (!parts.short_part) continue;
        REQUIRE(parts.short_part->terms.size() == shorts.size());
        for (const auto& [w, k] : shorts) {
          REQUIRE(parts.short_part->terms.count(w) == 1);
          CHECK(a.coefficients.same_class(parts.short_part->terms.at(w), k));
        }
        CHECK(*short_value(c, a, g) == poly_value(*sr, shorts));
      }
    }
  }
}

TEST_CASE("short/long split needs normal form and m >= 2") {
  const auto sr = shared(two_letter_absorbing());
  const auto c = parse_circuit("circuit over ab_absorbing\ngate x = const a\ngate y = copy x\n", sr);
  CHECK_THROWS_AS(short_long_analyze(c, 2), DomainError);
  CHECK_THROWS_AS(short_long_analyze(normalize(c), 1), DomainError);
}

TEST_CASE("leaf removal keeps the value and moves constants into the ideal") {
  const auto sr = shared(truncated_max_plus(4));
  const ElemSet ideal{sr->index_of("4")};
  REQUIRE(is_ideal(*sr, ideal));
  Rng rng(12);
  int done = 0;
  for (int i = 0; i < 400; ++i) {
    const auto c = small_circuit(sr, rng, 2 + rng() % 20);
    Circuit out;
    try {
      out = leaf_removal(c, ideal);
    } catch (const DomainError&) {
      continue;
    }
    ++done;
    CHECK(*eval_naive(out).output == *eval_naive(c).output);
    for (const auto& g : out.gates())
      if (g.rhs.kind == Rhs::Kind::Const) CHECK(contains(ideal, g.rhs.value));
  }
  CHECK(done > 20);

  const auto ab = shared(two_letter_absorbing());
  const auto c = parse_circuit(
      "circuit over ab_absorbing\ngate x = const a\ngate y = const b\ngate p = mul x y\ngate q = mul p x\noutput q\n", ab);
  const auto out = leaf_removal(c, ElemSet{ab->index_of("b")});
  CHECK(out.gate(*out.output()).id == "q[_;_]");
  CHECK(*eval_naive(out).output == *eval_naive(c).output);
  CHECK_THROWS_AS(leaf_removal(c, ElemSet{ab->index_of("a")}), DomainError);
  const auto sum = parse_circuit("circuit over ab_absorbing\ngate x = const a\ngate s = add x x\noutput s\n", ab);
  CHECK_THROWS_AS(leaf_removal(sum, ElemSet{ab->index_of("b")}), DomainError);
}

TEST_CASE("monomlength preserves the value in all three cases") {
  Rng rng(13);
  for (const auto& sr : free_fixtures()) {
    CAPTURE(sr->name);
    for (int i = 0; i < 60; ++i) {
      CircuitShape shape;
      shape.gates = 2 + rng() % 30;
      shape.general_share = 0.1;
      const auto c = random_circuit(sr, rng, shape);
      const Elem truth = *eval_naive(c).output;
      const auto m = monomlength(c);
      switch (m.which) {
        case MonomlengthResult::Case::ShortOnly: CHECK(*m.value == truth); break;
        case MonomlengthResult::Case::LongOnly: CHECK(*eval_naive(*m.circuit).output == truth); break;
        case MonomlengthResult::Case::Both:
          CHECK(sr->plus(*eval_naive(*m.circuit).output, *m.sigma) == truth);
          break;
      }
      if (m.circuit)
        for (const auto& g : m.circuit->gates())
          if (g.rhs.kind == Rhs::Kind::Const) CHECK(contains(m.ideal, g.rhs.value));
    }
  }
  CHECK_THROWS_AS(monomlength(Circuit(shared(build_power(cyclic_group(5))))), DomainError);
}

TEST_CASE("decompositions into sums of s·e·t") {
  for (const auto& sr : free_fixtures()) {
    CAPTURE(sr->name);
    const RerDecomposition dec(*sr);
    const auto gen = generated_subsemiring(*sr, rer(*sr));
    std::size_t longest = 0;
    for (Elem x = 0; x < sr->size(); ++x) {
      CHECK(dec.contains(x) == contains(gen, x));
      if (!dec.contains(x)) {
        CHECK_THROWS_AS(dec(x), DomainError);
        continue;
      }
      const auto& parts = dec(x);
      REQUIRE_FALSE(parts.empty());
      longest = std::max(longest, parts.size());
      std::optional<Elem> acc;
      for (const auto& t : parts) {
        CHECK(sr->times(t.e, t.e) == t.e);
        const Elem v = sr->times(sr->times(t.s, t.e), t.t);
        acc = acc ? sr->plus(*acc, v) : v;
      }
      CHECK(*acc == x);
      CHECK(decompose_RER(*sr, x) == parts);
    }
    CHECK(dec.max_terms() == longest);
  }
}

TEST_CASE("type assignments") {
  const auto sr = shared(build_power(cyclic_group(5)));
  const auto c = parse_circuit(read_file(fixture_path("rank_demo.circuit")), sr);
  const Elem one = sr->index_of("{0}"), all = sr->index_of("{0,1,2,3,4}");
  TypeAssignment t(c.size(), {one, one});
  CHECK(validate_type_assignment(c, t).empty());
  t[c.index_of("A")] = {all, one};
  const auto v = validate_type_assignment(c, t);
  REQUIRE_FALSE(v.empty());
  CHECK(v.front().gate == c.index_of("A"));
  t[c.index_of("A")] = {sr->index_of("{1}"), one};
  CHECK(validate_type_assignment(c, t).front().clause == 1);
  t.assign(c.size(), {one, one});
  t[c.index_of("D")] = {all, all};
  bool clause3 = false;
  for (const auto& x : validate_type_assignment(c, t)) clause3 = clause3 || x.clause == 3;
  CHECK(clause3);
}

TEST_CASE("affine functions") {
  const auto sr = truncated_max_plus(4);
  AffineFunction f;
  f.coefficients = {{sr.index_of("1"), sr.index_of("1")}, {sr.index_of("2"), sr.index_of("1")}};
  const std::vector<Elem> x{sr.index_of("1"), sr.index_of("1")};
  CHECK(sr.elements[f.apply(sr, x)] == "4");
  f.constant = sr.index_of("4");
  CHECK(sr.elements[f.apply(sr, x)] == "4");
  CHECK_THROWS_AS(f.apply(sr, std::vector<Elem>{0}), DomainError);
}

TEST_CASE("typed construction") {
  Rng rng(14);
  for (const auto& sr : free_fixtures()) {
    CAPTURE(sr->name);
    const RerDecomposition dec(*sr);
    for (int i = 0; i < 25; ++i) {
      CircuitShape shape;
      shape.gates = 2 + rng() % 25;
      auto c = random_circuit(sr, rng, shape);
      // Keep only constants inside the subsemiring generated by R·E·R.
      for (GateId g = 0; g < c.size(); ++g)
        if (c.rhs(g).kind == Rhs::Kind::Const && !dec.contains(c.rhs(g).value)) {
          Elem v = 0;
          while (!dec.contains(v)) ++v;
          c.set_rhs(g, Rhs::constant(v));
        }
      const auto tc = fsf(c);
      CHECK(validate_type_assignment(tc.circuit, tc.types).empty());
      CHECK(boundary_profiles(c, dec) == boundary_profiles_by_paths(c, dec));
      CHECK(tc.profiles == boundary_profiles(c, dec));
      const auto values = eval_naive(tc.circuit).values;
      std::vector<Elem> xs;
      for (auto g : tc.distinguished) xs.push_back(values[g]);
      CHECK(tc.alpha.apply(*sr, xs) == *eval_naive(c).output);
      for (GateId a = 0; a < c.size(); ++a)
        for (const auto& [q, g] : tc.gate_of[a]) {
          CHECK(std::binary_search(tc.profiles[a].begin(), tc.profiles[a].end(), q));
          CHECK(tc.types[g] == GateType{q.e, q.f});
        }
    }
  }
}

TEST_CASE("pipeline text") {
  const auto sr = shared(two_letter_absorbing());
  const auto c = parse_circuit(read_file(fixture_path("short_long.circuit")), sr);
  const auto res = step1_pipeline(c);
  REQUIRE(res.construction);
  CHECK(res.construction->alpha.constant == sr->index_of("a"));
  const auto text = describe_construction(*res.construction);
  CHECK(text.find("type ") != std::string::npos);
  CHECK(text.find("distinguished: ") != std::string::npos);
  CHECK(text.find("alpha: ") != std::string::npos);
  CHECK(text.find("m B = b") != std::string::npos);
}
