#include <doctest.h>

#include <algorithm>
#include <queue>

#include "cep/catalog.hpp"
#include "cep/lang.hpp"
#include "cep/powerset.hpp"
#include "support.hpp"

using namespace cep;
using namespace cep::testing;

namespace {

Dfa fixture(const std::string& name) { return parse_dfa(read_file(fixture_path(name))); }

Grammar nested_grammar() { return parse_grammar(read_file(fixture_path("nested.grammar"))); }

std::vector<Dfa> some_dfas(Rng& rng, int random) {
  std::vector<Dfa> out;
  for (const char* f : {"sigma_a_sigma.dfa", "sigma_a_sigma_b_sigma.dfa", "even_a.dfa", "ab_star.dfa"})
    out.push_back(fixture(f));
  for (int i = 0; i < random; ++i) out.push_back(random_dfa(rng, 1 + rng() % 5));
  return out;
}

bool accepts_something(const Dfa& d) {
  std::vector<char> seen(d.states.size(), 0);
  std::queue<std::size_t> q;
  q.push(d.initial);
  seen[d.initial] = 1;
  while (!q.empty()) {
    const auto s = q.front();
    q.pop();
    if (d.final[s]) return true;
    for (auto t : d.delta[s])
      if (!seen[t]) seen[t] = 1, q.push(t);
  }
  return false;
}

ElemSet mask_set(std::uint64_t mask) {
  ElemSet out;
  for (Elem e = 0; mask >> e; ++e)
    if (mask >> e & 1) out.push_back(e);
  return out;
}

}  // namespace

TEST_CASE("automaton files") {
  const auto d = fixture("sigma_a_sigma.dfa");
  CHECK(d.states.size() == 2);
  CHECK(d.accepts(std::vector<std::size_t>{1, 0, 1}));
  CHECK_FALSE(d.accepts(std::vector<std::size_t>{1, 1}));
  CHECK(d.letter("b") == 1u);
  CHECK_FALSE(d.letter("c"));
  const auto again = parse_dfa(serialize_dfa(d));
  CHECK(again.alphabet == d.alphabet);
  CHECK(again.states == d.states);
  CHECK(again.delta == d.delta);
  CHECK(again.final == d.final);

  const std::string head = "dfa\nalphabet a\nstates p q\ninitial p\nfinal q\n";
  CHECK_NOTHROW(parse_dfa(head + "trans p a q\ntrans q a p\n"));
  CHECK_THROWS_AS(parse_dfa(head + "trans p a q\n"), ParseError);
  CHECK_THROWS_AS(parse_dfa(head + "trans p a q\ntrans p a p\ntrans q a p\n"), ParseError);
  CHECK_THROWS_AS(parse_dfa(head + "trans p b q\ntrans q a p\n"), ParseError);
  CHECK_THROWS_AS(parse_dfa(head + "trans p a r\ntrans q a p\n"), ParseError);
  CHECK_THROWS_AS(parse_dfa("automaton\n"), ParseError);
  CHECK_THROWS_AS(parse_dfa("dfa\nalphabet a\nstates p\ntrans p a p\n"), ParseError);
  CHECK_THROWS_AS(parse_dfa("dfa\nalphabet a a\nstates p\ninitial p\ntrans p a p\n"), ParseError);
  CHECK_THROWS_AS(parse_dfa("dfa\nalphabet a\nstates p\ninitial p\nbogus\ntrans p a p\n"), ParseError);
}

TEST_CASE("minimization") {
  // Σ*aΣ* with the accepting state split in two and an unreachable state.
  const auto d = parse_dfa(
      "dfa\nalphabet a b\nstates s t u z\ninitial s\nfinal t u\n"
      "trans s a t\ntrans s b s\ntrans t a u\ntrans t b u\ntrans u a t\ntrans u b t\n"
      "trans z a z\ntrans z b s\n");
  const auto m = minimize(d);
  CHECK(m.states.size() == 2);
  CHECK(m.initial == 0);
  CHECK(m.states[0] == "s");

  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    const auto r = random_dfa(rng, 1 + rng() % 6);
    const auto mr = minimize(r);
    CHECK(mr.states.size() <= r.states.size());
    CHECK(minimize(mr).states.size() == mr.states.size());
    for (const auto& w : words_up_to(2, 7)) CHECK(mr.accepts(w) == r.accepts(w));
  }
}

TEST_CASE("syntactic monoid of Σ*aΣ*") {
  const auto r = syntactic_monoid(fixture("sigma_a_sigma.dfa"));
  CHECK(r.monoid.elements == std::vector<std::string>{"1", "a"});
  CHECK(r.identity == 0);
  CHECK(r.letter_image[1] == r.identity);
  CHECK(r.accepting == ElemSet{1});
  CHECK(r.monoid(1, 1) == 1);
}

TEST_CASE("syntactic monoid of even_a is Z2") {
  const auto r = syntactic_monoid(fixture("even_a.dfa"));
  CHECK(r.monoid.size() == 2);
  const Elem a = r.letter_image[0];
  CHECK(a != r.identity);
  CHECK(r.monoid(a, a) == r.identity);
  // Z2 is solvable and P(Z2)/~F has three classes with no B2 or Z_d inside.
  const auto v = pcfg_verdict(fixture("even_a.dfa"));
  CHECK(v.monoid_solvable);
  CHECK(v.freeness.quotient_free == true);
  CHECK(v.verdict == Verdict::DET);
}

TEST_CASE("syntactic monoid recognizes the language") {
  Rng rng(32);
  for (const auto& d : some_dfas(rng, 120)) {
    const auto r = syntactic_monoid(d);
    CHECK(validate_semigroup(r.monoid).ok());
    for (Elem e = 0; e < r.monoid.size(); ++e) {
      CHECK(r.image(r.shortest_word[e]) == e);
      CHECK(r.monoid(r.identity, e) == e);
      CHECK(r.monoid(e, r.identity) == e);
    }
    const auto words = words_up_to(2, 6);
    std::set<Elem> hit;
    for (const auto& w : words) {
      const Elem m = r.image(w);
      hit.insert(m);
      CHECK(r.in_f(m) == d.accepts(w));
      CHECK(r.minimal.run(r.minimal.initial, w) == r.action[m][r.minimal.initial]);
    }
    for (Elem e = 0; e < r.monoid.size(); ++e)
      if (r.shortest_word[e].size() <= 6) CHECK(hit.count(e) == 1);
    for (std::size_t i = 0; i < 60; ++i) {
      const auto& u = words[rng() % words.size()];
      const auto& v = words[rng() % words.size()];
      auto uv = u;
      uv.insert(uv.end(), v.begin(), v.end());
      CHECK(r.image(uv) == r.monoid(r.image(u), r.image(v)));
    }
  }
}

TEST_CASE("F-congruence") {
  Rng rng(33);
  for (const auto& d : some_dfas(rng, 80)) {
    const auto r = syntactic_monoid(d);
    if (r.monoid.size() > 8) continue;
    const auto fc = f_congruence(r);
    const auto p = build_power(r.monoid);
    const std::size_t k = r.monoid.size();
    const std::uint64_t full = (std::uint64_t{1} << k) - 1;
    auto profile = [&](std::uint64_t x) {
      std::vector<char> out;
      for (Elem l = 0; l < k; ++l)
        for (Elem rr = 0; rr < k; ++rr) {
          bool meets = false;
          for (Elem a : mask_set(x)) meets = meets || r.in_f(r.monoid(r.monoid(l, a), rr));
          out.push_back(meets);
        }
      return out;
    };
    for (std::uint64_t x = 1; x <= full; ++x) {
      CHECK(fc.class_of[fc.representative[fc.class_of[x]]] == fc.class_of[x]);
      for (std::uint64_t y = 1; y <= full; ++y) {
        CHECK((fc.class_of[x] == fc.class_of[y]) == (profile(x) == profile(y)));
        const Elem cx = fc.class_of[x], cy = fc.class_of[y];
        CHECK(fc.quotient.plus(cx, cy) == fc.class_of[x | y]);
        CHECK(fc.quotient.times(cx, cy) == fc.class_of[subset_mask(p.times(subset_elem(x), subset_elem(y)))]);
      }
    }
    CHECK(validate_semiring(fc.quotient).ok());
  }
  const auto r = syntactic_monoid(fixture("sigma_a_sigma.dfa"));
  CHECK(f_congruence(r).quotient.size() == 2);
  CHECK_THROWS_AS(f_congruence(syntactic_monoid(fixture("ab_star.dfa")), 2), DomainError);
}

TEST_CASE("quotient freeness and verdicts") {
  const auto qf = check_quotient_freeness(syntactic_monoid(fixture("sigma_a_sigma.dfa")));
  CHECK(qf.implication_holds);
  CHECK(qf.quotient_free == true);
  CHECK(pcfg_verdict(fixture("sigma_a_sigma_b_sigma.dfa")).verdict == Verdict::NL);
  Rng rng(34);
  for (const auto& d : some_dfas(rng, 60)) {
    const auto v = pcfg_verdict(d);
    CHECK_FALSE(v.reason.empty());
    if (v.verdict && *v.verdict != Verdict::PComplete) {
      CHECK(v.monoid_solvable);
      CHECK(v.freeness.implication_holds);
    }
    if (!v.freeness.implication_holds) {
      REQUIRE(v.freeness.counterexample);
      const auto r = syntactic_monoid(d);
      const auto [s, e, t] = *v.freeness.counterexample;
      CHECK(r.monoid(e, e) == e);
      CHECK(r.in_f(r.monoid(s, t)));
      CHECK_FALSE(r.in_f(r.monoid(r.monoid(s, e), t)));
    }
  }
}

TEST_CASE("grammar files") {
  const auto g = nested_grammar();
  CHECK(g.nonterminals == std::vector<std::string>{"S", "A", "B"});
  CHECK(g.terminals == std::vector<std::string>{"a", "b"});
  CHECK(g.nonterminal("A") == 1u);
  CHECK(slp_word(g, g.start) == std::vector<std::string>{"b"});
  const auto again = parse_grammar(serialize_grammar(g));
  CHECK(serialize_grammar(again) == serialize_grammar(g));
  CHECK(parse_grammar("grammar\nstart S\n! S -> _\n").productions[0].rhs.empty());

  CHECK_THROWS_AS(parse_grammar("grammar\n!S -> a\n"), ParseError);
  CHECK_THROWS_AS(parse_grammar("gram\nstart S\n!S -> a\n"), ParseError);
  CHECK_THROWS_AS(parse_grammar("grammar\nstart T\n!S -> a\n"), ParseError);
  CHECK_THROWS_AS(parse_grammar("grammar\nstart S\nS -> a\n"), ParseError);
  CHECK_THROWS_AS(parse_grammar("grammar\nstart S\n!S -> a\n!S -> b\n"), ParseError);
  CHECK_THROWS_AS(parse_grammar("grammar\nstart S\n!S a\n"), ParseError);
  CHECK_THROWS_AS(parse_grammar("grammar\nstart S\n!S -> A\n!A -> b S\n"), CycleError);

  Grammar cyc = g;
  cyc.productions[cyc.slp[2]].rhs = {{false, 0}};
  try {
    validate_slp(cyc);
    FAIL("cycle not detected");
  } catch (const CycleError& e) {
    CHECK(e.cycle.size() >= 2);
  }
}

TEST_CASE("straight-line words and their images") {
  Rng rng(35);
  const auto r = syntactic_monoid(fixture("ab_star.dfa"));
  for (int i = 0; i < 200; ++i) {
    const auto g = random_grammar(rng, 1 + rng() % 6, rng() % 4);
    const auto words = short_words(g, 10);
    for (std::size_t a = 0; a < g.nonterminals.size(); ++a) {
      const auto w = slp_word(g, a);
      REQUIRE(w);
      std::vector<std::size_t> letters;
      for (const auto& s : *w) letters.push_back(*r.minimal.letter(s));
      CHECK(slp_image(g, r, a) == r.image(letters));
      if (w->size() <= 10) CHECK(words[a].count(*w) == 1);
    }
  }
  // Doubling chain: 2^20 letters, cut off by max_length.
  Grammar big;
  big.terminals = {"a"};
  for (int i = 0; i <= 20; ++i) big.nonterminals.push_back("N" + std::to_string(i));
  big.productions.push_back({20, {{true, 0}}, true});
  for (std::size_t i = 0; i < 20; ++i) big.productions.push_back({i, {{false, i + 1}, {false, i + 1}}, true});
  big.slp = {1};
  for (std::size_t i = 1; i < 20; ++i) big.slp.push_back(i + 1);
  big.slp.push_back(0);
  validate_slp(big);
  CHECK_FALSE(slp_word(big, 0));
  CHECK(slp_word(big, 4)->size() == 65536);
  CHECK(slp_image(big, syntactic_monoid(fixture("even_a.dfa")), 0) == syntactic_monoid(fixture("even_a.dfa")).identity);
}

TEST_CASE("intersection agrees with the product construction") {
  Rng rng(36);
  for (int i = 0; i < 150; ++i) {
    const auto g = random_grammar(rng, 1 + rng() % 5, rng() % 6);
    const auto words = short_words(g, 5);
    for (const auto& d : some_dfas(rng, 2)) {
      const auto res = intersect(g, d, true);
      const auto prod = intersect_by_product(g, d);
      CHECK(res.nonempty == prod.nonempty);
      const auto r = syntactic_monoid(d);
      CHECK(res.growth_events <= g.nonterminals.size() * r.monoid.size());
      for (std::size_t a = 0; a < g.nonterminals.size(); ++a) {
        CHECK(std::includes(res.fixpoint[a].begin(), res.fixpoint[a].end(), res.seeds[a].begin(), res.seeds[a].end()));
        for (const auto& w : words[a]) {
          std::vector<std::size_t> letters;
          for (const auto& s : w) letters.push_back(*r.minimal.letter(s));
          CHECK(contains(res.fixpoint[a], r.image(letters)));
        }
      }
      if (res.nonempty) {
        REQUIRE(res.witness);
        std::vector<std::size_t> letters;
        for (const auto& s : *res.witness) letters.push_back(*d.letter(s));
        CHECK(d.accepts(letters));
      }
    }
  }
  const auto res = intersect(nested_grammar(), fixture("sigma_a_sigma.dfa"), true);
  CHECK(res.nonempty);
  CHECK(res.witness == std::vector<std::string>{"a", "b", "b"});
  Grammar g = nested_grammar();
  g.terminals.push_back("c");
  g.productions.push_back({0, {{true, 2}}, false});
  CHECK_THROWS_AS(intersect(g, fixture("sigma_a_sigma.dfa")), DomainError);
}

TEST_CASE("grammar to circuit") {
  Rng rng(37);
  for (int i = 0; i < 60; ++i) {
    const auto g = i == 0 ? nested_grammar() : random_grammar(rng, 1 + rng() % 4, rng() % 5);
    for (const auto& d : some_dfas(rng, 1)) {
      const auto r = syntactic_monoid(d);
      if (r.monoid.size() > 8) continue;
      const auto c = grammar_to_circuit(g, r);
      CHECK(is_normal(c));
      const auto res = intersect(g, d);
      CHECK(mask_set(subset_mask(*eval_naive(c).output)) == res.fixpoint[g.start]);
    }
  }
}

TEST_CASE("circuit to grammar") {
  Rng rng(38);
  for (const auto& d : some_dfas(rng, 20)) {
    const auto r = syntactic_monoid(d);
    if (r.monoid.size() > 6) continue;
    const auto power = std::make_shared<const FiniteSemiring>(build_power(r.monoid));
    for (int i = 0; i < 20; ++i) {
      CircuitShape shape;
      shape.gates = 2 + rng() % 20;
      const auto c = normalize(random_circuit(power, rng, shape));
      const auto g = circuit_to_grammar(c, r);
      const auto res = intersect(g, r.minimal);
      const auto values = eval_naive(c).values;
      for (GateId a = 0; a < c.size(); ++a)
        CHECK(res.fixpoint[*g.nonterminal(c.gate(a).id)] == mask_set(subset_mask(values[a])));
    }
  }
  const auto r = syntactic_monoid(fixture("sigma_a_sigma.dfa"));
  CHECK_THROWS_AS(circuit_to_grammar(Circuit(std::make_shared<const FiniteSemiring>(boolean_semiring())), r),
                  DomainError);
}

TEST_CASE("padding gadget") {
  Rng rng(39);
  const std::vector<std::string> sigma{"a", "b"};
  const auto nonempty_words =
      parse_dfa("dfa\nalphabet a b\nstates e n\ninitial e\nfinal n\ntrans e a n\ntrans e b n\ntrans n a n\ntrans n b n\n");
  for (int i = 0; i < 100; ++i) {
    const auto g = random_grammar(rng, 1 + rng() % 5, rng() % 5);
    const auto pad = padding_gadget(g, sigma);
    CHECK(pad.nonterminals.size() == g.nonterminals.size() + 1);
    CHECK(pad.nonterminals.back() == "X");
    const bool has_letters = intersect(g, nonempty_words).nonempty;
    for (const auto& d : some_dfas(rng, 3)) {
      if (!accepts_something(d)) {
        CHECK_FALSE(intersect(pad, d).nonempty);
        continue;
      }
      // Everything if G has a non-empty word, otherwise only the empty word.
      if (has_letters) CHECK(intersect(pad, d).nonempty);
      else CHECK(intersect(pad, d).nonempty == static_cast<bool>(d.final[d.initial]));
    }
  }
  Grammar named = nested_grammar();
  named.nonterminals[2] = "X";
  CHECK(padding_gadget(named, sigma).nonterminals.back() == "X'");
}
