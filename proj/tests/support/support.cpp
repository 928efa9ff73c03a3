#include "support.hpp"

#include <functional>
#include <map>

#include "cep/catalog.hpp"
#include "cep/classify.hpp"
#include "cep/powerset.hpp"

namespace cep::testing {

std::vector<NamedSemiring> fixture_semirings() {
  return {
      {"B2", boolean_semiring()},
      {"Z2", ring_zd(2)},
      {"Z3", ring_zd(3)},
      {"Z4", ring_zd(4)},
      {"Z6", ring_zd(6)},
      {"trivial", trivial_semiring()},
      {"chain3", chain_lattice(3)},
      {"trunc4_max", truncated_max_plus(4)},
      {"trunc4_min", truncated_min_plus(4)},
      {"capped4", capped_max_plus(4)},
      {"maxmax4", max_max(4)},
      {"ab_absorbing", two_letter_absorbing()},
      {"abc_ideal", three_letter_ideal()},
      {"P(Z2)", build_power(cyclic_group(2))},
      {"P(Z3)", build_power(cyclic_group(3))},
      {"P(Z5)", build_power(cyclic_group(5))},
      {"P(meet2)", build_power(meet_semilattice2())},
      {"P(S3)", build_power(symmetric_group(3))},
  };
}

std::vector<NamedSemiring> zero_one_free_fixtures() {
  std::vector<NamedSemiring> out;
  for (auto& f : fixture_semirings())
    if (is_zero_one_free(f.sr)) out.push_back(std::move(f));
  return out;
}

std::string fixture_dir() { return CEP_FIXTURE_DIR; }
std::string fixture_path(const std::string& name) { return fixture_dir() + "/" + name; }

namespace {

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

std::size_t below(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

}  // namespace

Circuit random_circuit(std::shared_ptr<const FiniteSemiring> sr, Rng& rng, const CircuitShape& shape) {
  Circuit c(sr);
  const std::size_t n = sr->size();
  std::function<Term(std::size_t, int)> term = [&](std::size_t limit, int depth) -> Term {
    if (depth == 0 || coin(rng, 0.4))
      return coin(rng, 0.7) ? Term::ref(below(rng, limit)) : Term::constant(static_cast<Elem>(below(rng, n)));
    std::vector<Term> args{term(limit, depth - 1), term(limit, depth - 1)};
    return coin(rng, 0.5) ? Term::sum(std::move(args)) : Term::product(std::move(args));
  };
  for (std::size_t i = 0; i < shape.gates; ++i) {
    const std::string id = "g" + std::to_string(i);
    if (i == 0 || coin(rng, shape.const_share)) {
      c.add_gate(id, Rhs::constant(static_cast<Elem>(below(rng, n))));
      continue;
    }
    const double u = std::uniform_real_distribution<double>(0, 1)(rng);
    if (u < shape.copy_share)
      c.add_gate(id, Rhs::copy(below(rng, i)));
    else if (u < shape.copy_share + shape.general_share)
      c.add_gate(id, Rhs::general(Term::sum({term(i, 2), term(i, 1)})));
    else if (u < shape.copy_share + shape.general_share + shape.mul_share)
      c.add_gate(id, Rhs::mul(below(rng, i), below(rng, i)));
    else
      c.add_gate(id, Rhs::add(below(rng, i), below(rng, i)));
  }
  c.set_output(shape.gates - 1);
  return c;
}

std::pair<Circuit, TypeAssignment> random_typed_circuit(std::shared_ptr<const FiniteSemiring> sr, Rng& rng,
                                                        std::size_t gates) {
  const ElemSet e = idempotents(*sr);
  Circuit c(sr);
  TypeAssignment types;
  for (std::size_t i = 0; i < gates; ++i) {
    const Elem te = pick(rng, e), tf = pick(rng, e);
    std::optional<Rhs> rhs;
    const int kind = static_cast<int>(below(rng, 3));
    if (i > 0 && kind == 1) {
      std::vector<GateId> same;
      for (GateId g = 0; g < i; ++g)
        if (types[g] == GateType{te, tf}) same.push_back(g);
      if (!same.empty()) rhs = Rhs::add(pick(rng, same), pick(rng, same));
    } else if (i > 0 && kind == 2) {
      const Elem x = pick(rng, e);
      std::vector<GateId> left, right;
      for (GateId g = 0; g < i; ++g) {
        if (types[g] == GateType{te, x}) left.push_back(g);
        if (types[g] == GateType{x, tf}) right.push_back(g);
      }
      if (!left.empty() && !right.empty()) rhs = Rhs::mul(pick(rng, left), pick(rng, right));
    }
    if (!rhs) {
      const Elem v = static_cast<Elem>(below(rng, sr->size()));
      rhs = Rhs::constant(sr->times(sr->times(te, v), tf));
    }
    c.add_gate("g" + std::to_string(i), *rhs);
    types.emplace_back(te, tf);
  }
  c.set_output(gates - 1);
  return {std::move(c), std::move(types)};
}

std::vector<Elem> eval_recursive(const Circuit& c) {
  const auto& sr = c.semiring();
  std::vector<std::optional<Elem>> memo(c.size());
  std::function<Elem(GateId)> value;
  std::function<Elem(const Term&)> term = [&](const Term& t) -> Elem {
    switch (t.kind) {
      case Term::Kind::Gate: return value(t.gate);
      case Term::Kind::Const: return t.value;
      case Term::Kind::Sum: {
        Elem acc = term(t.args.at(0));
        for (std::size_t i = 1; i < t.args.size(); ++i) acc = sr.plus(acc, term(t.args[i]));
        return acc;
      }
      case Term::Kind::Product: {
        Elem acc = term(t.args.at(0));
        for (std::size_t i = 1; i < t.args.size(); ++i) acc = sr.times(acc, term(t.args[i]));
        return acc;
      }
    }
    return 0;
  };
  value = [&](GateId g) -> Elem {
    if (memo[g]) return *memo[g];
    const Rhs& r = c.rhs(g);
    Elem v = 0;
    switch (r.kind) {
      case Rhs::Kind::Const: v = r.value; break;
      case Rhs::Kind::Add: v = sr.plus(value(r.left), value(r.right)); break;
      case Rhs::Kind::Mul: v = sr.times(value(r.left), value(r.right)); break;
      case Rhs::Kind::Copy: v = value(r.left); break;
      case Rhs::Kind::General: v = term(*r.term); break;
    }
    memo[g] = v;
    return v;
  };
  std::vector<Elem> out;
  for (GateId g = 0; g < c.size(); ++g) out.push_back(value(g));
  return out;
}

ElemSet brute_force_group(const FiniteSemigroup& sg, Elem e) {
  ElemSet local;
  for (Elem x = 0; x < sg.size(); ++x) {
    const Elem y = sg(sg(e, x), e);
    if (y == x) local.push_back(x);
  }
  ElemSet out;
  for (Elem x : local)
    for (Elem y : local)
      if (sg(x, y) == e && sg(y, x) == e) {
        out.push_back(x);
        break;
      }
  return out;
}

std::vector<std::vector<std::size_t>> words_up_to(std::size_t letters, std::size_t n) {
  std::vector<std::vector<std::size_t>> out{{}};
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].size() == n) continue;
    for (std::size_t a = 0; a < letters; ++a) {
      auto w = out[i];
      w.push_back(a);
      out.push_back(std::move(w));
    }
  }
  return out;
}

std::vector<std::set<std::vector<std::string>>> short_words(const Grammar& g, std::size_t n) {
  using Word = std::vector<std::string>;
  std::vector<std::set<Word>> lang(g.nonterminals.size());
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& p : g.productions) {
      std::set<Word> cur{{}};
      for (const auto& s : p.rhs) {
        std::set<Word> next;
        for (const auto& u : cur) {
          if (s.terminal) {
            if (u.size() < n) {
              auto w = u;
              w.push_back(g.terminals[s.index]);
              next.insert(std::move(w));
            }
            continue;
          }
          for (const auto& v : lang[s.index])
            if (u.size() + v.size() <= n) {
              auto w = u;
              w.insert(w.end(), v.begin(), v.end());
              next.insert(std::move(w));
            }
        }
        cur = std::move(next);
      }
      for (auto& w : cur) changed = lang[p.lhs].insert(w).second || changed;
    }
  }
  return lang;
}

Grammar random_grammar(Rng& rng, std::size_t nonterminals, std::size_t extra_productions) {
  static const std::vector<std::string> names{"S", "A", "B", "C", "D", "E", "F", "G"};
  Grammar g;
  g.nonterminals.assign(names.begin(), names.begin() + static_cast<std::ptrdiff_t>(nonterminals));
  g.terminals = {"a", "b"};
  g.start = 0;
  auto rhs = [&](std::size_t from) {
    std::vector<Symbol> out;
    const std::size_t len = below(rng, 4);
    for (std::size_t i = 0; i < len; ++i) {
      if (from < nonterminals && coin(rng, 0.5))
        out.push_back({false, from + below(rng, nonterminals - from)});
      else
        out.push_back({true, below(rng, 2)});
    }
    return out;
  };
  for (std::size_t a = 0; a < nonterminals; ++a) {
    g.slp.push_back(g.productions.size());
    g.productions.push_back({a, rhs(a + 1), true});
  }
  for (std::size_t i = 0; i < extra_productions; ++i) g.productions.push_back({below(rng, nonterminals), rhs(0), false});
  return g;
}

Dfa random_dfa(Rng& rng, std::size_t states) {
  Dfa d;
  d.alphabet = {"a", "b"};
  for (std::size_t q = 0; q < states; ++q) {
    d.states.push_back("q" + std::to_string(q));
    d.final.push_back(coin(rng, 0.35) ? 1 : 0);
    d.delta.push_back({below(rng, states), below(rng, states)});
  }
  return d;
}

BoolCircuit random_bool_circuit(Rng& rng, std::size_t gates, bool allow_not) {
  BoolCircuit bc;
  const std::size_t inputs = std::max<std::size_t>(2, gates / 4);
  for (std::size_t i = 0; i < gates; ++i) {
    BoolGate g;
    g.id = "x" + std::to_string(i);
    if (i < inputs) {
      g.kind = BoolGate::Kind::Const;
      g.value = coin(rng, 0.5);
    } else {
      const auto k = below(rng, allow_not ? 3 : 2);
      g.kind = k == 0 ? BoolGate::Kind::And : k == 1 ? BoolGate::Kind::Or : BoolGate::Kind::Not;
      g.left = below(rng, i);
      g.right = below(rng, i);
    }
    bc.gates.push_back(g);
  }
  bc.output = gates - 1;
  return bc;
}

BoolCircuit random_layered_circuit(Rng& rng, std::size_t layers, std::size_t width) {
  BoolCircuit bc;
  std::vector<std::size_t> prev;
  for (std::size_t l = 1; l <= layers; ++l) {
    const std::size_t count = l == layers ? 1 : width;
    std::vector<std::size_t> cur;
    for (std::size_t i = 0; i < count; ++i) {
      BoolGate g;
      g.id = "l" + std::to_string(l) + "_" + std::to_string(i);
      g.layer = l;
      if (l == 1) {
        g.kind = BoolGate::Kind::Const;
        g.value = coin(rng, 0.5);
      } else {
        g.kind = coin(rng, 0.5) ? BoolGate::Kind::And : BoolGate::Kind::Or;
        g.left = pick(rng, prev);
        g.right = pick(rng, prev);
      }
      cur.push_back(bc.gates.size());
      bc.gates.push_back(g);
    }
    prev = std::move(cur);
  }
  bc.output = bc.gates.size() - 1;
  return bc;
}

}  // namespace cep::testing
