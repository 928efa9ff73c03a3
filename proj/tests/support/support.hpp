#pragma once

// Generators and independent oracles shared by the unit and acceptance tests.

#include <random>
#include <set>
#include <string>
#include <vector>

#include "cep/boolean.hpp"
#include "cep/circuit.hpp"
#include "cep/lang.hpp"
#include "cep/reduction.hpp"

namespace cep::testing {

using Rng = std::mt19937_64;

struct NamedSemiring {
  std::string label;
  FiniteSemiring sr;
};

/// Every catalog structure that is used as a fixture.
std::vector<NamedSemiring> fixture_semirings();
/// The {0,1}-free members of fixture_semirings().
std::vector<NamedSemiring> zero_one_free_fixtures();

std::string fixture_dir();
std::string fixture_path(const std::string& name);

struct CircuitShape {
  std::size_t gates = 20;
  double const_share = 0.25;
  double mul_share = 0.4;
  double copy_share = 0.0;
  double general_share = 0.0;  // general-term gates with up to 4 leaves
};

/// Random circuit whose last gate is the output; every gate only reads
/// earlier gates.
Circuit random_circuit(std::shared_ptr<const FiniteSemiring> sr, Rng& rng, const CircuitShape& shape);

/// Random circuit with a valid type assignment drawn from the idempotent
/// pairs of the semiring.
std::pair<Circuit, TypeAssignment> random_typed_circuit(std::shared_ptr<const FiniteSemiring> sr, Rng& rng,
                                                        std::size_t gates);

/// Memoised recursive evaluation, written independently of eval_naive.
std::vector<Elem> eval_recursive(const Circuit& c);

/// Maximal subgroup at e by brute force: elements of eSe with an inverse
/// relative to e.
ElemSet brute_force_group(const FiniteSemigroup& sg, Elem e);

/// All words over `letters` letters with length at most n, shortest first.
std::vector<std::vector<std::size_t>> words_up_to(std::size_t letters, std::size_t n);

/// Words of each nonterminal up to length n, by saturation over strings.
std::vector<std::set<std::vector<std::string>>> short_words(const Grammar& g, std::size_t n);

/// Random grammar over {a, b} with an acyclic marked production per
/// nonterminal.
Grammar random_grammar(Rng& rng, std::size_t nonterminals, std::size_t extra_productions);

/// Complete random DFA over {a, b}.
Dfa random_dfa(Rng& rng, std::size_t states);

/// Random Boolean circuit with constants, and, or, not.
BoolCircuit random_bool_circuit(Rng& rng, std::size_t gates, bool allow_not);

/// Random circuit in layered form: wires only go from layer k to k+1.
BoolCircuit random_layered_circuit(Rng& rng, std::size_t layers, std::size_t width);

}  // namespace cep::testing
