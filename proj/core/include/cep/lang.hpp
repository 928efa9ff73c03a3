#pragma once

// Regular languages through their syntactic monoid, the ~F quotient of the
// power semiring, and intersection of context-free grammars (given with a
// uniformizing straight-line program) with a regular language.

#include "cep/circuit.hpp"
#include "cep/classify.hpp"

namespace cep {

using Letters = std::vector<std::size_t>;  // word as letter indices

struct Dfa {
  std::vector<std::string> alphabet;
  std::vector<std::string> states;
  std::size_t initial = 0;
  std::vector<char> final;
  std::vector<std::vector<std::size_t>> delta;  // delta[state][letter]

  std::size_t run(std::size_t from, std::span<const std::size_t> word) const;
  bool accepts(std::span<const std::size_t> word) const;
  std::optional<std::size_t> letter(std::string_view name) const;
};

/// Format:
///   dfa
///   alphabet a b
///   states q0 q1
///   initial q0
///   final q1            (any number of states)
///   trans q0 a q1       (one line per state and letter)
Dfa parse_dfa(std::string_view text);
std::string serialize_dfa(const Dfa& d);

/// Reachable part, Moore refinement, states renumbered in BFS order.
Dfa minimize(const Dfa& d);

struct RecognizedLanguage {
  Dfa minimal;
  FiniteSemigroup monoid;            // transition monoid, (f·g)(q) = g(f(q))
  Elem identity = 0;
  std::vector<Elem> letter_image;    // h(letter)
  ElemSet accepting;                 // F
  std::vector<std::vector<std::size_t>> action;  // state map of each element
  std::vector<Letters> shortest_word;            // a shortest preimage per element

  Elem image(std::span<const std::size_t> word) const;
  bool in_f(Elem m) const { return contains(accepting, m); }
};

/// Transition monoid of the minimal automaton; elements named by a shortest
/// word (letters in alphabetical order), the identity is `1`.
RecognizedLanguage syntactic_monoid(const Dfa& d);

struct FCongruence {
  std::vector<std::uint32_t> class_of;        // per subset mask, index 0 unused
  std::vector<std::uint64_t> representative;  // largest member per class
  FiniteSemiring quotient;
};

constexpr std::size_t kDefaultQuotientCap = 10;

/// Subsets of M identified when {(l,r) : l·A·r meets F} coincide.
FCongruence f_congruence(const RecognizedLanguage& r, std::size_t cap = kDefaultQuotientCap);

struct QuotientFreeness {
  bool implication_holds = true;  // st in F implies set in F
  std::optional<std::tuple<Elem, Elem, Elem>> counterexample;  // (s, e, t)
  std::optional<bool> quotient_free;  // classify route, when under the cap
};

QuotientFreeness check_quotient_freeness(const RecognizedLanguage& r, std::size_t cap = kDefaultQuotientCap);

struct PcfgVerdict {
  std::optional<Verdict> verdict;  // nullopt when undetermined above the cap
  QuotientFreeness freeness;
  std::optional<ClassificationReport> report;
  bool monoid_solvable = true;
  std::string reason;
};

PcfgVerdict pcfg_verdict(const Dfa& d, std::size_t cap = kDefaultQuotientCap);

// --- grammars -------------------------------------------------------------

struct Symbol {
  bool terminal = false;
  std::size_t index = 0;
  bool operator==(const Symbol&) const = default;
};

struct Production {
  std::size_t lhs = 0;
  std::vector<Symbol> rhs;  // empty for the empty word
  bool marked = false;
};

struct Grammar {
  std::vector<std::string> nonterminals;
  std::vector<std::string> terminals;
  std::size_t start = 0;
  std::vector<Production> productions;
  std::vector<std::size_t> slp;  // marked production per nonterminal

  std::optional<std::size_t> nonterminal(std::string_view name) const;
};

/// Format:
///   grammar
///   start S
///   S -> S S            (`_` is the empty word)
///   !S -> A             (`!` marks the straight-line production)
/// Nonterminals are the left-hand sides; every other symbol is a terminal.
Grammar parse_grammar(std::string_view text);
std::string serialize_grammar(const Grammar& g);

/// Checks one mark per nonterminal and acyclicity of the marked productions;
/// throws CycleError with the cycle.
void validate_slp(const Grammar& g);

/// Word derived by the marked productions, expanded up to max_length letters.
std::optional<std::vector<std::string>> slp_word(const Grammar& g, std::size_t nonterminal,
                                                 std::size_t max_length = 1 << 16);

/// h(val(A)) computed over the marked productions without expanding words.
Elem slp_image(const Grammar& g, const RecognizedLanguage& r, std::size_t nonterminal);

struct Intersection {
  bool nonempty = false;
  std::vector<ElemSet> seeds;     // per nonterminal
  std::vector<ElemSet> fixpoint;  // X_A = h(L(A))
  std::size_t growth_events = 0;
  std::optional<std::vector<std::string>> witness;  // terminal names
};

/// Fixpoint of the production operator started at the straight-line seeds.
Intersection intersect(const Grammar& g, const Dfa& d, bool want_witness = false,
                       std::size_t witness_cap = 4096);

struct ProductEmptiness {
  bool nonempty = false;
  /// reach[A][p][q]: some word of L(A) leads from p to q.
  std::vector<std::vector<std::vector<char>>> reach;
};

/// Independent decision through state-pair relations on the given automaton.
ProductEmptiness intersect_by_product(const Grammar& g, const Dfa& d);

/// Grammar whose gate languages have image [A] under h: union -> two unit
/// rules, product -> A -> B C, constants -> shortest preimage words.
Grammar circuit_to_grammar(const Circuit& c, const RecognizedLanguage& r);

/// Circuit over P(M) computing h(L(G)): seed gates `A#slp`, then |V|·|M|
/// unrolled layers `A@k`; the output is the start symbol's last layer.
Circuit grammar_to_circuit(const Grammar& g, const RecognizedLanguage& r);

/// Terminals replaced by a fresh X with X -> _ and X -> a X for every letter;
/// the result generates either nothing or everything.
Grammar padding_gadget(const Grammar& g, const std::vector<std::string>& alphabet);

}  // namespace cep
