#pragma once

// Circuits over a finite semiring: gates with constant, sum, product, copy
// or general-term right-hand sides.

#include <memory>
#include <unordered_map>

#include "cep/algebra.hpp"

namespace cep {

using GateId = std::size_t;

/// Expression tree over gate references and constants, n-ary + and ·.
struct Term {
  enum class Kind { Gate, Const, Sum, Product };
  Kind kind = Kind::Const;
  GateId gate = 0;
  Elem value = 0;
  std::vector<Term> args;

  static Term ref(GateId g) { return {Kind::Gate, g, 0, {}}; }
  static Term constant(Elem e) { return {Kind::Const, 0, e, {}}; }
  static Term sum(std::vector<Term> args) { return {Kind::Sum, 0, 0, std::move(args)}; }
  static Term product(std::vector<Term> args) { return {Kind::Product, 0, 0, std::move(args)}; }

  bool operator==(const Term&) const = default;
};

struct Rhs {
  enum class Kind { Const, Add, Mul, Copy, General };
  Kind kind = Kind::Const;
  Elem value = 0;
  GateId left = 0;
  GateId right = 0;
  std::shared_ptr<const Term> term;

  static Rhs constant(Elem e) { return {Kind::Const, e, 0, 0, nullptr}; }
  static Rhs add(GateId a, GateId b) { return {Kind::Add, 0, a, b, nullptr}; }
  static Rhs mul(GateId a, GateId b) { return {Kind::Mul, 0, a, b, nullptr}; }
  static Rhs copy(GateId a) { return {Kind::Copy, 0, a, 0, nullptr}; }
  static Rhs general(Term t) {
    return {Kind::General, 0, 0, 0, std::make_shared<const Term>(std::move(t))};
  }

  bool is_input() const noexcept { return kind == Kind::Const; }
  /// Gates this right-hand side reads, in order of appearance.
  std::vector<GateId> inputs() const;
};

/// A cycle among gates; `cycle` lists gate ids along it.
class CycleError : public Error {
 public:
  CycleError(std::string message, std::vector<std::string> cycle)
      : Error(std::move(message)), cycle(std::move(cycle)) {}
  std::vector<std::string> cycle;
};

struct Gate {
  std::string id;
  Rhs rhs;
};

class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(std::shared_ptr<const FiniteSemiring> semiring);

  const FiniteSemiring& semiring() const { return *semiring_; }
  std::shared_ptr<const FiniteSemiring> semiring_ptr() const { return semiring_; }

  std::size_t size() const noexcept { return gates_.size(); }
  const Gate& gate(GateId g) const { return gates_.at(g); }
  const std::vector<Gate>& gates() const noexcept { return gates_; }
  const Rhs& rhs(GateId g) const { return gates_.at(g).rhs; }

  /// Appends a gate; throws ParseError on a duplicate id.
  GateId add_gate(std::string id, Rhs rhs);
  /// Appends a gate with a fresh `$k` id.
  GateId add_fresh(Rhs rhs);
  void set_rhs(GateId g, Rhs rhs);

  std::optional<GateId> find(std::string_view id) const;
  GateId index_of(std::string_view id) const;

  std::optional<GateId> output() const noexcept { return output_; }
  void set_output(std::optional<GateId> g);

  /// Checks references and acyclicity; throws CycleError with a witness.
  void validate() const;
  /// Inputs before the gates that read them; throws CycleError.
  std::vector<GateId> topological_order() const;

 private:
  std::shared_ptr<const FiniteSemiring> semiring_;
  std::vector<Gate> gates_;
  std::unordered_map<std::string, GateId> index_;
  std::optional<GateId> output_;
  std::size_t fresh_counter_ = 0;
};

struct EvalResult {
  std::vector<Elem> values;
  std::optional<Elem> output;
};

Elem eval_term(const FiniteSemiring& sr, const Term& t, std::span<const Elem> values);

/// Single topological pass.
EvalResult eval_naive(const Circuit& c);

/// Every rhs is Const, Add or Mul.
bool is_normal(const Circuit& c);

/// Splits general terms into fresh gates and removes copy gates by giving each
/// copy the right-hand side at the end of its chain. Original gates keep their
/// index and id; fresh gates are appended.
Circuit normalize(const Circuit& c);

enum class Restriction { Additive, Multiplicative };
/// Additive: no product gates. Multiplicative: no sum gates.
bool restrict_check(const Circuit& c, Restriction kind);

/// For every gate, the gates that read it.
std::vector<std::vector<GateId>> readers(const Circuit& c);
/// below[g][h] = 1 iff h <= g (h is g or reaches g).
std::vector<std::vector<char>> below_relation(const Circuit& c);

// --- text format ----------------------------------------------------------

Circuit parse_circuit(std::string_view text, std::shared_ptr<const FiniteSemiring> semiring);
std::string serialize_circuit(const Circuit& c);
/// Semiring name from the `circuit over <name>` header.
std::string circuit_semiring_name(std::string_view text);

std::string term_to_string(const Circuit& c, const Term& t);

}  // namespace cep
