#pragma once

// Reduction of an arbitrary circuit to a type-admitting circuit plus an
// affine recombination: short/long split of free values, leaf removal over
// an ideal, and the typed boundary construction.

#include <map>
#include <variant>

#include "cep/circuit.hpp"

namespace cep {

using Word = std::vector<Elem>;

/// Free-semiring value restricted to words shorter than the threshold, with
/// coefficients kept as canonical representatives in B(t,p).
struct ShortPoly {
  std::map<Word, std::uint64_t> terms;
};

struct GateParts {
  std::optional<ShortPoly> short_part;  // nullopt is the undefined short part
  bool long_present = false;
  bool long_by_reachability = false;  // independent recomputation of long_present
};

struct ShortLongAnalysis {
  std::size_t threshold = 2;
  CoefficientSemiring coefficients{1, 1};
  std::vector<GateParts> gates;
};

/// Long-product threshold: least m with R^m = R^{m+1}, or |R| when strict.
std::size_t long_product_threshold(const FiniteSemiring& sr, bool strict = false);

/// Product of the letters of a non-empty word.
Elem word_value(const FiniteSemiring& sr, const Word& w);

/// Per-gate short part and long flag of a normalized circuit. Needs m >= 2.
ShortLongAnalysis short_long_analyze(const Circuit& c, std::size_t m);

/// Semiring value of a short part: the sum of coef·h(w).
Elem short_value(const FiniteSemiring& sr, const ShortPoly& p);
std::optional<Elem> short_value(const Circuit& c, const ShortLongAnalysis& a, GateId g);

std::string to_string(const FiniteSemiring& sr, const ShortPoly& p);

/// Rewrites a normal-form circuit into one whose constants all lie in the
/// ideal. Gate A[l;r] computes l·[A]·r, `_` standing for the adjoined identity.
Circuit leaf_removal(const Circuit& c, std::span<const Elem> ideal);

struct MonomlengthResult {
  enum class Case { ShortOnly = 1, LongOnly = 2, Both = 3 };
  Case which = Case::ShortOnly;
  std::size_t threshold = 0;
  ElemSet ideal;                     // generated subsemiring of R^m
  std::optional<Elem> value;         // case 1
  std::optional<Circuit> circuit;    // cases 2 and 3, constants in `ideal`
  std::optional<Elem> sigma;         // case 3
  std::optional<Circuit> lambda;     // the long-part circuit before leaf removal
  std::map<std::string, Elem> m_constants;  // per multiplication gate id
};

struct PipelineOptions {
  bool strict_threshold = false;
  std::size_t max_size = 16;
};

MonomlengthResult monomlength(const Circuit& c, const PipelineOptions& opt = {});

struct Triple {
  Elem s = 0, e = 0, t = 0;
  auto operator<=>(const Triple&) const = default;
};

/// Shortest decompositions x = sum of s·e·t (e idempotent) for every element
/// of the subsemiring generated by R·E·R, found by breadth-first search.
class RerDecomposition {
 public:
  explicit RerDecomposition(const FiniteSemiring& sr);

  bool contains(Elem x) const { return x < table_.size() && !table_[x].empty(); }
  /// Throws DomainError when x is not a sum of products s·e·t.
  const std::vector<Triple>& operator()(Elem x) const;
  /// Largest number of summands any element needs.
  std::size_t max_terms() const noexcept { return max_terms_; }

 private:
  std::vector<std::vector<Triple>> table_;
  std::size_t max_terms_ = 0;
};

std::vector<Triple> decompose_RER(const FiniteSemiring& sr, Elem x);

struct Quad {
  Elem s = 0, e = 0, f = 0, t = 0;
  auto operator<=>(const Quad&) const = default;
};

using Profile = std::vector<Quad>;  // sorted

using GateType = std::pair<Elem, Elem>;
using TypeAssignment = std::vector<GateType>;  // indexed by gate

struct TypeViolation {
  GateId gate = 0;
  int clause = 0;
  std::string message;
};

/// Checks the three clauses of a type function on a normal-form circuit.
std::vector<TypeViolation> validate_type_assignment(const Circuit& c, const TypeAssignment& t);

struct AffineFunction {
  std::vector<std::pair<Elem, Elem>> coefficients;  // (a_i, b_i)
  std::optional<Elem> constant;

  Elem apply(const FiniteSemiring& sr, std::span<const Elem> x) const;
};

struct TypedConstruction {
  Circuit circuit;  // type admitting, normal form, no output gate
  TypeAssignment types;
  std::vector<GateId> distinguished;
  AffineFunction alpha;
  /// P_A for every gate of the circuit fed to fsf.
  std::vector<Profile> profiles;
  /// gate_of[A] maps each quadruple of P_A to the gate A'_{s,e,f,t}.
  std::vector<std::map<Quad, GateId>> gate_of;
  std::map<std::string, Elem> m_constants;
};

/// Boundary profiles by a semantic pass over the circuit.
std::vector<Profile> boundary_profiles(const Circuit& d, const RerDecomposition& dec);
/// The same sets from the path conditions on input gates.
std::vector<Profile> boundary_profiles_by_paths(const Circuit& d, const RerDecomposition& dec);

/// Type-admitting circuit for a normal-form circuit whose constants lie in the
/// subsemiring generated by R·E·R.
TypedConstruction fsf(const Circuit& d);

struct PipelineResult {
  std::optional<Elem> value;                    // immediate answer
  std::optional<TypedConstruction> construction;
  MonomlengthResult monomlength;
};

/// normalize, then monomlength, then fsf; sigma becomes the affine constant.
PipelineResult step1_pipeline(const Circuit& c, const PipelineOptions& opt = {});

/// Text block listing types, distinguished gates and the affine function.
std::string describe_construction(const TypedConstruction& tc);

}  // namespace cep
