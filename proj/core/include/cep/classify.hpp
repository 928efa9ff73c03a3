#pragma once

// {0,1}-freeness, maximal subgroups, solvability, aperiodicity and the
// resulting complexity verdict for circuit evaluation over a semiring.

#include "cep/algebra.hpp"

namespace cep {

/// A pair satisfying 0 != 1, 0+0=0, 0+1=1, 0·1=1·0=0·0=0, 1·1=1.
struct ZeroOnePair {
  Elem zero = 0;
  Elem one = 0;
};

/// Lexicographically least pair (zero, one), if any.
std::optional<ZeroOnePair> zero_one_witness(const FiniteSemiring& sr);
bool is_zero_one_free(const FiniteSemiring& sr);

struct BooleanOrCyclic {
  enum class Kind { B2, Zd };
  Kind kind = Kind::B2;
  std::uint64_t d = 2;     // modulus for Zd
  Elem zero = 0;           // additive identity of the subsemiring
  Elem one = 0;            // multiplicative identity of the subsemiring
  ElemSet elements;
};

/// Subsemiring isomorphic to B2 or some Z_d (d >= 2), built from the least
/// zero/one pair by following the multiples k·1.
std::optional<BooleanOrCyclic> find_b2_or_zd(const FiniteSemiring& sr);

struct MaximalSubgroup {
  Elem identity = 0;
  ElemSet elements;
};

/// One group per idempotent e: the units of the local monoid eSe.
std::vector<MaximalSubgroup> maximal_subgroups(const FiniteSemigroup& sg);

/// Elements of eSe.
ElemSet local_monoid(const FiniteSemigroup& sg, Elem e);

/// Subgroup of `group` generated by `gens` (closure under the operation).
ElemSet generate_subgroup(const FiniteSemigroup& sg, const MaximalSubgroup& group,
                          std::span<const Elem> gens);

/// Derived series G = G_0 > G_1 > ... until it stabilises.
std::vector<ElemSet> derived_series(const FiniteSemigroup& sg, const MaximalSubgroup& group);

struct Solvability {
  bool solvable = true;
  std::optional<MaximalSubgroup> group;  // first non-solvable maximal subgroup
  ElemSet perfect_core;                  // where its derived series stops
};

Solvability solvability(const FiniteSemigroup& sg);
bool is_solvable(const FiniteSemigroup& sg);

/// All maximal subgroups trivial.
bool is_aperiodic(const FiniteSemigroup& sg);
/// x^w = x^(w+1) for every x.
bool is_aperiodic_by_powers(const FiniteSemigroup& sg);

/// Every local monoid eSe is a group.
bool is_local_group(const FiniteSemigroup& sg);

enum class Verdict { PComplete, DET, NL };
std::string to_string(Verdict v);

struct ClassificationReport {
  std::string name;
  std::size_t size = 0;
  bool zero_one_free = true;
  std::optional<ZeroOnePair> zero_one;
  std::optional<BooleanOrCyclic> b2_or_zd;
  bool multiplicative_solvable = true;
  std::optional<MaximalSubgroup> nonsolvable_group;
  bool multiplicative_aperiodic = true;
  Verdict verdict = Verdict::NL;
};

ClassificationReport classify(const FiniteSemiring& sr);

/// Verdict from the three predicates.
Verdict verdict_for(bool zero_one_free, bool solvable, bool aperiodic);

/// `key: value` lines.
std::string to_key_values(const FiniteSemiring& sr, const ClassificationReport& report);
/// Short human-readable summary.
std::string to_text(const FiniteSemiring& sr, const ClassificationReport& report);

}  // namespace cep
