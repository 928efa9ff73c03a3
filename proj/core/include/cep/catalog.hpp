#pragma once

// Small named structures used as fixtures and in demos.

#include <functional>

#include "cep/algebra.hpp"

namespace cep {

using BinaryFn = std::function<Elem(Elem, Elem)>;

FiniteSemiring make_semiring(std::string name, std::vector<std::string> elements,
                             const BinaryFn& add, const BinaryFn& mul);
FiniteSemigroup make_semigroup(std::string name, std::vector<std::string> elements,
                               const BinaryFn& op);

/// ({0,1}, or, and).
FiniteSemiring boolean_semiring();
/// The ring Z_d, d >= 1.
FiniteSemiring ring_zd(std::uint32_t d);
FiniteSemiring trivial_semiring();
/// Chain 0 < ... < n-1 under (max, min); a distributive lattice.
FiniteSemiring chain_lattice(std::uint32_t n);

/// {1..n} with max and truncated sum min(a+b, n).
FiniteSemiring truncated_max_plus(std::uint32_t n);
/// {1..n} with min and truncated sum min(a+b, n).
FiniteSemiring truncated_min_plus(std::uint32_t n);
/// {0..n-1} with max and truncated sum min(a+b, n-1).
FiniteSemiring capped_max_plus(std::uint32_t n);
/// {1..n} with max for both operations.
FiniteSemiring max_max(std::uint32_t n);

/// R = {a,b}: every product is b, addition is the semilattice a < b.
FiniteSemiring two_letter_absorbing();
/// S = {a,b,c}: aa=a, bb=b, every other product is c; x+x=x, x+y=c otherwise.
FiniteSemiring three_letter_ideal();

/// (Z_n, +) as a semigroup.
FiniteSemigroup cyclic_group(std::uint32_t n);
/// Symmetric group on n points, composition (p*q)(i) = p(q(i)).
FiniteSemigroup symmetric_group(std::uint32_t n);
/// ({0,1}, and).
FiniteSemigroup meet_semilattice2();
FiniteSemigroup trivial_semigroup();

}  // namespace cep
