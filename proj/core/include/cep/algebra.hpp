#pragma once

// Finite semigroups and semirings given by operation tables.
//
// Elements are addressed by their index in the element list; names only
// appear at the text boundary (parse_* / to_text).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cep {

using Elem = std::uint32_t;

/// Sorted, duplicate-free list of element indices.
using ElemSet = std::vector<Elem>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text or tables (wrong shape, unknown names, ...).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A precondition of an operation does not hold for the given input.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Dense n x n operation table.
class Table {
 public:
  Table() = default;
  explicit Table(std::size_t n, Elem fill = 0) : n_(n), data_(n * n, fill) {}

  std::size_t order() const noexcept { return n_; }
  Elem operator()(Elem a, Elem b) const noexcept { return data_[a * n_ + b]; }
  Elem& at(Elem a, Elem b) { return data_[a * n_ + b]; }
  std::span<const Elem> raw() const noexcept { return data_; }

  bool operator==(const Table&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<Elem> data_;
};

struct FiniteSemigroup {
  std::string name;
  std::vector<std::string> elements;
  Table op;

  std::size_t size() const noexcept { return elements.size(); }
  Elem operator()(Elem a, Elem b) const noexcept { return op(a, b); }
  std::optional<Elem> find(std::string_view element) const;
  Elem index_of(std::string_view element) const;
};

struct FiniteSemiring {
  std::string name;
  std::vector<std::string> elements;
  Table add;
  Table mul;

  std::size_t size() const noexcept { return elements.size(); }
  Elem plus(Elem a, Elem b) const noexcept { return add(a, b); }
  Elem times(Elem a, Elem b) const noexcept { return mul(a, b); }
  std::optional<Elem> find(std::string_view element) const;
  Elem index_of(std::string_view element) const;

  /// (R, +) as a semigroup.
  FiniteSemigroup additive() const;
  /// (R, ·) as a semigroup.
  FiniteSemigroup multiplicative() const;
};

// --- validation -----------------------------------------------------------

struct Violation {
  std::string axiom;
  Elem a = 0, b = 0, c = 0;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

/// Throws ParseError when the tables are not n x n over n named elements
/// or contain out-of-range entries.
void check_shape(const FiniteSemigroup& sg);
void check_shape(const FiniteSemiring& sr);

/// Exhaustive associativity check. Reports at most one witness per axiom.
ValidationReport validate_semigroup(const FiniteSemigroup& sg);

/// Checks commutativity/associativity of +, associativity of ·, and both
/// distributive laws over all triples. Reports the least witness per axiom.
ValidationReport validate_semiring(const FiniteSemiring& sr);

std::string describe(const FiniteSemiring& sr, const Violation& v);

// --- text format ----------------------------------------------------------

FiniteSemigroup parse_semigroup(std::string_view text);
FiniteSemiring parse_semiring(std::string_view text);
std::string to_text(const FiniteSemigroup& sg);
std::string to_text(const FiniteSemiring& sr);

std::string read_file(const std::string& path);

// --- structure ------------------------------------------------------------

ElemSet idempotents(const FiniteSemigroup& sg);
/// Multiplicative idempotents E(R).
ElemSet idempotents(const FiniteSemiring& sr);

bool is_commutative(const FiniteSemigroup& sg);
std::optional<Elem> identity_element(const FiniteSemigroup& sg);
/// Additive identity, if one exists.
std::optional<Elem> additive_identity(const FiniteSemiring& sr);
/// Multiplicative identity, if one exists.
std::optional<Elem> multiplicative_identity(const FiniteSemiring& sr);

/// x^k for k >= 1 in a semigroup.
Elem power(const FiniteSemigroup& sg, Elem x, std::uint64_t k);
/// k·x = x + ... + x (k >= 1 summands).
Elem multiple(const FiniteSemiring& sr, std::uint64_t k, Elem x);

struct Cycle {
  std::uint64_t index = 1;   // first position of the repeating part
  std::uint64_t period = 1;
};

/// Index and period of k ↦ x^k (k >= 1).
Cycle power_cycle(const FiniteSemigroup& sg, Elem x);

/// Per-element and global stability data.
///
/// omega is the least positive integer with x^omega idempotent for all x.
/// (threshold, period) describe the additive multiples: for all x and all
/// k1, k2 >= 1 in the same class of B(max(threshold,1), period) we have
/// k1·x = k2·x. The threshold is 0 exactly when every multiple sequence
/// cycles back through the additive identity.
struct StabilityProfile {
  std::vector<Cycle> additive;
  std::vector<Cycle> multiplicative;
  std::uint64_t omega = 1;
  std::uint64_t threshold = 0;
  std::uint64_t period = 1;
};

StabilityProfile stability(const FiniteSemiring& sr);

/// Least subset containing seed and closed under + and ·.
ElemSet generated_subsemiring(const FiniteSemiring& sr, std::span<const Elem> seed);

bool is_closed(const FiniteSemiring& sr, std::span<const Elem> set);
/// Two-sided ideal: closed under + and under multiplication by any element.
bool is_ideal(const FiniteSemiring& sr, std::span<const Elem> set);

/// Setwise product X·Y.
ElemSet product(const FiniteSemiring& sr, std::span<const Elem> x, std::span<const Elem> y);

struct PowerProducts {
  ElemSet set;                // R^k
  std::size_t stable_at = 1;  // least m with R^m = R^{m+1}
  ElemSet stable_set;         // R^m
};

/// The set R^k of k-fold products together with the stabilisation point.
PowerProducts power_set_products(const FiniteSemiring& sr, std::size_t k);

/// R·E(R)·R computed directly.
ElemSet rer(const FiniteSemiring& sr);

/// Restriction to a closed subset, re-indexed in the order of `set`.
FiniteSemiring subsemiring(const FiniteSemiring& sr, std::span<const Elem> set,
                           std::string name = {});

FiniteSemiring direct_product(const FiniteSemiring& a, const FiniteSemiring& b);

/// B(k,d): natural numbers modulo i ~ j iff i = j < k, or i,j >= k and d | i-j.
/// Values are kept as canonical representatives in [0, k + d).
class CoefficientSemiring {
 public:
  CoefficientSemiring(std::uint64_t k, std::uint64_t d);

  std::uint64_t threshold() const noexcept { return k_; }
  std::uint64_t period() const noexcept { return d_; }
  std::uint64_t size() const noexcept { return k_ + d_; }

  std::uint64_t canonical(std::uint64_t n) const noexcept;
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const noexcept;
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const noexcept;
  bool same_class(std::uint64_t a, std::uint64_t b) const noexcept {
    return canonical(a) == canonical(b);
  }

 private:
  std::uint64_t k_;
  std::uint64_t d_;
};

/// Coefficient domain for additive multiples in sr: B(max(t,1), p).
CoefficientSemiring coefficient_semiring(const StabilityProfile& profile);

// --- small set helpers ----------------------------------------------------

ElemSet make_set(std::vector<Elem> elems);
bool contains(std::span<const Elem> set, Elem x);
std::string format_set(const FiniteSemiring& sr, std::span<const Elem> set);
std::string format_set(const FiniteSemigroup& sg, std::span<const Elem> set);

}  // namespace cep
