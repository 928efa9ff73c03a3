#include "cep/catalog.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace cep {

namespace {

std::vector<std::string> numbered(std::uint32_t from, std::uint32_t to) {
  std::vector<std::string> out;
  for (std::uint32_t i = from; i <= to; ++i) out.push_back(std::to_string(i));
  return out;
}

}  // namespace

FiniteSemiring make_semiring(std::string name, std::vector<std::string> elements,
                             const BinaryFn& add, const BinaryFn& mul) {
  const auto n = static_cast<Elem>(elements.size());
  FiniteSemiring sr{std::move(name), std::move(elements), Table(n), Table(n)};
  for (Elem a = 0; a < n; ++a)
    for (Elem b = 0; b < n; ++b) {
      sr.add.at(a, b) = add(a, b);
      sr.mul.at(a, b) = mul(a, b);
    }
  check_shape(sr);
  return sr;
}

FiniteSemigroup make_semigroup(std::string name, std::vector<std::string> elements,
                               const BinaryFn& op) {
  const auto n = static_cast<Elem>(elements.size());
  FiniteSemigroup sg{std::move(name), std::move(elements), Table(n)};
  for (Elem a = 0; a < n; ++a)
    for (Elem b = 0; b < n; ++b) sg.op.at(a, b) = op(a, b);
  check_shape(sg);
  return sg;
}

FiniteSemiring boolean_semiring() {
  return make_semiring("B2", {"0", "1"}, [](Elem a, Elem b) { return a | b; },
                       [](Elem a, Elem b) { return a & b; });
}

FiniteSemiring ring_zd(std::uint32_t d) {
  if (d == 0) throw DomainError("ring_zd: d must be positive");
  return make_semiring("Z" + std::to_string(d), numbered(0, d - 1),
                       [d](Elem a, Elem b) { return (a + b) % d; },
                       [d](Elem a, Elem b) { return (a * b) % d; });
}

FiniteSemiring trivial_semiring() {
  return make_semiring("trivial", {"a"}, [](Elem, Elem) { return Elem{0}; },
                       [](Elem, Elem) { return Elem{0}; });
}

FiniteSemiring chain_lattice(std::uint32_t n) {
  if (n == 0) throw DomainError("chain_lattice: n must be positive");
  return make_semiring("chain" + std::to_string(n), numbered(0, n - 1),
                       [](Elem a, Elem b) { return std::max(a, b); },
                       [](Elem a, Elem b) { return std::min(a, b); });
}

// For the {1..n} carriers index i stands for the number i+1.

FiniteSemiring truncated_max_plus(std::uint32_t n) {
  if (n == 0) throw DomainError("truncated_max_plus: n must be positive");
  return make_semiring("trunc" + std::to_string(n) + "_max", numbered(1, n),
                       [](Elem a, Elem b) { return std::max(a, b); },
                       [n](Elem a, Elem b) { return std::min<Elem>(a + b + 1, n - 1); });
}

FiniteSemiring truncated_min_plus(std::uint32_t n) {
  if (n == 0) throw DomainError("truncated_min_plus: n must be positive");
  return make_semiring("trunc" + std::to_string(n) + "_min", numbered(1, n),
                       [](Elem a, Elem b) { return std::min(a, b); },
                       [n](Elem a, Elem b) { return std::min<Elem>(a + b + 1, n - 1); });
}

FiniteSemiring capped_max_plus(std::uint32_t n) {
  if (n == 0) throw DomainError("capped_max_plus: n must be positive");
  return make_semiring("maxplus" + std::to_string(n - 1), numbered(0, n - 1),
                       [](Elem a, Elem b) { return std::max(a, b); },
                       [n](Elem a, Elem b) { return std::min<Elem>(a + b, n - 1); });
}

FiniteSemiring max_max(std::uint32_t n) {
  if (n == 0) throw DomainError("max_max: n must be positive");
  return make_semiring("maxmax" + std::to_string(n), numbered(1, n),
                       [](Elem a, Elem b) { return std::max(a, b); },
                       [](Elem a, Elem b) { return std::max(a, b); });
}

FiniteSemiring two_letter_absorbing() {
  return make_semiring("ab_absorbing", {"a", "b"}, [](Elem x, Elem y) { return std::max(x, y); },
                       [](Elem, Elem) { return Elem{1}; });
}

FiniteSemiring three_letter_ideal() {
  constexpr Elem c = 2;
  return make_semiring(
      "abc_ideal", {"a", "b", "c"}, [](Elem x, Elem y) { return x == y ? x : c; },
      [](Elem x, Elem y) { return x == y ? x : c; });
}

FiniteSemigroup cyclic_group(std::uint32_t n) {
  if (n == 0) throw DomainError("cyclic_group: n must be positive");
  return make_semigroup("Z" + std::to_string(n), numbered(0, n - 1),
                        [n](Elem a, Elem b) { return (a + b) % n; });
}

FiniteSemigroup symmetric_group(std::uint32_t n) {
  if (n == 0 || n > 7) throw DomainError("symmetric_group: n must be in [1,7]");
  std::vector<std::vector<std::uint32_t>> perms;
  std::vector<std::uint32_t> p(n);
  std::iota(p.begin(), p.end(), 0u);
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));

  std::map<std::vector<std::uint32_t>, Elem> index;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < perms.size(); ++i) {
    index.emplace(perms[i], static_cast<Elem>(i));
    std::string name;
    for (auto v : perms[i]) name += static_cast<char>('0' + v);
    names.push_back(name);
  }
  return make_semigroup("S" + std::to_string(n), names, [&](Elem a, Elem b) {
    std::vector<std::uint32_t> r(n);
    for (std::uint32_t i = 0; i < n; ++i) r[i] = perms[a][perms[b][i]];
    return index.at(r);
  });
}

FiniteSemigroup meet_semilattice2() {
  return make_semigroup("meet2", {"0", "1"}, [](Elem a, Elem b) { return a & b; });
}

FiniteSemigroup trivial_semigroup() {
  return make_semigroup("trivial", {"a"}, [](Elem, Elem) { return Elem{0}; });
}

}  // namespace cep
