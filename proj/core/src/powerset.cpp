#include "cep/powerset.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <set>

namespace cep {

FiniteSemiring build_power(const FiniteSemigroup& sg, std::size_t cap) {
  const std::size_t n = sg.size();
  if (n == 0) throw DomainError("build_power: empty semigroup");
  if (n > cap || n > 16)
    throw DomainError("build_power: semigroup has " + std::to_string(n) + " elements, cap is " + std::to_string(cap));
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;

  // left[a][B] = {a·b : b in B}, built from the lowest set bit upwards.
  std::vector<std::vector<std::uint64_t>> left(n, std::vector<std::uint64_t>(full + 1, 0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::uint64_t m = 1; m <= full; ++m) {
      const auto b = static_cast<Elem>(std::countr_zero(m));
      left[a][m] = left[a][m & (m - 1)] | (std::uint64_t{1} << sg(static_cast<Elem>(a), b));
    }

  FiniteSemiring out;
  out.name = "P(" + sg.name + ")";
  for (std::uint64_t m = 1; m <= full; ++m) {
    std::string name = "{";
    bool first = true;
    for (std::size_t i = 0; i < n; ++i)
      if (m >> i & 1) {
        if (!first) name += ",";
        name += sg.elements[i];
        first = false;
      }
    out.elements.push_back(name + "}");
  }
  out.add = Table(full);
  out.mul = Table(full);
  for (std::uint64_t x = 1; x <= full; ++x)
    for (std::uint64_t y = 1; y <= full; ++y) {
      std::uint64_t prod = 0;
      for (std::uint64_t m = x; m; m &= m - 1) prod |= left[std::countr_zero(m)][y];
      out.add.at(subset_elem(x), subset_elem(y)) = subset_elem(x | y);
      out.mul.at(subset_elem(x), subset_elem(y)) = subset_elem(prod);
    }
  return out;
}

PowerVerdict power_verdict(const FiniteSemigroup& sg, std::size_t cap) {
  PowerVerdict v;
  v.local_group = is_local_group(sg);
  v.solvable = is_solvable(sg);
  v.direct = v.local_group && v.solvable ? Verdict::DET : Verdict::PComplete;
  if (sg.size() > cap) {
    v.note = "P(S) not built: |S| = " + std::to_string(sg.size()) + " exceeds the cap " + std::to_string(cap);
    return v;
  }
  v.via_power = classify(build_power(sg, cap)).verdict;
  v.agree = (v.direct == Verdict::PComplete) == (*v.via_power == Verdict::PComplete);
  return v;
}

namespace {

class SemigroupSearch {
 public:
  explicit SemigroupSearch(std::size_t n) : n_(n), table_(n * n, kUnset) {
    std::vector<Elem> p(n);
    std::iota(p.begin(), p.end(), Elem{0});
    do perms_.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
  }

  std::vector<std::vector<Elem>> run() {
    fill(0);
    return {found_.begin(), found_.end()};
  }

 private:
  static constexpr Elem kUnset = ~Elem{0};

  Elem at(Elem a, Elem b) const { return table_[a * n_ + b]; }

  bool consistent() const {
    for (Elem x = 0; x < n_; ++x)
      for (Elem y = 0; y < n_; ++y) {
        const Elem xy = at(x, y);
        if (xy == kUnset) continue;
        for (Elem z = 0; z < n_; ++z) {
          const Elem yz = at(y, z);
          if (yz == kUnset) continue;
          const Elem l = at(xy, z), r = at(x, yz);
          if (l != kUnset && r != kUnset && l != r) return false;
        }
      }
    return true;
  }

  void fill(std::size_t cell) {
    if (cell == table_.size()) {
      found_.insert(canonical());
      return;
    }
    for (Elem v = 0; v < n_; ++v) {
      table_[cell] = v;
      if (consistent()) fill(cell + 1);
    }
    table_[cell] = kUnset;
  }

  // Lexicographically least relabelled table.
  std::vector<Elem> canonical() const {
    std::vector<Elem> best;
    std::vector<Elem> inv(n_), t(n_ * n_);
    for (const auto& p : perms_) {
      for (Elem i = 0; i < n_; ++i) inv[p[i]] = i;
      for (Elem a = 0; a < n_; ++a)
        for (Elem b = 0; b < n_; ++b) t[a * n_ + b] = p[at(inv[a], inv[b])];
      if (best.empty() || t < best) best = t;
    }
    return best;
  }

  Elem n_;
  std::vector<Elem> table_;
  std::vector<std::vector<Elem>> perms_;
  std::set<std::vector<Elem>> found_;
};

}  // namespace

std::vector<FiniteSemigroup> all_semigroups(std::size_t n) {
  if (n == 0 || n > 5) throw DomainError("all_semigroups: supported orders are 1 to 5");
  std::vector<FiniteSemigroup> out;
  std::size_t k = 0;
  for (const auto& t : SemigroupSearch(n).run()) {
    FiniteSemigroup sg;
    sg.name = "sg" + std::to_string(n) + "_" + std::to_string(k++);
    for (std::size_t i = 0; i < n; ++i) sg.elements.push_back(std::to_string(i));
    sg.op = Table(n);
    for (Elem a = 0; a < n; ++a)
      for (Elem b = 0; b < n; ++b) sg.op.at(a, b) = t[a * n + b];
    out.push_back(std::move(sg));
  }
  return out;
}

}  // namespace cep
