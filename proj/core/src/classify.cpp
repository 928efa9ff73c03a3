#include "cep/classify.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace cep {

std::optional<ZeroOnePair> zero_one_witness(const FiniteSemiring& sr) {
  const auto n = static_cast<Elem>(sr.size());
  for (Elem z = 0; z < n; ++z) {
    if (sr.plus(z, z) != z || sr.times(z, z) != z) continue;
    for (Elem o = 0; o < n; ++o) {
      if (o == z) continue;
      if (sr.plus(z, o) == o && sr.times(z, o) == z && sr.times(o, z) == z && sr.times(o, o) == o)
        return ZeroOnePair{z, o};
    }
  }
  return std::nullopt;
}

bool is_zero_one_free(const FiniteSemiring& sr) { return !zero_one_witness(sr); }

std::optional<BooleanOrCyclic> find_b2_or_zd(const FiniteSemiring& sr) {
  auto pair = zero_one_witness(sr);
  if (!pair) return std::nullopt;

  // s_0 = 0, s_{j+1} = s_j + 1, so s_j = j·1 for j >= 1 and 0 + j·1 = j·1.
  std::vector<Elem> seq{pair->zero};
  std::map<Elem, std::size_t> first_seen{{pair->zero, 0}};
  std::size_t k = 0, d = 0;
  while (true) {
    Elem next = sr.plus(seq.back(), pair->one);
    auto it = first_seen.find(next);
    if (it != first_seen.end()) {
      k = it->second;
      d = seq.size() - it->second;
      break;
    }
    first_seen.emplace(next, seq.size());
    seq.push_back(next);
  }

  BooleanOrCyclic out;
  if (k == 0) {
    out.kind = BooleanOrCyclic::Kind::Zd;
    out.d = d;
    out.zero = pair->zero;
    out.one = pair->one;
    out.elements = make_set(seq);
  } else {
    // a = d·k is at least k and divisible by d, so a·1 is idempotent for both operations
    const std::uint64_t a = static_cast<std::uint64_t>(d) * k;
    out.kind = BooleanOrCyclic::Kind::B2;
    out.zero = pair->zero;
    out.one = multiple(sr, a, pair->one);
    out.elements = make_set({out.zero, out.one});
  }
  return out;
}

ElemSet local_monoid(const FiniteSemigroup& sg, Elem e) {
  std::vector<Elem> out;
  for (Elem s = 0; s < sg.size(); ++s) out.push_back(sg(sg(e, s), e));
  return make_set(std::move(out));
}

std::vector<MaximalSubgroup> maximal_subgroups(const FiniteSemigroup& sg) {
  std::vector<MaximalSubgroup> out;
  for (Elem e : idempotents(sg)) {
    const ElemSet local = local_monoid(sg, e);
    MaximalSubgroup g{e, {}};
    for (Elem x : local) {
      bool unit = false;
      for (Elem y : local)
        if (sg(x, y) == e && sg(y, x) == e) {
          unit = true;
          break;
        }
      if (unit) g.elements.push_back(x);
    }
    out.push_back(std::move(g));
  }
  return out;
}

ElemSet generate_subgroup(const FiniteSemigroup& sg, const MaximalSubgroup& group,
                          std::span<const Elem> gens) {
  std::vector<char> in(sg.size(), 0);
  std::vector<Elem> members{group.identity};
  in[group.identity] = 1;
  for (Elem g : gens)
    if (!in[g]) {
      in[g] = 1;
      members.push_back(g);
    }
  // In a finite group closure under the operation already yields inverses.
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j)
      for (Elem c : {sg(members[i], members[j]), sg(members[j], members[i])})
        if (!in[c]) {
          in[c] = 1;
          members.push_back(c);
        }
  return make_set(std::move(members));
}

namespace {

Elem inverse_in(const FiniteSemigroup& sg, const MaximalSubgroup& group, Elem x) {
  for (Elem y : group.elements)
    if (sg(x, y) == group.identity) return y;
  throw DomainError("element has no inverse in its maximal subgroup");
}

}  // namespace

std::vector<ElemSet> derived_series(const FiniteSemigroup& sg, const MaximalSubgroup& group) {
  std::vector<ElemSet> series{group.elements};
  while (true) {
    const ElemSet& g = series.back();
    std::vector<char> seen(sg.size(), 0);
    std::vector<Elem> commutators;
    for (Elem x : g) {
      const Elem xi = inverse_in(sg, group, x);
      for (Elem y : g) {
        const Elem yi = inverse_in(sg, group, y);
        const Elem c = sg(sg(xi, yi), sg(x, y));
        if (!seen[c]) {
          seen[c] = 1;
          commutators.push_back(c);
        }
      }
    }
    ElemSet next = generate_subgroup(sg, group, commutators);
    if (next == g) break;
    series.push_back(std::move(next));
  }
  return series;
}

Solvability solvability(const FiniteSemigroup& sg) {
  for (const auto& g : maximal_subgroups(sg)) {
    auto series = derived_series(sg, g);
    if (series.back().size() > 1) return {false, g, series.back()};
  }
  return {};
}

bool is_solvable(const FiniteSemigroup& sg) { return solvability(sg).solvable; }

bool is_aperiodic(const FiniteSemigroup& sg) {
  for (const auto& g : maximal_subgroups(sg))
    if (g.elements.size() != 1) return false;
  return true;
}

bool is_aperiodic_by_powers(const FiniteSemigroup& sg) {
  std::uint64_t max_index = 1, period_lcm = 1;
  for (Elem x = 0; x < sg.size(); ++x) {
    Cycle c = power_cycle(sg, x);
    max_index = std::max(max_index, c.index);
    period_lcm = std::lcm(period_lcm, c.period);
  }
  const std::uint64_t omega = period_lcm * ((max_index + period_lcm - 1) / period_lcm);
  for (Elem x = 0; x < sg.size(); ++x) {
    const Elem xw = power(sg, x, omega);
    if (sg(xw, x) != xw) return false;
  }
  return true;
}

bool is_local_group(const FiniteSemigroup& sg) {
  for (const auto& g : maximal_subgroups(sg))
    if (g.elements != local_monoid(sg, g.identity)) return false;
  return true;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::PComplete: return "P-complete";
    case Verdict::DET: return "DET";
    case Verdict::NL: return "NL";
  }
  return "?";
}

Verdict verdict_for(bool zero_one_free, bool solvable, bool aperiodic) {
  if (!zero_one_free || !solvable) return Verdict::PComplete;
  return aperiodic ? Verdict::NL : Verdict::DET;
}

ClassificationReport classify(const FiniteSemiring& sr) {
  ClassificationReport r;
  r.name = sr.name;
  r.size = sr.size();
  r.zero_one = zero_one_witness(sr);
  r.zero_one_free = !r.zero_one;
  r.b2_or_zd = find_b2_or_zd(sr);
  const FiniteSemigroup mul = sr.multiplicative();
  Solvability s = solvability(mul);
  r.multiplicative_solvable = s.solvable;
  r.nonsolvable_group = s.group;
  r.multiplicative_aperiodic = is_aperiodic(mul);
  r.verdict = verdict_for(r.zero_one_free, r.multiplicative_solvable, r.multiplicative_aperiodic);
  return r;
}

namespace {

std::string bool_word(bool b) { return b ? "true" : "false"; }

std::string embedding_text(const FiniteSemiring& sr, const BooleanOrCyclic& w) {
  std::string target = w.kind == BooleanOrCyclic::Kind::B2 ? "B2" : "Z" + std::to_string(w.d);
  return target + " " + format_set(sr, w.elements);
}

}  // namespace

std::string to_key_values(const FiniteSemiring& sr, const ClassificationReport& r) {
  std::ostringstream out;
  out << "name: " << r.name << '\n';
  out << "size: " << r.size << '\n';
  out << "zero_one_free: " << bool_word(r.zero_one_free) << '\n';
  out << "zero_one_witness: ";
  if (r.zero_one)
    out << sr.elements[r.zero_one->zero] << ' ' << sr.elements[r.zero_one->one];
  else
    out << "none";
  out << '\n';
  out << "b2_or_zd: " << (r.b2_or_zd ? embedding_text(sr, *r.b2_or_zd) : "none") << '\n';
  out << "solvable: " << bool_word(r.multiplicative_solvable) << '\n';
  out << "nonsolvable_group: ";
  if (r.nonsolvable_group)
    out << "order " << r.nonsolvable_group->elements.size() << " at "
        << sr.elements[r.nonsolvable_group->identity];
  else
    out << "none";
  out << '\n';
  out << "aperiodic: " << bool_word(r.multiplicative_aperiodic) << '\n';
  out << "verdict: " << to_string(r.verdict) << '\n';
  return out.str();
}

std::string to_text(const FiniteSemiring& sr, const ClassificationReport& r) {
  std::ostringstream out;
  out << "semiring " << r.name << " with " << r.size << " elements\n";
  if (r.zero_one_free) {
    out << "{0,1}-free: yes\n";
  } else {
    out << "{0,1}-free: no, witness 0=" << sr.elements[r.zero_one->zero]
        << " 1=" << sr.elements[r.zero_one->one] << '\n';
    if (r.b2_or_zd) out << "contains " << embedding_text(sr, *r.b2_or_zd) << '\n';
  }
  out << "multiplicative semigroup solvable: " << (r.multiplicative_solvable ? "yes" : "no");
  if (r.nonsolvable_group)
    out << " (maximal subgroup of order " << r.nonsolvable_group->elements.size() << " at "
        << sr.elements[r.nonsolvable_group->identity] << ")";
  out << '\n';
  out << "multiplicative semigroup aperiodic: " << (r.multiplicative_aperiodic ? "yes" : "no")
      << '\n';
  out << "verdict: " << to_string(r.verdict) << '\n';
  return out.str();
}

}  // namespace cep
