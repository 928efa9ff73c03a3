#include "cep/rank.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "cep/classify.hpp"
#include "text_util.hpp"

namespace cep {

RankStructure build_rank(const FiniteSemiring& sr) {
  const auto n = static_cast<Elem>(sr.size());
  RankStructure rs;
  rs.below.assign(n, std::vector<char>(n, 0));
  for (Elem a = 0; a < n; ++a) {
    auto& seen = rs.below[a];
    std::vector<Elem> stack{a};
    seen[a] = 1;
    while (!stack.empty()) {
      const Elem x = stack.back();
      stack.pop_back();
      for (Elem y = 0; y < n; ++y)
        for (Elem z : {sr.plus(x, y), sr.times(y, x), sr.times(x, y)})
          if (!seen[z]) {
            seen[z] = 1;
            stack.push_back(z);
          }
    }
  }

  // Classes of mutually reachable elements, numbered by first member.
  rs.scc.assign(n, n);
  std::vector<Elem> leader;
  for (Elem a = 0; a < n; ++a) {
    if (rs.scc[a] != n) continue;
    for (Elem b = a; b < n; ++b)
      if (rs.below[a][b] && rs.below[b][a]) rs.scc[b] = leader.size();
    leader.push_back(a);
  }

  // A class strictly above another has strictly more elements below it, so
  // sorting by that count is a linear extension.
  std::vector<std::size_t> count(leader.size(), 0);
  for (std::size_t c = 0; c < leader.size(); ++c)
    for (Elem x = 0; x < n; ++x) count[c] += rs.below[x][leader[c]];
  std::vector<std::size_t> order(leader.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return count[x] < count[y]; });
  std::vector<std::size_t> position(leader.size());
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i + 1;

  rs.rank.resize(n);
  for (Elem a = 0; a < n; ++a) rs.rank[a] = position[rs.scc[a]];
  rs.max_rank = leader.size();
  return rs;
}

std::optional<RankViolation> check_rank_axioms(const FiniteSemiring& sr, const RankMap& rank) {
  const auto n = static_cast<Elem>(sr.size());
  if (rank.size() != n) throw DomainError("rank map does not cover every element");
  auto name = [&](Elem x) { return sr.elements[x]; };
  for (Elem a = 0; a < n; ++a)
    if (rank[a] == 0) return RankViolation{0, a, a, std::nullopt, "rank(" + name(a) + ") is not positive"};

  for (Elem a = 0; a < n; ++a)
    for (Elem b = 0; b < n; ++b)
      if (rank[a] > rank[sr.plus(a, b)])
        return RankViolation{1, a, b, std::nullopt,
                             "rank(" + name(a) + ") > rank(" + name(a) + " + " + name(b) + ")"};
  for (Elem a = 0; a < n; ++a)
    for (Elem b = 0; b < n; ++b) {
      const Elem ab = sr.times(a, b);
      if (rank[a] > rank[ab] || rank[b] > rank[ab])
        return RankViolation{2, a, b, std::nullopt,
                             "rank of a factor exceeds rank(" + name(a) + " · " + name(b) + ")"};
    }
  const ElemSet e_set = idempotents(sr);
  for (Elem e : e_set)
    for (Elem f : e_set) {
      std::vector<Elem> slice;
      for (Elem x = 0; x < n; ++x)
        if (sr.times(sr.times(e, x), f) == x) slice.push_back(x);
      for (Elem a : slice)
        for (Elem b : slice) {
          const Elem s = sr.plus(a, b);
          if (rank[a] == rank[s] && s != a)
            return RankViolation{3, a, b, std::make_pair(e, f),
                                 name(a) + " and " + name(b) + " lie in eRf for e=" + name(e) + ", f=" + name(f) +
                                     "; rank(" + name(a) + ") = rank(" + name(a) + " + " + name(b) +
                                     ") but the sum is " + name(s)};
        }
    }
  return std::nullopt;
}

RankMap cardinality_rank(const FiniteSemiring& sr) {
  RankMap out;
  for (const auto& e : sr.elements) {
    if (e.size() < 2 || e.front() != '{' || e.back() != '}')
      throw DomainError("cardinality rank needs set-valued element names, got '" + e + "'");
    const std::string_view inner(e.data() + 1, e.size() - 2);
    out.push_back(inner.empty() ? 0 : 1 + std::count(inner.begin(), inner.end(), ','));
  }
  return out;
}

RankMap parse_rank(const FiniteSemiring& sr, std::string_view text) {
  detail::LineReader in(text);
  RankMap out(sr.size(), 0);
  while (auto line = in.next()) {
    const auto& t = line->tokens;
    if (t.size() != 2) throw ParseError(in.where() + "expected '<element> <rank>'");
    auto e = sr.find(t[0]);
    if (!e) throw ParseError(in.where() + "unknown element '" + t[0] + "'");
    try {
      out[*e] = std::stoul(t[1]);
    } catch (const std::exception&) {
      throw ParseError(in.where() + "bad rank '" + t[1] + "'");
    }
  }
  for (Elem x = 0; x < sr.size(); ++x)
    if (out[x] == 0) throw ParseError("no positive rank given for element '" + sr.elements[x] + "'");
  return out;
}

EvalResult NaiveOracle::eval_additive(const Circuit& c) const {
  if (!restrict_check(c, Restriction::Additive)) throw DomainError("additive oracle called on a circuit with products");
  return eval_naive(c);
}

EvalResult NaiveOracle::eval_multiplicative(const Circuit& c) const {
  if (!restrict_check(c, Restriction::Multiplicative))
    throw DomainError("multiplicative oracle called on a circuit with sums");
  return eval_naive(c);
}

std::optional<TypeAssignment> identity_types(const Circuit& c) {
  auto one = multiplicative_identity(c.semiring());
  if (!one) return std::nullopt;
  return TypeAssignment(c.size(), {*one, *one});
}

PhasedResult eval_phased(const Circuit& c, const TypeAssignment& types, const RankMap& rank,
                         const PhaseOptions& opt) {
  if (!is_normal(c)) throw DomainError("eval_phased: circuit is not in normal form");
  if (types.size() != c.size()) throw DomainError("eval_phased: type assignment does not cover every gate");
  if (opt.check_types) {
    auto v = validate_type_assignment(c, types);
    if (!v.empty()) throw DomainError("eval_phased: " + v.front().message);
  }
  if (opt.start_phase == 0) throw DomainError("eval_phased: phases are numbered from 1");
  const auto& sr = c.semiring();
  const std::size_t max_rank = rank.empty() ? 0 : *std::max_element(rank.begin(), rank.end());
  const NaiveOracle naive;
  const CircuitOracle& oracle = opt.oracle ? *opt.oracle : naive;
  std::optional<std::mt19937_64> rng;
  if (opt.random_seed) rng.emplace(*opt.random_seed);

  std::vector<Elem> truth;
  if (opt.check_invariant) truth = eval_naive(c).values;

  Circuit cur = c;
  const auto order = c.topological_order();
  auto is_const = [&](GateId g) { return cur.rhs(g).kind == Rhs::Kind::Const; };
  auto all_const = [&] {
    for (GateId g = 0; g < cur.size(); ++g)
      if (!is_const(g)) return false;
    return true;
  };

  PhasedResult res;
  for (std::size_t k = opt.start_phase; !all_const(); ++k) {
    if (k > std::max(max_rank, opt.start_phase))
      throw DomainError("eval_phased: phase limit " + std::to_string(max_rank) +
                        " exceeded; the rank function or the type assignment is invalid for this circuit");
    PhaseRecord rec;
    rec.k = k;

    // Step 1: gates with no product below them.
    std::vector<char> additive(cur.size(), 0);
    for (GateId g : order) {
      const Rhs& r = cur.rhs(g);
      additive[g] = r.kind == Rhs::Kind::Const || (r.kind == Rhs::Kind::Add && additive[r.left] && additive[r.right]);
    }
    bool any = false;
    for (GateId g = 0; g < cur.size(); ++g) any |= additive[g] && !is_const(g);
    if (any) {
      Circuit sub(cur.semiring_ptr());
      for (GateId g = 0; g < cur.size(); ++g)
        sub.add_gate(cur.gate(g).id, additive[g] ? cur.rhs(g) : Rhs::constant(0));
      const auto vals = oracle.eval_additive(sub).values;
      for (GateId g = 0; g < cur.size(); ++g)
        if (additive[g] && !is_const(g)) {
          rec.additive.push_back(g);
          cur.set_rhs(g, Rhs::constant(vals[g]));
        }
    }

    // Step 2: every remaining sum follows one inner input.
    Circuit reduced(cur.semiring_ptr());
    for (GateId g = 0; g < cur.size(); ++g) {
      const Rhs& r = cur.rhs(g);
      if (r.kind != Rhs::Kind::Add) {
        reduced.add_gate(cur.gate(g).id, r);
        continue;
      }
      const bool li = !is_const(r.left), ri = !is_const(r.right);
      GateId inner = li ? r.left : r.right;
      if (li && ri) {
        if (rng)
          inner = std::uniform_int_distribution<int>(0, 1)(*rng) ? r.right : r.left;
        else
          inner = std::min(r.left, r.right);
      }
      rec.inner.emplace_back(g, inner);
      reduced.add_gate(cur.gate(g).id, Rhs::copy(inner));
    }
    rec.reduced_values = oracle.eval_multiplicative(normalize(reduced)).values;
    rec.reduced_values.resize(cur.size());
    const auto& v = rec.reduced_values;

    std::vector<char> local(cur.size(), 1), in_w(cur.size(), 0);
    for (GateId g = 0; g < cur.size(); ++g) {
      const Rhs& r = cur.rhs(g);
      if (r.kind == Rhs::Kind::Add) local[g] = v[g] == sr.plus(v[r.left], v[r.right]);
      if (local[g]) rec.locally_correct.push_back(g);
    }
    for (GateId g : order) {
      bool ok = local[g];
      for (GateId in : cur.rhs(g).inputs()) ok = ok && in_w[in];
      in_w[g] = ok;
    }
    for (GateId g = 0; g < cur.size(); ++g) {
      if (!in_w[g]) continue;
      rec.w.push_back(g);
      if (!is_const(g)) {
        rec.frozen.emplace_back(g, v[g]);
        cur.set_rhs(g, Rhs::constant(v[g]));
      }
    }

    if (opt.check_invariant)
      for (GateId g = 0; g < cur.size(); ++g)
        if (rank[truth[g]] <= k && !is_const(g))
          throw DomainError("eval_phased: after phase " + std::to_string(k) + " gate " + cur.gate(g).id +
                            " of rank " + std::to_string(rank[truth[g]]) + " is still unevaluated");
    res.phases.push_back(std::move(rec));
  }

  res.result.values.resize(cur.size());
  for (GateId g = 0; g < cur.size(); ++g) res.result.values[g] = cur.rhs(g).value;
  if (cur.output()) res.result.output = res.result.values[*cur.output()];
  return res;
}

std::string phase_trace(const Circuit& c, const PhasedResult& r) {
  const auto& sr = c.semiring();
  std::ostringstream out;
  auto list = [&](const std::vector<GateId>& gs) {
    if (gs.empty()) return std::string(" -");
    std::string s;
    for (GateId g : gs) s += " " + c.gate(g).id;
    return s;
  };
  for (const auto& p : r.phases) {
    out << "phase " << p.k << '\n';
    out << "additive:" << list(p.additive) << '\n';
    out << "inner:";
    if (p.inner.empty()) out << " -";
    for (auto [a, b] : p.inner) out << ' ' << c.gate(a).id << "->" << c.gate(b).id;
    out << "\nreduced:";
    for (GateId g = 0; g < c.size(); ++g) out << ' ' << c.gate(g).id << '=' << sr.elements[p.reduced_values[g]];
    out << "\nlocally-correct:" << list(p.locally_correct) << '\n';
    out << "W:" << list(p.w) << '\n';
    out << "frozen:";
    if (p.frozen.empty()) out << " -";
    for (auto [g, v] : p.frozen) out << ' ' << c.gate(g).id << '=' << sr.elements[v];
    out << '\n';
  }
  out << "phases: " << r.phases.size() << '\n';
  return out.str();
}

FullResult eval_full(const Circuit& c, const FullOptions& opt) {
  if (!c.output()) throw DomainError("eval_full: circuit has no output gate");
  const auto& sr = c.semiring();
  FullResult res;
  if (!is_zero_one_free(sr)) {
    res.fallback = true;
    res.note = "semiring " + sr.name +
               " is not {0,1}-free; evaluation is P-complete in general, so the naive evaluator was used";
    res.value = *eval_naive(c).output;
    return res;
  }
  res.pipeline = step1_pipeline(c, opt.pipeline);
  if (res.pipeline->value) {
    res.value = *res.pipeline->value;
    return res;
  }
  const auto& tc = *res.pipeline->construction;
  const RankMap rank = opt.rank ? *opt.rank : build_rank(sr).rank;
  res.phased = eval_phased(tc.circuit, tc.types, rank, opt.phases);
  std::vector<Elem> xs;
  for (GateId g : tc.distinguished) xs.push_back(res.phased->result.values[g]);
  res.value = tc.alpha.apply(sr, xs);
  return res;
}

}  // namespace cep
