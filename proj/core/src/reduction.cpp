#include "cep/reduction.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

namespace cep {

// --- short and long parts -------------------------------------------------

std::size_t long_product_threshold(const FiniteSemiring& sr, bool strict) {
  if (strict) return sr.size();
  return power_set_products(sr, 1).stable_at;
}

Elem word_value(const FiniteSemiring& sr, const Word& w) {
  if (w.empty()) throw DomainError("word_value: empty word");
  Elem acc = w[0];
  for (std::size_t i = 1; i < w.size(); ++i) acc = sr.times(acc, w[i]);
  return acc;
}

namespace {

void require_normal(const Circuit& c, const char* who) {
  if (!is_normal(c)) throw DomainError(std::string(who) + ": circuit is not in normal form");
}

GateId require_output(const Circuit& c, const char* who) {
  if (!c.output()) throw DomainError(std::string(who) + ": circuit has no output gate");
  return *c.output();
}

}  // namespace

ShortLongAnalysis short_long_analyze(const Circuit& c, std::size_t m) {
  require_normal(c, "short_long_analyze");
  if (m < 2) throw DomainError("short_long_analyze: threshold must be at least 2");
  const auto& sr = c.semiring();

  ShortLongAnalysis a;
  a.threshold = m;
  a.coefficients = coefficient_semiring(stability(sr));
  a.gates.assign(c.size(), {});
  const auto& B = a.coefficients;

  std::vector<char> seed(c.size(), 0);  // products creating a long word from two short ones
  for (GateId g : c.topological_order()) {
    const Rhs& rhs = c.rhs(g);
    GateParts& out = a.gates[g];
    switch (rhs.kind) {
      case Rhs::Kind::Const:
        out.short_part = ShortPoly{{{Word{rhs.value}, 1}}};
        break;
      case Rhs::Kind::Add: {
        const auto& l = a.gates[rhs.left];
        const auto& r = a.gates[rhs.right];
        if (l.short_part || r.short_part) {
          ShortPoly p = l.short_part ? *l.short_part : ShortPoly{};
          if (r.short_part)
            for (const auto& [w, k] : r.short_part->terms) {
              auto [it, fresh] = p.terms.emplace(w, k);
              if (!fresh) it->second = B.add(it->second, k);
            }
          out.short_part = std::move(p);
        }
        out.long_present = l.long_present || r.long_present;
        break;
      }
      case Rhs::Kind::Mul: {
        const auto& l = a.gates[rhs.left];
        const auto& r = a.gates[rhs.right];
        out.long_present = l.long_present || r.long_present;
        if (l.short_part && r.short_part) {
          ShortPoly p;
          for (const auto& [u, ku] : l.short_part->terms)
            for (const auto& [v, kv] : r.short_part->terms) {
              if (u.size() + v.size() >= m) {
                seed[g] = 1;
                continue;
              }
              Word w = u;
              w.insert(w.end(), v.begin(), v.end());
              const auto k = B.mul(ku, kv);
              auto [it, fresh] = p.terms.emplace(std::move(w), k);
              if (!fresh) it->second = B.add(it->second, k);
            }
          if (seed[g]) out.long_present = true;
          if (!p.terms.empty()) out.short_part = std::move(p);
        }
        break;
      }
      default: break;
    }
  }

  // A gate has long words iff some seed product lies below it.
  const auto rd = readers(c);
  std::vector<GateId> stack;
  for (GateId g = 0; g < c.size(); ++g)
    if (seed[g]) {
      a.gates[g].long_by_reachability = true;
      stack.push_back(g);
    }
  while (!stack.empty()) {
    GateId g = stack.back();
    stack.pop_back();
    for (GateId r : rd[g])
      if (!a.gates[r].long_by_reachability) {
        a.gates[r].long_by_reachability = true;
        stack.push_back(r);
      }
  }
  return a;
}

Elem short_value(const FiniteSemiring& sr, const ShortPoly& p) {
  if (p.terms.empty()) throw DomainError("short_value: empty short part");
  std::optional<Elem> acc;
  for (const auto& [w, k] : p.terms) {
    const Elem x = multiple(sr, k, word_value(sr, w));
    acc = acc ? sr.plus(*acc, x) : x;
  }
  return *acc;
}

std::optional<Elem> short_value(const Circuit& c, const ShortLongAnalysis& a, GateId g) {
  const auto& p = a.gates.at(g).short_part;
  if (!p) return std::nullopt;
  return short_value(c.semiring(), *p);
}

std::string to_string(const FiniteSemiring& sr, const ShortPoly& p) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [w, k] : p.terms) {
    if (!first) out << " + ";
    first = false;
    if (k != 1) out << k;
    for (std::size_t i = 0; i < w.size(); ++i) out << (i && sr.elements[w[i]].size() > 1 ? "." : "") << sr.elements[w[i]];
  }
  return out.str();
}

// --- leaf removal ---------------------------------------------------------

namespace {

constexpr Elem kOne = std::numeric_limits<Elem>::max();  // adjoined identity

}  // namespace

Circuit leaf_removal(const Circuit& c, std::span<const Elem> ideal) {
  require_normal(c, "leaf_removal");
  const auto& sr = c.semiring();
  if (ideal.empty() || !is_ideal(sr, ideal)) throw DomainError("leaf_removal: the given set is not a non-empty ideal");
  const GateId root = require_output(c, "leaf_removal");

  std::vector<char> in_u(c.size());
  for (GateId g = 0; g < c.size(); ++g)
    in_u[g] = c.rhs(g).kind != Rhs::Kind::Const || contains(ideal, c.rhs(g).value);
  if (!in_u[root]) throw DomainError("leaf_removal: output gate " + c.gate(root).id + " is a constant outside the ideal");

  auto cat = [&](Elem x, Elem y) { return x == kOne ? y : y == kOne ? x : sr.times(x, y); };
  auto label = [&](Elem x) { return x == kOne ? std::string("_") : sr.elements[x]; };

  Circuit out(c.semiring_ptr());
  std::map<std::tuple<GateId, Elem, Elem>, GateId> made;
  std::deque<std::tuple<GateId, Elem, Elem>> work;
  auto get = [&](GateId g, Elem l, Elem r) {
    auto key = std::make_tuple(g, l, r);
    auto it = made.find(key);
    if (it != made.end()) return it->second;
    GateId id = out.add_gate(c.gate(g).id + "[" + label(l) + ";" + label(r) + "]", Rhs::constant(0));
    made.emplace(key, id);
    work.push_back(key);
    return id;
  };

  out.set_output(get(root, kOne, kOne));
  while (!work.empty()) {
    auto [g, l, r] = work.front();
    work.pop_front();
    const GateId self = made.at({g, l, r});
    const Rhs& rhs = c.rhs(g);
    const std::string& id = c.gate(g).id;
    switch (rhs.kind) {
      case Rhs::Kind::Const: out.set_rhs(self, Rhs::constant(cat(cat(l, rhs.value), r))); break;
      case Rhs::Kind::Add:
        for (GateId in : {rhs.left, rhs.right})
          if (!in_u[in])
            throw DomainError("leaf_removal: addition gate " + id + " reads constant " + c.gate(in).id +
                              " outside the ideal");
        out.set_rhs(self, Rhs::add(get(rhs.left, l, r), get(rhs.right, l, r)));
        break;
      case Rhs::Kind::Mul:
        if (in_u[rhs.left] && in_u[rhs.right]) {
          out.set_rhs(self, Rhs::mul(get(rhs.left, l, kOne), get(rhs.right, kOne, r)));
        } else if (in_u[rhs.left]) {
          out.set_rhs(self, Rhs::copy(get(rhs.left, l, cat(c.rhs(rhs.right).value, r))));
        } else if (in_u[rhs.right]) {
          out.set_rhs(self, Rhs::copy(get(rhs.right, cat(l, c.rhs(rhs.left).value), r)));
        } else {
          throw DomainError("leaf_removal: multiplication gate " + id + " reads two constants outside the ideal");
        }
        break;
      default: break;
    }
  }
  return normalize(out);
}

// --- monomlength ----------------------------------------------------------

MonomlengthResult monomlength(const Circuit& c, const PipelineOptions& opt) {
  const auto& sr = c.semiring();
  if (sr.size() > opt.max_size)
    throw DomainError("reduction supports semirings with at most " + std::to_string(opt.max_size) +
                      " elements; this one has " + std::to_string(sr.size()));
  Circuit n = normalize(c);
  const GateId root = require_output(n, "monomlength");

  MonomlengthResult res;
  res.threshold = long_product_threshold(sr, opt.strict_threshold);
  res.ideal = generated_subsemiring(sr, power_set_products(sr, res.threshold).set);

  if (res.threshold <= 1) {
    // R = R·R, so every word is already long and the ideal is R itself.
    res.which = MonomlengthResult::Case::LongOnly;
    res.circuit = std::move(n);
    return res;
  }

  const auto a = short_long_analyze(n, res.threshold);
  const auto& top = a.gates[root];
  if (!top.long_present) {
    res.which = MonomlengthResult::Case::ShortOnly;
    res.value = short_value(sr, *top.short_part);
    return res;
  }

  Circuit lam(n.semiring_ptr());
  std::vector<GateId> lam_of(n.size(), 0);
  for (GateId g = 0; g < n.size(); ++g)
    if (a.gates[g].long_present) lam_of[g] = lam.add_gate(n.gate(g).id + ".L", Rhs::constant(0));

  for (GateId g = 0; g < n.size(); ++g) {
    const auto& parts = a.gates[g];
    if (!parts.long_present) continue;
    const Rhs& rhs = n.rhs(g);
    const auto& pb = a.gates[rhs.left];
    const auto& pc = a.gates[rhs.right];
    if (rhs.kind == Rhs::Kind::Add) {
      if (pb.long_present && pc.long_present)
        lam.set_rhs(lam_of[g], Rhs::add(lam_of[rhs.left], lam_of[rhs.right]));
      else
        lam.set_rhs(lam_of[g], Rhs::copy(lam_of[pb.long_present ? rhs.left : rhs.right]));
      continue;
    }
    // rhs is a product B·C
    std::vector<Term> terms;
    if (pb.long_present && pc.long_present)
      terms.push_back(Term::product({Term::ref(lam_of[rhs.left]), Term::ref(lam_of[rhs.right])}));
    if (pb.short_part && pc.long_present)
      terms.push_back(Term::product({Term::constant(short_value(sr, *pb.short_part)), Term::ref(lam_of[rhs.right])}));
    if (pb.long_present && pc.short_part)
      terms.push_back(Term::product({Term::ref(lam_of[rhs.left]), Term::constant(short_value(sr, *pc.short_part))}));
    if (pb.short_part && pc.short_part) {
      std::optional<Elem> m_a;
      for (const auto& [u, ku] : pb.short_part->terms)
        for (const auto& [v, kv] : pc.short_part->terms) {
          if (u.size() + v.size() < res.threshold) continue;
          const Elem x = multiple(sr, a.coefficients.mul(ku, kv), sr.times(word_value(sr, u), word_value(sr, v)));
          m_a = m_a ? sr.plus(*m_a, x) : x;
        }
      if (m_a) {
        res.m_constants[n.gate(g).id] = *m_a;
        terms.push_back(Term::constant(*m_a));
      }
    }
    if (terms.size() == 1 && terms[0].kind == Term::Kind::Const)
      lam.set_rhs(lam_of[g], Rhs::constant(terms[0].value));
    else
      lam.set_rhs(lam_of[g], Rhs::general(Term::sum(std::move(terms))));
  }
  lam.set_output(lam_of[root]);

  res.circuit = leaf_removal(normalize(lam), res.ideal);
  res.lambda = std::move(lam);
  if (top.short_part) {
    res.which = MonomlengthResult::Case::Both;
    res.sigma = short_value(sr, *top.short_part);
  } else {
    res.which = MonomlengthResult::Case::LongOnly;
  }
  return res;
}

// --- decomposition into s·e·t summands ------------------------------------

RerDecomposition::RerDecomposition(const FiniteSemiring& sr) : table_(sr.size()) {
  const auto n = static_cast<Elem>(sr.size());
  const ElemSet e_set = idempotents(sr);
  std::vector<std::optional<Triple>> single(n);
  for (Elem s = 0; s < n; ++s)
    for (Elem e : e_set)
      for (Elem t = 0; t < n; ++t) {
        const Elem x = sr.times(sr.times(s, e), t);
        if (!single[x]) single[x] = Triple{s, e, t};
      }

  std::vector<Elem> frontier;
  for (Elem x = 0; x < n; ++x)
    if (single[x]) {
      table_[x] = {*single[x]};
      frontier.push_back(x);
    }
  if (!frontier.empty()) max_terms_ = 1;
  while (!frontier.empty()) {
    std::vector<Elem> next;
    for (Elem x : frontier)
      for (Elem y = 0; y < n; ++y) {
        if (!single[y]) continue;
        const Elem z = sr.plus(x, y);
        if (!table_[z].empty()) continue;
        table_[z] = table_[x];
        table_[z].push_back(*single[y]);
        next.push_back(z);
      }
    if (!next.empty()) ++max_terms_;
    std::sort(next.begin(), next.end());
    frontier = std::move(next);
  }
}

const std::vector<Triple>& RerDecomposition::operator()(Elem x) const {
  if (!contains(x)) throw DomainError("element is not a sum of products s·e·t with e idempotent");
  return table_[x];
}

std::vector<Triple> decompose_RER(const FiniteSemiring& sr, Elem x) { return RerDecomposition(sr)(x); }

// --- type assignments and affine maps -------------------------------------

std::vector<TypeViolation> validate_type_assignment(const Circuit& c, const TypeAssignment& t) {
  require_normal(c, "validate_type_assignment");
  if (t.size() != c.size()) throw DomainError("type assignment does not cover every gate");
  const auto& sr = c.semiring();
  const auto values = eval_naive(c).values;
  std::vector<TypeViolation> out;
  auto type_text = [&](GateType ty) { return "(" + sr.elements[ty.first] + "," + sr.elements[ty.second] + ")"; };

  for (GateId g = 0; g < c.size(); ++g) {
    const auto [e, f] = t[g];
    const std::string& id = c.gate(g).id;
    if (e >= sr.size() || f >= sr.size() || sr.times(e, e) != e || sr.times(f, f) != f) {
      out.push_back({g, 1, "gate " + id + ": type components are not idempotent"});
      continue;
    }
    if (sr.times(sr.times(e, values[g]), f) != values[g])
      out.push_back({g, 1, "gate " + id + ": value " + sr.elements[values[g]] + " is not in eRf for " + type_text(t[g])});
    const Rhs& rhs = c.rhs(g);
    if (rhs.kind == Rhs::Kind::Add && (t[rhs.left] != t[g] || t[rhs.right] != t[g]))
      out.push_back({g, 2, "gate " + id + ": addition inputs have types " + type_text(t[rhs.left]) + " and " +
                               type_text(t[rhs.right]) + ", gate has " + type_text(t[g])});
    if (rhs.kind == Rhs::Kind::Mul && GateType{t[rhs.left].first, t[rhs.right].second} != t[g])
      out.push_back({g, 3, "gate " + id + ": product of " + type_text(t[rhs.left]) + " and " +
                               type_text(t[rhs.right]) + " cannot have type " + type_text(t[g])});
  }
  return out;
}

Elem AffineFunction::apply(const FiniteSemiring& sr, std::span<const Elem> x) const {
  if (x.size() != coefficients.size()) throw DomainError("affine function: wrong number of arguments");
  std::optional<Elem> acc = constant;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Elem term = sr.times(sr.times(coefficients[i].first, x[i]), coefficients[i].second);
    acc = acc ? sr.plus(*acc, term) : term;
  }
  if (!acc) throw DomainError("affine function with no terms and no constant");
  return *acc;
}

// --- boundary profiles ----------------------------------------------------

std::vector<Profile> boundary_profiles(const Circuit& d, const RerDecomposition& dec) {
  require_normal(d, "boundary_profiles");
  std::vector<Profile> p(d.size());
  for (GateId g : d.topological_order()) {
    const Rhs& rhs = d.rhs(g);
    std::set<Quad> out;
    if (rhs.kind == Rhs::Kind::Const) {
      for (const auto& tr : dec(rhs.value)) out.insert({tr.s, tr.e, tr.e, tr.t});
    } else if (rhs.kind == Rhs::Kind::Add) {
      out.insert(p[rhs.left].begin(), p[rhs.left].end());
      out.insert(p[rhs.right].begin(), p[rhs.right].end());
    } else {
      std::set<std::pair<Elem, Elem>> firsts, lasts;
      for (const auto& q : p[rhs.left]) firsts.emplace(q.s, q.e);
      for (const auto& q : p[rhs.right]) lasts.emplace(q.f, q.t);
      for (auto [s, e] : firsts)
        for (auto [f, t] : lasts) out.insert({s, e, f, t});
    }
    p[g].assign(out.begin(), out.end());
  }
  return p;
}

std::vector<Profile> boundary_profiles_by_paths(const Circuit& d, const RerDecomposition& dec) {
  require_normal(d, "boundary_profiles_by_paths");
  const auto rd = readers(d);
  const std::size_t n = d.size();

  // Gates reachable from `from` along edges accepted by `ok(X, Y)`.
  auto reach = [&](GateId from, const std::function<bool(GateId, GateId)>& ok) {
    std::vector<char> seen(n, 0);
    std::vector<GateId> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
      GateId x = stack.back();
      stack.pop_back();
      for (GateId y : rd[x])
        if (!seen[y] && ok(x, y)) {
          seen[y] = 1;
          stack.push_back(y);
        }
    }
    return seen;
  };
  auto is_add = [&](GateId y) { return d.rhs(y).kind == Rhs::Kind::Add; };
  auto additive_only = [&](GateId, GateId y) { return is_add(y); };
  auto left_edges = [&](GateId x, GateId y) { return is_add(y) || d.rhs(y).left == x; };
  auto right_edges = [&](GateId x, GateId y) { return is_add(y) || d.rhs(y).right == x; };

  std::vector<std::set<Quad>> p(n);
  std::vector<GateId> inputs, products;
  for (GateId g = 0; g < n; ++g) (d.rhs(g).kind == Rhs::Kind::Const ? inputs : products).push_back(g);
  products.erase(std::remove_if(products.begin(), products.end(), is_add), products.end());

  // condition (i): an input monomial s e^3 t reaches A through additions only
  for (GateId c : inputs) {
    const auto up = reach(c, additive_only);
    for (GateId a = 0; a < n; ++a)
      if (up[a])
        for (const auto& tr : dec(d.rhs(c).value)) p[a].insert({tr.s, tr.e, tr.e, tr.t});
  }
  // condition (ii): a product B whose leftmost factor starts with s e and
  // whose rightmost factor ends with f t, followed by additions up to A
  std::vector<std::vector<char>> left_reach, right_reach;
  for (GateId c : inputs) {
    left_reach.push_back(reach(c, left_edges));
    right_reach.push_back(reach(c, right_edges));
  }
  for (GateId b : products) {
    std::set<std::pair<Elem, Elem>> firsts, lasts;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const auto& tri = dec(d.rhs(inputs[i]).value);
      if (left_reach[i][b] && inputs[i] != b)
        for (const auto& tr : tri) firsts.emplace(tr.s, tr.e);
      if (right_reach[i][b] && inputs[i] != b)
        for (const auto& tr : tri) lasts.emplace(tr.e, tr.t);
    }
    const auto up = reach(b, additive_only);
    for (GateId a = 0; a < n; ++a)
      if (up[a])
        for (auto [s, e] : firsts)
          for (auto [f, t] : lasts) p[a].insert({s, e, f, t});
  }

  std::vector<Profile> out(n);
  for (GateId g = 0; g < n; ++g) out[g].assign(p[g].begin(), p[g].end());
  return out;
}

// --- typed construction ---------------------------------------------------

namespace {

class TypedBuilder {
 public:
  explicit TypedBuilder(std::shared_ptr<const FiniteSemiring> sr) : out_(std::move(sr)) {}

  GateId make(const std::string& id, Rhs rhs, GateType type) {
    GateId g = id.empty() ? out_.add_fresh(std::move(rhs)) : out_.add_gate(id, std::move(rhs));
    types_.push_back(type);
    return g;
  }

  GateId constant(Elem v, GateType type) {
    auto key = std::make_pair(v, type);
    auto it = consts_.find(key);
    if (it != consts_.end()) return it->second;
    GateId g = make("", Rhs::constant(v), type);
    consts_.emplace(key, g);
    return g;
  }

  /// Sum of `parts`; the final gate carries `id`.
  GateId sum(const std::string& id, const std::vector<GateId>& parts, GateType type) {
    if (parts.size() == 1) return make(id, out_.rhs(parts[0]), type);
    GateId left = parts[0];
    for (std::size_t i = 1; i + 1 < parts.size(); ++i) left = make("", Rhs::add(left, parts[i]), type);
    return make(id, Rhs::add(left, parts.back()), type);
  }

  const Circuit& circuit() const { return out_; }
  Circuit take_circuit() { return std::move(out_); }
  TypeAssignment take_types() { return std::move(types_); }

 private:
  Circuit out_;
  TypeAssignment types_;
  std::map<std::pair<Elem, GateType>, GateId> consts_;
};

}  // namespace

TypedConstruction fsf(const Circuit& d) {
  require_normal(d, "fsf");
  const GateId root = require_output(d, "fsf");
  const auto& sr = d.semiring();
  const RerDecomposition dec(sr);
  for (const auto& g : d.gates())
    if (g.rhs.kind == Rhs::Kind::Const && !dec.contains(g.rhs.value))
      throw DomainError("fsf: constant " + sr.elements[g.rhs.value] + " of gate " + g.id +
                        " is not in the subsemiring generated by R·E·R");

  TypedConstruction tc;
  tc.profiles = boundary_profiles(d, dec);
  tc.gate_of.assign(d.size(), {});
  TypedBuilder b(d.semiring_ptr());

  auto name = [&](GateId a, const Quad& q) {
    return d.gate(a).id + "'[" + sr.elements[q.s] + ";" + sr.elements[q.e] + ";" + sr.elements[q.f] + ";" +
           sr.elements[q.t] + "]";
  };

  for (GateId a : d.topological_order()) {
    const Rhs& rhs = d.rhs(a);
    auto& mine = tc.gate_of[a];
    if (rhs.kind == Rhs::Kind::Const) {
      std::map<Quad, std::size_t> count;
      for (const auto& tr : dec(rhs.value)) ++count[{tr.s, tr.e, tr.e, tr.t}];
      for (const auto& [q, k] : count) {
        const GateType ty{q.e, q.e};
        if (k == 1) {
          mine[q] = b.make(name(a, q), Rhs::constant(q.e), ty);
        } else {
          std::vector<GateId> parts(k, b.constant(q.e, ty));
          mine[q] = b.sum(name(a, q), parts, ty);
        }
      }
    } else if (rhs.kind == Rhs::Kind::Add) {
      const auto& lb = tc.gate_of[rhs.left];
      const auto& lc = tc.gate_of[rhs.right];
      for (const auto& q : tc.profiles[a]) {
        const GateType ty{q.e, q.f};
        auto ib = lb.find(q);
        auto ic = lc.find(q);
        if (ib != lb.end() && ic != lc.end())
          mine[q] = b.make(name(a, q), Rhs::add(ib->second, ic->second), ty);
        else
          mine[q] = b.make(name(a, q), b.circuit().rhs(ib != lb.end() ? ib->second : ic->second), ty);
      }
    } else {
      // A = B·C: sum over B'_{s,e,f',t'} (f' t' s' e') C'_{s',e',f,t}
      std::map<std::pair<Elem, Elem>, std::vector<Quad>> by_first, by_last;
      for (const auto& q : tc.profiles[rhs.left]) by_first[{q.s, q.e}].push_back(q);
      for (const auto& q : tc.profiles[rhs.right]) by_last[{q.f, q.t}].push_back(q);
      std::map<std::tuple<GateId, Elem, Elem>, GateId> x_cache;
      for (const auto& q : tc.profiles[a]) {
        std::vector<std::pair<GateId, GateId>> pairs;
        for (const auto& qb : by_first.at({q.s, q.e}))
          for (const auto& qc : by_last.at({q.f, q.t})) {
            const GateId bp = tc.gate_of[rhs.left].at(qb);
            auto key = std::make_tuple(bp, qc.s, qc.e);
            auto it = x_cache.find(key);
            if (it == x_cache.end()) {
              const Elem k = sr.times(sr.times(sr.times(qb.f, qb.t), qc.s), qc.e);
              const GateId kg = b.constant(k, {qb.f, qc.e});
              it = x_cache.emplace(key, b.make("", Rhs::mul(bp, kg), {q.e, qc.e})).first;
            }
            pairs.emplace_back(it->second, tc.gate_of[rhs.right].at(qc));
          }
        const GateType ty{q.e, q.f};
        if (pairs.size() == 1) {
          mine[q] = b.make(name(a, q), Rhs::mul(pairs[0].first, pairs[0].second), ty);
        } else {
          std::vector<GateId> parts;
          for (auto [x, y] : pairs) parts.push_back(b.make("", Rhs::mul(x, y), ty));
          mine[q] = b.sum(name(a, q), parts, ty);
        }
      }
    }
  }

  for (const auto& q : tc.profiles[root]) {
    tc.distinguished.push_back(tc.gate_of[root].at(q));
    tc.alpha.coefficients.emplace_back(sr.times(q.s, q.e), sr.times(q.f, q.t));
  }
  tc.types = b.take_types();
  tc.circuit = b.take_circuit();
  return tc;
}

PipelineResult step1_pipeline(const Circuit& c, const PipelineOptions& opt) {
  PipelineResult res;
  res.monomlength = monomlength(c, opt);
  if (res.monomlength.which == MonomlengthResult::Case::ShortOnly) {
    res.value = res.monomlength.value;
    return res;
  }
  TypedConstruction tc = fsf(*res.monomlength.circuit);
  tc.alpha.constant = res.monomlength.sigma;
  tc.m_constants = res.monomlength.m_constants;
  res.construction = std::move(tc);
  return res;
}

std::string describe_construction(const TypedConstruction& tc) {
  const auto& sr = tc.circuit.semiring();
  std::ostringstream out;
  for (GateId g = 0; g < tc.circuit.size(); ++g)
    out << "type " << tc.circuit.gate(g).id << " = (" << sr.elements[tc.types[g].first] << ","
        << sr.elements[tc.types[g].second] << ")\n";
  out << "distinguished:";
  for (GateId g : tc.distinguished) out << ' ' << tc.circuit.gate(g).id;
  out << "\nalpha:";
  for (auto [a, b] : tc.alpha.coefficients) out << ' ' << sr.elements[a] << ' ' << sr.elements[b];
  out << ' ' << (tc.alpha.constant ? sr.elements[*tc.alpha.constant] : std::string("none")) << '\n';
  for (const auto& [id, v] : tc.m_constants) out << "m " << id << " = " << sr.elements[v] << '\n';
  return out.str();
}

}  // namespace cep
