#include "cep/circuit.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "text_util.hpp"

namespace cep {

std::vector<GateId> Rhs::inputs() const {
  switch (kind) {
    case Kind::Const: return {};
    case Kind::Add:
    case Kind::Mul: return {left, right};
    case Kind::Copy: return {left};
    case Kind::General: {
      std::vector<GateId> out;
      std::vector<const Term*> stack{term.get()};
      while (!stack.empty()) {
        const Term* t = stack.back();
        stack.pop_back();
        if (t->kind == Term::Kind::Gate) out.push_back(t->gate);
        for (auto it = t->args.rbegin(); it != t->args.rend(); ++it) stack.push_back(&*it);
      }
      return out;
    }
  }
  return {};
}

// --- Circuit --------------------------------------------------------------

Circuit::Circuit(std::shared_ptr<const FiniteSemiring> semiring) : semiring_(std::move(semiring)) {
  if (!semiring_) throw DomainError("circuit needs a semiring");
}

GateId Circuit::add_gate(std::string id, Rhs rhs) {
  if (id.empty()) throw ParseError("empty gate id");
  if (index_.count(id)) throw ParseError("duplicate gate id '" + id + "'");
  const GateId g = gates_.size();
  index_.emplace(id, g);
  gates_.push_back({std::move(id), std::move(rhs)});
  return g;
}

GateId Circuit::add_fresh(Rhs rhs) {
  std::string id;
  do id = "$" + std::to_string(fresh_counter_++);
  while (index_.count(id));
  return add_gate(std::move(id), std::move(rhs));
}

void Circuit::set_rhs(GateId g, Rhs rhs) { gates_.at(g).rhs = std::move(rhs); }

std::optional<GateId> Circuit::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

GateId Circuit::index_of(std::string_view id) const {
  if (auto g = find(id)) return *g;
  throw ParseError("unknown gate '" + std::string(id) + "'");
}

void Circuit::set_output(std::optional<GateId> g) {
  if (g && *g >= gates_.size()) throw DomainError("output gate out of range");
  output_ = g;
}

void Circuit::validate() const {
  for (const auto& gate : gates_) {
    if (gate.rhs.kind == Rhs::Kind::Const && gate.rhs.value >= semiring_->size())
      throw ParseError("gate '" + gate.id + "' has an out-of-range constant");
    for (GateId in : gate.rhs.inputs())
      if (in >= gates_.size()) throw ParseError("gate '" + gate.id + "' reads a missing gate");
  }
  (void)topological_order();
}

std::vector<GateId> Circuit::topological_order() const {
  const std::size_t n = gates_.size();
  std::vector<char> state(n, 0);  // 0 new, 1 on stack, 2 done
  std::vector<GateId> order;
  order.reserve(n);
  std::vector<std::vector<GateId>> ins(n);
  for (GateId g = 0; g < n; ++g) ins[g] = gates_[g].rhs.inputs();

  for (GateId root = 0; root < n; ++root) {
    if (state[root]) continue;
    // explicit stack of (gate, next input position)
    std::vector<std::pair<GateId, std::size_t>> stack{{root, 0}};
    state[root] = 1;
    while (!stack.empty()) {
      auto& [g, pos] = stack.back();
      if (pos < ins[g].size()) {
        const GateId next = ins[g][pos++];
        if (state[next] == 1) {
          std::vector<std::string> cycle;
          auto it = std::find_if(stack.begin(), stack.end(),
                                 [next](const auto& p) { return p.first == next; });
          for (; it != stack.end(); ++it) cycle.push_back(gates_[it->first].id);
          std::string msg = "cycle through gates:";
          for (const auto& id : cycle) msg += " " + id;
          throw CycleError(msg, std::move(cycle));
        }
        if (state[next] == 0) {
          state[next] = 1;
          stack.emplace_back(next, 0);
        }
      } else {
        state[g] = 2;
        order.push_back(g);
        stack.pop_back();
      }
    }
  }
  return order;
}

// --- evaluation -----------------------------------------------------------

Elem eval_term(const FiniteSemiring& sr, const Term& t, std::span<const Elem> values) {
  switch (t.kind) {
    case Term::Kind::Gate: return values[t.gate];
    case Term::Kind::Const: return t.value;
    case Term::Kind::Sum:
    case Term::Kind::Product: {
      if (t.args.empty()) throw DomainError("empty sum or product in term");
      Elem acc = eval_term(sr, t.args[0], values);
      for (std::size_t i = 1; i < t.args.size(); ++i) {
        const Elem v = eval_term(sr, t.args[i], values);
        acc = t.kind == Term::Kind::Sum ? sr.plus(acc, v) : sr.times(acc, v);
      }
      return acc;
    }
  }
  return 0;
}

EvalResult eval_naive(const Circuit& c) {
  const auto& sr = c.semiring();
  EvalResult r;
  r.values.assign(c.size(), 0);
  for (GateId g : c.topological_order()) {
    const Rhs& rhs = c.rhs(g);
    switch (rhs.kind) {
      case Rhs::Kind::Const: r.values[g] = rhs.value; break;
      case Rhs::Kind::Add: r.values[g] = sr.plus(r.values[rhs.left], r.values[rhs.right]); break;
      case Rhs::Kind::Mul: r.values[g] = sr.times(r.values[rhs.left], r.values[rhs.right]); break;
      case Rhs::Kind::Copy: r.values[g] = r.values[rhs.left]; break;
      case Rhs::Kind::General: r.values[g] = eval_term(sr, *rhs.term, r.values); break;
    }
  }
  if (c.output()) r.output = r.values[*c.output()];
  return r;
}

bool is_normal(const Circuit& c) {
  return std::all_of(c.gates().begin(), c.gates().end(), [](const Gate& g) {
    return g.rhs.kind == Rhs::Kind::Const || g.rhs.kind == Rhs::Kind::Add ||
           g.rhs.kind == Rhs::Kind::Mul;
  });
}

namespace {

class Splitter {
 public:
  explicit Splitter(Circuit& out) : out_(out) {}

  // Gate computing the subterm; constants are shared per value.
  GateId emit(const Term& t) {
    switch (t.kind) {
      case Term::Kind::Gate: return t.gate;
      case Term::Kind::Const: {
        auto it = consts_.find(t.value);
        if (it != consts_.end()) return it->second;
        GateId g = out_.add_fresh(Rhs::constant(t.value));
        consts_.emplace(t.value, g);
        return g;
      }
      default: return out_.add_fresh(top(t));
    }
  }

  // Right-hand side for a gate whose whole term is t.
  Rhs top(const Term& t) {
    switch (t.kind) {
      case Term::Kind::Gate: return Rhs::copy(t.gate);
      case Term::Kind::Const: return Rhs::constant(t.value);
      default: break;
    }
    if (t.args.empty()) throw DomainError("empty sum or product in term");
    if (t.args.size() == 1) return top(t.args[0]);
    const bool sum = t.kind == Term::Kind::Sum;
    GateId left = emit(t.args[0]);
    for (std::size_t i = 1; i + 1 < t.args.size(); ++i) {
      const GateId right = emit(t.args[i]);
      left = out_.add_fresh(sum ? Rhs::add(left, right) : Rhs::mul(left, right));
    }
    const GateId last = emit(t.args.back());
    return sum ? Rhs::add(left, last) : Rhs::mul(left, last);
  }

 private:
  Circuit& out_;
  std::map<Elem, GateId> consts_;
};

}  // namespace

Circuit normalize(const Circuit& c) {
  c.validate();
  Circuit out(c.semiring_ptr());
  for (const auto& g : c.gates()) out.add_gate(g.id, g.rhs);
  out.set_output(c.output());

  Splitter split(out);
  for (GateId g = 0; g < c.size(); ++g)
    if (c.rhs(g).kind == Rhs::Kind::General) out.set_rhs(g, split.top(*c.rhs(g).term));

  // Copy chains end in a non-copy gate since the circuit is acyclic.
  for (GateId g = 0; g < out.size(); ++g) {
    if (out.rhs(g).kind != Rhs::Kind::Copy) continue;
    GateId t = out.rhs(g).left;
    while (out.rhs(t).kind == Rhs::Kind::Copy) t = out.rhs(t).left;
    out.set_rhs(g, out.rhs(t));
  }
  return out;
}

bool restrict_check(const Circuit& c, Restriction kind) {
  auto term_has = [](const Term& root, Term::Kind k) {
    std::vector<const Term*> stack{&root};
    while (!stack.empty()) {
      const Term* t = stack.back();
      stack.pop_back();
      if (t->kind == k && t->args.size() > 1) return true;
      for (const auto& a : t->args) stack.push_back(&a);
    }
    return false;
  };
  for (const auto& g : c.gates()) {
    const auto& r = g.rhs;
    if (kind == Restriction::Additive) {
      if (r.kind == Rhs::Kind::Mul) return false;
      if (r.kind == Rhs::Kind::General && term_has(*r.term, Term::Kind::Product)) return false;
    } else {
      if (r.kind == Rhs::Kind::Add) return false;
      if (r.kind == Rhs::Kind::General && term_has(*r.term, Term::Kind::Sum)) return false;
    }
  }
  return true;
}

std::vector<std::vector<GateId>> readers(const Circuit& c) {
  std::vector<std::vector<GateId>> out(c.size());
  for (GateId g = 0; g < c.size(); ++g)
    for (GateId in : c.rhs(g).inputs()) out[in].push_back(g);
  return out;
}

std::vector<std::vector<char>> below_relation(const Circuit& c) {
  std::vector<std::vector<char>> below(c.size(), std::vector<char>(c.size(), 0));
  for (GateId g : c.topological_order()) {
    below[g][g] = 1;
    for (GateId in : c.rhs(g).inputs())
      for (GateId h = 0; h < c.size(); ++h)
        if (below[in][h]) below[g][h] = 1;
  }
  return below;
}

// --- text format ----------------------------------------------------------

namespace {

bool is_term_punct(char ch) {
  return ch == '+' || ch == '*' || ch == '(' || ch == ')' || ch == '[' || ch == ']';
}

class TermParser {
 public:
  TermParser(std::string_view src, const Circuit& c, std::string where)
      : src_(src), c_(c), where_(std::move(where)) {}

  Term parse() {
    Term t = sum();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "' in term");
    return t;
  }

 private:
  Term sum() {
    std::vector<Term> args{product()};
    while (accept('+')) args.push_back(product());
    return args.size() == 1 ? std::move(args[0]) : Term::sum(std::move(args));
  }

  Term product() {
    std::vector<Term> args{atom()};
    while (accept('*')) args.push_back(atom());
    return args.size() == 1 ? std::move(args[0]) : Term::product(std::move(args));
  }

  Term atom() {
    skip_ws();
    if (accept('(')) {
      Term t = sum();
      if (!accept(')')) fail("missing ')' in term");
      return t;
    }
    if (accept('[')) {
      std::size_t end = src_.find(']', pos_);
      if (end == std::string_view::npos) fail("missing ']' in term");
      std::string name(src_.substr(pos_, end - pos_));
      pos_ = end + 1;
      auto e = c_.semiring().find(name);
      if (!e) fail("unknown element '" + name + "'");
      return Term::constant(*e);
    }
    std::size_t start = pos_;
    while (pos_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[pos_])) &&
           !is_term_punct(src_[pos_]))
      ++pos_;
    if (start == pos_) fail("expected gate id or [element] in term");
    std::string id(src_.substr(start, pos_ - start));
    auto g = c_.find(id);
    if (!g) fail("unknown gate '" + id + "'");
    return Term::ref(*g);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char ch) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(where_ + msg); }

  std::string_view src_;
  const Circuit& c_;
  std::string where_;
  std::size_t pos_ = 0;
};

std::string join_from(const std::vector<std::string>& tokens, std::size_t from) {
  std::string out;
  for (std::size_t i = from; i < tokens.size(); ++i) {
    if (i > from) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace

std::string circuit_semiring_name(std::string_view text) {
  detail::LineReader in(text);
  auto head = in.next();
  if (!head || head->tokens.size() != 3 || head->tokens[0] != "circuit" || head->tokens[1] != "over")
    throw ParseError(in.where() + "expected 'circuit over <semiring>'");
  return head->tokens[2];
}

Circuit parse_circuit(std::string_view text, std::shared_ptr<const FiniteSemiring> semiring) {
  const std::string over = circuit_semiring_name(text);
  if (over != semiring->name)
    throw ParseError("circuit is over '" + over + "' but the semiring is '" + semiring->name + "'");

  Circuit c(semiring);
  detail::LineReader in(text);
  in.next();

  // First pass: declare every gate so that right-hand sides may refer forward.
  struct Pending {
    GateId gate;
    std::vector<std::string> tokens;
    std::string where;
  };
  std::vector<Pending> pending;
  std::optional<std::string> output;
  while (auto line = in.next()) {
    const auto& t = line->tokens;
    if (t[0] == "gate") {
      if (t.size() < 4 || t[2] != "=") throw ParseError(in.where() + "expected 'gate <id> = <rhs>'");
      GateId g = c.add_gate(t[1], Rhs::constant(0));
      pending.push_back({g, t, in.where()});
    } else if (t[0] == "output") {
      if (t.size() != 2) throw ParseError(in.where() + "expected 'output <id>'");
      if (output) throw ParseError(in.where() + "second output declaration");
      output = t[1];
    } else {
      throw ParseError(in.where() + "unknown directive '" + t[0] + "'");
    }
  }

  for (auto& p : pending) {
    const auto& t = p.tokens;
    const std::string& op = t[3];
    auto gate_ref = [&](std::size_t i) {
      if (auto g = c.find(t[i])) return *g;
      throw ParseError(p.where + "unknown gate '" + t[i] + "'");
    };
    auto arity = [&](std::size_t k) {
      if (t.size() != 4 + k)
        throw ParseError(p.where + "'" + op + "' takes " + std::to_string(k) + " argument(s)");
    };
    if (op == "const") {
      arity(1);
      auto e = semiring->find(t[4]);
      if (!e) throw ParseError(p.where + "unknown element '" + t[4] + "'");
      c.set_rhs(p.gate, Rhs::constant(*e));
    } else if (op == "add") {
      arity(2);
      c.set_rhs(p.gate, Rhs::add(gate_ref(4), gate_ref(5)));
    } else if (op == "mul") {
      arity(2);
      c.set_rhs(p.gate, Rhs::mul(gate_ref(4), gate_ref(5)));
    } else if (op == "copy") {
      arity(1);
      c.set_rhs(p.gate, Rhs::copy(gate_ref(4)));
    } else if (op == "term") {
      if (t.size() < 5) throw ParseError(p.where + "empty term");
      std::string src = join_from(t, 4);
      c.set_rhs(p.gate, Rhs::general(TermParser(src, c, p.where).parse()));
    } else {
      throw ParseError(p.where + "unknown gate kind '" + op + "'");
    }
  }
  if (output) c.set_output(c.index_of(*output));
  c.validate();
  return c;
}

std::string term_to_string(const Circuit& c, const Term& t) {
  switch (t.kind) {
    case Term::Kind::Gate: return c.gate(t.gate).id;
    case Term::Kind::Const: return "[" + c.semiring().elements[t.value] + "]";
    case Term::Kind::Sum: {
      std::string out;
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) out += " + ";
        out += term_to_string(c, t.args[i]);
      }
      return out;
    }
    case Term::Kind::Product: {
      std::string out;
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) out += " * ";
        const bool paren = t.args[i].kind == Term::Kind::Sum && t.args[i].args.size() > 1;
        out += paren ? "(" + term_to_string(c, t.args[i]) + ")" : term_to_string(c, t.args[i]);
      }
      return out;
    }
  }
  return {};
}

std::string serialize_circuit(const Circuit& c) {
  std::ostringstream out;
  out << "circuit over " << c.semiring().name << '\n';
  for (const auto& g : c.gates()) {
    out << "gate " << g.id << " = ";
    const auto& r = g.rhs;
    switch (r.kind) {
      case Rhs::Kind::Const: out << "const " << c.semiring().elements[r.value]; break;
      case Rhs::Kind::Add: out << "add " << c.gate(r.left).id << ' ' << c.gate(r.right).id; break;
      case Rhs::Kind::Mul: out << "mul " << c.gate(r.left).id << ' ' << c.gate(r.right).id; break;
      case Rhs::Kind::Copy: out << "copy " << c.gate(r.left).id; break;
      case Rhs::Kind::General: out << "term " << term_to_string(c, *r.term); break;
    }
    out << '\n';
  }
  if (c.output()) out << "output " << c.gate(*c.output()).id << '\n';
  return out.str();
}

}  // namespace cep
