#include "cep/boolean.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "cep/catalog.hpp"
#include "text_util.hpp"

namespace cep {

std::optional<std::size_t> BoolCircuit::find(std::string_view id) const {
  for (std::size_t i = 0; i < gates.size(); ++i)
    if (gates[i].id == id) return i;
  return std::nullopt;
}

namespace {

std::vector<std::size_t> bool_inputs(const BoolGate& g) {
  switch (g.kind) {
    case BoolGate::Kind::Const: return {};
    case BoolGate::Kind::Not: return {g.left};
    default: return {g.left, g.right};
  }
}

}  // namespace

std::vector<std::size_t> BoolCircuit::topological_order() const {
  const std::size_t n = gates.size();
  std::vector<char> state(n, 0);
  std::vector<std::size_t> order;
  for (std::size_t root = 0; root < n; ++root) {
    if (state[root]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    state[root] = 1;
    while (!stack.empty()) {
      auto& [g, pos] = stack.back();
      auto ins = bool_inputs(gates[g]);
      if (pos < ins.size()) {
        const std::size_t next = ins[pos++];
        if (state[next] == 1)
          throw CycleError("cycle through boolean gate " + gates[next].id, {gates[next].id});
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

BoolCircuit parse_bool_circuit(std::string_view text) {
  detail::LineReader in(text);
  auto head = in.next();
  if (!head || head->tokens != std::vector<std::string>{"boolean", "circuit"})
    throw ParseError(in.where() + "expected 'boolean circuit'");

  BoolCircuit bc;
  std::map<std::string, std::size_t> index;
  std::vector<std::pair<std::vector<std::string>, std::string>> lines;
  std::optional<std::string> output;
  while (auto line = in.next()) {
    const auto& t = line->tokens;
    if (t[0] == "gate") {
      if (t.size() < 5 || t[2] != "=") throw ParseError(in.where() + "expected 'gate <id> = <op> ...'");
      if (!index.emplace(t[1], bc.gates.size()).second)
        throw ParseError(in.where() + "duplicate gate id '" + t[1] + "'");
      bc.gates.push_back({t[1], BoolGate::Kind::Const, false, 0, 0, std::nullopt});
      lines.emplace_back(t, in.where());
    } else if (t[0] == "output" && t.size() == 2) {
      output = t[1];
    } else {
      throw ParseError(in.where() + "unknown directive '" + t[0] + "'");
    }
  }

  for (std::size_t g = 0; g < lines.size(); ++g) {
    auto t = lines[g].first;
    const std::string& where = lines[g].second;
    auto& gate = bc.gates[g];
    if (t.size() >= 2 && t[t.size() - 2] == "layer") {
      try {
        gate.layer = std::stoul(t.back());
      } catch (const std::exception&) {
        throw ParseError(where + "bad layer number '" + t.back() + "'");
      }
      if (*gate.layer == 0) throw ParseError(where + "layers start at 1");
      t.resize(t.size() - 2);
    }
    auto ref = [&](std::size_t i) {
      auto it = index.find(t.at(i));
      if (it == index.end()) throw ParseError(where + "unknown gate '" + t[i] + "'");
      return it->second;
    };
    const std::string& op = t[3];
    const std::size_t args = t.size() - 4;
    if (op == "const" && args == 1 && (t[4] == "0" || t[4] == "1")) {
      gate.kind = BoolGate::Kind::Const;
      gate.value = t[4] == "1";
    } else if ((op == "and" || op == "or") && args == 2) {
      gate.kind = op == "and" ? BoolGate::Kind::And : BoolGate::Kind::Or;
      gate.left = ref(4);
      gate.right = ref(5);
    } else if (op == "not" && args == 1) {
      gate.kind = BoolGate::Kind::Not;
      gate.left = ref(4);
    } else {
      throw ParseError(where + "malformed boolean gate '" + gate.id + "'");
    }
  }
  if (output) {
    auto it = index.find(*output);
    if (it == index.end()) throw ParseError("unknown output gate '" + *output + "'");
    bc.output = it->second;
  }
  (void)bc.topological_order();
  return bc;
}

std::string serialize_bool_circuit(const BoolCircuit& bc) {
  std::ostringstream out;
  out << "boolean circuit\n";
  for (const auto& g : bc.gates) {
    out << "gate " << g.id << " = ";
    switch (g.kind) {
      case BoolGate::Kind::Const: out << "const " << (g.value ? 1 : 0); break;
      case BoolGate::Kind::And: out << "and " << bc.gates[g.left].id << ' ' << bc.gates[g.right].id; break;
      case BoolGate::Kind::Or: out << "or " << bc.gates[g.left].id << ' ' << bc.gates[g.right].id; break;
      case BoolGate::Kind::Not: out << "not " << bc.gates[g.left].id; break;
    }
    if (g.layer) out << " layer " << *g.layer;
    out << '\n';
  }
  if (bc.output) out << "output " << bc.gates[*bc.output].id << '\n';
  return out.str();
}

std::vector<bool> eval_bool(const BoolCircuit& bc) {
  std::vector<bool> v(bc.gates.size(), false);
  for (std::size_t g : bc.topological_order()) {
    const auto& gate = bc.gates[g];
    switch (gate.kind) {
      case BoolGate::Kind::Const: v[g] = gate.value; break;
      case BoolGate::Kind::And: v[g] = v[gate.left] && v[gate.right]; break;
      case BoolGate::Kind::Or: v[g] = v[gate.left] || v[gate.right]; break;
      case BoolGate::Kind::Not: v[g] = !v[gate.left]; break;
    }
  }
  return v;
}

Circuit reduce_boolean_cvp(const BoolCircuit& bc, std::uint32_t d) {
  if (d < 2) throw DomainError("reduce_boolean_cvp: d must be at least 2");
  auto zd = std::make_shared<const FiniteSemiring>(ring_zd(d));
  Circuit c(zd);
  for (const auto& g : bc.gates) c.add_gate(g.id, Rhs::constant(0));

  const Term one = Term::constant(1);
  const Term minus_one = Term::constant(d - 1);
  auto negate = [&](Term x) { return Term::sum({one, Term::product({minus_one, std::move(x)})}); };

  for (std::size_t g = 0; g < bc.gates.size(); ++g) {
    const auto& gate = bc.gates[g];
    switch (gate.kind) {
      case BoolGate::Kind::Const: c.set_rhs(g, Rhs::constant(gate.value ? 1 : 0)); break;
      case BoolGate::Kind::And: c.set_rhs(g, Rhs::mul(gate.left, gate.right)); break;
      case BoolGate::Kind::Not: c.set_rhs(g, Rhs::general(negate(Term::ref(gate.left)))); break;
      case BoolGate::Kind::Or:
        c.set_rhs(g, Rhs::general(negate(Term::product(
                         {negate(Term::ref(gate.left)), negate(Term::ref(gate.right))}))));
        break;
    }
  }
  if (bc.output) c.set_output(*bc.output);
  return normalize(c);
}

std::vector<std::size_t> check_layered(const BoolCircuit& bc) {
  if (!bc.output) throw DomainError("layered circuit needs an output gate");
  std::vector<std::size_t> layer(bc.gates.size(), 0);
  for (std::size_t g = 0; g < bc.gates.size(); ++g) {
    if (!bc.gates[g].layer) throw DomainError("gate '" + bc.gates[g].id + "' has no layer");
    layer[g] = *bc.gates[g].layer;
  }
  std::size_t top = *std::max_element(layer.begin(), layer.end());
  for (std::size_t g = 0; g < bc.gates.size(); ++g) {
    const auto& gate = bc.gates[g];
    if (gate.kind == BoolGate::Kind::Not)
      throw DomainError("gate '" + gate.id + "': negation has no monotone max-plus encoding");
    if ((gate.kind == BoolGate::Kind::Const) != (layer[g] == 1))
      throw DomainError("gate '" + gate.id + "': constants and only constants sit on layer 1");
    for (std::size_t in : bool_inputs(gate))
      if (layer[in] + 1 != layer[g])
        throw DomainError("wire " + bc.gates[in].id + " -> " + gate.id + " skips a layer");
  }
  if (layer[*bc.output] != top) throw DomainError("output gate is not on the top layer");
  return layer;
}

BoolCircuit layered(const BoolCircuit& bc) {
  if (!bc.output) throw DomainError("layered circuit needs an output gate");
  for (const auto& g : bc.gates)
    if (g.kind == BoolGate::Kind::Not)
      throw DomainError("gate '" + g.id + "': negation has no monotone max-plus encoding");

  // Keep only the cone of the output; other gates do not influence the result.
  std::vector<char> needed(bc.gates.size(), 0);
  std::vector<std::size_t> stack{*bc.output};
  needed[*bc.output] = 1;
  while (!stack.empty()) {
    auto g = stack.back();
    stack.pop_back();
    for (auto in : bool_inputs(bc.gates[g]))
      if (!needed[in]) {
        needed[in] = 1;
        stack.push_back(in);
      }
  }

  std::vector<std::size_t> level(bc.gates.size(), 0);
  const auto order = bc.topological_order();
  for (auto g : order) {
    if (!needed[g]) continue;
    std::size_t l = 1;
    for (auto in : bool_inputs(bc.gates[g])) l = std::max(l, level[in] + 1);
    level[g] = l;
  }

  BoolCircuit out;
  std::map<std::size_t, std::size_t> new_index;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> lifted;  // (gate, layer) -> copy
  auto at_layer = [&](std::size_t g, std::size_t want) {
    std::size_t cur = new_index.at(g);
    for (std::size_t l = level[g] + 1; l <= want; ++l) {
      auto key = std::make_pair(g, l);
      auto it = lifted.find(key);
      if (it == lifted.end()) {
        BoolGate copy{bc.gates[g].id + "@" + std::to_string(l), BoolGate::Kind::And, false, cur, cur, l};
        out.gates.push_back(copy);
        it = lifted.emplace(key, out.gates.size() - 1).first;
      }
      cur = it->second;
    }
    return cur;
  };
  for (auto g : order) {
    if (!needed[g]) continue;
    BoolGate gate = bc.gates[g];
    gate.layer = level[g];
    if (gate.kind != BoolGate::Kind::Const) {
      gate.left = at_layer(gate.left, level[g] - 1);
      gate.right = at_layer(gate.right, level[g] - 1);
    }
    out.gates.push_back(gate);
    new_index[g] = out.gates.size() - 1;
  }
  out.output = new_index.at(*bc.output);
  (void)check_layered(out);
  return out;
}

std::vector<BigInt> eval_maxplus(const MaxPlusCircuit& c) {
  std::vector<BigInt> v(c.gates.size());
  for (std::size_t g = 0; g < c.gates.size(); ++g) {
    const auto& gate = c.gates[g];
    switch (gate.kind) {
      case MaxPlusGate::Kind::Const: v[g] = gate.value; break;
      case MaxPlusGate::Kind::Max: v[g] = std::max(v[gate.left], v[gate.right]); break;
      case MaxPlusGate::Kind::Plus: v[g] = v[gate.left] + v[gate.right]; break;
    }
  }
  return v;
}

MaxPlusReduction reduce_cvp_maxplus(const BoolCircuit& bc) {
  MaxPlusReduction red;
  bool already = bc.output && std::all_of(bc.gates.begin(), bc.gates.end(),
                                          [](const BoolGate& g) { return g.layer.has_value(); });
  red.layered_source = already ? bc : layered(bc);
  const BoolCircuit& src = red.layered_source;
  const auto layer = check_layered(src);
  red.layers = layer[*src.output];

  auto pow2 = [](std::size_t k) { return BigInt(1) << k; };
  auto& gates = red.circuit.gates;
  std::size_t fresh = 0;
  auto add = [&](std::string id, MaxPlusGate::Kind kind, BigInt value, std::size_t l, std::size_t r) {
    gates.push_back({std::move(id), kind, std::move(value), l, r});
    return gates.size() - 1;
  };
  auto fresh_id = [&] { return "$" + std::to_string(fresh++); };

  red.gate_of.assign(src.gates.size(), 0);
  for (std::size_t g : src.topological_order()) {
    const auto& gate = src.gates[g];
    const std::size_t k = layer[g] - 1;  // layer of the inputs
    switch (gate.kind) {
      case BoolGate::Kind::Const:
        red.gate_of[g] = add(gate.id, MaxPlusGate::Kind::Const, gate.value ? 2 : 1, 0, 0);
        break;
      case BoolGate::Kind::And: {
        auto s = add(fresh_id(), MaxPlusGate::Kind::Plus, 0, red.gate_of[gate.left], red.gate_of[gate.right]);
        auto c = add(fresh_id(), MaxPlusGate::Kind::Const, pow2(k + 1) - 1, 0, 0);
        red.gate_of[g] = add(gate.id, MaxPlusGate::Kind::Max, 0, s, c);
        break;
      }
      case BoolGate::Kind::Or: {
        auto m = add(fresh_id(), MaxPlusGate::Kind::Max, 0, red.gate_of[gate.left], red.gate_of[gate.right]);
        auto c = add(fresh_id(), MaxPlusGate::Kind::Const, pow2(k), 0, 0);
        red.gate_of[g] = add(gate.id, MaxPlusGate::Kind::Plus, 0, m, c);
        break;
      }
      case BoolGate::Kind::Not: throw DomainError("negation is not supported over max-plus");
    }
  }
  red.circuit.output = red.gate_of[*src.output];

  const auto values = eval_maxplus(red.circuit);
  const auto truth = eval_bool(src);
  red.output_value = values[red.circuit.output];
  red.boolean_output = truth[*src.output];
  red.invariant_holds = true;
  for (std::size_t g = 0; g < src.gates.size(); ++g) {
    const BigInt expect = truth[g] ? pow2(layer[g]) : pow2(layer[g]) - 1;
    if (values[red.gate_of[g]] != expect) red.invariant_holds = false;
  }
  return red;
}

std::string serialize_maxplus(const MaxPlusCircuit& c) {
  std::ostringstream out;
  out << "circuit over (N,max,+)\n";
  for (const auto& g : c.gates) {
    out << "gate " << g.id << " = ";
    switch (g.kind) {
      case MaxPlusGate::Kind::Const: out << "const " << g.value; break;
      case MaxPlusGate::Kind::Max: out << "max " << c.gates[g.left].id << ' ' << c.gates[g.right].id; break;
      case MaxPlusGate::Kind::Plus: out << "plus " << c.gates[g.left].id << ' ' << c.gates[g.right].id; break;
    }
    out << '\n';
  }
  out << "output " << c.gates[c.output].id << '\n';
  return out.str();
}

}  // namespace cep
