#include "cep/lang.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "cep/powerset.hpp"
#include "text_util.hpp"

namespace cep {

// --- automata -------------------------------------------------------------

std::size_t Dfa::run(std::size_t from, std::span<const std::size_t> word) const {
  for (std::size_t a : word) from = delta[from][a];
  return from;
}

bool Dfa::accepts(std::span<const std::size_t> word) const { return final[run(initial, word)]; }

std::optional<std::size_t> Dfa::letter(std::string_view name) const {
  for (std::size_t i = 0; i < alphabet.size(); ++i)
    if (alphabet[i] == name) return i;
  return std::nullopt;
}

Dfa parse_dfa(std::string_view text) {
  detail::LineReader in(text);
  auto head = in.next();
  if (!head || head->tokens != std::vector<std::string>{"dfa"}) throw ParseError(in.where() + "expected 'dfa'");

  Dfa d;
  std::map<std::string, std::size_t> state, letter;
  std::optional<std::string> initial;
  std::vector<std::string> finals;
  std::vector<std::pair<std::vector<std::string>, std::string>> trans;
  bool have_alphabet = false, have_states = false;
  while (auto line = in.next()) {
    const auto& t = line->tokens;
    if (t[0] == "alphabet") {
      if (have_alphabet) throw ParseError(in.where() + "duplicate alphabet line");
      have_alphabet = true;
      for (std::size_t i = 1; i < t.size(); ++i) {
        if (!letter.emplace(t[i], d.alphabet.size()).second) throw ParseError(in.where() + "duplicate letter '" + t[i] + "'");
        d.alphabet.push_back(t[i]);
      }
    } else if (t[0] == "states") {
      if (have_states) throw ParseError(in.where() + "duplicate states line");
      have_states = true;
      for (std::size_t i = 1; i < t.size(); ++i) {
        if (!state.emplace(t[i], d.states.size()).second) throw ParseError(in.where() + "duplicate state '" + t[i] + "'");
        d.states.push_back(t[i]);
      }
    } else if (t[0] == "initial" && t.size() == 2) {
      initial = t[1];
    } else if (t[0] == "final") {
      finals.insert(finals.end(), t.begin() + 1, t.end());
    } else if (t[0] == "trans" && t.size() == 4) {
      trans.emplace_back(t, in.where());
    } else {
      throw ParseError(in.where() + "unknown or malformed directive '" + t[0] + "'");
    }
  }
  if (!have_states || d.states.empty()) throw ParseError("dfa: no states declared");
  if (!initial) throw ParseError("dfa: no initial state");
  auto find_state = [&](const std::string& s, const std::string& where) {
    auto it = state.find(s);
    if (it == state.end()) throw ParseError(where + "unknown state '" + s + "'");
    return it->second;
  };
  d.initial = find_state(*initial, "initial: ");
  d.final.assign(d.states.size(), 0);
  for (const auto& f : finals) d.final[find_state(f, "final: ")] = 1;

  constexpr std::size_t kNone = ~std::size_t{0};
  d.delta.assign(d.states.size(), std::vector<std::size_t>(d.alphabet.size(), kNone));
  for (const auto& [t, where] : trans) {
    const auto from = find_state(t[1], where);
    auto l = letter.find(t[2]);
    if (l == letter.end()) throw ParseError(where + "unknown letter '" + t[2] + "'");
    if (d.delta[from][l->second] != kNone) throw ParseError(where + "duplicate transition");
    d.delta[from][l->second] = find_state(t[3], where);
  }
  for (std::size_t q = 0; q < d.states.size(); ++q)
    for (std::size_t a = 0; a < d.alphabet.size(); ++a)
      if (d.delta[q][a] == kNone)
        throw ParseError("dfa: no transition from " + d.states[q] + " on " + d.alphabet[a]);
  return d;
}

std::string serialize_dfa(const Dfa& d) {
  std::ostringstream out;
  out << "dfa\nalphabet";
  for (const auto& a : d.alphabet) out << ' ' << a;
  out << "\nstates";
  for (const auto& s : d.states) out << ' ' << s;
  out << "\ninitial " << d.states[d.initial] << "\nfinal";
  for (std::size_t q = 0; q < d.states.size(); ++q)
    if (d.final[q]) out << ' ' << d.states[q];
  out << '\n';
  for (std::size_t q = 0; q < d.states.size(); ++q)
    for (std::size_t a = 0; a < d.alphabet.size(); ++a)
      out << "trans " << d.states[q] << ' ' << d.alphabet[a] << ' ' << d.states[d.delta[q][a]] << '\n';
  return out.str();
}

Dfa minimize(const Dfa& d) {
  const std::size_t k = d.alphabet.size();
  std::vector<std::size_t> reachable{d.initial};
  std::vector<char> seen(d.states.size(), 0);
  seen[d.initial] = 1;
  for (std::size_t i = 0; i < reachable.size(); ++i)
    for (std::size_t a = 0; a < k; ++a) {
      const auto q = d.delta[reachable[i]][a];
      if (!seen[q]) {
        seen[q] = 1;
        reachable.push_back(q);
      }
    }

  // Moore refinement over the reachable states.
  std::vector<std::size_t> block(d.states.size(), 0);
  for (auto q : reachable) block[q] = d.final[q] ? 1 : 0;
  std::size_t blocks = 0;
  while (true) {
    std::map<std::vector<std::size_t>, std::size_t> sig;
    std::vector<std::size_t> next(d.states.size(), 0);
    for (auto q : reachable) {
      std::vector<std::size_t> s{block[q]};
      for (std::size_t a = 0; a < k; ++a) s.push_back(block[d.delta[q][a]]);
      next[q] = sig.emplace(std::move(s), sig.size()).first->second;
    }
    const bool stable = sig.size() == blocks;
    blocks = sig.size();
    block = std::move(next);
    if (stable) break;
  }

  // Number the blocks in breadth-first order from the initial state.
  constexpr std::size_t kNone = ~std::size_t{0};
  std::vector<std::size_t> number(blocks, kNone), rep;
  number[block[d.initial]] = 0;
  rep.push_back(d.initial);
  for (std::size_t i = 0; i < rep.size(); ++i)
    for (std::size_t a = 0; a < k; ++a) {
      const auto q = d.delta[rep[i]][a];
      if (number[block[q]] == kNone) {
        number[block[q]] = rep.size();
        rep.push_back(q);
      }
    }

  Dfa m;
  m.alphabet = d.alphabet;
  m.initial = 0;
  for (auto q : rep) {
    m.states.push_back(d.states[q]);
    m.final.push_back(d.final[q]);
    std::vector<std::size_t> row;
    for (std::size_t a = 0; a < k; ++a) row.push_back(number[block[d.delta[q][a]]]);
    m.delta.push_back(std::move(row));
  }
  return m;
}

Elem RecognizedLanguage::image(std::span<const std::size_t> word) const {
  Elem m = identity;
  for (auto a : word) m = monoid(m, letter_image.at(a));
  return m;
}

RecognizedLanguage syntactic_monoid(const Dfa& d) {
  if (d.alphabet.empty()) throw DomainError("syntactic_monoid: empty alphabet");
  RecognizedLanguage r;
  r.minimal = minimize(d);
  const Dfa& md = r.minimal;
  const std::size_t n = md.states.size();

  std::vector<std::size_t> letters(md.alphabet.size());
  std::iota(letters.begin(), letters.end(), 0);
  std::sort(letters.begin(), letters.end(), [&](auto x, auto y) { return md.alphabet[x] < md.alphabet[y]; });
  const bool short_names = std::all_of(md.alphabet.begin(), md.alphabet.end(), [](const auto& s) { return s.size() == 1; });

  std::map<std::vector<std::size_t>, Elem> index;
  std::vector<std::size_t> id(n);
  std::iota(id.begin(), id.end(), 0);
  index.emplace(id, 0);
  r.action.push_back(id);
  r.shortest_word.push_back({});
  for (std::size_t i = 0; i < r.action.size(); ++i)
    for (auto a : letters) {
      std::vector<std::size_t> next(n);
      for (std::size_t q = 0; q < n; ++q) next[q] = md.delta[r.action[i][q]][a];
      if (index.emplace(next, static_cast<Elem>(r.action.size())).second) {
        Letters w = r.shortest_word[i];
        w.push_back(a);
        r.action.push_back(std::move(next));
        r.shortest_word.push_back(std::move(w));
      }
    }

  const auto size = r.action.size();
  r.monoid.name = "M";
  for (std::size_t i = 0; i < size; ++i) {
    if (i == 0) {
      r.monoid.elements.push_back("1");
      continue;
    }
    std::string name;
    for (std::size_t j = 0; j < r.shortest_word[i].size(); ++j)
      name += (j && !short_names ? "." : "") + md.alphabet[r.shortest_word[i][j]];
    r.monoid.elements.push_back(name);
  }
  r.monoid.op = Table(size);
  std::vector<std::size_t> comp(n);
  for (std::size_t x = 0; x < size; ++x)
    for (std::size_t y = 0; y < size; ++y) {
      for (std::size_t q = 0; q < n; ++q) comp[q] = r.action[y][r.action[x][q]];
      r.monoid.op.at(static_cast<Elem>(x), static_cast<Elem>(y)) = index.at(comp);
    }
  r.identity = 0;
  for (std::size_t a = 0; a < md.alphabet.size(); ++a) {
    std::vector<std::size_t> act(n);
    for (std::size_t q = 0; q < n; ++q) act[q] = md.delta[q][a];
    r.letter_image.push_back(index.at(act));
  }
  for (Elem m = 0; m < size; ++m)
    if (md.final[r.action[m][md.initial]]) r.accepting.push_back(m);
  return r;
}

// --- the ~F congruence ----------------------------------------------------

namespace {

std::string subset_name(const FiniteSemigroup& m, std::uint64_t mask) {
  std::string s = "{";
  bool first = true;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (mask >> i & 1) {
      s += (first ? "" : ",") + m.elements[i];
      first = false;
    }
  return s + "}";
}

}  // namespace

FCongruence f_congruence(const RecognizedLanguage& r, std::size_t cap) {
  const auto& m = r.monoid;
  const std::size_t k = m.size();
  if (k > cap || k > 20)
    throw DomainError("f_congruence: monoid has " + std::to_string(k) + " elements, cap is " + std::to_string(cap));
  const std::uint64_t full = (std::uint64_t{1} << k) - 1;
  const std::size_t words = (k * k + 63) / 64;

  using Bits = std::vector<std::uint64_t>;
  std::vector<Bits> single(k, Bits(words, 0));
  for (Elem a = 0; a < k; ++a)
    for (Elem l = 0; l < k; ++l)
      for (Elem rr = 0; rr < k; ++rr)
        if (r.in_f(m(m(l, a), rr))) {
          const std::size_t bit = l * k + rr;
          single[a][bit / 64] |= std::uint64_t{1} << (bit % 64);
        }

  std::vector<Bits> profile(full + 1, Bits(words, 0));
  FCongruence fc;
  fc.class_of.assign(full + 1, 0);
  std::map<Bits, std::uint32_t> ids;
  for (std::uint64_t mask = 1; mask <= full; ++mask) {
    const auto low = std::countr_zero(mask);
    profile[mask] = profile[mask & (mask - 1)];
    for (std::size_t w = 0; w < words; ++w) profile[mask][w] |= single[low][w];
    auto [it, fresh] = ids.emplace(profile[mask], static_cast<std::uint32_t>(ids.size()));
    fc.class_of[mask] = it->second;
    if (fresh) fc.representative.push_back(0);
    fc.representative[it->second] |= mask;
  }
  for (std::uint32_t c = 0; c < fc.representative.size(); ++c)
    if (fc.class_of[fc.representative[c]] != c)
      throw DomainError("f_congruence: the union of a class left the class");

  // left[a][B] = a·B as a mask
  std::vector<std::vector<std::uint64_t>> left(k, std::vector<std::uint64_t>(full + 1, 0));
  for (Elem a = 0; a < k; ++a)
    for (std::uint64_t mask = 1; mask <= full; ++mask)
      left[a][mask] = left[a][mask & (mask - 1)] | (std::uint64_t{1} << m(a, static_cast<Elem>(std::countr_zero(mask))));
  auto setprod = [&](std::uint64_t x, std::uint64_t y) {
    std::uint64_t out = 0;
    for (; x; x &= x - 1) out |= left[std::countr_zero(x)][y];
    return out;
  };

  const std::size_t classes = fc.representative.size();
  auto& q = fc.quotient;
  q.name = "P(M)/~F";
  for (auto rep : fc.representative) q.elements.push_back(subset_name(m, rep));
  q.add = Table(classes);
  q.mul = Table(classes);
  for (Elem x = 0; x < classes; ++x)
    for (Elem y = 0; y < classes; ++y) {
      q.add.at(x, y) = fc.class_of[fc.representative[x] | fc.representative[y]];
      q.mul.at(x, y) = fc.class_of[setprod(fc.representative[x], fc.representative[y])];
    }

  for (std::uint64_t a = 1; a <= full; ++a)
    for (std::uint64_t b = 1; b <= full; ++b) {
      const Elem ca = fc.class_of[a], cb = fc.class_of[b];
      if (fc.class_of[a | b] != q.add(ca, cb) || fc.class_of[setprod(a, b)] != q.mul(ca, cb))
        throw DomainError("f_congruence: operations are not well defined on classes of " + subset_name(m, a) +
                          " and " + subset_name(m, b));
    }
  return fc;
}

QuotientFreeness check_quotient_freeness(const RecognizedLanguage& r, std::size_t cap) {
  QuotientFreeness out;
  const auto& m = r.monoid;
  const ElemSet e_set = idempotents(m);
  for (Elem s = 0; s < m.size() && out.implication_holds; ++s)
    for (Elem t = 0; t < m.size() && out.implication_holds; ++t) {
      if (!r.in_f(m(s, t))) continue;
      for (Elem e : e_set)
        if (!r.in_f(m(m(s, e), t))) {
          out.implication_holds = false;
          out.counterexample = std::make_tuple(s, e, t);
          break;
        }
    }
  if (m.size() <= cap) out.quotient_free = is_zero_one_free(f_congruence(r, cap).quotient);
  return out;
}

PcfgVerdict pcfg_verdict(const Dfa& d, std::size_t cap) {
  const auto r = syntactic_monoid(d);
  PcfgVerdict v;
  v.freeness = check_quotient_freeness(r, cap);
  v.monoid_solvable = is_solvable(r.monoid);
  if (r.monoid.size() <= cap) {
    v.report = classify(f_congruence(r, cap).quotient);
    v.verdict = v.report->verdict;
    v.reason = "classification of the quotient P(M)/~F with " + std::to_string(v.report->size) + " elements";
    return v;
  }
  if (!v.freeness.implication_holds) {
    v.verdict = Verdict::PComplete;
    v.reason = "quotient is not {0,1}-free: some st in F has set outside F";
  } else if (!v.monoid_solvable) {
    v.verdict = Verdict::PComplete;
    v.reason = "M is not solvable and embeds into the quotient through singletons";
  } else {
    v.reason = "monoid has " + std::to_string(r.monoid.size()) + " elements, above the cap " + std::to_string(cap) +
               "; the quotient is {0,1}-free but its solvability was not computed";
  }
  return v;
}

// --- grammars -------------------------------------------------------------

std::optional<std::size_t> Grammar::nonterminal(std::string_view name) const {
  for (std::size_t i = 0; i < nonterminals.size(); ++i)
    if (nonterminals[i] == name) return i;
  return std::nullopt;
}

void validate_slp(const Grammar& g) {
  const std::size_t n = g.nonterminals.size();
  if (g.slp.size() != n) throw DomainError("grammar: straight-line marks missing");
  std::vector<char> state(n, 0);
  std::vector<std::size_t> path;
  std::function<void(std::size_t)> visit = [&](std::size_t a) {
    state[a] = 1;
    path.push_back(a);
    for (const auto& s : g.productions[g.slp[a]].rhs) {
      if (s.terminal) continue;
      if (state[s.index] == 1) {
        std::vector<std::string> cycle;
        auto it = std::find(path.begin(), path.end(), s.index);
        for (; it != path.end(); ++it) cycle.push_back(g.nonterminals[*it]);
        cycle.push_back(g.nonterminals[s.index]);
        std::string text;
        for (const auto& c : cycle) text += (text.empty() ? "" : " -> ") + c;
        throw CycleError("grammar: marked productions are cyclic: " + text, cycle);
      }
      if (state[s.index] == 0) visit(s.index);
    }
    path.pop_back();
    state[a] = 2;
  };
  for (std::size_t a = 0; a < n; ++a)
    if (state[a] == 0) visit(a);
}

Grammar parse_grammar(std::string_view text) {
  detail::LineReader in(text);
  auto head = in.next();
  if (!head || head->tokens != std::vector<std::string>{"grammar"}) throw ParseError(in.where() + "expected 'grammar'");

  Grammar g;
  std::optional<std::string> start;
  struct Raw {
    std::string lhs;
    bool marked;
    std::vector<std::string> rhs;
    std::string where;
  };
  std::vector<Raw> raw;
  std::map<std::string, std::size_t> nt;
  while (auto line = in.next()) {
    const auto& t = line->tokens;
    if (t[0] == "start") {
      if (t.size() != 2) throw ParseError(in.where() + "expected 'start <symbol>'");
      start = t[1];
      continue;
    }
    std::size_t arrow = 1;
    std::string lhs = t[0];
    bool marked = false;
    if (lhs == "!" && t.size() > 1) {
      lhs = t[1];
      marked = true;
      arrow = 2;
    } else if (lhs.size() > 1 && lhs[0] == '!') {
      lhs = lhs.substr(1);
      marked = true;
    }
    if (t.size() <= arrow || t[arrow] != "->") throw ParseError(in.where() + "expected '<A> -> <symbols>'");
    if (nt.emplace(lhs, g.nonterminals.size()).second) g.nonterminals.push_back(lhs);
    raw.push_back({lhs, marked, {t.begin() + arrow + 1, t.end()}, in.where()});
  }
  if (!start) throw ParseError("grammar: no start symbol");
  auto s = nt.find(*start);
  if (s == nt.end()) throw ParseError("grammar: start symbol '" + *start + "' has no productions");
  g.start = s->second;

  std::map<std::string, std::size_t> term;
  constexpr std::size_t kNone = ~std::size_t{0};
  g.slp.assign(g.nonterminals.size(), kNone);
  for (const auto& p : raw) {
    Production prod;
    prod.lhs = nt.at(p.lhs);
    prod.marked = p.marked;
    for (const auto& sym : p.rhs) {
      if (sym == "_") continue;
      if (sym == "->") throw ParseError(p.where + "unexpected '->'");
      auto it = nt.find(sym);
      if (it != nt.end()) {
        prod.rhs.push_back({false, it->second});
      } else {
        auto [tt, fresh] = term.emplace(sym, g.terminals.size());
        if (fresh) g.terminals.push_back(sym);
        prod.rhs.push_back({true, tt->second});
      }
    }
    if (p.marked) {
      if (g.slp[prod.lhs] != kNone)
        throw ParseError(p.where + "nonterminal " + p.lhs + " has more than one marked production");
      g.slp[prod.lhs] = g.productions.size();
    }
    g.productions.push_back(std::move(prod));
  }
  for (std::size_t a = 0; a < g.nonterminals.size(); ++a)
    if (g.slp[a] == kNone) throw ParseError("grammar: nonterminal " + g.nonterminals[a] + " has no marked production");
  validate_slp(g);
  return g;
}

std::string serialize_grammar(const Grammar& g) {
  std::ostringstream out;
  out << "grammar\nstart " << g.nonterminals[g.start] << '\n';
  for (const auto& p : g.productions) {
    out << (p.marked ? "!" : "") << g.nonterminals[p.lhs] << " ->";
    if (p.rhs.empty()) out << " _";
    for (const auto& s : p.rhs) out << ' ' << (s.terminal ? g.terminals[s.index] : g.nonterminals[s.index]);
    out << '\n';
  }
  return out.str();
}

std::optional<std::vector<std::string>> slp_word(const Grammar& g, std::size_t a, std::size_t max_length) {
  std::vector<std::optional<std::size_t>> length(g.nonterminals.size());
  std::function<std::size_t(std::size_t)> len = [&](std::size_t x) -> std::size_t {
    if (length[x]) return *length[x];
    std::size_t total = 0;
    for (const auto& s : g.productions[g.slp[x]].rhs) total = std::min(max_length + 1, total + (s.terminal ? 1 : len(s.index)));
    length[x] = total;
    return total;
  };
  if (len(a) > max_length) return std::nullopt;
  std::vector<std::string> out;
  std::function<void(std::size_t)> expand = [&](std::size_t x) {
    for (const auto& s : g.productions[g.slp[x]].rhs) {
      if (s.terminal)
        out.push_back(g.terminals[s.index]);
      else
        expand(s.index);
    }
  };
  expand(a);
  return out;
}

namespace {

std::vector<Elem> terminal_images(const Grammar& g, const RecognizedLanguage& r) {
  std::vector<Elem> out;
  for (const auto& t : g.terminals) {
    auto l = r.minimal.letter(t);
    if (!l) throw DomainError("terminal '" + t + "' is not a letter of the automaton");
    out.push_back(r.letter_image[*l]);
  }
  return out;
}

std::vector<Elem> slp_images(const Grammar& g, const RecognizedLanguage& r, const std::vector<Elem>& timg) {
  std::vector<std::optional<Elem>> memo(g.nonterminals.size());
  std::function<Elem(std::size_t)> image = [&](std::size_t a) -> Elem {
    if (memo[a]) return *memo[a];
    Elem m = r.identity;
    for (const auto& s : g.productions[g.slp[a]].rhs) m = r.monoid(m, s.terminal ? timg[s.index] : image(s.index));
    memo[a] = m;
    return m;
  };
  std::vector<Elem> out;
  for (std::size_t a = 0; a < g.nonterminals.size(); ++a) out.push_back(image(a));
  return out;
}

}  // namespace

Elem slp_image(const Grammar& g, const RecognizedLanguage& r, std::size_t nonterminal) {
  validate_slp(g);
  return slp_images(g, r, terminal_images(g, r)).at(nonterminal);
}

Intersection intersect(const Grammar& g, const Dfa& d, bool want_witness, std::size_t witness_cap) {
  validate_slp(g);
  const auto r = syntactic_monoid(d);
  const auto timg = terminal_images(g, r);
  const std::size_t k = r.monoid.size();
  const std::size_t nv = g.nonterminals.size();
  const auto& m = r.monoid;

  using Set = std::vector<char>;
  auto apply = [&](const Production& p, const std::vector<Set>& x) {
    Set cur(k, 0);
    cur[r.identity] = 1;
    for (const auto& s : p.rhs) {
      Set next(k, 0);
      for (Elem a = 0; a < k; ++a) {
        if (!cur[a]) continue;
        if (s.terminal) {
          next[m(a, timg[s.index])] = 1;
        } else {
          for (Elem b = 0; b < k; ++b)
            if (x[s.index][b]) next[m(a, b)] = 1;
        }
      }
      cur = std::move(next);
    }
    return cur;
  };

  Intersection res;
  const auto seeds = slp_images(g, r, timg);
  std::vector<Set> x(nv, Set(k, 0));
  for (std::size_t a = 0; a < nv; ++a) {
    x[a][seeds[a]] = 1;
    res.seeds.push_back({seeds[a]});
  }

  std::vector<std::vector<std::size_t>> users(nv);
  for (std::size_t p = 0; p < g.productions.size(); ++p)
    for (const auto& s : g.productions[p].rhs)
      if (!s.terminal) users[s.index].push_back(p);
  std::deque<std::size_t> work(g.productions.size());
  std::iota(work.begin(), work.end(), 0);
  std::vector<char> queued(g.productions.size(), 1);
  while (!work.empty()) {
    const auto p = work.front();
    work.pop_front();
    queued[p] = 0;
    const auto lhs = g.productions[p].lhs;
    const Set got = apply(g.productions[p], x);
    bool grew = false;
    for (Elem a = 0; a < k; ++a)
      if (got[a] && !x[lhs][a]) {
        x[lhs][a] = 1;
        ++res.growth_events;
        grew = true;
      }
    if (grew)
      for (auto u : users[lhs])
        if (!queued[u]) {
          queued[u] = 1;
          work.push_back(u);
        }
  }
  if (res.growth_events > nv * k) throw std::logic_error("intersect: fixpoint grew beyond |V|·|M|");

  for (std::size_t a = 0; a < nv; ++a) {
    ElemSet s;
    for (Elem e = 0; e < k; ++e)
      if (x[a][e]) s.push_back(e);
    res.fixpoint.push_back(std::move(s));
  }
  for (Elem e : res.fixpoint[g.start]) res.nonempty = res.nonempty || r.in_f(e);
  if (!want_witness || !res.nonempty) return res;

  // Witness: iterate from the empty sets, remembering how each element first
  // appeared; children always come from an earlier round.
  struct Origin {
    std::size_t production;
    std::vector<Elem> children;  // one per nonterminal occurrence
  };
  std::vector<std::vector<std::optional<Origin>>> origin(nv, std::vector<std::optional<Origin>>(k));
  std::vector<Set> y(nv, Set(k, 0));
  for (bool changed = true; changed;) {
    changed = false;
    const auto snapshot = y;
    for (std::size_t p = 0; p < g.productions.size(); ++p) {
      const auto& prod = g.productions[p];
      // layer[i][e] = (previous element, chosen child) reaching e after i symbols
      std::vector<std::map<Elem, std::pair<Elem, Elem>>> layer(prod.rhs.size() + 1);
      layer[0].emplace(r.identity, std::make_pair(r.identity, r.identity));
      for (std::size_t i = 0; i < prod.rhs.size(); ++i) {
        const auto& s = prod.rhs[i];
        for (const auto& [a, _] : layer[i]) {
          if (s.terminal) {
            layer[i + 1].emplace(m(a, timg[s.index]), std::make_pair(a, a));
          } else {
            for (Elem b = 0; b < k; ++b)
              if (snapshot[s.index][b]) layer[i + 1].emplace(m(a, b), std::make_pair(a, b));
          }
        }
      }
      for (const auto& [e, _] : layer.back()) {
        if (y[prod.lhs][e]) continue;
        Origin o{p, {}};
        Elem cur = e;
        for (std::size_t i = prod.rhs.size(); i > 0; --i) {
          const auto [prev, child] = layer[i].at(cur);
          if (!prod.rhs[i - 1].terminal) o.children.push_back(child);
          cur = prev;
        }
        std::reverse(o.children.begin(), o.children.end());
        origin[prod.lhs][e] = std::move(o);
        y[prod.lhs][e] = 1;
        changed = true;
      }
    }
  }

  Elem target = 0;
  for (Elem e : res.fixpoint[g.start])
    if (r.in_f(e)) {
      target = e;
      break;
    }
  std::vector<std::string> word;
  std::function<bool(std::size_t, Elem)> expand = [&](std::size_t a, Elem e) {
    const auto& o = *origin[a][e];
    std::size_t c = 0;
    for (const auto& s : g.productions[o.production].rhs) {
      if (s.terminal) {
        word.push_back(g.terminals[s.index]);
        if (word.size() > witness_cap) return false;
      } else if (!expand(s.index, o.children[c++])) {
        return false;
      }
    }
    return true;
  };
  if (expand(g.start, target)) res.witness = std::move(word);
  return res;
}

ProductEmptiness intersect_by_product(const Grammar& g, const Dfa& d) {
  const std::size_t n = d.states.size();
  const std::size_t nv = g.nonterminals.size();
  using Rel = std::vector<std::vector<char>>;
  std::vector<std::size_t> letter;
  for (const auto& t : g.terminals) {
    auto l = d.letter(t);
    if (!l) throw DomainError("terminal '" + t + "' is not a letter of the automaton");
    letter.push_back(*l);
  }
  Rel identity(n, std::vector<char>(n, 0));
  for (std::size_t q = 0; q < n; ++q) identity[q][q] = 1;

  ProductEmptiness out;
  out.reach.assign(nv, Rel(n, std::vector<char>(n, 0)));
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& p : g.productions) {
      Rel cur = identity;
      for (const auto& s : p.rhs) {
        Rel next(n, std::vector<char>(n, 0));
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b) {
            if (!cur[a][b]) continue;
            if (s.terminal) {
              next[a][d.delta[b][letter[s.index]]] = 1;
            } else {
              for (std::size_t c = 0; c < n; ++c)
                if (out.reach[s.index][b][c]) next[a][c] = 1;
            }
          }
        cur = std::move(next);
      }
      auto& mine = out.reach[p.lhs];
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          if (cur[a][b] && !mine[a][b]) {
            mine[a][b] = 1;
            changed = true;
          }
    }
  }
  for (std::size_t q = 0; q < n; ++q) out.nonempty = out.nonempty || (out.reach[g.start][d.initial][q] && d.final[q]);
  return out;
}

Grammar circuit_to_grammar(const Circuit& c, const RecognizedLanguage& r) {
  const std::size_t k = r.monoid.size();
  if (k >= 64 || c.semiring().size() != (std::uint64_t{1} << k) - 1)
    throw DomainError("circuit_to_grammar: circuit is not over the power semiring of the monoid");
  const Circuit n = normalize(c);
  if (!n.output()) throw DomainError("circuit_to_grammar: circuit has no output gate");

  Grammar g;
  g.terminals = r.minimal.alphabet;
  for (const auto& gate : n.gates()) g.nonterminals.push_back(gate.id);
  g.start = *n.output();
  g.slp.assign(n.size(), 0);
  auto add = [&](std::size_t lhs, std::vector<Symbol> rhs, bool marked) {
    if (marked) g.slp[lhs] = g.productions.size();
    g.productions.push_back({lhs, std::move(rhs), marked});
  };
  for (GateId a = 0; a < n.size(); ++a) {
    const Rhs& rhs = n.rhs(a);
    switch (rhs.kind) {
      case Rhs::Kind::Const: {
        bool first = true;
        const auto mask = subset_mask(rhs.value);
        for (Elem e = 0; e < k; ++e) {
          if (!(mask >> e & 1)) continue;
          std::vector<Symbol> word;
          for (auto l : r.shortest_word[e]) word.push_back({true, l});
          add(a, std::move(word), first);
          first = false;
        }
        break;
      }
      case Rhs::Kind::Add:
        add(a, {{false, rhs.left}}, true);
        add(a, {{false, rhs.right}}, false);
        break;
      case Rhs::Kind::Mul: add(a, {{false, rhs.left}, {false, rhs.right}}, true); break;
      default: break;
    }
  }
  validate_slp(g);
  return g;
}

Circuit grammar_to_circuit(const Grammar& g, const RecognizedLanguage& r) {
  validate_slp(g);
  const auto timg = terminal_images(g, r);
  auto power = std::make_shared<const FiniteSemiring>(build_power(r.monoid));
  const std::size_t nv = g.nonterminals.size();
  const std::size_t layers = nv * r.monoid.size();
  auto singleton = [&](Elem e) { return subset_elem(std::uint64_t{1} << e); };

  // Product term for the right-hand side; `gate_of` maps nonterminals.
  auto product_term = [&](const Production& p, const std::vector<GateId>& gate_of) {
    std::vector<Term> parts;
    std::optional<Elem> run;
    for (const auto& s : p.rhs) {
      if (s.terminal) {
        run = r.monoid(run ? *run : r.identity, timg[s.index]);
        continue;
      }
      if (run) parts.push_back(Term::constant(singleton(*run)));
      run.reset();
      parts.push_back(Term::ref(gate_of[s.index]));
    }
    if (run || parts.empty()) parts.push_back(Term::constant(singleton(run ? *run : r.identity)));
    return parts.size() == 1 ? parts[0] : Term::product(std::move(parts));
  };
  auto as_rhs = [](Term t) {
    if (t.kind == Term::Kind::Const) return Rhs::constant(t.value);
    if (t.kind == Term::Kind::Gate) return Rhs::copy(t.gate);
    return Rhs::general(std::move(t));
  };

  Circuit c(power);
  std::vector<GateId> prev(nv);
  for (std::size_t a = 0; a < nv; ++a) prev[a] = c.add_gate(g.nonterminals[a] + "#slp", Rhs::constant(0));
  for (std::size_t a = 0; a < nv; ++a) c.set_rhs(prev[a], as_rhs(product_term(g.productions[g.slp[a]], prev)));
  for (std::size_t layer = 1; layer <= layers; ++layer) {
    std::vector<GateId> cur(nv);
    for (std::size_t a = 0; a < nv; ++a)
      cur[a] = c.add_gate(g.nonterminals[a] + "@" + std::to_string(layer), Rhs::constant(0));
    std::vector<std::vector<Term>> sums(nv);
    for (std::size_t a = 0; a < nv; ++a) sums[a].push_back(Term::ref(prev[a]));
    for (const auto& p : g.productions) sums[p.lhs].push_back(product_term(p, prev));
    for (std::size_t a = 0; a < nv; ++a) c.set_rhs(cur[a], Rhs::general(Term::sum(std::move(sums[a]))));
    prev = std::move(cur);
  }
  c.set_output(prev[g.start]);
  return normalize(c);
}

Grammar padding_gadget(const Grammar& g, const std::vector<std::string>& alphabet) {
  Grammar out;
  out.nonterminals = g.nonterminals;
  std::string x = "X";
  while (out.nonterminal(x)) x += "'";
  const std::size_t xi = out.nonterminals.size();
  out.nonterminals.push_back(x);
  out.terminals = alphabet;
  out.start = g.start;
  for (const auto& p : g.productions) {
    Production q = p;
    for (auto& s : q.rhs)
      if (s.terminal) s = {false, xi};
    out.productions.push_back(std::move(q));
  }
  out.productions.push_back({xi, {}, true});
  for (std::size_t a = 0; a < alphabet.size(); ++a) out.productions.push_back({xi, {{true, a}, {false, xi}}, false});
  out.slp.assign(out.nonterminals.size(), 0);
  for (std::size_t i = 0; i < out.productions.size(); ++i)
    if (out.productions[i].marked) out.slp[out.productions[i].lhs] = i;
  validate_slp(out);
  return out;
}

}  // namespace cep
