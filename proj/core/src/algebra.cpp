#include "cep/algebra.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "text_util.hpp"

namespace cep {

namespace {

std::optional<Elem> find_name(const std::vector<std::string>& names, std::string_view name) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<Elem>(i);
  return std::nullopt;
}

void check_table(const Table& t, std::size_t n, std::string_view what) {
  if (t.order() != n)
    throw ParseError(std::string(what) + " table has order " + std::to_string(t.order()) +
                     ", expected " + std::to_string(n));
  for (Elem v : t.raw())
    if (v >= n) throw ParseError(std::string(what) + " table entry out of range");
}

void check_names(const std::vector<std::string>& names) {
  if (names.empty()) throw ParseError("structure needs at least one element");
  std::vector<std::string> sorted = names;
  std::sort(sorted.begin(), sorted.end());
  auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end()) throw ParseError("duplicate element name '" + *dup + "'");
}

// Reads `n*n` element names following a keyword line.
Table read_table(detail::LineReader& in, const std::vector<std::string>& names,
                 std::string_view keyword) {
  auto line = in.next();
  if (!line || line->tokens.size() != 1 || line->tokens[0] != keyword)
    throw ParseError(in.where() + "expected '" + std::string(keyword) + "'");
  const std::size_t n = names.size();
  std::unordered_map<std::string, Elem> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(names[i], static_cast<Elem>(i));

  Table t(n);
  std::size_t filled = 0;
  while (filled < n * n) {
    auto row = in.next();
    if (!row) throw ParseError("unexpected end of input inside '" + std::string(keyword) + "' table");
    for (const auto& tok : row->tokens) {
      if (filled == n * n) throw ParseError(in.where() + "too many entries in table");
      auto it = index.find(tok);
      if (it == index.end()) throw ParseError(in.where() + "unknown element '" + tok + "'");
      t.at(static_cast<Elem>(filled / n), static_cast<Elem>(filled % n)) = it->second;
      ++filled;
    }
  }
  return t;
}

std::pair<std::string, std::vector<std::string>> read_header(detail::LineReader& in,
                                                             std::string_view kind) {
  auto head = in.next();
  if (!head || head->tokens.size() != 2 || head->tokens[0] != kind)
    throw ParseError(in.where() + "expected '" + std::string(kind) + " <name>'");
  auto elems = in.next();
  if (!elems || elems->tokens.empty() || elems->tokens[0] != "elements")
    throw ParseError(in.where() + "expected 'elements <e1> ... <en>'");
  std::vector<std::string> names(elems->tokens.begin() + 1, elems->tokens.end());
  check_names(names);
  return {head->tokens[1], std::move(names)};
}

void write_table(std::ostringstream& out, const Table& t, const std::vector<std::string>& names) {
  std::size_t width = 0;
  for (const auto& n : names) width = std::max(width, n.size());
  for (std::size_t a = 0; a < names.size(); ++a) {
    for (std::size_t b = 0; b < names.size(); ++b) {
      const auto& s = names[t(static_cast<Elem>(a), static_cast<Elem>(b))];
      if (b) out << ' ';
      out << s;
      if (b + 1 < names.size()) out << std::string(width - s.size(), ' ');
    }
    out << '\n';
  }
}

std::uint64_t lcm64(std::uint64_t a, std::uint64_t b) { return std::lcm(a, b); }

}  // namespace

// --- element lookup -------------------------------------------------------

std::optional<Elem> FiniteSemigroup::find(std::string_view element) const {
  return find_name(elements, element);
}

Elem FiniteSemigroup::index_of(std::string_view element) const {
  if (auto e = find(element)) return *e;
  throw ParseError("unknown element '" + std::string(element) + "' in " + name);
}

std::optional<Elem> FiniteSemiring::find(std::string_view element) const {
  return find_name(elements, element);
}

Elem FiniteSemiring::index_of(std::string_view element) const {
  if (auto e = find(element)) return *e;
  throw ParseError("unknown element '" + std::string(element) + "' in " + name);
}

FiniteSemigroup FiniteSemiring::additive() const { return {name + "_+", elements, add}; }
FiniteSemigroup FiniteSemiring::multiplicative() const { return {name + "_*", elements, mul}; }

// --- validation -----------------------------------------------------------

void check_shape(const FiniteSemigroup& sg) {
  check_names(sg.elements);
  check_table(sg.op, sg.size(), "op");
}

void check_shape(const FiniteSemiring& sr) {
  check_names(sr.elements);
  check_table(sr.add, sr.size(), "add");
  check_table(sr.mul, sr.size(), "mul");
}

ValidationReport validate_semigroup(const FiniteSemigroup& sg) {
  check_shape(sg);
  ValidationReport report;
  const auto n = static_cast<Elem>(sg.size());
  for (Elem a = 0; a < n; ++a)
    for (Elem b = 0; b < n; ++b)
      for (Elem c = 0; c < n; ++c)
        if (sg(sg(a, b), c) != sg(a, sg(b, c))) {
          report.violations.push_back({"associativity", a, b, c});
          return report;
        }
  return report;
}

ValidationReport validate_semiring(const FiniteSemiring& sr) {
  check_shape(sr);
  ValidationReport report;
  const auto n = static_cast<Elem>(sr.size());
  auto first = [&](std::string axiom, auto&& holds) {
    for (Elem a = 0; a < n; ++a)
      for (Elem b = 0; b < n; ++b)
        for (Elem c = 0; c < n; ++c)
          if (!holds(a, b, c)) {
            report.violations.push_back({std::move(axiom), a, b, c});
            return;
          }
  };
  for (Elem a = 0; a < n; ++a)
    for (Elem b = a + 1; b < n; ++b)
      if (sr.plus(a, b) != sr.plus(b, a)) {
        report.violations.push_back({"additive commutativity", a, b, 0});
        goto commutativity_done;
      }
commutativity_done:
  first("additive associativity", [&](Elem a, Elem b, Elem c) {
    return sr.plus(sr.plus(a, b), c) == sr.plus(a, sr.plus(b, c));
  });
  first("multiplicative associativity", [&](Elem a, Elem b, Elem c) {
    return sr.times(sr.times(a, b), c) == sr.times(a, sr.times(b, c));
  });
  first("left distributivity", [&](Elem a, Elem b, Elem c) {
    return sr.times(a, sr.plus(b, c)) == sr.plus(sr.times(a, b), sr.times(a, c));
  });
  first("right distributivity", [&](Elem a, Elem b, Elem c) {
    return sr.times(sr.plus(b, c), a) == sr.plus(sr.times(b, a), sr.times(c, a));
  });
  return report;
}

std::string describe(const FiniteSemiring& sr, const Violation& v) {
  const auto& e = sr.elements;
  std::ostringstream out;
  out << v.axiom << ": ";
  if (v.axiom == "additive commutativity")
    out << e[v.a] << " + " << e[v.b] << " != " << e[v.b] << " + " << e[v.a];
  else
    out << "witness (" << e[v.a] << ", " << e[v.b] << ", " << e[v.c] << ")";
  return out.str();
}

// --- text format ----------------------------------------------------------

FiniteSemigroup parse_semigroup(std::string_view text) {
  detail::LineReader in(text);
  auto [name, names] = read_header(in, "semigroup");
  FiniteSemigroup sg{name, names, {}};
  sg.op = read_table(in, sg.elements, "op");
  if (auto extra = in.next()) throw ParseError(in.where() + "trailing content after table");
  return sg;
}

FiniteSemiring parse_semiring(std::string_view text) {
  detail::LineReader in(text);
  auto [name, names] = read_header(in, "semiring");
  FiniteSemiring sr{name, names, {}, {}};
  sr.add = read_table(in, sr.elements, "add");
  sr.mul = read_table(in, sr.elements, "mul");
  if (auto extra = in.next()) throw ParseError(in.where() + "trailing content after tables");
  return sr;
}

std::string to_text(const FiniteSemigroup& sg) {
  std::ostringstream out;
  out << "semigroup " << sg.name << "\nelements";
  for (const auto& e : sg.elements) out << ' ' << e;
  out << "\nop\n";
  write_table(out, sg.op, sg.elements);
  return out.str();
}

std::string to_text(const FiniteSemiring& sr) {
  std::ostringstream out;
  out << "semiring " << sr.name << "\nelements";
  for (const auto& e : sr.elements) out << ' ' << e;
  out << "\nadd\n";
  write_table(out, sr.add, sr.elements);
  out << "mul\n";
  write_table(out, sr.mul, sr.elements);
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// --- structure ------------------------------------------------------------

ElemSet idempotents(const FiniteSemigroup& sg) {
  ElemSet out;
  for (Elem x = 0; x < sg.size(); ++x)
    if (sg(x, x) == x) out.push_back(x);
  return out;
}

ElemSet idempotents(const FiniteSemiring& sr) {
  ElemSet out;
  for (Elem x = 0; x < sr.size(); ++x)
    if (sr.times(x, x) == x) out.push_back(x);
  return out;
}

bool is_commutative(const FiniteSemigroup& sg) {
  for (Elem a = 0; a < sg.size(); ++a)
    for (Elem b = a + 1; b < sg.size(); ++b)
      if (sg(a, b) != sg(b, a)) return false;
  return true;
}

std::optional<Elem> identity_element(const FiniteSemigroup& sg) {
  for (Elem e = 0; e < sg.size(); ++e) {
    bool ok = true;
    for (Elem x = 0; x < sg.size() && ok; ++x) ok = sg(e, x) == x && sg(x, e) == x;
    if (ok) return e;
  }
  return std::nullopt;
}

std::optional<Elem> additive_identity(const FiniteSemiring& sr) {
  return identity_element(sr.additive());
}

std::optional<Elem> multiplicative_identity(const FiniteSemiring& sr) {
  return identity_element(sr.multiplicative());
}

Elem power(const FiniteSemigroup& sg, Elem x, std::uint64_t k) {
  if (k == 0) throw DomainError("power: exponent must be positive");
  // square-and-multiply over the semigroup (no identity needed)
  std::optional<Elem> acc;
  Elem base = x;
  while (k) {
    if (k & 1u) acc = acc ? sg(*acc, base) : base;
    k >>= 1u;
    if (k) base = sg(base, base);
  }
  return *acc;
}

Elem multiple(const FiniteSemiring& sr, std::uint64_t k, Elem x) {
  if (k == 0) throw DomainError("multiple: count must be positive");
  std::optional<Elem> acc;
  Elem base = x;
  while (k) {
    if (k & 1u) acc = acc ? sr.plus(*acc, base) : base;
    k >>= 1u;
    if (k) base = sr.plus(base, base);
  }
  return *acc;
}

Cycle power_cycle(const FiniteSemigroup& sg, Elem x) {
  std::vector<std::uint64_t> seen(sg.size(), 0);
  Elem cur = x;
  for (std::uint64_t k = 1;; ++k) {
    if (seen[cur]) return {seen[cur], k - seen[cur]};
    seen[cur] = k;
    cur = sg(cur, x);
  }
}

StabilityProfile stability(const FiniteSemiring& sr) {
  StabilityProfile p;
  const auto add = sr.additive();
  const auto mul = sr.multiplicative();
  const auto zero = additive_identity(sr);

  std::uint64_t max_mul_index = 1, mul_lcm = 1;
  for (Elem x = 0; x < sr.size(); ++x) {
    Cycle a = power_cycle(add, x);
    if (zero && a.index == 1 && multiple(sr, a.period, x) == *zero) a.index = 0;
    p.additive.push_back(a);
    p.threshold = std::max(p.threshold, a.index);
    p.period = lcm64(p.period, a.period);

    Cycle m = power_cycle(mul, x);
    p.multiplicative.push_back(m);
    max_mul_index = std::max(max_mul_index, m.index);
    mul_lcm = lcm64(mul_lcm, m.period);
  }
  p.omega = mul_lcm * ((max_mul_index + mul_lcm - 1) / mul_lcm);
  return p;
}

ElemSet generated_subsemiring(const FiniteSemiring& sr, std::span<const Elem> seed) {
  if (seed.empty()) throw DomainError("generated_subsemiring: seed must be non-empty");
  std::vector<char> in(sr.size(), 0);
  std::vector<Elem> members;
  for (Elem s : seed) {
    if (s >= sr.size()) throw DomainError("generated_subsemiring: seed element out of range");
    if (!in[s]) {
      in[s] = 1;
      members.push_back(s);
    }
  }
  // Each new member is combined with every earlier member in both orders.
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const Elem a = members[i], b = members[j];
      for (Elem c : {sr.plus(a, b), sr.times(a, b), sr.times(b, a)}) {
        if (!in[c]) {
          in[c] = 1;
          members.push_back(c);
        }
      }
    }
  }
  return make_set(std::move(members));
}

bool is_closed(const FiniteSemiring& sr, std::span<const Elem> set) {
  std::vector<char> in(sr.size(), 0);
  for (Elem x : set) in[x] = 1;
  for (Elem a : set)
    for (Elem b : set)
      if (!in[sr.plus(a, b)] || !in[sr.times(a, b)]) return false;
  return true;
}

bool is_ideal(const FiniteSemiring& sr, std::span<const Elem> set) {
  if (set.empty()) return false;
  std::vector<char> in(sr.size(), 0);
  for (Elem x : set) in[x] = 1;
  for (Elem a : set) {
    for (Elem b : set)
      if (!in[sr.plus(a, b)]) return false;
    for (Elem s = 0; s < sr.size(); ++s)
      if (!in[sr.times(s, a)] || !in[sr.times(a, s)]) return false;
  }
  return true;
}

ElemSet product(const FiniteSemiring& sr, std::span<const Elem> x, std::span<const Elem> y) {
  std::vector<char> in(sr.size(), 0);
  for (Elem a : x)
    for (Elem b : y) in[sr.times(a, b)] = 1;
  ElemSet out;
  for (Elem c = 0; c < sr.size(); ++c)
    if (in[c]) out.push_back(c);
  return out;
}

PowerProducts power_set_products(const FiniteSemiring& sr, std::size_t k) {
  if (k == 0) throw DomainError("power_set_products: k must be positive");
  ElemSet all(sr.size());
  std::iota(all.begin(), all.end(), Elem{0});

  PowerProducts out;
  std::vector<ElemSet> powers{all};  // powers[i] = R^{i+1}
  while (true) {
    ElemSet next = product(sr, powers.back(), all);
    if (next == powers.back()) break;
    powers.push_back(std::move(next));
  }
  out.stable_at = powers.size();
  out.stable_set = powers.back();
  out.set = k <= powers.size() ? powers[k - 1] : powers.back();
  return out;
}

ElemSet rer(const FiniteSemiring& sr) {
  ElemSet all(sr.size());
  std::iota(all.begin(), all.end(), Elem{0});
  return product(sr, product(sr, all, idempotents(sr)), all);
}

FiniteSemiring subsemiring(const FiniteSemiring& sr, std::span<const Elem> set, std::string name) {
  if (set.empty() || !is_closed(sr, set))
    throw DomainError("subsemiring: subset is empty or not closed");
  std::vector<Elem> pos(sr.size(), 0);
  for (std::size_t i = 0; i < set.size(); ++i) pos[set[i]] = static_cast<Elem>(i);
  FiniteSemiring out;
  out.name = name.empty() ? sr.name + "_sub" : std::move(name);
  out.add = Table(set.size());
  out.mul = Table(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    out.elements.push_back(sr.elements[set[i]]);
    for (std::size_t j = 0; j < set.size(); ++j) {
      out.add.at(static_cast<Elem>(i), static_cast<Elem>(j)) = pos[sr.plus(set[i], set[j])];
      out.mul.at(static_cast<Elem>(i), static_cast<Elem>(j)) = pos[sr.times(set[i], set[j])];
    }
  }
  return out;
}

FiniteSemiring direct_product(const FiniteSemiring& a, const FiniteSemiring& b) {
  const std::size_t n = a.size() * b.size();
  FiniteSemiring out;
  out.name = a.name + "_x_" + b.name;
  out.add = Table(n);
  out.mul = Table(n);
  auto idx = [&](Elem x, Elem y) { return static_cast<Elem>(x * b.size() + y); };
  for (Elem x = 0; x < a.size(); ++x)
    for (Elem y = 0; y < b.size(); ++y)
      out.elements.push_back("(" + a.elements[x] + "," + b.elements[y] + ")");
  for (Elem x1 = 0; x1 < a.size(); ++x1)
    for (Elem y1 = 0; y1 < b.size(); ++y1)
      for (Elem x2 = 0; x2 < a.size(); ++x2)
        for (Elem y2 = 0; y2 < b.size(); ++y2) {
          out.add.at(idx(x1, y1), idx(x2, y2)) = idx(a.plus(x1, x2), b.plus(y1, y2));
          out.mul.at(idx(x1, y1), idx(x2, y2)) = idx(a.times(x1, x2), b.times(y1, y2));
        }
  return out;
}

// --- coefficients ---------------------------------------------------------

CoefficientSemiring::CoefficientSemiring(std::uint64_t k, std::uint64_t d) : k_(k), d_(d) {
  if (d == 0) throw DomainError("B(k,d) requires d >= 1");
}

std::uint64_t CoefficientSemiring::canonical(std::uint64_t n) const noexcept {
  return n < k_ ? n : k_ + (n - k_) % d_;
}

std::uint64_t CoefficientSemiring::add(std::uint64_t a, std::uint64_t b) const noexcept {
  return canonical(canonical(a) + canonical(b));
}

std::uint64_t CoefficientSemiring::mul(std::uint64_t a, std::uint64_t b) const noexcept {
  return canonical(canonical(a) * canonical(b));
}

CoefficientSemiring coefficient_semiring(const StabilityProfile& profile) {
  return CoefficientSemiring(std::max<std::uint64_t>(profile.threshold, 1), profile.period);
}

// --- sets -----------------------------------------------------------------

ElemSet make_set(std::vector<Elem> elems) {
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  return elems;
}

bool contains(std::span<const Elem> set, Elem x) {
  return std::binary_search(set.begin(), set.end(), x);
}

namespace {
std::string join_names(const std::vector<std::string>& names, std::span<const Elem> set) {
  std::string out = "{";
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i) out += ", ";
    out += names[set[i]];
  }
  return out + "}";
}
}  // namespace

std::string format_set(const FiniteSemiring& sr, std::span<const Elem> set) {
  return join_names(sr.elements, set);
}

std::string format_set(const FiniteSemigroup& sg, std::span<const Elem> set) {
  return join_names(sg.elements, set);
}

}  // namespace cep
