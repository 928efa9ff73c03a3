#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <numeric>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "cep/boolean.hpp"
#include "cep/catalog.hpp"
#include "cep/classify.hpp"
#include "cep/lang.hpp"
#include "cep/powerset.hpp"
#include "cep/rank.hpp"
#include "cep/reduction.hpp"

namespace cep::cli {
namespace {

namespace fs = std::filesystem;

// Thrown for a result that is a negative answer rather than an error, after
// the report has been written.
struct Failure {};

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string first_token(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string w;
    if (words >> w) return w;
  }
  return {};
}

std::shared_ptr<const FiniteSemiring> load_semiring(const std::string& path) {
  return std::make_shared<const FiniteSemiring>(parse_semiring(read_file(path)));
}

// The semiring named in the circuit header: --semiring if given, otherwise
// `<name>.semiring` or any *.semiring with that name next to the circuit.
std::shared_ptr<const FiniteSemiring> semiring_for(const std::string& circuit_path, std::string_view text,
                                                   const std::string& explicit_path) {
  if (!explicit_path.empty()) return load_semiring(explicit_path);
  const std::string name = circuit_semiring_name(text);
  const fs::path dir = fs::path(circuit_path).parent_path().empty() ? fs::path(".") : fs::path(circuit_path).parent_path();
  const fs::path direct = dir / (name + ".semiring");
  if (fs::exists(direct)) return load_semiring(direct.string());
  std::vector<fs::path> candidates;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".semiring") candidates.push_back(entry.path());
  std::sort(candidates.begin(), candidates.end());
  for (const auto& p : candidates) {
    try {
      auto sr = load_semiring(p.string());
      if (sr->name == name) return sr;
    } catch (const ParseError&) {
    }
  }
  throw Error("no semiring file for '" + name + "' next to " + circuit_path + "; pass --semiring");
}

Circuit load_circuit(const std::string& path, const std::string& semiring_path) {
  const std::string text = read_file(path);
  return parse_circuit(text, semiring_for(path, text, semiring_path));
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  f << text;
}

// `(e,f)` where element names may themselves contain commas inside braces.
GateType parse_type_pair(const FiniteSemiring& sr, std::string s, const std::string& where) {
  if (s.size() < 2 || s.front() != '(' || s.back() != ')') throw ParseError(where + "expected (e,f)");
  s = s.substr(1, s.size() - 2);
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '{' || s[i] == '(') ++depth;
    if (s[i] == '}' || s[i] == ')') --depth;
    if (s[i] == ',' && depth == 0) {
      auto e = sr.find(s.substr(0, i)), f = sr.find(s.substr(i + 1));
      if (!e || !f) throw ParseError(where + "unknown element in (" + s + ")");
      return {*e, *f};
    }
  }
  throw ParseError(where + "expected (e,f)");
}

// Lines `type <gate> = (<e>,<f>)`; anything else is ignored so that the
// sidecar written by `reduce` can be read back.
TypeAssignment parse_types(const Circuit& c, std::string_view text) {
  TypeAssignment t(c.size());
  std::vector<char> seen(c.size(), 0);
  std::istringstream in{std::string(text)};
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    std::istringstream words(line);
    std::string kw, gate, eq, pair;
    if (!(words >> kw) || kw != "type") continue;
    const std::string where = "line " + std::to_string(no) + ": ";
    if (!(words >> gate >> eq >> pair) || eq != "=") throw ParseError(where + "expected 'type <gate> = (e,f)'");
    const auto g = c.find(gate);
    if (!g) throw ParseError(where + "unknown gate '" + gate + "'");
    t[*g] = parse_type_pair(c.semiring(), pair, where);
    seen[*g] = 1;
  }
  for (GateId g = 0; g < c.size(); ++g)
    if (!seen[g]) throw ParseError("types: no type for gate '" + c.gate(g).id + "'");
  return t;
}

bool names_are_sets(const FiniteSemiring& sr) {
  for (const auto& e : sr.elements)
    if (e.size() < 2 || e.front() != '{' || e.back() != '}') return false;
  return true;
}

struct RankChoice {
  std::string kind = "auto";
  std::string file;
};

// auto: |A| when the elements are sets and |A| is a rank function, otherwise
// the rank built from the preorder.
RankMap choose_rank(const FiniteSemiring& sr, const RankChoice& rc) {
  if (!rc.file.empty()) return parse_rank(sr, read_file(rc.file));
  if (rc.kind == "built") return build_rank(sr).rank;
  if (rc.kind == "cardinality") return cardinality_rank(sr);
  if (names_are_sets(sr)) {
    auto r = cardinality_rank(sr);
    if (!check_rank_axioms(sr, r)) return r;
  }
  return build_rank(sr).rank;
}

struct Context {
  std::ostream& out;
  bool machine = false;
};

// --- subcommands ----------------------------------------------------------

void cmd_check(Context& ctx, const std::string& path) {
  const std::string text = read_file(path);
  ValidationReport rep;
  std::string name;
  std::function<std::string(const Violation&)> show;
  std::optional<FiniteSemiring> sr;
  if (first_token(text) == "semigroup") {
    const auto sg = parse_semigroup(text);
    name = sg.name;
    rep = validate_semigroup(sg);
    show = [sg](const Violation& v) {
      return v.axiom + " fails at (" + sg.elements[v.a] + ", " + sg.elements[v.b] + ", " + sg.elements[v.c] + ")";
    };
  } else {
    sr = parse_semiring(text);
    name = sr->name;
    rep = validate_semiring(*sr);
    show = [&](const Violation& v) { return describe(*sr, v); };
  }
  if (ctx.machine) {
    ctx.out << "name: " << name << "\nvalid: " << yes_no(rep.ok()) << "\nviolations: " << rep.violations.size() << '\n';
    for (const auto& v : rep.violations) ctx.out << "violation: " << show(v) << '\n';
  } else if (rep.ok()) {
    ctx.out << name << ": all axioms hold\n";
  } else {
    for (const auto& v : rep.violations) ctx.out << name << ": " << show(v) << '\n';
  }
  if (!rep.ok()) throw Failure{};
}

void cmd_classify(Context& ctx, const std::string& path) {
  const auto sr = parse_semiring(read_file(path));
  const auto rep = classify(sr);
  ctx.out << (ctx.machine ? to_key_values(sr, rep) : to_text(sr, rep));
}

struct EvalArgs {
  std::string circuit, semiring, mode = "naive", types_file;
  RankChoice rank;
  bool trace = false, all = false;
  std::size_t start_phase = 1;
  std::optional<std::uint64_t> seed;
};

void print_values(Context& ctx, const Circuit& c, std::span<const Elem> values, std::size_t gates, bool all) {
  const auto& sr = c.semiring();
  if (c.output() && !all) {
    ctx.out << (ctx.machine ? "value: " : "") << sr.elements[values[*c.output()]] << '\n';
    return;
  }
  if (c.output() && ctx.machine) ctx.out << "value: " << sr.elements[values[*c.output()]] << '\n';
  for (GateId g = 0; g < gates; ++g)
    ctx.out << (ctx.machine ? "gate." : "") << c.gate(g).id << (ctx.machine ? ": " : " = ")
            << sr.elements[values[g]] << '\n';
}

void cmd_eval(Context& ctx, const EvalArgs& a) {
  const Circuit c = load_circuit(a.circuit, a.semiring);
  const auto& sr = c.semiring();
  if (a.mode == "naive") {
    print_values(ctx, c, eval_naive(c).values, c.size(), a.all);
    return;
  }
  PhaseOptions po;
  po.start_phase = a.start_phase;
  po.random_seed = a.seed;
  po.check_types = true;
  const RankMap rank = choose_rank(sr, a.rank);
  if (a.mode == "phased") {
    const Circuit n = normalize(c);
    TypeAssignment types;
    if (!a.types_file.empty()) {
      if (n.size() != c.size()) throw DomainError("--types needs a circuit in normal form");
      types = parse_types(n, read_file(a.types_file));
    } else if (auto t = identity_types(n)) {
      types = *t;
    } else {
      throw DomainError("semiring " + sr.name + " has no multiplicative identity; pass --types");
    }
    const auto res = eval_phased(n, types, rank, po);
    if (a.trace) ctx.out << phase_trace(n, res);
    if (ctx.machine) ctx.out << "phases: " << res.phases.size() << '\n';
    print_values(ctx, c, res.result.values, c.size(), a.all || a.trace);
    return;
  }
  FullOptions fo;
  fo.rank = rank;
  fo.phases = po;
  fo.phases.check_types = false;
  const auto res = eval_full(c, fo);
  if (a.trace) {
    if (res.fallback) ctx.out << "note: " << res.note << '\n';
    if (res.pipeline) {
      const auto& m = res.pipeline->monomlength;
      ctx.out << "threshold: " << m.threshold << "\ncase: " << static_cast<int>(m.which) << '\n';
      if (res.pipeline->construction) ctx.out << describe_construction(*res.pipeline->construction);
    }
    if (res.phased) ctx.out << phase_trace(res.pipeline->construction->circuit, *res.phased);
  }
  if (ctx.machine) {
    ctx.out << "fallback: " << yes_no(res.fallback) << '\n';
    if (res.phased) ctx.out << "phases: " << res.phased->phases.size() << '\n';
  }
  ctx.out << (ctx.machine ? "value: " : "") << sr.elements[res.value] << '\n';
}

void cmd_reduce(Context& ctx, const std::string& path, const std::string& semiring, const std::string& prefix,
                bool strict) {
  const Circuit c = load_circuit(path, semiring);
  const auto& sr = c.semiring();
  PipelineOptions opt;
  opt.strict_threshold = strict;
  opt.max_size = 64;
  const auto res = step1_pipeline(c, opt);
  const auto& m = res.monomlength;
  ctx.out << "threshold: " << m.threshold << "\ncase: " << static_cast<int>(m.which) << '\n';
  if (m.sigma) ctx.out << "sigma: " << sr.elements[*m.sigma] << '\n';
  if (res.value) {
    ctx.out << "value: " << sr.elements[*res.value] << '\n';
    if (!prefix.empty()) write_file(prefix + ".types", "value: " + sr.elements[*res.value] + "\n");
    return;
  }
  const auto& tc = *res.construction;
  ctx.out << "gates: " << tc.circuit.size() << "\ndistinguished: " << tc.distinguished.size() << '\n';
  if (prefix.empty()) {
    ctx.out << serialize_circuit(tc.circuit) << describe_construction(tc);
    return;
  }
  write_file(prefix + ".circuit", serialize_circuit(tc.circuit));
  write_file(prefix + ".types", describe_construction(tc));
  ctx.out << "wrote: " << prefix << ".circuit " << prefix << ".types\n";
}

void cmd_rank(Context& ctx, const std::string& path, const RankChoice& rc) {
  const auto sr = parse_semiring(read_file(path));
  RankMap rank;
  std::string source = "built";
  if (!rc.file.empty()) {
    rank = parse_rank(sr, read_file(rc.file));
    source = rc.file;
  } else if (rc.kind == "cardinality") {
    rank = cardinality_rank(sr);
    source = "cardinality";
  } else {
    rank = build_rank(sr).rank;
  }
  const auto v = check_rank_axioms(sr, rank);
  ctx.out << (ctx.machine ? "source: " : "rank from ") << source << '\n';
  for (Elem a = 0; a < sr.size(); ++a)
    ctx.out << (ctx.machine ? "rank." : "") << sr.elements[a] << (ctx.machine ? ": " : " ") << rank[a] << '\n';
  ctx.out << "max_rank: " << (rank.empty() ? 0 : *std::max_element(rank.begin(), rank.end())) << '\n';
  if (v) {
    ctx.out << "axioms: violated\nclause: " << v->clause << "\nwitness: " << v->message << '\n';
    throw Failure{};
  }
  ctx.out << "axioms: ok\n";
}

void cmd_power(Context& ctx, const std::string& path, const std::string& output, std::size_t cap, bool verdict) {
  const auto sg = parse_semigroup(read_file(path));
  if (verdict) {
    const auto v = power_verdict(sg, cap);
    ctx.out << "local_group: " << yes_no(v.local_group) << "\nsolvable: " << yes_no(v.solvable)
            << "\ndirect: " << to_string(v.direct)
            << "\nvia_power: " << (v.via_power ? to_string(*v.via_power) : "not built")
            << "\nagree: " << yes_no(v.agree) << '\n';
    if (!v.note.empty()) ctx.out << "note: " << v.note << '\n';
    return;
  }
  const std::string text = to_text(build_power(sg, cap));
  if (output.empty())
    ctx.out << text;
  else
    write_file(output, text);
}

void cmd_syntactic(Context& ctx, const std::string& path) {
  const auto r = syntactic_monoid(parse_dfa(read_file(path)));
  const auto& m = r.monoid;
  ctx.out << "states: " << r.minimal.states.size() << "\nelements: " << m.size() << '\n';
  ctx.out << "monoid: " << format_set(m, [&] {
    ElemSet all(m.size());
    std::iota(all.begin(), all.end(), Elem{0});
    return all;
  }()) << '\n';
  for (std::size_t a = 0; a < r.minimal.alphabet.size(); ++a)
    ctx.out << "h(" << r.minimal.alphabet[a] << "): " << m.elements[r.letter_image[a]] << '\n';
  ctx.out << "F: " << format_set(m, r.accepting) << '\n';
  const auto qf = check_quotient_freeness(r);
  ctx.out << "implication: " << yes_no(qf.implication_holds) << '\n';
  if (qf.counterexample) {
    const auto [s, e, t] = *qf.counterexample;
    ctx.out << "counterexample: s=" << m.elements[s] << " e=" << m.elements[e] << " t=" << m.elements[t] << '\n';
  }
  if (m.size() <= kDefaultQuotientCap) {
    const auto fc = f_congruence(r);
    ctx.out << "quotient_classes: " << fc.quotient.size() << "\nquotient_zero_one_free: " << yes_no(*qf.quotient_free)
            << '\n';
  } else {
    ctx.out << "quotient_classes: not built\n";
  }
  if (!ctx.machine) ctx.out << to_text(m);
}

void cmd_intersect(Context& ctx, const std::string& grammar, const std::string& dfa, bool witness) {
  const auto g = parse_grammar(read_file(grammar));
  const auto d = parse_dfa(read_file(dfa));
  const auto res = intersect(g, d, witness);
  if (ctx.machine) ctx.out << "result: ";
  ctx.out << (res.nonempty ? "non-empty" : "empty") << '\n';
  if (ctx.machine) ctx.out << "growth_events: " << res.growth_events << '\n';
  if (witness && res.nonempty) {
    ctx.out << "witness: ";
    if (!res.witness) {
      ctx.out << "longer than the cap\n";
    } else {
      if (res.witness->empty()) ctx.out << '_';
      for (std::size_t i = 0; i < res.witness->size(); ++i) ctx.out << (i ? " " : "") << (*res.witness)[i];
      ctx.out << '\n';
    }
  }
}

void cmd_pcfg(Context& ctx, const std::string& dfa, std::size_t cap) {
  const auto v = pcfg_verdict(parse_dfa(read_file(dfa)), cap);
  ctx.out << "verdict: " << (v.verdict ? to_string(*v.verdict) : "undetermined") << '\n';
  ctx.out << "implication: " << yes_no(v.freeness.implication_holds) << '\n';
  ctx.out << "monoid_solvable: " << yes_no(v.monoid_solvable) << '\n';
  ctx.out << "reason: " << v.reason << '\n';
}

void cmd_maxplus(Context& ctx, const std::string& path, const std::string& output) {
  const auto red = reduce_cvp_maxplus(parse_bool_circuit(read_file(path)));
  ctx.out << "layers: " << red.layers << "\nboolean: " << (red.boolean_output ? 1 : 0)
          << "\nmaxplus: " << red.output_value << "\ninvariant: " << yes_no(red.invariant_holds) << '\n';
  if (!output.empty()) write_file(output, serialize_maxplus(red.circuit));
}

void cmd_cvp_zd(Context& ctx, const std::string& path, std::uint32_t d, const std::string& output) {
  const auto bc = parse_bool_circuit(read_file(path));
  const auto c = reduce_boolean_cvp(bc, d);
  const auto values = eval_bool(bc);
  const auto ev = eval_naive(c);
  if (!bc.output || !ev.output) throw DomainError("boolean circuit has no output gate");
  ctx.out << "d: " << d << "\nboolean: " << (values[*bc.output] ? 1 : 0)
          << "\nzd: " << c.semiring().elements[*ev.output] << '\n';
  if (!output.empty()) write_file(output, serialize_circuit(c));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Circuit evaluation over finite semirings"};
  app.name("cep");
  app.require_subcommand(1);
  bool machine = false;
  app.add_flag("--machine", machine, "Emit key: value lines");

  std::function<void(Context&)> action;
  auto existing = CLI::ExistingFile;

  std::string path, path2, output, semiring;
  std::size_t cap = 0;

  auto* check = app.add_subcommand("check", "Validate the axioms of a semiring or semigroup file");
  check->add_option("file", path, "Semiring or semigroup file")->required()->check(existing);
  check->callback([&] { action = [&](Context& c) { cmd_check(c, path); }; });

  auto* cls = app.add_subcommand("classify", "{0,1}-freeness, solvability, aperiodicity and verdict");
  cls->add_option("semiring", path, "Semiring file")->required()->check(existing);
  cls->callback([&] { action = [&](Context& c) { cmd_classify(c, path); }; });

  EvalArgs ea;
  auto* ev = app.add_subcommand("eval", "Evaluate a circuit");
  ev->add_option("circuit", ea.circuit, "Circuit file")->required()->check(existing);
  ev->add_option("--semiring", ea.semiring, "Semiring file")->check(existing);
  ev->add_option("--mode", ea.mode, "naive, phased or full")->check(CLI::IsMember({"naive", "phased", "full"}));
  ev->add_flag("--trace", ea.trace, "Print the per-phase log");
  ev->add_flag("--all", ea.all, "Print every gate");
  ev->add_option("--rank", ea.rank.kind, "auto, built or cardinality")
      ->check(CLI::IsMember({"auto", "built", "cardinality"}));
  ev->add_option("--rank-file", ea.rank.file, "Lines <element> <rank>")->check(existing);
  ev->add_option("--types", ea.types_file, "Lines type <gate> = (e,f)")->check(existing);
  ev->add_option("--start-phase", ea.start_phase, "First phase number")->check(CLI::PositiveNumber);
  ev->add_option("--seed", ea.seed, "Seed for the inner-gate tie-break");
  ev->callback([&] { action = [&](Context& c) { cmd_eval(c, ea); }; });

  bool strict = false;
  auto* red = app.add_subcommand("reduce", "Type-admitting circuit, type assignment and affine map");
  red->add_option("circuit", path, "Circuit file")->required()->check(existing);
  red->add_option("--semiring", semiring, "Semiring file")->check(existing);
  red->add_option("-o,--output", output, "Write <prefix>.circuit and <prefix>.types");
  red->add_flag("--strict-threshold", strict, "Use |R| as the long-product threshold");
  red->callback([&] { action = [&](Context& c) { cmd_reduce(c, path, semiring, output, strict); }; });

  RankChoice rc;
  rc.kind = "built";
  auto* rk = app.add_subcommand("rank", "Rank function and its axioms");
  rk->add_option("semiring", path, "Semiring file")->required()->check(existing);
  rk->add_option("--rank", rc.kind, "built or cardinality")->check(CLI::IsMember({"built", "cardinality"}));
  rk->add_option("--rank-file", rc.file, "Lines <element> <rank>")->check(existing);
  rk->callback([&] { action = [&](Context& c) { cmd_rank(c, path, rc); }; });

  bool verdict = false;
  std::size_t power_cap = kDefaultPowerCap;
  auto* pw = app.add_subcommand("power", "Power semiring of a semigroup");
  pw->add_option("semigroup", path, "Semigroup file")->required()->check(existing);
  pw->add_option("-o,--output", output, "Output semiring file");
  pw->add_option("--cap", power_cap, "Largest semigroup accepted");
  pw->add_flag("--verdict", verdict, "Compare the verdicts from S and from P(S)");
  pw->callback([&] { action = [&](Context& c) { cmd_power(c, path, output, power_cap, verdict); }; });

  auto* syn = app.add_subcommand("syntactic", "Syntactic monoid of a DFA language");
  syn->add_option("dfa", path, "DFA file")->required()->check(existing);
  syn->callback([&] { action = [&](Context& c) { cmd_syntactic(c, path); }; });

  bool witness = false;
  auto* in = app.add_subcommand("intersect", "Does the grammar meet the regular language");
  in->add_option("grammar", path, "Grammar file")->required()->check(existing);
  in->add_option("dfa", path2, "DFA file")->required()->check(existing);
  in->add_flag("--witness", witness, "Print a word in the intersection");
  in->callback([&] { action = [&](Context& c) { cmd_intersect(c, path, path2, witness); }; });

  cap = kDefaultQuotientCap;
  auto* pc = app.add_subcommand("pcfg-verdict", "Complexity of intersection with the language");
  pc->add_option("dfa", path, "DFA file")->required()->check(existing);
  pc->add_option("--cap", cap, "Largest monoid for which the quotient is built");
  pc->callback([&] { action = [&](Context& c) { cmd_pcfg(c, path, cap); }; });

  auto* mp = app.add_subcommand("demo-maxplus", "Layered Boolean circuit to a max-plus circuit");
  mp->add_option("circuit", path, "Boolean circuit file")->required()->check(existing);
  mp->add_option("-o,--output", output, "Write the max-plus circuit");
  mp->callback([&] { action = [&](Context& c) { cmd_maxplus(c, path, output); }; });

  std::uint32_t d = 2;
  auto* zd = app.add_subcommand("demo-cvp-zd", "Boolean circuit to a circuit over Z_d");
  zd->add_option("circuit", path, "Boolean circuit file")->required()->check(existing);
  zd->add_option("--d", d, "Modulus, at least 2");
  zd->add_option("-o,--output", output, "Write the Z_d circuit");
  zd->callback([&] { action = [&](Context& c) { cmd_cvp_zd(c, path, d, output); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  Context ctx{out, machine};
  try {
    action(ctx);
  } catch (const Failure&) {
    return 1;
  } catch (const CycleError& e) {
    err << "cycle error: " << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return 1;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace cep::cli
