// zhuk: solve, check, analyze, cnf and gen for binary CSPs with a special WNU polymorphism.
//
// Exit codes: solve 0 satisfiable, 20 unsatisfiable; check 0 accept, 1 reject; 2 on any error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "zhuk/algebra.hpp"
#include "zhuk/certkit.hpp"
#include "zhuk/core.hpp"
#include "zhuk/solver.hpp"
#include "zhuk/templates.hpp"

namespace {

using nlohmann::json;
using namespace zhuk;

constexpr int kSat = 0;
constexpr int kUnsat = 20;
constexpr int kReject = 1;
constexpr int kError = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") std::cout << text;
  else write_file(path, text);
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string congruence_text(const Congruence& c, const Language& lang) {
  std::string out = "{";
  for (std::size_t k = 0; k < c.blocks().size(); ++k) out += (k ? "|" : "") + format_subset(c.blocks()[k], lang);
  return out + "}";
}

struct Options {
  std::string input;
  std::string trace_path;
  std::string output;
  std::string format = "text";
  bool semantic = false;
  int depth = 1;
  std::size_t oracle_cap = 1'000'000;
  std::uint64_t seed = 1;
  std::string templ = "z2";
  int n = 3;
  double density = 0.5;
};

int run_solve(const Options& o) {
  const ParsedFile f = load_instance_file(o.input);
  SolveConfig cfg;
  cfg.max_depth = o.depth;
  cfg.oracle_cap = o.oracle_cap;
  const Answer a = solve(f.instance, f.language, cfg);
  std::string trace_path = o.trace_path;
  if (trace_path.empty()) trace_path = std::filesystem::path(o.input).stem().string() + ".trace";
  write_file(trace_path, serialize_trace(a.trace));
  if (o.format == "json") {
    json out = {{"result", a.satisfiable() ? "sat" : "unsat"}, {"trace", trace_path}, {"steps", a.trace.steps.size()}};
    if (a.solution) {
      out["assignment"] = *a.solution;
      json names = json::array();
      for (Element v : *a.solution) names.push_back(f.language.name_of(v));
      out["names"] = names;
    }
    std::cout << out.dump() << '\n';
  } else if (a.solution) {
    std::cout << "SAT " << format_assignment(*a.solution, f.language) << '\n';
  } else {
    std::cout << "UNSAT (" << a.trace.steps.back().witness.value("reason", "") << ")\n";
  }
  return a.satisfiable() ? kSat : kUnsat;
}

int run_check(const Options& o) {
  const ParsedFile f = load_instance_file(o.input);
  const Trace t = parse_trace(read_file(o.trace_path));
  CheckConfig cfg;
  cfg.mode = o.semantic ? CheckMode::Semantic : CheckMode::WitnessOnly;
  cfg.oracle_cap = o.oracle_cap;
  const Verdict v = verify_trace(f.instance, f.language, t, cfg);
  if (o.format == "json") {
    json steps = json::array();
    for (const StepVerdict& s : v.steps) {
      json j = {{"step", s.index}, {"kind", s.kind}, {"status", to_string(s.status)}};
      if (!s.reason.empty()) j["reason"] = s.reason;
      if (s.counterexample) j["counterexample"] = *s.counterexample;
      steps.push_back(j);
    }
    std::cout << json{{"accepted", v.accepted}, {"reason", v.reason}, {"unchecked", v.unchecked}, {"steps", steps}}.dump()
              << '\n';
  } else {
    for (const StepVerdict& s : v.steps) {
      std::cout << "step " << s.index << " " << s.kind << ": " << to_string(s.status);
      if (!s.reason.empty()) std::cout << " (" << s.reason << ")";
      if (s.counterexample) std::cout << " lost " << format_assignment(*s.counterexample, f.language);
      std::cout << '\n';
    }
    if (v.partial()) std::cout << "partial: " << v.unchecked.size() << " steps unchecked\n";
    std::cout << (v.accepted ? "ACCEPT" : "REJECT: " + v.reason) << '\n';
  }
  return v.accepted ? 0 : kReject;
}

std::vector<Subset> subuniverses(const Language& lang) {
  std::vector<Subset> out;
  for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << lang.base_size); ++bits) {
    Subset s;
    for (int a = 0; a < lang.base_size; ++a)
      if (bits >> a & 1) s.insert(a);
    if (is_subuniverse(lang.wnu, s)) out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](Subset a, Subset b) { return canonical_less(b, a); });
  return out;
}

int run_analyze(const Options& o) {
  const ParsedFile f = load_instance_file(o.input);
  const Language& lang = f.language;
  const WnuProfile p = wnu_profile(lang.wnu);
  AlgebraCache cache(lang);
  const Subset top = Subset::full(lang.base_size);
  std::string top_case = "n/a";
  if (lang.base_size >= 2) top_case = describe(classify_four_cases(cache.local(top), cache.limits()), lang);
  json subs = json::array();
  for (Subset d : subuniverses(lang)) {
    json entry = {{"subuniverse", format_subset(d, lang)}};
    json cons = json::array();
    for (const CongruenceInfo& c : cache.congruences(d))
      cons.push_back({{"blocks", congruence_text(c.congruence, lang)}, {"maximal", c.maximal}});
    entry["congruences"] = cons;
    if (d.size() >= 2) entry["four_cases"] = describe(classify_four_cases(cache.local(d), cache.limits()), lang);
    subs.push_back(entry);
  }
  if (o.format == "json") {
    std::cout << json{{"idempotent", p.idempotent}, {"wnu", p.wnu}, {"special", p.special}, {"four_cases", top_case},
                      {"subuniverses", subs}}
                     .dump()
              << '\n';
    return 0;
  }
  std::cout << "special WNU: " << yes_no(p.special) << "; four cases: " << top_case << '\n';
  std::cout << "idempotent: " << yes_no(p.idempotent) << "; WNU: " << yes_no(p.wnu) << "; arity "
            << lang.wnu.arity() << '\n';
  for (const json& s : subs) {
    std::cout << s["subuniverse"].get<std::string>();
    if (s.contains("four_cases")) std::cout << ": " << s["four_cases"].get<std::string>();
    std::cout << '\n';
    for (const json& c : s["congruences"])
      std::cout << "  " << c["blocks"].get<std::string>() << (c["maximal"].get<bool>() ? " maximal" : "") << '\n';
  }
  return 0;
}

int run_cnf(const Options& o) {
  const ParsedFile f = load_instance_file(o.input);
  const ValidationReport r = validate_instance(f.instance, f.language);
  if (!r.ok()) throw PreconditionError("invalid instance: " + r.violations.front());
  emit(o.output, emit_cnf(f.instance, &f.language).to_dimacs());
  return 0;
}

int run_gen(const Options& o) {
  const Language lang = template_language(o.templ);
  GenOptions g;
  g.n = o.n;
  g.density = o.density;
  g.seed = o.seed;
  emit(o.output, serialize_instance(generate_instance(lang, g), lang));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zhuk's algorithm for binary CSPs with a special WNU polymorphism"};
  app.require_subcommand(1);
  Options o;

  auto* solve_cmd = app.add_subcommand("solve", "solve an instance and write its trace");
  solve_cmd->add_option("instance", o.input, "instance file")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--trace", o.trace_path, "trace output path (default: <instance stem>.trace)");
  solve_cmd->add_option("--depth", o.depth, "recursion depth for sub-solves")->check(CLI::NonNegativeNumber);
  solve_cmd->add_option("--oracle-cap", o.oracle_cap, "largest search space the brute-force oracle enumerates");
  solve_cmd->add_option("--format", o.format)->check(CLI::IsMember({"json", "text"}));

  auto* check_cmd = app.add_subcommand("check", "verify a trace against its instance");
  check_cmd->add_option("instance", o.input)->required()->check(CLI::ExistingFile);
  check_cmd->add_option("trace", o.trace_path)->required()->check(CLI::ExistingFile);
  check_cmd->add_flag("--semantic", o.semantic, "also brute-force solution preservation per step");
  check_cmd->add_option("--oracle-cap", o.oracle_cap);
  check_cmd->add_option("--format", o.format)->check(CLI::IsMember({"json", "text"}));

  auto* analyze_cmd = app.add_subcommand("analyze", "print the WNU profile, congruences and four-case classification");
  analyze_cmd->add_option("file", o.input)->required()->check(CLI::ExistingFile);
  analyze_cmd->add_option("--format", o.format)->check(CLI::IsMember({"json", "text"}));

  auto* cnf_cmd = app.add_subcommand("cnf", "write the DIMACS encoding of an instance");
  cnf_cmd->add_option("instance", o.input)->required()->check(CLI::ExistingFile);
  cnf_cmd->add_option("-o,--output", o.output, "output path (default: stdout)");

  auto* gen_cmd = app.add_subcommand("gen", "generate a random instance from a template algebra");
  gen_cmd->add_option("template", o.templ)->check(CLI::IsMember(template_names()));
  gen_cmd->add_option("--n", o.n)->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--density", o.density)->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--seed", o.seed);
  gen_cmd->add_option("-o,--output", o.output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kError;
  }

  try {
    if (*solve_cmd) return run_solve(o);
    if (*check_cmd) return run_check(o);
    if (*analyze_cmd) return run_analyze(o);
    if (*cnf_cmd) return run_cnf(o);
    if (*gen_cmd) return run_gen(o);
  } catch (const std::exception& e) {
    std::cerr << "zhuk: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
