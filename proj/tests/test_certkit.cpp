#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "adversarial.hpp"
#include "support.hpp"
#include "zhuk/certkit.hpp"
#include "zhuk/templates.hpp"

using namespace zhuk;
using namespace zhuk::testing;

namespace {

std::vector<LabeledTrace> genuine_corpus() {
  static std::vector<ParsedFile> files;
  static std::vector<Language> langs;
  if (files.empty()) {
    for (const char* name : {"example1.json", "example2.json", "fig1.json", "fig1_linked.json", "fig2.json", "fig3.json"})
      files.push_back(load(name));
    for (const std::string& name : template_names()) langs.push_back(template_language(name));
  }
  std::vector<LabeledTrace> out;
  for (const ParsedFile& f : files) {
    out.push_back({"file", f.instance, &f.language, solve(f.instance, f.language).trace});
    SolveConfig oracle;
    oracle.brute_force_threshold = 64;
    out.push_back({"file/oracle", f.instance, &f.language, solve(f.instance, f.language, oracle).trace});
  }
  for (const Language& lang : langs) {
    AlgebraCache cache(lang);
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
      const Instance inst = generate_instance(lang, {.n = 3, .density = 0.7, .seed = seed});
      out.push_back({"gen", inst, &lang, solve(inst, lang, {}, &cache).trace});
      const Reduction irr = irreducibility_reduce(inst, cache, brute());
      if (irr.outcome != Outcome::Unchanged) out.push_back({"irr", inst, &lang, compose(inst, "irr", irr, lang, cache)});
      const Reduction weak = weaker_instance_reduce(inst, lang, brute());
      if (weak.outcome != Outcome::Unchanged)
        out.push_back({"weak", inst, &lang, compose(inst, "weak", weak, lang, cache)});
    }
  }
  return out;
}

}  // namespace

TEST_CASE("digests are SHA-256 of the canonical form") {
  const Instance inst = load("example1.json").instance;
  const std::string d = instance_digest(inst);
  CHECK(d.size() == 64);
  CHECK(d == instance_digest(parse_instance(serialize_instance(inst, load("example1.json").language)).instance));
  Instance other = inst;
  other.domains[0] = Subset{0};
  CHECK(instance_digest(other) != d);
}

TEST_CASE("traces round-trip and reject malformed input") {
  const ParsedFile f = load("fig1.json");
  const Trace t = solve(f.instance, f.language).trace;
  const std::string text = serialize_trace(t);
  CHECK(parse_trace(text) == t);
  CHECK(text.substr(0, text.find('\n')).find("\"format\":\"zhuk-trace\"") != std::string::npos);

  CHECK_THROWS_WITH_AS(parse_trace(""), "empty trace", ParseError);
  CHECK_THROWS_AS(parse_trace("{\"format\":\"other\"}\n"), ParseError);
  // Drop the second step: the chain no longer links up.
  std::string broken;
  int line = 0;
  for (std::size_t pos = 0; pos < text.size();) {
    const std::size_t end = text.find('\n', pos);
    if (line++ != 2) broken += text.substr(pos, end - pos + 1);
    pos = end + 1;
  }
  CHECK_THROWS_AS(parse_trace(broken), ParseError);

  nlohmann::json bad = step_to_json(t.steps[0], 0);
  bad["kind"] = "guess";
  CHECK_THROWS_WITH_AS(step_from_json(bad, "s"), "s/kind: unknown kind 'guess'", ParseError);
  std::vector<TraceStep> steps = t.steps;
  steps[0].input = std::string(64, '0');
  CHECK_THROWS_WITH_AS(check_chain(t.instance, steps), "chain broken at step 0", ParseError);
}

TEST_CASE("deltas replay the change") {
  const Instance a = load("fig2.json").instance;
  Instance b = restrict_instance(a, 1, Subset{0});
  CHECK(apply_delta(a, instance_delta(a, b)) == b);
  CHECK(apply_delta(a, instance_delta(a, a)) == a);
  b.edges.erase({0, 1});
  CHECK(apply_delta(a, instance_delta(a, b)) == b);
}

TEST_CASE("genuine traces are accepted") {
  const auto corpus = genuine_corpus();
  std::set<std::string> kinds;
  int composed = 0;
  for (const LabeledTrace& lt : corpus) {
    CAPTURE(lt.label);
    CAPTURE(serialize_trace(lt.trace));
    const Verdict w = verify_trace(lt.instance, *lt.language, lt.trace);
    CHECK(w.accepted);
    CHECK(w.reason.empty());
    CheckConfig sem;
    sem.mode = CheckMode::Semantic;
    const Verdict s = verify_trace(lt.instance, *lt.language, lt.trace, sem);
    CHECK(s.accepted);
    CHECK_FALSE(s.partial());
    for (const StepVerdict& v : s.steps) CHECK(v.status == StepStatus::SemanticsOk);
    for (const TraceStep& st : lt.trace.steps) kinds.insert(st.kind);
    if (lt.label == "irr" || lt.label == "weak") ++composed;
  }
  CHECK(composed > 0);
  for (const char* k : {"cc", "irr", "weak", "ba", "cr", "lin_factor", "lin_gauss", "oracle", "answer"}) {
    CAPTURE(k);
    CHECK(kinds.count(k));
  }
}

TEST_CASE("traces are bound to their instance") {
  const ParsedFile f = load("example2.json");
  const Trace t = solve(f.instance, f.language).trace;
  Instance other = f.instance;
  other.edges.erase({1, 2});
  const Verdict v = verify_trace(other, f.language, t);
  CHECK_FALSE(v.accepted);
  CHECK(v.failed_step == -1);
}

TEST_CASE("single-field mutations are rejected") {
  std::set<std::string> kinds;
  for (const LabeledTrace& lt : genuine_corpus()) {
    for (const Mutation& m : single_field_mutations(lt.trace)) {
      CAPTURE(lt.label);
      CAPTURE(m.label);
      const Verdict v = verify_trace(lt.instance, *lt.language, m.trace);
      CHECK_FALSE(v.accepted);
      CHECK(v.failed_step >= 0);
      kinds.insert(m.kind);
    }
  }
  CHECK(kinds.size() >= 9);
}

TEST_CASE("forged steps of every kind are rejected") {
  const auto corpus = genuine_corpus();
  const Language z4 = template_language("z4_5ary");
  AlgebraCache cache(z4);
  std::vector<LinearEvent> linear;
  std::mt19937_64 rng(3);
  for (int it = 0; it < 100; ++it)
    linear_case_solve(random_z4(z4, rng, 4), cache, brute(), [&](LinearEvent e) { linear.push_back(e); });
  const auto witnesses = sample_witnesses(corpus, linear);
  for (std::string k : {"cc", "irr", "weak", "ba", "cr", "pc", "lin_factor", "lin_gauss", "lin_weaken", "lin_eq_add", "oracle", "answer"}) {
    CAPTURE(k);
    CHECK(witnesses.count(k));
  }
  const ParsedFile ex1 = load("example1.json");
  const ParsedFile ex2 = load("example2.json");
  const ParsedFile fig3 = load("fig3.json");
  for (const char* kind : {"cc", "irr", "weak", "ba", "cr", "pc", "lin_factor", "lin_gauss", "lin_weaken", "lin_eq_add",
                           "oracle", "answer"}) {
    CAPTURE(kind);
    const auto it = witnesses.find(kind);
    const nlohmann::json w = it == witnesses.end() ? nlohmann::json::object() : it->second;
    for (const ParsedFile* f : {&ex1, &ex2, &fig3}) {
      const Trace t = solve(f->instance, f->language).trace;
      const Trace forged = insert_forged(t, kind, std::string(kind) == "oracle" ? lying_oracle(f->instance) : w);
      check_chain(forged.instance, forged.steps);
      const Verdict v = verify_trace(f->instance, f->language, forged);
      CHECK_FALSE(v.accepted);
      CHECK(v.failed_step == static_cast<int>(t.steps.size()) - 1);
    }
  }
}

TEST_CASE("witness-only mode still rejects a lying oracle") {
  const ParsedFile f = load("example2.json");
  SolveConfig cfg;
  cfg.brute_force_threshold = 8;
  Trace t = solve(f.instance, f.language, cfg).trace;
  REQUIRE(t.steps.size() == 2);
  t.steps[0].witness["result"] = nullptr;
  t.steps[1].witness = {{"value", "no"}, {"reason", "oracle"}};
  const Verdict v = verify_trace(f.instance, f.language, t);
  CHECK_FALSE(v.accepted);
  CHECK(v.failed_step == 0);
}

TEST_CASE("CNF models correspond to solutions") {
  for (const char* name : {"example1.json", "example2.json", "fig1.json", "fig2.json", "fig3.json"}) {
    CAPTURE(name);
    const ParsedFile f = load(name);
    const Cnf cnf = emit_cnf(f.instance, &f.language);
    const std::size_t want = brute_force_solve(f.instance).size();
    CHECK(count_models(cnf) == want);
    CHECK(cnf_satisfiable(cnf) == (want > 0));
  }
  for (const std::string& name : template_names()) {
    const Language lang = template_language(name);
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
      const Instance inst = generate_instance(lang, {.n = 2 + static_cast<int>(seed % 3), .density = 0.7, .seed = seed});
      CHECK(count_models(emit_cnf(inst)) == brute_force_solve(inst).size());
    }
  }
  CHECK_FALSE(cnf_satisfiable(emit_cnf(load("example1.json").instance)));
}

TEST_CASE("DIMACS output") {
  const ParsedFile f = load("example1.json");
  const std::string text = emit_cnf(f.instance, &f.language).to_dimacs();
  CHECK(text.rfind("c var 1 = h(0,a)\n", 0) == 0);
  CHECK(text.find("c var 6 = h(2,b)\n") != std::string::npos);
  // 3 ALO, 3 AMO and 3 forbidden pairs per edge.
  CHECK(text.find("p cnf 6 12\n") != std::string::npos);
  CHECK(text.find("\n1 2 0\n") != std::string::npos);
  CHECK(text.find("\n-1 -2 0\n") != std::string::npos);
}
