// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <variant>

#include "adversarial.hpp"
#include "support.hpp"
#include "zhuk/certkit.hpp"
#include "zhuk/consistency.hpp"
#include "zhuk/linear.hpp"
#include "zhuk/solver.hpp"
#include "zhuk/templates.hpp"

using namespace zhuk;
using namespace zhuk::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Result {
  bool pass = true;
  std::ostringstream note;
  void expect(bool ok, const std::string& what) {
    if (!ok && pass) note << "failed: " << what << "; ";
    pass = pass && ok;
  }
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<void(Result&)>& body) {
  const auto t0 = Clock::now();
  Result o;
  try {
    body(o);
  } catch (const std::exception& e) {
    o.expect(false, std::string("exception: ") + e.what());
  }
  char time[32];
  std::snprintf(time, sizeof time, "%.2f s", seconds_since(t0));
  std::cout << "criterion " << id << " [" << title << "]: " << (o.pass ? "PASS" : "FAIL") << " (" << time << ") "
            << o.note.str() << std::endl;
  if (!o.pass) ++failures;
}

// ---------------------------------------------------------------- corpus

struct CorpusEntry {
  const Language* language;
  Instance instance;
  Answer answer;
};

struct Corpus {
  std::vector<std::string> names;
  std::vector<Language> languages;
  std::vector<CorpusEntry> entries;
  double build_seconds = 0;
};

constexpr std::uint64_t kSeeds = 1000;

const Corpus& corpus() {
  static Corpus c = [] {
    const auto t0 = Clock::now();
    Corpus out;
    out.names = template_names();
    for (const std::string& name : out.names) out.languages.push_back(template_language(name));
    for (const Language& lang : out.languages) {
      AlgebraCache cache(lang);
      for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
        GenOptions g;
        g.n = 2 + static_cast<int>(seed % 3);
        g.density = 0.3 + 0.1 * static_cast<double>(seed % 6);
        g.seed = seed;
        Instance inst = generate_instance(lang, g);
        Answer a = solve(inst, lang, {}, &cache);
        out.entries.push_back({&lang, std::move(inst), std::move(a)});
      }
    }
    out.build_seconds = seconds_since(t0);
    return out;
  }();
  return c;
}

// sol(W_i) nonempty implies sol(W_{i+1}) nonempty along the chain, branches included.
void check_chain_soundness(const Instance& start, const std::vector<TraceStep>& steps, long& checked, long& violations) {
  Instance cur = start;
  for (const TraceStep& s : steps) {
    const Instance next = apply_delta(cur, s.delta);
    ++checked;
    if (brute_force_first(cur) && !brute_force_first(next)) ++violations;
    if (s.kind == "pc" && s.witness.value("exhaustive", false)) {
      const int i = s.witness.at("variable").get<int>();
      bool any = false;
      for (const auto& branch : s.witness.at("branches")) {
        const Instance b = restrict_instance(cur, i, subset_from_json(branch.at("block")));
        any = any || brute_force_first(b).has_value();
        check_chain_soundness(b, steps_from_json(branch.at("steps"), "branch"), checked, violations);
      }
      ++checked;
      if (brute_force_first(cur) && !any) ++violations;
    }
    cur = next;
  }
}

bool validated(const LocalAlgebra& alg, const FourCaseWitness& w) {
  std::optional<std::string> err;
  if (const auto* b = std::get_if<BinaryAbsorbing>(&w)) err = check_binary_absorbing(alg, *b);
  else if (const auto* c = std::get_if<Central>(&w)) err = check_central(alg, *c);
  else if (const auto* p = std::get_if<PcQuotient>(&w)) err = check_pc_quotient(alg, *p);
  else err = check_linear_quotient(alg, std::get<LinearQuotient>(w));
  return !err;
}

std::set<std::vector<int>> enumerate(const ModMatrix& aug, int p) {
  const int d = static_cast<int>(aug.cols()) - 1;
  std::set<std::vector<int>> out;
  std::vector<int> x(static_cast<std::size_t>(d), 0);
  for (;;) {
    bool ok = true;
    for (Eigen::Index r = 0; r < aug.rows() && ok; ++r) {
      long long s = 0;
      for (int c = 0; c < d; ++c) s += static_cast<long long>(aug(r, c)) * x[static_cast<std::size_t>(c)];
      ok = mod_p(s - aug(r, d), p) == 0;
    }
    if (ok) out.insert(x);
    int k = d - 1;
    while (k >= 0 && ++x[static_cast<std::size_t>(k)] == p) x[static_cast<std::size_t>(k--)] = 0;
    if (k < 0) return out;
  }
}

std::set<std::vector<int>> points(const AffineSpace& s) {
  std::set<std::vector<int>> out;
  for (const ModVector& v : s.points()) out.insert(std::vector<int>(v.data(), v.data() + v.size()));
  return out;
}

}  // namespace

int main() {
  criterion(1, "example1: unsatisfiable three ways", [](Result& o) {
    const auto t0 = Clock::now();
    const ParsedFile f = load("example1.json");
    o.expect(!solve(f.instance, f.language).satisfiable(), "solve finds no solution");
    o.expect(!cnf_satisfiable(emit_cnf(f.instance, &f.language)), "CNF unsatisfiable");
    o.expect(brute_force_solve(f.instance).empty(), "brute force empty");
    o.expect(seconds_since(t0) < 1.0, "under 1 s");
  });

  criterion(2, "example2: two solutions, rank-2 system of dimension 1", [](Result& o) {
    const auto t0 = Clock::now();
    const ParsedFile f = load("example2.json");
    const Assignment s1{0, 1, 0}, s2{1, 0, 1};
    o.expect(brute_force_solve(f.instance) == std::vector<Assignment>{s1, s2}, "brute force = {S1, S2}");
    AlgebraCache cache(f.language);
    const LinearSystem sys =
        build_linear_system(factorize_instance(f.instance, minimal_linear_congruences(f.instance, cache)));
    o.expect(sys.systems.size() == 1 && sys.systems[0].p == 2, "one system over Z2");
    o.expect(row_echelon(sys.systems[0].augmented, 2).pivots.size() == 2, "rank 2");
    const auto s = gauss_solve(sys);
    o.expect(s && s->dimension() == 1, "dimension 1");
    const Answer a = solve(f.instance, f.language);
    const Answer b = solve(f.instance, f.language);
    o.expect(a.solution && (*a.solution == s1 || *a.solution == s2), "solve returns S1 or S2");
    o.expect(a.solution == b.solution && a.trace == b.trace, "deterministic");
    o.expect(seconds_since(t0) < 1.0, "under 1 s");
    if (a.solution) o.note << "solve -> " << format_assignment(*a.solution, f.language) << "; ";
  });

  criterion(3, "fig1: cycle-consistent, not linked; extra pair links it", [](Result& o) {
    const Instance inst = load("fig1.json").instance;
    const InstanceProfile p = instance_profile(inst);
    o.expect(p.cycle_consistent && !p.linked, "profile");
    o.expect(linked_components(inst, 0) == std::vector<Subset>{Subset{0}, Subset{1}}, "components of D0 = {{a},{b}}");
    Instance more = inst;
    more.edges.at({2, 1}).insert(3, 2);  // (d, c)
    o.expect(instance_profile(more).linked, "linked after adding (d,c)");
  });

  criterion(4, "fig2: linked, not cycle-consistent, no solution", [](Result& o) {
    const Instance inst = load("fig2.json").instance;
    const InstanceProfile p = instance_profile(inst);
    o.expect(p.linked && !p.cycle_consistent, "profile");
    o.expect(cycle_consistency_reduce(inst).outcome == Outcome::NoSolution, "cc -> NoSolution");
    o.expect(brute_force_solve(inst).empty(), "brute force empty");
  });

  criterion(5, "fig3: linked components", [](Result& o) {
    const Instance inst = load("fig3.json").instance;
    // a=0 b=1 e=2 c=3 d=4
    o.expect(linked_components(inst, 0) == std::vector<Subset>{Subset{0, 2}, Subset{1}}, "D0 = {{a,e},{b}}");
    o.expect(linked_components(inst, 1) == std::vector<Subset>{Subset{0, 2}, Subset{3}}, "D1 = {{a,e},{c}}");
    o.expect(linked_components(inst, 2) == std::vector<Subset>{Subset{1}, Subset{4}}, "D2 = {{d},{b}}");
  });

  criterion(6, "every trace step preserves solvability", [](Result& o) {
    const auto t0 = Clock::now();
    const Corpus& c = corpus();
    long checked = 0, violations = 0;
    for (const CorpusEntry& e : c.entries) check_chain_soundness(e.instance, e.answer.trace.steps, checked, violations);
    o.expect(violations == 0, "0 violations");
    o.expect(c.entries.size() >= kSeeds * c.names.size(), ">= 1000 instances per template");
    o.expect(seconds_since(t0) + c.build_seconds < 600.0, "under 10 min");
    o.note << c.entries.size() << " instances over " << c.names.size() << " templates, " << checked << " steps, "
           << violations << " violations";
  });

  criterion(7, "solver verdict equals brute force", [](Result& o) {
    long agree = 0, sat = 0;
    for (const CorpusEntry& e : corpus().entries) {
      const bool want = brute_force_first(e.instance).has_value();
      const bool got = e.answer.satisfiable() && is_solution(e.instance, *e.answer.solution);
      agree += want == got && e.answer.satisfiable() == want;
      sat += want;
    }
    o.expect(agree == static_cast<long>(corpus().entries.size()), "100% agreement");
    o.note << agree << "/" << corpus().entries.size() << " agree (" << sat << " satisfiable)";
  });

  criterion(8, "Gaussian elimination over Z2, Z3, Z5", [](Result& o) {
    std::mt19937_64 rng(8);
    long systems = 0, ops = 0;
    for (int p : {2, 3, 5}) {
      for (int trial = 0; trial < 500; ++trial) {
        const int d = 1 + static_cast<int>(rng() % 4);
        const int rows = 1 + static_cast<int>(rng() % 4);
        ModMatrix m(rows, d + 1);
        for (Eigen::Index r = 0; r < m.rows(); ++r)
          for (Eigen::Index k = 0; k < m.cols(); ++k) m(r, k) = static_cast<int>(rng() % static_cast<std::uint64_t>(p));
        const auto want = enumerate(m, p);
        LinearSystem sys;
        PrimeSystem ps;
        ps.p = p;
        for (int k = 0; k < d; ++k) ps.columns.push_back({k, 0});
        ps.augmented = m;
        sys.systems.push_back(ps);
        const auto s = gauss_solve(sys);
        o.expect(s ? points(s->spaces[0]) == want : want.empty(), "gauss_solve = enumeration");
        ++systems;

        const Eigen::Index a = static_cast<Eigen::Index>(rng() % rows);
        const Eigen::Index b = static_cast<Eigen::Index>(rng() % rows);
        ModMatrix x = m;
        row_switch(x, a, b);
        o.expect(enumerate(x, p) == want, "switch keeps solutions");
        x = m;
        row_scale(x, a, 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(p - 1)), p);
        o.expect(enumerate(x, p) == want, "scale keeps solutions");
        ops += 2;
        if (a != b) {
          x = m;
          row_add(x, a, b, static_cast<int>(rng() % static_cast<std::uint64_t>(p)), p);
          o.expect(enumerate(x, p) == want, "addition keeps solutions");
          ++ops;
        }
      }
    }
    o.note << systems << " systems, " << ops << " row operations";
  });

  criterion(9, "invariant relations of the Z2 and Z3 sums are affine", [](Result& o) {
    std::size_t total = 0;
    for (const char* name : {"z2", "z3"}) {
      const Language lang = template_language(name);
      for (const BinaryRelation& r : lang.binary) {
        std::vector<ModVector> pts;
        for (auto [a, b] : r.pairs()) pts.push_back((ModVector(2) << a, b).finished());
        const AffineHull h = affine_hull(pts, lang.base_size, 2);
        o.expect(h.closed && h.space.cardinality() == static_cast<std::size_t>(r.count()), "relation equals its affine hull");
        ++total;
      }
    }
    const std::size_t z2 = template_language("z2").binary.size();
    o.expect(z2 == 11, "Z2 language has 11 binary relations");
    o.note << total << " relations; Z2 count " << z2;
  });

  criterion(10, "four-case classification is total", [](Result& o) {
    std::map<std::string, int> tally;
    int count = 0;
    std::vector<std::pair<std::string, Language>> algebras;
    for (const std::string& name : template_names()) algebras.emplace_back(name, template_language(name));
    // The figure algebras, up to the 4-element cap of the absorption searches.
    algebras.emplace_back("fig1", load("fig1.json").language);
    algebras.emplace_back("fig3", load("fig3.json").language);
    for (const auto& [name, lang] : algebras) {
      AlgebraCache cache(lang);
      for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << lang.base_size); ++bits) {
        const Subset d(bits);
        if (d.size() < 2 || d.size() > 4 || !is_subuniverse(lang.wnu, d)) continue;
        try {
          const FourCaseWitness w = classify_four_cases(cache.local(d), cache.limits());
          o.expect(validated(cache.local(d), w), name + " witness validates");
          static const char* kinds[] = {"BA", "CR", "PC", "Linear"};
          ++tally[kinds[w.index()]];
          ++count;
        } catch (const InternalInconsistency& e) {
          o.expect(false, name + ": " + e.what());
        }
      }
    }
    o.note << count << " subuniverses:";
    for (const auto& [k, v] : tally) o.note << " " << k << "=" << v;
  });

  criterion(11, "linked congruences are polymorphic", [](Result& o) {
    long checked = 0;
    for (const CorpusEntry& e : corpus().entries) {
      const Reduction cc = cycle_consistency_reduce(e.instance);
      if (cc.outcome == Outcome::NoSolution) continue;
      for (int i = 0; i < cc.instance.n; ++i) {
        const Subset d = cc.instance.domains[static_cast<std::size_t>(i)];
        const Congruence con(d, linked_components(cc.instance, i));
        o.expect(is_polymorphism(e.language->wnu, con.pair_relation(e.language->base_size)), "polymorphism");
        ++checked;
      }
    }
    o.note << checked << " linked partitions";
  });

  criterion(12, "checker accepts genuine traces and rejects mutations", [](Result& o) {
    const Corpus& c = corpus();
    std::vector<ParsedFile> files;
    for (const char* name : {"example1.json", "example2.json", "fig1.json", "fig1_linked.json", "fig2.json", "fig3.json"})
      files.push_back(load(name));

    std::vector<LabeledTrace> genuine;
    for (const ParsedFile& f : files) {
      genuine.push_back({"file", f.instance, &f.language, solve(f.instance, f.language).trace});
      SolveConfig oracle;
      oracle.brute_force_threshold = 64;
      genuine.push_back({"file/oracle", f.instance, &f.language, solve(f.instance, f.language, oracle).trace});
    }
    for (const CorpusEntry& e : c.entries) genuine.push_back({"corpus", e.instance, e.language, e.answer.trace});
    // Reduction certificates for instances that are not yet cycle-consistent.
    for (const Language& lang : c.languages) {
      AlgebraCache cache(lang);
      for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const Instance inst = generate_instance(lang, {.n = 3, .density = 0.8, .seed = seed});
        const Reduction irr = irreducibility_reduce(inst, cache, brute());
        if (irr.outcome != Outcome::Unchanged) genuine.push_back({"irr", inst, &lang, compose(inst, "irr", irr, lang, cache)});
        const Reduction weak = weaker_instance_reduce(inst, lang, brute());
        if (weak.outcome != Outcome::Unchanged)
          genuine.push_back({"weak", inst, &lang, compose(inst, "weak", weak, lang, cache)});
      }
    }

    std::map<const Language*, std::unique_ptr<AlgebraCache>> caches;
    auto cache_for = [&](const Language* l) -> AlgebraCache& {
      auto& p = caches[l];
      if (!p) p = std::make_unique<AlgebraCache>(*l);
      return *p;
    };

    std::map<std::string, int> genuine_kinds, mutated, rejected;
    long accepted = 0;
    for (const LabeledTrace& lt : genuine) {
      AlgebraCache& cache = cache_for(lt.language);
      const bool ok = verify_trace(lt.instance, *lt.language, lt.trace, {}, &cache).accepted;
      accepted += ok;
      for (const TraceStep& s : lt.trace.steps) ++genuine_kinds[s.kind];
      for (const Mutation& m : single_field_mutations(lt.trace)) {
        ++mutated[m.kind];
        rejected[m.kind] += !verify_trace(lt.instance, *lt.language, m.trace, {}, &cache).accepted;
      }
    }
    o.expect(accepted == static_cast<long>(genuine.size()), "all genuine traces accepted");

    // Forged steps: every kind, including the weakening and equation steps of the linear loop.
    const Language& z4 = template_language("z4_5ary");
    std::vector<LinearEvent> linear;
    {
      AlgebraCache cache(z4);
      std::mt19937_64 rng(3);
      for (int it = 0; it < 100; ++it)
        linear_case_solve(random_z4(z4, rng, 4), cache, brute(), [&](LinearEvent e) { linear.push_back(e); });
    }
    const auto witnesses = sample_witnesses(genuine, linear);
    std::map<std::string, int> forged, forged_rejected;
    for (const std::string kind : {"cc", "irr", "weak", "ba", "cr", "pc", "lin_factor", "lin_gauss", "lin_weaken",
                                   "lin_eq_add", "oracle", "answer"}) {
      const auto it = witnesses.find(kind);
      o.expect(it != witnesses.end(), "a genuine " + kind + " witness exists");
      if (it == witnesses.end()) continue;
      for (const ParsedFile& f : files) {
        const auto w = kind == "oracle" ? lying_oracle(f.instance) : it->second;
        const Trace t = insert_forged(solve(f.instance, f.language).trace, kind, w);
        ++forged[kind];
        forged_rejected[kind] += !verify_trace(f.instance, f.language, t).accepted;
      }
    }

    long total = 0, caught = 0;
    for (const auto& [k, n] : mutated) {
      total += n;
      caught += rejected[k];
    }
    for (const auto& [k, n] : forged) {
      total += n;
      caught += forged_rejected[k];
    }
    o.expect(caught == total, "all mutations rejected");
    for (const std::string kind : {"cc", "irr", "weak", "ba", "cr", "pc", "lin_factor", "lin_gauss", "lin_weaken",
                                   "lin_eq_add", "oracle", "answer"})
      o.expect(mutated[kind] + forged[kind] > 0, "a mutation of kind " + kind);

    o.note << accepted << "/" << genuine.size() << " genuine accepted; " << caught << "/" << total
           << " mutations rejected\n  genuine steps:";
    for (const auto& [k, n] : genuine_kinds) o.note << " " << k << "=" << n;
    o.note << "\n  field mutations rejected:";
    for (const auto& [k, n] : mutated) o.note << " " << k << "=" << rejected[k] << "/" << n;
    o.note << "\n  forged steps rejected:";
    for (const auto& [k, n] : forged) o.note << " " << k << "=" << forged_rejected[k] << "/" << n;
  });

  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
  return failures == 0 ? 0 : 1;
}
