#include "zhuk/certkit.hpp"

#include <functional>
#include <sstream>

#include "zhuk/consistency.hpp"
#include "zhuk/linear.hpp"
#include "zhuk/solver.hpp"

namespace zhuk {

using nlohmann::json;

const char* to_string(StepStatus s) {
  switch (s) {
    case StepStatus::WitnessOk: return "witness-ok";
    case StepStatus::WitnessFail: return "witness-fail";
    case StepStatus::SemanticsOk: return "semantics-ok";
    case StepStatus::SemanticsFail: return "semantics-fail";
    case StepStatus::Unchecked: return "unchecked";
  }
  return "?";
}

namespace {

struct Failure {
  StepStatus status;
  std::string reason;
  std::optional<Assignment> counterexample;
};

class Checker {
 public:
  Checker(const Instance& root, const Language& lang, const CheckConfig& cfg, AlgebraCache* shared)
      : root_(root), lang_(lang), cfg_(cfg), own_(shared ? nullptr : std::make_unique<AlgebraCache>(lang, cfg.limits)),
        cache_(shared ? *shared : *own_) {}

  // Verifies a step sequence that must end with an answer. Top-level steps are recorded
  // in `out`; nested branch steps report through their parent.
  std::optional<Failure> run(const Instance& start, const std::vector<TraceStep>& steps, Verdict* out,
                             std::optional<Assignment>* answered);

 private:
  SubSolver brute() {
    return [this](const Instance& x) { return brute_force_first(x, cfg_.oracle_cap); };
  }
  std::optional<Failure> fail(std::string reason) { return Failure{StepStatus::WitnessFail, std::move(reason), {}}; }

  std::optional<Failure> preconditions(const Instance& cur, bool no_absorption, bool no_pc);
  std::optional<Failure> check_reduction(const char* kind, const Instance& cur, const Instance& next,
                                         const json& witness);
  std::optional<Failure> check_restriction(const TraceStep& s, const Instance& cur, const Instance& next);
  std::optional<Failure> check_pc(const TraceStep& s, const Instance& cur, const Instance& next);
  // Semantic implication sol(cur) nonempty => sol(next) nonempty.
  std::optional<Failure> implication(const Instance& cur, const Instance& next, bool* unchecked);

  const Instance& root_;
  const Language& lang_;
  const CheckConfig& cfg_;
  std::unique_ptr<AlgebraCache> own_;
  AlgebraCache& cache_;
};

std::optional<Failure> Checker::preconditions(const Instance& cur, bool no_absorption, bool no_pc) {
  if (cycle_consistency_reduce(cur).outcome != Outcome::Unchanged) return fail("instance is not cycle-consistent");
  if (irreducibility_reduce(cur, cache_, brute()).outcome != Outcome::Unchanged) return fail("instance is not irreducible");
  if (weaker_instance_reduce(cur, lang_, brute()).outcome != Outcome::Unchanged)
    return fail("weaker instance still reduces a domain");
  for (int i = 0; i < cur.n; ++i) {
    const Subset d = cur.domains[static_cast<std::size_t>(i)];
    if (d.size() < 2) continue;
    if (no_absorption && (cache_.binary_absorption(d) || cache_.central(d)))
      return fail("domain of x" + std::to_string(i) + " has an absorbing or central subuniverse");
    if (no_pc && cache_.pc_quotient(d)) return fail("domain of x" + std::to_string(i) + " has a PC quotient");
  }
  return std::nullopt;
}

std::optional<Failure> Checker::check_reduction(const char* kind, const Instance& cur, const Instance& next,
                                                const json& witness) {
  const std::string k = kind;
  Reduction r;
  if (k == "cc") r = cycle_consistency_reduce(cur);
  else if (k == "irr") r = irreducibility_reduce(cur, cache_, brute());
  else r = weaker_instance_reduce(cur, lang_, brute());
  if (r.outcome == Outcome::Unchanged) return fail(k + " replay leaves the instance unchanged");
  if (!(r.instance == next)) return fail(k + " replay produces a different instance");
  if (reduction_witness(r) != witness) return fail(k + " witness differs from the replay");
  return std::nullopt;
}

std::optional<Failure> Checker::check_restriction(const TraceStep& s, const Instance& cur, const Instance& next) {
  try {
    const json& w = s.witness;
    const int i = w.at("variable").get<int>();
    if (i < 0 || i >= cur.n) return fail("variable out of range");
    const Subset d = subset_from_json(w.at("domain"));
    if (d != cur.domains[static_cast<std::size_t>(i)]) return fail("witness domain differs from the instance");
    const LocalAlgebra& alg = cache_.local(d);
    Subset target;
    if (s.kind == "ba") {
      BinaryAbsorbing ba{subset_from_json(w.at("absorbing")), table_from_json(w.at("term"))};
      if (auto err = check_binary_absorbing(alg, ba)) return fail(*err);
      target = ba.absorbing;
    } else {
      Central cr{subset_from_json(w.at("center")), table_from_json(w.at("term")), {}};
      for (const json& t : w.at("transcripts"))
        cr.transcripts.push_back({t.at("element").get<int>(), relation_from_json(t.at("closure"), cur.base_size)});
      if (auto err = check_central(alg, cr)) return fail(*err);
      target = cr.center;
    }
    if (auto f = preconditions(cur, false, false)) return f;
    if (!(restrict_instance(cur, i, target) == next)) return fail("output is not the restriction to the witness subuniverse");
  } catch (const json::exception& e) {
    return fail(std::string("malformed witness: ") + e.what());
  } catch (const Error& e) {
    return fail(std::string("malformed witness: ") + e.what());
  }
  return std::nullopt;
}

std::optional<Failure> Checker::check_pc(const TraceStep& s, const Instance& cur, const Instance& next) {
  try {
    const json& w = s.witness;
    const int i = w.at("variable").get<int>();
    if (i < 0 || i >= cur.n) return fail("variable out of range");
    const Subset d = subset_from_json(w.at("domain"));
    if (d != cur.domains[static_cast<std::size_t>(i)]) return fail("witness domain differs from the instance");
    const LocalAlgebra& alg = cache_.local(d);
    PcQuotient pc{congruence_from_json(w.at("congruence")), table_from_json(w.at("discriminator"))};
    if (auto err = check_pc_quotient(alg, pc)) return fail(*err);
    if (!pc_checks(alg, pc.congruence, cfg_.limits).clone) return fail("discriminator is not a polynomial of D/σ");
    if (auto f = preconditions(cur, true, false)) return f;
    if (w.value("exhaustive", false)) {
      if (!(next == cur)) return fail("exhaustive pc step changes the instance");
      const json& branches = w.at("branches");
      const auto& blocks = pc.congruence.blocks();
      if (branches.size() != blocks.size()) return fail("exhaustive pc step misses a block");
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (subset_from_json(branches[b].at("block")) != blocks[b]) return fail("branch blocks out of order");
        const Instance start = restrict_instance(cur, i, blocks[b]);
        const auto sub = steps_from_json(branches[b].at("steps"), "branch " + std::to_string(b));
        if (sub.empty() || sub.front().input != instance_digest(start)) return fail("branch does not start at its block");
        std::optional<Assignment> answered;
        if (auto f = run(start, sub, nullptr, &answered)) {
          f->reason = "branch " + std::to_string(b) + ": " + f->reason;
          return f;
        }
        if (answered) return fail("branch " + std::to_string(b) + " has a solution");
      }
      return std::nullopt;
    }
    const Subset block = subset_from_json(w.at("block"));
    bool found = false;
    for (Subset b : pc.congruence.blocks()) found = found || b == block;
    if (!found) return fail("E is not a block of σ");
    if (!(restrict_instance(cur, i, block) == next)) return fail("output is not the restriction to E");
  } catch (const json::exception& e) {
    return fail(std::string("malformed witness: ") + e.what());
  } catch (const Error& e) {
    return fail(std::string("malformed witness: ") + e.what());
  }
  return std::nullopt;
}

std::optional<Failure> Checker::implication(const Instance& cur, const Instance& next, bool* unchecked) {
  std::optional<Assignment> before;
  try {
    before = brute_force_first(cur, cfg_.oracle_cap);
    if (before && !brute_force_first(next, cfg_.oracle_cap))
      return Failure{StepStatus::SemanticsFail, "solution lost", before};
  } catch (const CapacityError&) {
    *unchecked = true;
  }
  return std::nullopt;
}

bool satisfies_rows(const std::vector<ModVector>& image, const json& equations) {
  for (std::size_t s = 0; s < equations.size(); ++s) {
    const int p = equations[s].at("p").get<int>();
    for (const json& row : equations[s].at("rows")) {
      const auto r = row.get<std::vector<int>>();
      long long acc = 0;
      for (std::size_t c = 0; c + 1 < r.size(); ++c) acc += static_cast<long long>(r[c]) * image[s](static_cast<Eigen::Index>(c));
      if (mod_p(acc - r.back(), p) != 0) return false;
    }
  }
  return true;
}

std::optional<Failure> Checker::run(const Instance& start, const std::vector<TraceStep>& steps, Verdict* out,
                                    std::optional<Assignment>* answered) {
  const bool semantic = cfg_.mode == CheckMode::Semantic;
  Instance cur = start;
  std::vector<LinearEvent> replay;
  std::size_t replay_pos = 0;
  LinearResult replay_result;
  bool in_linear = false;

  for (std::size_t k = 0; k < steps.size(); ++k) {
    const TraceStep& s = steps[k];
    std::optional<Failure> f;
    bool unchecked = false;
    Instance next = cur;
    if (s.input != instance_digest(cur)) f = fail("input digest mismatch");
    if (!f) {
      try {
        next = apply_delta(cur, s.delta);
      } catch (const std::exception& e) {
        f = fail(std::string("malformed delta: ") + e.what());
      }
    }
    if (!f && s.output != instance_digest(next)) f = fail("output digest mismatch");
    const bool last = k + 1 == steps.size();
    if (!f && s.kind == "answer" && !last) f = fail("answer before the end of the trace");
    if (!f && s.kind != "answer" && last) f = fail("trace does not end with an answer");
    const bool linear_kind = s.kind.rfind("lin_", 0) == 0;
    if (!f && in_linear && !linear_kind && s.kind != "answer") f = fail("linear segment interrupted");

    if (!f) {
      if (s.kind == "cc" || s.kind == "irr" || s.kind == "weak") {
        f = check_reduction(s.kind.c_str(), cur, next, s.witness);
      } else if (s.kind == "ba" || s.kind == "cr") {
        f = check_restriction(s, cur, next);
      } else if (s.kind == "pc") {
        f = check_pc(s, cur, next);
      } else if (linear_kind) {
        if (!(next == cur)) f = fail("linear steps do not change the instance");
        if (!f && !in_linear) {
          in_linear = true;
          f = preconditions(cur, true, true);
          if (!f) {
            try {
              replay_result = linear_case_solve(cur, cache_, brute(), [&](LinearEvent e) { replay.push_back(std::move(e)); });
            } catch (const Error& e) {
              f = fail(std::string("linear replay failed: ") + e.what());
            }
          }
        }
        if (!f) {
          if (replay_pos >= replay.size() || replay[replay_pos].kind != s.kind ||
              replay[replay_pos].witness != s.witness)
            f = fail(s.kind + " differs from the replay");
          ++replay_pos;
        }
        if (!f && semantic && s.kind == "lin_eq_add") {
          try {
            const FactorizedInstance fi = factorize_instance(cur, minimal_linear_congruences(cur, cache_));
            for (const Assignment& h : brute_force_solve(cur, cfg_.oracle_cap))
              if (!satisfies_rows(fi.image(h), s.witness.at("equations"))) {
                f = Failure{StepStatus::SemanticsFail, "added equations cut off a solution", h};
                break;
              }
          } catch (const CapacityError&) {
            unchecked = true;
          } catch (const std::exception& e) {
            f = fail(std::string("malformed equations: ") + e.what());
          }
        }
      } else if (s.kind == "oracle") {
        try {
          const json& r = s.witness.at("result");
          if (r.is_null()) {
            if (brute_force_first(cur, cfg_.oracle_cap)) f = fail("oracle claims no solution but one exists");
          } else if (!is_solution(cur, r.get<Assignment>())) {
            f = fail("oracle result is not a solution");
          }
        } catch (const CapacityError&) {
          unchecked = true;
        } catch (const std::exception& e) {
          f = fail(std::string("malformed witness: ") + e.what());
        }
      } else if (s.kind == "answer") {
        try {
          const std::string value = s.witness.at("value").get<std::string>();
          if (value == "yes") {
            const auto h = s.witness.at("assignment").get<Assignment>();
            if (!is_solution(cur, h) || !is_solution(root_, h)) f = fail("assignment is not a solution");
            else if (answered) *answered = h;
            if (!f && in_linear && !replay_result.solution) f = fail("linear replay finds no solution");
          } else if (value == "no") {
            const std::string reason = s.witness.at("reason").get<std::string>();
            const TraceStep* prev = k > 0 ? &steps[k - 1] : nullptr;
            if (reason == "empty-domain") {
              bool empty = false;
              for (Subset d : cur.domains) empty = empty || d.empty();
              if (!empty) f = fail("no domain is empty");
            } else if (reason == "pc-exhausted") {
              if (!prev || prev->kind != "pc" || !prev->witness.value("exhaustive", false))
                f = fail("pc-exhausted without an exhaustive pc step");
            } else if (reason == "oracle") {
              if (!prev || prev->kind != "oracle" || !prev->witness.at("result").is_null())
                f = fail("oracle answer without an oracle step");
            } else if (reason == "linear-inconsistent" || reason == "linear-exhausted") {
              if (!in_linear || replay_result.solution || replay_result.reason != reason)
                f = fail("linear replay does not end with " + reason);
            } else {
              f = fail("unknown reason '" + reason + "'");
            }
            if (!f && answered) answered->reset();
            if (!f && semantic) {
              try {
                if (auto h = brute_force_first(cur, cfg_.oracle_cap))
                  f = Failure{StepStatus::SemanticsFail, "answer no but a solution exists", h};
              } catch (const CapacityError&) {
                unchecked = true;
              }
            }
          } else {
            f = fail("answer value must be yes or no");
          }
          if (!f && in_linear && replay_pos != replay.size()) f = fail("linear segment ends early");
        } catch (const std::exception& e) {
          f = fail(std::string("malformed witness: ") + e.what());
        }
      }
    }

    if (!f && semantic && !(next == cur) && s.kind != "answer") f = implication(cur, next, &unchecked);

    if (out) {
      StepVerdict v;
      v.index = static_cast<int>(k);
      v.kind = s.kind;
      if (f) {
        v.status = f->status;
        v.reason = f->reason;
        v.counterexample = f->counterexample;
      } else if (unchecked) {
        v.status = StepStatus::Unchecked;
        out->unchecked.push_back(static_cast<int>(k));
      } else {
        v.status = semantic ? StepStatus::SemanticsOk : StepStatus::WitnessOk;
      }
      out->steps.push_back(v);
      if (f) out->failed_step = static_cast<int>(k);
    }
    if (f) return f;
    cur = std::move(next);
  }
  if (steps.empty()) return fail("trace does not end with an answer");
  return std::nullopt;
}

}  // namespace

Verdict verify_trace(const Instance& inst, const Language& lang, const Trace& trace, const CheckConfig& cfg,
                     AlgebraCache* cache) {
  Verdict v;
  if (trace.instance != instance_digest(inst)) {
    v.reason = "trace belongs to a different instance";
    return v;
  }
  try {
    check_chain(trace.instance, trace.steps);
  } catch (const ParseError& e) {
    v.reason = e.what();
    return v;
  }
  Checker checker(inst, lang, cfg, cache);
  std::optional<Assignment> answered;
  if (auto f = checker.run(inst, trace.steps, &v, &answered)) {
    v.reason = "step " + std::to_string(v.failed_step) + ": " + f->reason;
    return v;
  }
  v.accepted = true;
  return v;
}

// ---------------------------------------------------------------- mutations

namespace {

bool bump_table(json& table) {
  json& cells = table.at("table");
  if (cells.empty()) return false;
  const int size = table.at("size").get<int>();
  cells[0] = (cells[0].get<int>() + 1) % std::max(size, 2);
  return true;
}

// Changes the first integer leaf found in `j` (depth-first); returns false if none.
bool bump_first_int(json& j) {
  if (j.is_number_integer()) {
    j = j.get<int>() == 0 ? 1 : 0;
    return true;
  }
  if (j.is_array() || j.is_object())
    for (auto& child : j)
      if (bump_first_int(child)) return true;
  return false;
}

}  // namespace

std::vector<Mutation> single_field_mutations(const Trace& trace) {
  std::vector<Mutation> out;
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const TraceStep& s = trace.steps[k];
    Trace t = trace;
    json& w = t.steps[k].witness;
    bool changed = false;
    std::string field;
    if (s.kind == "ba" || s.kind == "cr") {
      field = "witness.term";
      changed = bump_table(w.at("term"));
    } else if (s.kind == "pc") {
      field = "witness.discriminator";
      changed = bump_table(w.at("discriminator"));
    } else if (s.kind == "answer") {
      field = "witness.value";
      w["value"] = w.at("value") == "yes" ? "no" : "yes";
      if (!w.contains("reason")) w["reason"] = "empty-domain";
      changed = true;
    } else if (s.kind == "oracle") {
      field = "witness.result";
      if (w.at("result").is_null()) w["result"] = json::array();
      else w["result"] = nullptr;
      changed = true;
    } else if (s.kind == "lin_weaken") {
      field = "witness.relation";
      w["relation"] = w.at("relation").is_null() ? json::array() : json(nullptr);
      changed = true;
    } else {
      field = "witness";
      changed = bump_first_int(w);
    }
    if (changed) out.push_back({"step " + std::to_string(k) + ": " + field, s.kind, t});
    if (!(s.delta.empty())) {
      Trace d = trace;
      json& delta = d.steps[k].delta;
      field = "delta";
      if (bump_first_int(delta.contains("domains") ? delta["domains"] : delta["edges"]))
        out.push_back({"step " + std::to_string(k) + ": " + field, s.kind, d});
    }
  }
  return out;
}

// ---------------------------------------------------------------- CNF

std::string Cnf::to_dimacs() const {
  std::ostringstream os;
  for (const std::string& c : comments) os << "c " << c << '\n';
  os << "p cnf " << variables << ' ' << clauses.size() << '\n';
  for (const auto& clause : clauses) {
    for (int lit : clause) os << lit << ' ';
    os << "0\n";
  }
  return os.str();
}

Cnf emit_cnf(const Instance& inst, const Language* lang) {
  Cnf cnf;
  std::vector<std::vector<int>> var(static_cast<std::size_t>(inst.n), std::vector<int>(static_cast<std::size_t>(inst.base_size), 0));
  for (int i = 0; i < inst.n; ++i)
    for (Element a : inst.domains[static_cast<std::size_t>(i)].elements()) {
      var[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] = ++cnf.variables;
      const std::string name = lang ? lang->name_of(a) : std::to_string(a);
      cnf.comments.push_back("var " + std::to_string(cnf.variables) + " = h(" + std::to_string(i) + "," + name + ")");
    }
  for (int i = 0; i < inst.n; ++i) {
    std::vector<int> alo;
    for (Element a : inst.domains[static_cast<std::size_t>(i)].elements()) alo.push_back(var[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)]);
    cnf.clauses.push_back(alo);
  }
  for (int i = 0; i < inst.n; ++i) {
    const auto d = inst.domains[static_cast<std::size_t>(i)].elements();
    for (std::size_t x = 0; x < d.size(); ++x)
      for (std::size_t y = x + 1; y < d.size(); ++y)
        cnf.clauses.push_back({-var[static_cast<std::size_t>(i)][static_cast<std::size_t>(d[x])],
                               -var[static_cast<std::size_t>(i)][static_cast<std::size_t>(d[y])]});
  }
  for (const auto& [key, rel] : inst.edges) {
    const auto [i, j] = key;
    for (Element a : inst.domains[static_cast<std::size_t>(i)].elements())
      for (Element b : inst.domains[static_cast<std::size_t>(j)].elements()) {
        if (rel.contains(a, b)) continue;
        const int u = var[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
        const int v = var[static_cast<std::size_t>(j)][static_cast<std::size_t>(b)];
        if (u == v) cnf.clauses.push_back({-u});
        else cnf.clauses.push_back({-u, -v});
      }
  }
  return cnf;
}

std::size_t count_models(const Cnf& cnf, std::size_t limit) {
  const int nv = cnf.variables;
  // Clauses indexed by their largest variable; checked once that variable is set.
  std::vector<std::vector<const std::vector<int>*>> by_last(static_cast<std::size_t>(nv) + 1);
  for (const auto& c : cnf.clauses) {
    int last = 0;
    for (int lit : c) last = std::max(last, std::abs(lit));
    if (c.empty()) return 0;
    by_last[static_cast<std::size_t>(last)].push_back(&c);
  }
  std::vector<int> value(static_cast<std::size_t>(nv) + 1, 0);
  std::size_t count = 0;
  std::function<void(int)> dfs = [&](int v) {
    if (count >= limit) return;
    if (v > nv) {
      ++count;
      return;
    }
    for (int b : {0, 1}) {
      value[static_cast<std::size_t>(v)] = b;
      bool ok = true;
      for (const auto* c : by_last[static_cast<std::size_t>(v)]) {
        bool sat = false;
        for (int lit : *c) sat = sat || (value[static_cast<std::size_t>(std::abs(lit))] == (lit > 0 ? 1 : 0));
        if (!sat) {
          ok = false;
          break;
        }
      }
      if (ok) dfs(v + 1);
    }
  };
  dfs(1);
  return count;
}

bool cnf_satisfiable(const Cnf& cnf) { return count_models(cnf, 1) > 0; }

}  // namespace zhuk
