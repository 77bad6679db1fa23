#include "zhuk/solver.hpp"

#include <limits>
#include <map>
#include <memory>
#include <string>

#include "zhuk/consistency.hpp"
#include "zhuk/linear.hpp"

namespace zhuk {

using nlohmann::json;

std::size_t search_space(const Instance& inst) {
  std::size_t total = 1;
  for (Subset d : inst.domains) {
    const auto s = static_cast<std::size_t>(d.size());
    if (s == 0) return 0;
    if (total > std::numeric_limits<std::size_t>::max() / s) return std::numeric_limits<std::size_t>::max();
    total *= s;
  }
  return total;
}

namespace {

// Depth-first enumeration in lexicographic order; `visit` returns false to stop.
template <class Visit>
void enumerate_solutions(const Instance& inst, std::size_t cap, Visit&& visit) {
  if (search_space(inst) > cap)
    throw CapacityError("search space " + std::to_string(search_space(inst)) + " exceeds the oracle cap " +
                        std::to_string(cap));
  const int n = inst.n;
  std::vector<std::vector<Element>> values(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = inst.domains[static_cast<std::size_t>(i)].elements();
  Assignment h(static_cast<std::size_t>(n), 0);
  std::vector<std::size_t> pos(static_cast<std::size_t>(n), 0);
  // Edges are checked once both endpoints are assigned.
  struct Check {
    int first;
    int second;
    const BinaryRelation* rel;
  };
  std::vector<std::vector<Check>> checks(static_cast<std::size_t>(n));
  for (const auto& [key, rel] : inst.edges)
    checks[static_cast<std::size_t>(std::max(key.first, key.second))].push_back({key.first, key.second, &rel});
  auto ok = [&](int i) {
    for (const Check& c : checks[static_cast<std::size_t>(i)])
      if (!c.rel->contains(h[static_cast<std::size_t>(c.first)], h[static_cast<std::size_t>(c.second)])) return false;
    return true;
  };
  if (n == 0) {
    visit(h);
    return;
  }
  for (int i = 0; i < n; ++i)
    if (values[static_cast<std::size_t>(i)].empty()) return;
  int i = 0;
  pos[0] = 0;
  while (i >= 0) {
    auto& p = pos[static_cast<std::size_t>(i)];
    const auto& vals = values[static_cast<std::size_t>(i)];
    if (p == vals.size()) {
      --i;
      if (i >= 0) ++pos[static_cast<std::size_t>(i)];
      continue;
    }
    h[static_cast<std::size_t>(i)] = vals[p];
    if (!ok(i)) {
      ++p;
      continue;
    }
    if (i + 1 == n) {
      if (!visit(h)) return;
      ++p;
      continue;
    }
    ++i;
    pos[static_cast<std::size_t>(i)] = 0;
  }
}

}  // namespace

std::vector<Assignment> brute_force_solve(const Instance& inst, std::size_t cap) {
  std::vector<Assignment> out;
  enumerate_solutions(inst, cap, [&](const Assignment& h) {
    out.push_back(h);
    return true;
  });
  return out;
}

std::optional<Assignment> brute_force_first(const Instance& inst, std::size_t cap) {
  std::optional<Assignment> out;
  enumerate_solutions(inst, cap, [&](const Assignment& h) {
    out = h;
    return false;
  });
  return out;
}

namespace {

json answer_witness(const std::optional<Assignment>& h, const std::string& reason) {
  if (h) return {{"value", "yes"}, {"assignment", assignment_json(*h)}};
  return {{"value", "no"}, {"reason", reason}};
}

class Engine {
 public:
  Engine(const Language& lang, const SolveConfig& cfg, AlgebraCache& cache) : lang_(lang), cfg_(cfg), cache_(cache) {}

  std::optional<Assignment> run(const Instance& start, int depth, std::vector<TraceStep>* steps);

 private:
  std::optional<Assignment> sub_solve(const Instance& inst, int depth);
  SubSolver sub_solver(int depth) {
    return [this, depth](const Instance& x) { return sub_solve(x, depth); };
  }

  const Language& lang_;
  const SolveConfig& cfg_;
  AlgebraCache& cache_;
  std::map<std::pair<int, std::string>, std::optional<Assignment>> memo_;
};

struct Recorder {
  std::vector<TraceStep>* steps;

  void step(const char* kind, const Instance& before, const Instance& after, json witness) const {
    if (!steps) return;
    TraceStep s;
    s.kind = kind;
    s.input = instance_digest(before);
    s.output = before == after ? s.input : instance_digest(after);
    s.delta = instance_delta(before, after);
    s.witness = std::move(witness);
    steps->push_back(std::move(s));
  }
  void answer(const Instance& inst, const std::optional<Assignment>& h, const std::string& reason) const {
    step("answer", inst, inst, answer_witness(h, reason));
  }
};

std::optional<Assignment> Engine::sub_solve(const Instance& inst, int depth) {
  const auto key = std::make_pair(depth, canonical_instance_json(inst));
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  std::optional<Assignment> h;
  if (depth < 0 || search_space(inst) <= cfg_.brute_force_threshold) {
    if (!cfg_.allow_oracle) throw CapacityError("recursion budget exhausted and the oracle is disabled");
    h = brute_force_first(inst, cfg_.oracle_cap);
  } else {
    h = run(inst, depth, nullptr);
  }
  memo_.emplace(key, h);
  return h;
}

std::optional<Assignment> Engine::run(const Instance& start, int depth, std::vector<TraceStep>* steps) {
  const Recorder rec{steps};
  Instance cur = start;
  while (true) {
    for (Subset d : cur.domains)
      if (d.empty()) {
        rec.answer(cur, std::nullopt, "empty-domain");
        return std::nullopt;
      }
    if (search_space(cur) <= cfg_.brute_force_threshold) {
      if (!cfg_.allow_oracle) throw CapacityError("oracle threshold reached but the oracle is disabled");
      auto h = brute_force_first(cur, cfg_.oracle_cap);
      rec.step("oracle", cur, cur, {{"result", h ? json(*h) : json(nullptr)}, {"space", search_space(cur)}});
      rec.answer(cur, h, "oracle");
      return h;
    }

    auto apply = [&](const char* kind, const Reduction& r) {
      rec.step(kind, cur, r.instance, reduction_witness(r));
      cur = r.instance;
    };
    if (Reduction r = cycle_consistency_reduce(cur); r.outcome != Outcome::Unchanged) {
      apply("cc", r);
      continue;
    }
    if (Reduction r = irreducibility_reduce(cur, cache_, sub_solver(depth - 1)); r.outcome != Outcome::Unchanged) {
      apply("irr", r);
      continue;
    }
    if (Reduction r = weaker_instance_reduce(cur, lang_, sub_solver(depth - 1)); r.outcome != Outcome::Unchanged) {
      apply("weak", r);
      continue;
    }

    bool all_singleton = true;
    for (Subset d : cur.domains) all_singleton = all_singleton && d.size() == 1;
    if (all_singleton) {
      Assignment h;
      for (Subset d : cur.domains) h.push_back(d.min());
      if (!is_solution(cur, h)) throw InternalInconsistency("cycle-consistent singleton instance is not a solution");
      rec.answer(cur, h, "");
      return h;
    }

    bool restarted = false;
    for (int i = 0; i < cur.n && !restarted; ++i) {
      const Subset d = cur.domains[static_cast<std::size_t>(i)];
      if (d.size() < 2) continue;
      if (const auto& ba = cache_.binary_absorption(d)) {
        Instance next = restrict_instance(cur, i, ba->absorbing);
        rec.step("ba", cur, next,
                 {{"variable", i}, {"domain", subset_json(d)}, {"absorbing", subset_json(ba->absorbing)},
                  {"term", table_json(ba->term)}});
        cur = std::move(next);
        restarted = true;
      } else if (const auto& cr = cache_.central(d)) {
        json transcripts = json::array();
        for (const SgTranscript& t : cr->transcripts)
          transcripts.push_back({{"element", t.element}, {"closure", relation_json(t.closure)}});
        Instance next = restrict_instance(cur, i, cr->center);
        rec.step("cr", cur, next,
                 {{"variable", i}, {"domain", subset_json(d)}, {"center", subset_json(cr->center)},
                  {"term", table_json(cr->term)}, {"transcripts", transcripts}});
        cur = std::move(next);
        restarted = true;
      }
    }
    if (restarted) continue;

    for (int i = 0; i < cur.n; ++i) {
      const Subset d = cur.domains[static_cast<std::size_t>(i)];
      if (d.size() < 2) continue;
      const auto& pc = cache_.pc_quotient(d);
      if (!pc) continue;
      json base = {{"variable", i}, {"domain", subset_json(d)}, {"congruence", blocks_json(pc->congruence)},
                   {"discriminator", table_json(pc->discriminator)}};
      json branches = json::array();
      for (Subset block : pc->congruence.blocks()) {
        Instance next = restrict_instance(cur, i, block);
        std::vector<TraceStep> sub;
        auto h = run(next, depth, steps ? &sub : nullptr);
        if (h) {
          json w = base;
          w["block"] = subset_json(block);
          rec.step("pc", cur, next, w);
          if (steps) steps->insert(steps->end(), sub.begin(), sub.end());
          return h;
        }
        if (steps) branches.push_back({{"block", subset_json(block)}, {"steps", steps_to_json(sub)}});
      }
      json w = base;
      w["exhaustive"] = true;
      w["branches"] = branches;
      rec.step("pc", cur, cur, w);
      rec.answer(cur, std::nullopt, "pc-exhausted");
      return std::nullopt;
    }

    const Instance frozen = cur;
    auto observe = [&](LinearEvent e) { rec.step(e.kind.c_str(), frozen, frozen, std::move(e.witness)); };
    LinearResult res = linear_case_solve(cur, cache_, sub_solver(depth - 1), observe);
    if (res.solution && !is_solution(cur, *res.solution))
      throw InternalInconsistency("linear case returned a non-solution");
    rec.answer(cur, res.solution, res.reason);
    return res.solution;
  }
}

}  // namespace

Answer solve(const Instance& inst, const Language& lang, const SolveConfig& cfg, AlgebraCache* cache) {
  if (cfg.max_depth < 0) throw PreconditionError("max depth must be nonnegative");
  const ValidationReport report = validate_instance(inst, lang);
  if (!report.ok()) throw PreconditionError("invalid instance: " + report.violations.front());
  std::unique_ptr<AlgebraCache> own;
  if (!cache) {
    own = std::make_unique<AlgebraCache>(lang, cfg.limits);
    cache = own.get();
  }
  Engine engine(lang, cfg, *cache);
  Answer a;
  a.trace.instance = instance_digest(inst);
  a.solution = engine.run(inst, cfg.max_depth, &a.trace.steps);
  if (a.solution && !is_solution(inst, *a.solution)) throw InternalInconsistency("solver returned a non-solution");
  return a;
}

}  // namespace zhuk
