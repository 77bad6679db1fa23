#include "zhuk/consistency.hpp"

#include <algorithm>
#include <numeric>

namespace zhuk {

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Unchanged: return "unchanged";
    case Outcome::Reduced: return "reduced";
    case Outcome::NoSolution: return "no-solution";
  }
  return "?";
}

namespace {

Reduction summarize(const Instance& before, Instance after) {
  Reduction r;
  bool empty = false;
  for (int i = 0; i < after.n; ++i) {
    const Subset d = after.domains[static_cast<std::size_t>(i)];
    if (d.empty()) empty = true;
    if (r.variable < 0 && d != before.domains[static_cast<std::size_t>(i)]) {
      r.variable = i;
      r.domain = d;
    }
  }
  if (empty) r.outcome = Outcome::NoSolution;
  else if (after == before) r.outcome = Outcome::Unchanged;
  else r.outcome = Outcome::Reduced;
  r.instance = std::move(after);
  return r;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

Reduction cycle_consistency_reduce(const Instance& inst, PropagationState* state) {
  const int n = inst.n;
  const int l = inst.base_size;
  auto idx = [n](int i, int j) { return static_cast<std::size_t>(i * n + j); };
  std::vector<BinaryRelation> r(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      r[idx(i, j)] = i == j ? BinaryRelation::diagonal(l, inst.domains[static_cast<std::size_t>(i)])
                            : BinaryRelation::product(l, inst.domains[static_cast<std::size_t>(i)],
                                                      inst.domains[static_cast<std::size_t>(j)]);
  for (const auto& [key, rel] : inst.edges) {
    r[idx(key.first, key.second)] = r[idx(key.first, key.second)] & rel;
    r[idx(key.second, key.first)] = r[idx(key.second, key.first)] & rel.transposed();
  }
  // One-consistent projection.
  std::vector<Subset> pr1(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Subset s = inst.domains[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) s = s & r[idx(i, j)].left_projection();
    pr1[static_cast<std::size_t>(i)] = s;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      r[idx(i, j)] = r[idx(i, j)].restricted(pr1[static_cast<std::size_t>(i)], pr1[static_cast<std::size_t>(j)]);

  int rounds = 0;
  while (true) {
    ++rounds;
    std::vector<BinaryRelation> next = r;
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        BinaryRelation& cur = next[idx(i, j)];
        if (cur.empty()) continue;
        for (int k = 0; k < n && !cur.empty(); ++k) cur = cur & r[idx(i, k)].compose(r[idx(k, j)]);
        if (!(cur == r[idx(i, j)])) changed = true;
      }
    }
    r = std::move(next);
    if (!changed) break;
  }

  Instance out = inst;
  for (int i = 0; i < n; ++i) {
    Subset s;
    for (Element a : inst.domains[static_cast<std::size_t>(i)].elements())
      if (r[idx(i, i)].contains(a, a)) s.insert(a);
    out.domains[static_cast<std::size_t>(i)] = s;
  }
  for (auto& [key, rel] : out.edges) rel = r[idx(key.first, key.second)];
  if (state) {
    state->n = n;
    state->rounds = rounds;
    state->pairs = std::move(r);
  }
  return summarize(inst, std::move(out));
}

std::vector<Subset> linked_components(const Instance& inst, int i) {
  const auto l = static_cast<std::size_t>(inst.base_size);
  UnionFind uf(static_cast<std::size_t>(inst.n) * l);
  for (const auto& [key, rel] : inst.edges)
    for (auto [a, b] : rel.pairs())
      uf.unite(static_cast<std::size_t>(key.first) * l + static_cast<std::size_t>(a),
               static_cast<std::size_t>(key.second) * l + static_cast<std::size_t>(b));
  std::vector<std::pair<std::size_t, Subset>> classes;
  for (Element a : inst.domains[static_cast<std::size_t>(i)].elements()) {
    std::size_t root = uf.find(static_cast<std::size_t>(i) * l + static_cast<std::size_t>(a));
    auto it = std::find_if(classes.begin(), classes.end(), [&](const auto& c) { return c.first == root; });
    if (it == classes.end()) classes.push_back({root, Subset::singleton(a)});
    else it->second.insert(a);
  }
  std::vector<Subset> out;
  for (const auto& c : classes) out.push_back(c.second);
  return out;
}

bool is_one_consistent(const Instance& inst) {
  for (const auto& [key, rel] : inst.edges) {
    if (rel.left_projection() != inst.domains[static_cast<std::size_t>(key.first)]) return false;
    if (rel.right_projection() != inst.domains[static_cast<std::size_t>(key.second)]) return false;
  }
  return true;
}

InstanceProfile instance_profile(const Instance& inst) {
  InstanceProfile p;
  p.one_consistent = is_one_consistent(inst);
  p.cycle_consistent = p.one_consistent && cycle_consistency_reduce(inst).outcome == Outcome::Unchanged;
  p.linked = true;
  for (int i = 0; i < inst.n; ++i)
    if (linked_components(inst, i).size() > 1) p.linked = false;
  UnionFind uf(static_cast<std::size_t>(inst.n));
  for (const auto& [key, rel] : inst.edges) uf.unite(static_cast<std::size_t>(key.first), static_cast<std::size_t>(key.second));
  for (int i = 1; i < inst.n; ++i)
    if (uf.find(static_cast<std::size_t>(i)) != uf.find(0)) p.fragmented = true;
  return p;
}

Instance project_instance(const Instance& inst, const std::vector<int>& vars) {
  Instance out;
  out.base_size = inst.base_size;
  out.n = static_cast<int>(vars.size());
  std::vector<int> pos(static_cast<std::size_t>(inst.n), -1);
  for (std::size_t k = 0; k < vars.size(); ++k) {
    pos[static_cast<std::size_t>(vars[k])] = static_cast<int>(k);
    out.domains.push_back(inst.domains[static_cast<std::size_t>(vars[k])]);
  }
  for (const auto& [key, rel] : inst.edges) {
    int a = pos[static_cast<std::size_t>(key.first)];
    int b = pos[static_cast<std::size_t>(key.second)];
    if (a >= 0 && b >= 0) out.edges.emplace(EdgeKey{a, b}, rel);
  }
  return out;
}

namespace {

// Induced partition of D_k from a partition of D_j through `rel` (oriented j -> k);
// empty when two classes reach a common element or the images do not cover D_k.
std::vector<Subset> induce(const std::vector<Subset>& from, const BinaryRelation& rel, Subset target) {
  std::vector<Subset> images;
  Subset covered;
  for (Subset block : from) {
    Subset img;
    for (Element a : block.elements()) img = img | rel.row(a);
    if (img.empty()) continue;
    if (!(img & covered).empty()) return {};
    covered = covered | img;
    images.push_back(img);
  }
  if (covered != target || images.size() < 2) return {};
  std::sort(images.begin(), images.end(), [](Subset a, Subset b) { return a.min() < b.min(); });
  return images;
}

// Checks that every value of every variable extends to a solution of `sub`.
// Returns the first variable with a value lacking a solution, and its surviving values.
std::optional<std::pair<int, Subset>> first_non_subdirect(const Instance& sub, const SubSolver& solve) {
  std::vector<Subset> witnessed(static_cast<std::size_t>(sub.n));
  for (int k = 0; k < sub.n; ++k) {
    Subset alive = witnessed[static_cast<std::size_t>(k)];
    for (Element b : sub.domains[static_cast<std::size_t>(k)].elements()) {
      if (alive.contains(b)) continue;
      if (auto h = solve(restrict_instance(sub, k, Subset::singleton(b)))) {
        alive.insert(b);
        for (int j = 0; j < sub.n; ++j) witnessed[static_cast<std::size_t>(j)].insert((*h)[static_cast<std::size_t>(j)]);
      }
    }
    if (alive != sub.domains[static_cast<std::size_t>(k)]) return std::make_pair(k, alive);
  }
  return std::nullopt;
}

}  // namespace

Reduction irreducibility_reduce(const Instance& inst, AlgebraCache& cache, const SubSolver& solve) {
  for (int i = 0; i < inst.n; ++i) {
    const Subset di = inst.domains[static_cast<std::size_t>(i)];
    if (di.size() < 2) continue;
    const auto& cons = cache.congruences(di);
    for (std::size_t q = 0; q < cons.size(); ++q) {
      if (!cons[q].maximal) continue;
      std::vector<std::optional<std::vector<Subset>>> part(static_cast<std::size_t>(inst.n));
      part[static_cast<std::size_t>(i)] = cons[q].congruence.blocks();
      std::vector<int> order{i};
      for (std::size_t head = 0; head < order.size(); ++head) {
        const int j = order[head];
        const auto& pj = *part[static_cast<std::size_t>(j)];
        for (const auto& [key, rel] : inst.edges) {
          int k;
          BinaryRelation oriented;
          if (key.first == j) {
            k = key.second;
            oriented = rel;
          } else if (key.second == j) {
            k = key.first;
            oriented = rel.transposed();
          } else {
            continue;
          }
          if (part[static_cast<std::size_t>(k)]) continue;
          std::vector<Subset> induced = induce(pj, oriented, inst.domains[static_cast<std::size_t>(k)]);
          if (induced.empty()) continue;
          part[static_cast<std::size_t>(k)] = std::move(induced);
          order.push_back(k);
        }
      }
      if (order.size() < 2) continue;
      std::vector<int> vars = order;
      std::sort(vars.begin(), vars.end());
      const Instance sub = project_instance(inst, vars);
      auto bad = first_non_subdirect(sub, solve);
      if (!bad) continue;
      const int k = vars[static_cast<std::size_t>(bad->first)];
      Reduction r;
      r.instance = restrict_instance(inst, k, bad->second);
      r.variable = k;
      r.domain = bad->second;
      r.outcome = bad->second.empty() ? Outcome::NoSolution : Outcome::Reduced;
      IrreducibilityInfo info;
      info.anchor = i;
      info.congruence = static_cast<int>(q);
      info.variables = vars;
      for (int v : vars) info.partitions.push_back(*part[static_cast<std::size_t>(v)]);
      r.irreducibility = std::move(info);
      return r;
    }
  }
  Reduction r;
  r.instance = inst;
  return r;
}

Instance weaken_constraints(const Instance& inst, const Language& lang, std::optional<EdgeKey> edge) {
  Instance out = inst;
  for (auto it = out.edges.begin(); it != out.edges.end();) {
    if (edge && it->first != *edge) {
      ++it;
      continue;
    }
    const Subset di = inst.domains[static_cast<std::size_t>(it->first.first)];
    const Subset dj = inst.domains[static_cast<std::size_t>(it->first.second)];
    const BinaryRelation full = BinaryRelation::product(inst.base_size, di, dj);
    std::optional<BinaryRelation> meet;
    for (const BinaryRelation& cand : lang.binary) {
      BinaryRelation c = cand.restricted(di, dj);
      if (c == full || c == it->second || !it->second.is_subset_of(c)) continue;
      meet = meet ? (*meet & c) : c;
    }
    if (!meet) {
      it = out.edges.erase(it);
      continue;
    }
    it->second = *meet;
    ++it;
  }
  return out;
}

Reduction weaker_instance_reduce(const Instance& inst, const Language& lang, const SubSolver& solve) {
  const Instance weak = weaken_constraints(inst, lang);
  Reduction r;
  if (auto bad = first_non_subdirect(weak, solve)) {
    r.variable = bad->first;
    r.domain = bad->second;
    r.instance = restrict_instance(inst, bad->first, bad->second);
    r.outcome = bad->second.empty() ? Outcome::NoSolution : Outcome::Reduced;
    return r;
  }
  r.instance = inst;
  return r;
}

}  // namespace zhuk
