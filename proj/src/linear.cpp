#include "zhuk/linear.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace zhuk {

using nlohmann::json;

int mod_inverse(int a, int p) {
  a = mod_p(a, p);
  if (a == 0) throw PreconditionError("zero has no inverse");
  for (int x = 1; x < p; ++x)
    if (mod_p(static_cast<long long>(a) * x, p) == 1) return x;
  throw PreconditionError("modulus is not prime");
}

EchelonForm row_echelon(const ModMatrix& augmented, int p) {
  ModMatrix m = augmented.unaryExpr([p](int x) { return mod_p(x, p); });
  const Eigen::Index cols = m.cols() - 1;
  Eigen::Index r = 0;
  EchelonForm out;
  for (Eigen::Index c = 0; c < cols && r < m.rows(); ++c) {
    Eigen::Index piv = r;
    while (piv < m.rows() && m(piv, c) == 0) ++piv;
    if (piv == m.rows()) continue;
    row_switch(m, r, piv);
    row_scale(m, r, mod_inverse(m(r, c), p), p);
    for (Eigen::Index other = 0; other < m.rows(); ++other)
      if (other != r && m(other, c) != 0) row_add(m, other, r, p - m(other, c), p);
    out.pivots.push_back(static_cast<int>(c));
    ++r;
  }
  Eigen::Index keep = r;
  for (Eigen::Index row = r; row < m.rows(); ++row) {
    if (m(row, cols) != 0) {
      out.consistent = false;
      row_switch(m, keep, row);
      ++keep;
      break;
    }
  }
  out.reduced = m.topRows(keep);
  return out;
}

std::size_t AffineSpace::cardinality() const {
  if (empty) return 0;
  std::size_t c = 1;
  for (std::size_t k = 0; k < basis.size(); ++k) c *= static_cast<std::size_t>(p);
  return c;
}

std::vector<ModVector> AffineSpace::points() const {
  std::vector<ModVector> out;
  if (empty) return out;
  std::vector<int> coef(basis.size(), 0);
  while (true) {
    ModVector v = point;
    for (std::size_t k = 0; k < basis.size(); ++k) v += coef[k] * basis[k];
    out.push_back(v.unaryExpr([this](int x) { return mod_p(x, p); }));
    std::size_t k = basis.size();
    bool carry = true;
    while (k > 0 && carry) {
      --k;
      if (++coef[k] < p) carry = false;
      else coef[k] = 0;
    }
    if (carry) break;
  }
  return out;
}

bool AffineSpace::contains(const ModVector& v) const {
  if (empty) return false;
  for (const ModVector& w : points())
    if (w == v) return true;
  return false;
}

std::optional<AffineSpace> solve_mod_p(const ModMatrix& augmented, int p) {
  const EchelonForm e = row_echelon(augmented, p);
  if (!e.consistent) return std::nullopt;
  const Eigen::Index d = augmented.cols() - 1;
  AffineSpace s;
  s.p = p;
  s.point = ModVector::Zero(d);
  std::vector<bool> is_pivot(static_cast<std::size_t>(d), false);
  for (std::size_t k = 0; k < e.pivots.size(); ++k) {
    s.point(e.pivots[k]) = e.reduced(static_cast<Eigen::Index>(k), d);
    is_pivot[static_cast<std::size_t>(e.pivots[k])] = true;
  }
  for (Eigen::Index f = 0; f < d; ++f) {
    if (is_pivot[static_cast<std::size_t>(f)]) continue;
    ModVector v = ModVector::Zero(d);
    v(f) = 1;
    for (std::size_t k = 0; k < e.pivots.size(); ++k)
      v(e.pivots[k]) = mod_p(-static_cast<long long>(e.reduced(static_cast<Eigen::Index>(k), f)), p);
    s.basis.push_back(v);
  }
  return s;
}

AffineHull affine_hull(const std::vector<ModVector>& points, int p, int dim) {
  AffineHull h;
  h.space.p = p;
  if (points.empty()) {
    h.space.empty = true;
    h.equations = ModMatrix::Zero(1, dim + 1);
    h.equations(0, dim) = 1;
    return h;
  }
  auto lex_less = [](const ModVector& a, const ModVector& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  };
  ModVector a = *std::min_element(points.begin(), points.end(), lex_less);
  ModMatrix diffs = ModMatrix::Zero(static_cast<Eigen::Index>(points.size()), dim + 1);
  for (std::size_t k = 0; k < points.size(); ++k)
    for (int c = 0; c < dim; ++c) diffs(static_cast<Eigen::Index>(k), c) = mod_p(points[k](c) - a(c), p);
  const EchelonForm e = row_echelon(diffs, p);
  h.space.point = a;
  ModMatrix span = ModMatrix::Zero(static_cast<Eigen::Index>(e.pivots.size()), dim + 1);
  for (std::size_t k = 0; k < e.pivots.size(); ++k) {
    ModVector row = e.reduced.row(static_cast<Eigen::Index>(k)).head(dim).transpose();
    h.space.basis.push_back(row);
    span.row(static_cast<Eigen::Index>(k)) = e.reduced.row(static_cast<Eigen::Index>(k));
  }
  const AffineSpace kernel = *solve_mod_p(span, p);
  h.equations = ModMatrix::Zero(static_cast<Eigen::Index>(kernel.basis.size()), dim + 1);
  for (std::size_t k = 0; k < kernel.basis.size(); ++k) {
    const ModVector& w = kernel.basis[k];
    for (int c = 0; c < dim; ++c) h.equations(static_cast<Eigen::Index>(k), c) = w(c);
    h.equations(static_cast<Eigen::Index>(k), dim) = mod_p(w.dot(a), p);
  }
  std::set<std::vector<int>> distinct;
  for (const ModVector& v : points) distinct.insert(std::vector<int>(v.data(), v.data() + v.size()));
  h.closed = distinct.size() == h.space.cardinality();
  return h;
}

bool AffineSet::empty() const {
  return std::any_of(spaces.begin(), spaces.end(), [](const AffineSpace& s) { return s.empty; });
}

int AffineSet::dimension() const {
  int d = 0;
  for (const AffineSpace& s : spaces) d += s.dimension();
  return d;
}

std::size_t AffineSet::cardinality() const {
  std::size_t c = 1;
  for (const AffineSpace& s : spaces) c *= s.cardinality();
  return c;
}

std::optional<AffineSet> gauss_solve(const LinearSystem& sys) {
  AffineSet out;
  for (const PrimeSystem& ps : sys.systems) {
    auto s = solve_mod_p(ps.augmented, ps.p);
    if (!s) return std::nullopt;
    out.spaces.push_back(*s);
  }
  return out;
}

std::vector<std::vector<ModVector>> enumerate_points(const AffineSet& s) {
  std::vector<std::vector<ModVector>> out{{}};
  for (const AffineSpace& sp : s.spaces) {
    std::vector<std::vector<ModVector>> next;
    for (const auto& prefix : out)
      for (const ModVector& v : sp.points()) {
        auto t = prefix;
        t.push_back(v);
        next.push_back(std::move(t));
      }
    out = std::move(next);
  }
  return out;
}

// ---------------------------------------------------------------- factorization

namespace {

struct ColumnRef {
  int system = -1;
  int column = -1;
};

std::vector<std::vector<ColumnRef>> column_refs(const FactorizedInstance& fi) {
  std::vector<std::vector<ColumnRef>> refs(static_cast<std::size_t>(fi.base.n));
  for (int i = 0; i < fi.base.n; ++i)
    refs[static_cast<std::size_t>(i)].resize(fi.quotients[static_cast<std::size_t>(i)].primes.size());
  for (std::size_t s = 0; s < fi.layout.systems.size(); ++s) {
    const auto& cols = fi.layout.systems[s].columns;
    for (std::size_t c = 0; c < cols.size(); ++c)
      refs[static_cast<std::size_t>(cols[c].variable)][static_cast<std::size_t>(cols[c].coordinate)] = {
          static_cast<int>(s), static_cast<int>(c)};
  }
  return refs;
}

std::vector<int> to_vec(const ModVector& v) { return std::vector<int>(v.data(), v.data() + v.size()); }

}  // namespace

const std::vector<int>& FactorizedInstance::coordinates(int i, Element a) const {
  const LinearQuotient& q = quotients[static_cast<std::size_t>(i)];
  return q.iso[static_cast<std::size_t>(q.congruence.block_index(a))];
}

Element FactorizedInstance::representative(int i, Element a) const {
  return quotients[static_cast<std::size_t>(i)].congruence.representative(a);
}

std::vector<ModVector> FactorizedInstance::image(const Assignment& h) const {
  std::vector<ModVector> out;
  for (const PrimeSystem& ps : layout.systems) {
    ModVector v(static_cast<Eigen::Index>(ps.columns.size()));
    for (std::size_t c = 0; c < ps.columns.size(); ++c) {
      const ZVar& z = ps.columns[c];
      v(static_cast<Eigen::Index>(c)) =
          coordinates(z.variable, h[static_cast<std::size_t>(z.variable)])[static_cast<std::size_t>(z.coordinate)];
    }
    out.push_back(v);
  }
  return out;
}

Subset FactorizedInstance::block(int i, const std::vector<ModVector>& z) const {
  const LinearQuotient& q = quotients[static_cast<std::size_t>(i)];
  std::vector<int> coords(q.primes.size());
  for (std::size_t s = 0; s < layout.systems.size(); ++s) {
    const auto& cols = layout.systems[s].columns;
    for (std::size_t c = 0; c < cols.size(); ++c)
      if (cols[c].variable == i) coords[static_cast<std::size_t>(cols[c].coordinate)] = z[s](static_cast<Eigen::Index>(c));
  }
  for (std::size_t k = 0; k < q.iso.size(); ++k)
    if (q.iso[k] == coords) return q.congruence.blocks()[k];
  throw InternalInconsistency("coordinates outside the iso table");
}

Instance FactorizedInstance::block_restricted(const Instance& inst, const std::vector<ModVector>& z) const {
  Instance out = inst;
  for (int i = 0; i < inst.n; ++i)
    out = restrict_instance(out, i, out.domains[static_cast<std::size_t>(i)] & block(i, z));
  return out;
}

FactorizedInstance factorize_instance(const Instance& inst, const std::vector<LinearQuotient>& quotients) {
  if (static_cast<int>(quotients.size()) != inst.n) throw PreconditionError("one congruence per variable expected");
  FactorizedInstance fi;
  fi.base = inst;
  fi.quotients = quotients;
  std::map<int, std::vector<ZVar>> by_prime;
  for (int i = 0; i < inst.n; ++i) {
    const LinearQuotient& q = quotients[static_cast<std::size_t>(i)];
    if (q.congruence.carrier() != inst.domains[static_cast<std::size_t>(i)])
      throw PreconditionError("congruence carrier differs from the domain of x" + std::to_string(i));
    for (std::size_t c = 0; c < q.primes.size(); ++c) by_prime[q.primes[c]].push_back({i, static_cast<int>(c)});
  }
  for (auto& [p, cols] : by_prime) {
    PrimeSystem ps;
    ps.p = p;
    ps.columns = cols;
    ps.augmented = ModMatrix::Zero(0, static_cast<Eigen::Index>(cols.size()) + 1);
    fi.layout.systems.push_back(std::move(ps));
  }
  fi.factor = inst;
  for (int i = 0; i < inst.n; ++i) {
    Subset reps;
    for (Element r : quotients[static_cast<std::size_t>(i)].congruence.representatives()) reps.insert(r);
    fi.factor.domains[static_cast<std::size_t>(i)] = reps;
  }
  for (auto& [key, rel] : fi.factor.edges) {
    BinaryRelation r(inst.base_size);
    for (auto [a, b] : rel.pairs()) r.insert(fi.representative(key.first, a), fi.representative(key.second, b));
    rel = r;
  }
  return fi;
}

LinearSystem build_linear_system(const FactorizedInstance& fi) {
  LinearSystem sys = fi.layout;
  const auto refs = column_refs(fi);
  for (const auto& [key, rel] : fi.factor.edges) {
    const auto [i, j] = key;
    const LinearQuotient& qi = fi.quotients[static_cast<std::size_t>(i)];
    const LinearQuotient& qj = fi.quotients[static_cast<std::size_t>(j)];
    std::size_t total = 1;
    for (std::size_t s = 0; s < sys.systems.size(); ++s) {
      PrimeSystem& ps = sys.systems[s];
      std::vector<ColumnRef> positions;
      std::vector<std::pair<int, std::size_t>> source;  // (side, coordinate)
      for (std::size_t c = 0; c < qi.primes.size(); ++c)
        if (qi.primes[c] == ps.p) {
          positions.push_back(refs[static_cast<std::size_t>(i)][c]);
          source.push_back({0, c});
        }
      for (std::size_t c = 0; c < qj.primes.size(); ++c)
        if (qj.primes[c] == ps.p) {
          positions.push_back(refs[static_cast<std::size_t>(j)][c]);
          source.push_back({1, c});
        }
      if (positions.empty()) continue;
      std::set<std::vector<int>> proj;
      for (auto [a, b] : rel.pairs()) {
        std::vector<int> v;
        for (auto [side, c] : source) v.push_back((side == 0 ? fi.coordinates(i, a) : fi.coordinates(j, b))[c]);
        proj.insert(v);
      }
      std::vector<ModVector> pts;
      for (const auto& v : proj) pts.push_back(Eigen::Map<const ModVector>(v.data(), static_cast<Eigen::Index>(v.size())));
      total *= proj.size();
      const int dim = static_cast<int>(positions.size());
      AffineHull h = affine_hull(pts, ps.p, dim);
      if (!h.closed) throw InternalInconsistency("transported relation is not an affine subspace");
      const Eigen::Index cols = static_cast<Eigen::Index>(ps.columns.size());
      ModMatrix rows = ModMatrix::Zero(h.equations.rows(), cols + 1);
      for (Eigen::Index r = 0; r < h.equations.rows(); ++r) {
        for (int k = 0; k < dim; ++k) {
          auto col = positions[static_cast<std::size_t>(k)].column;
          rows(r, col) = mod_p(rows(r, col) + h.equations(r, k), ps.p);
        }
        rows(r, cols) = h.equations(r, dim);
      }
      ModMatrix stacked(ps.augmented.rows() + rows.rows(), cols + 1);
      stacked << ps.augmented, rows;
      ps.augmented = std::move(stacked);
    }
    if (rel.empty()) {
      // An empty relation has no affine hull; record it as 0 = 1 in the first system.
      if (sys.systems.empty()) throw InternalInconsistency("empty factor relation without coordinates");
      PrimeSystem& ps = sys.systems.front();
      ModMatrix stacked(ps.augmented.rows() + 1, ps.augmented.cols());
      ModMatrix bad = ModMatrix::Zero(1, ps.augmented.cols());
      bad(0, ps.augmented.cols() - 1) = 1;
      stacked << ps.augmented, bad;
      ps.augmented = std::move(stacked);
    } else if (total != static_cast<std::size_t>(rel.count())) {
      throw InternalInconsistency("transported relation does not split over primes");
    }
  }
  return sys;
}

LinearSystem hull_equations(const FactorizedInstance& fi, const std::vector<std::vector<ModVector>>& points) {
  LinearSystem out = fi.layout;
  std::size_t total = 1;
  for (std::size_t s = 0; s < out.systems.size(); ++s) {
    PrimeSystem& ps = out.systems[s];
    std::set<std::vector<int>> proj;
    for (const auto& z : points) proj.insert(to_vec(z[s]));
    std::vector<ModVector> pts;
    for (const auto& v : proj) pts.push_back(Eigen::Map<const ModVector>(v.data(), static_cast<Eigen::Index>(v.size())));
    total *= proj.size();
    AffineHull h = affine_hull(pts, ps.p, static_cast<int>(ps.columns.size()));
    if (!points.empty() && !h.closed) throw InternalInconsistency("feasible factor points are not affine");
    ps.augmented = h.equations;
  }
  if (!points.empty() && total != points.size()) throw InternalInconsistency("feasible factor points do not split over primes");
  return out;
}

LinearSystem append_rows(const LinearSystem& a, const LinearSystem& b) {
  LinearSystem out = a;
  for (std::size_t s = 0; s < out.systems.size(); ++s) {
    const ModMatrix& top = a.systems[s].augmented;
    const ModMatrix& bottom = b.systems[s].augmented;
    ModMatrix m(top.rows() + bottom.rows(), top.cols());
    m << top, bottom;
    out.systems[s].augmented = std::move(m);
  }
  return out;
}

json to_json(const ModMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const ModVector& v) { return json(to_vec(v)); }

// ---------------------------------------------------------------- the loop

std::vector<LinearQuotient> minimal_linear_congruences(const Instance& inst, AlgebraCache& cache) {
  std::vector<LinearQuotient> out;
  for (int i = 0; i < inst.n; ++i) {
    const Subset d = inst.domains[static_cast<std::size_t>(i)];
    if (d.empty()) throw PreconditionError("empty domain in the linear case");
    if (d.size() == 1) {
      out.push_back(LinearQuotient{Congruence::full(d), {}, {{}}, false});
      continue;
    }
    const auto& lq = cache.linear_quotient(d);
    if (!lq) throw PreconditionError("domain of x" + std::to_string(i) + " has no linear quotient");
    out.push_back(*lq);
  }
  return out;
}

namespace {

json system_json(const LinearSystem& sys, const std::optional<AffineSet>& sol) {
  json systems = json::array();
  for (std::size_t s = 0; s < sys.systems.size(); ++s) {
    const PrimeSystem& ps = sys.systems[s];
    json cols = json::array();
    for (const ZVar& z : ps.columns) cols.push_back({z.variable, z.coordinate});
    const EchelonForm e = row_echelon(ps.augmented, ps.p);
    json entry = {{"p", ps.p}, {"columns", cols}, {"rows", to_json(ps.augmented)}, {"echelon", to_json(e.reduced)},
                  {"pivots", e.pivots}, {"consistent", e.consistent}};
    if (sol) {
      const AffineSpace& sp = sol->spaces[s];
      json basis = json::array();
      for (const ModVector& v : sp.basis) basis.push_back(to_json(v));
      entry["point"] = to_json(sp.point);
      entry["basis"] = basis;
    }
    systems.push_back(entry);
  }
  return {{"systems", systems}, {"consistent", sol.has_value()}, {"dimension", sol ? sol->dimension() : -1}};
}

json points_json(const std::vector<std::vector<ModVector>>& pts) {
  json out = json::array();
  for (const auto& z : pts) {
    json one = json::array();
    for (const ModVector& v : z) one.push_back(to_json(v));
    out.push_back(one);
  }
  return out;
}

}  // namespace

LinearResult linear_case_solve(const Instance& inst, AlgebraCache& cache, const SubSolver& solve,
                               const std::function<void(LinearEvent)>& observe) {
  auto emit = [&](const char* kind, json w) {
    if (observe) observe({kind, std::move(w)});
  };
  const std::vector<LinearQuotient> qs = minimal_linear_congruences(inst, cache);
  const FactorizedInstance fi = factorize_instance(inst, qs);
  {
    json vars = json::array();
    for (int i = 0; i < inst.n; ++i) {
      const LinearQuotient& q = qs[static_cast<std::size_t>(i)];
      json blocks = json::array();
      for (Subset b : q.congruence.blocks()) blocks.push_back(b.elements());
      vars.push_back({{"variable", i}, {"blocks", blocks}, {"primes", q.primes}, {"iso", q.iso}, {"ambiguous", q.ambiguous}});
    }
    emit("lin_factor", {{"variables", vars}});
  }
  LinearSystem sys = build_linear_system(fi);
  std::optional<AffineSet> s = gauss_solve(sys);
  emit("lin_gauss", system_json(sys, s));
  if (!s) return {std::nullopt, "linear-inconsistent"};

  const int budget = s->dimension();
  for (int iteration = 0;; ++iteration) {
    if (iteration > budget) throw InternalInconsistency("linear loop exceeded its dimension bound");
    std::vector<ModVector> origin;
    for (const AffineSpace& sp : s->spaces) origin.push_back(sp.point);
    if (auto h = solve(fi.block_restricted(inst, origin))) return {h, ""};
    if (s->dimension() == 0) return {std::nullopt, "linear-exhausted"};

    std::vector<std::vector<ModVector>> generators{origin};
    for (std::size_t sp = 0; sp < s->spaces.size(); ++sp)
      for (const ModVector& b : s->spaces[sp].basis) {
        auto z = origin;
        const int p = s->spaces[sp].p;
        z[sp] = (z[sp] + b).unaryExpr([p](int x) { return mod_p(x, p); });
        generators.push_back(std::move(z));
      }
    auto covers = [&](const Instance& cand) {
      for (const auto& z : generators)
        if (!solve(fi.block_restricted(cand, z))) return false;
      return true;
    };

    Instance weak = inst;
    for (bool changed = true; changed;) {
      changed = false;
      std::vector<EdgeKey> keys;
      for (const auto& e : weak.edges) keys.push_back(e.first);
      for (const EdgeKey& key : keys) {
        Instance cand = weaken_constraints(weak, cache.language(), key);
        if (cand == weak || covers(cand)) continue;
        weak = std::move(cand);
        changed = true;
        json rel = nullptr;
        if (auto it = weak.edges.find(key); it != weak.edges.end()) {
          rel = json::array();
          for (auto [a, b] : it->second.pairs()) rel.push_back({a, b});
        }
        emit("lin_weaken", {{"edge", {key.first, key.second}}, {"relation", rel}});
      }
    }

    std::vector<std::vector<ModVector>> feasible;
    for (const auto& z : enumerate_points(*s))
      if (solve(fi.block_restricted(weak, z))) feasible.push_back(z);
    const LinearSystem eq = hull_equations(fi, feasible);
    json rows = json::array();
    for (const PrimeSystem& ps : eq.systems) rows.push_back({{"p", ps.p}, {"rows", to_json(ps.augmented)}});
    emit("lin_eq_add", {{"method", "enumerated-hull"}, {"feasible", points_json(feasible)}, {"equations", rows}});
    if (feasible.empty()) return {std::nullopt, "linear-exhausted"};
    sys = append_rows(sys, eq);
    std::optional<AffineSet> next = gauss_solve(sys);
    emit("lin_gauss", system_json(sys, next));
    if (!next) return {std::nullopt, "linear-inconsistent"};
    if (next->dimension() >= s->dimension()) throw InternalInconsistency("equation step did not reduce the dimension");
    s = std::move(next);
  }
}

}  // namespace zhuk
