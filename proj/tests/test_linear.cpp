#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "support.hpp"
#include "zhuk/linear.hpp"
#include "zhuk/templates.hpp"

using namespace zhuk;
using namespace zhuk::testing;

namespace {

using Point = std::vector<int>;

std::set<Point> enumerate_solutions(const ModMatrix& aug, int p) {
  const int d = static_cast<int>(aug.cols()) - 1;
  std::set<Point> out;
  Point x(static_cast<std::size_t>(d), 0);
  for (;;) {
    bool ok = true;
    for (Eigen::Index r = 0; r < aug.rows() && ok; ++r) {
      long long s = 0;
      for (int c = 0; c < d; ++c) s += static_cast<long long>(aug(r, c)) * x[static_cast<std::size_t>(c)];
      ok = mod_p(s, p) == mod_p(aug(r, d), p);
    }
    if (ok) out.insert(x);
    int k = d - 1;
    while (k >= 0 && ++x[static_cast<std::size_t>(k)] == p) x[static_cast<std::size_t>(k--)] = 0;
    if (k < 0) return out;
  }
}

std::set<Point> points_of(const AffineSpace& s) {
  std::set<Point> out;
  for (const ModVector& v : s.points()) out.insert(Point(v.data(), v.data() + v.size()));
  return out;
}

ModMatrix random_system(std::mt19937_64& rng, int p, int rows, int d) {
  ModMatrix m(rows, d + 1);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c <= d; ++c) m(r, c) = static_cast<int>(rng() % static_cast<std::uint64_t>(p));
  return m;
}

}  // namespace

TEST_CASE("modular inverses") {
  for (int p : {2, 3, 5, 7})
    for (int a = 1; a < p; ++a) CHECK(mod_p(static_cast<long long>(a) * mod_inverse(a, p), p) == 1);
  CHECK_THROWS_AS(mod_inverse(0, 5), PreconditionError);
  CHECK(mod_p(-7, 5) == 3);
}

TEST_CASE("elementary row operations keep the solution set") {
  std::mt19937_64 rng(11);
  for (int p : {2, 3, 5}) {
    for (int trial = 0; trial < 200; ++trial) {
      const int d = 1 + static_cast<int>(rng() % 4);
      const int rows = 1 + static_cast<int>(rng() % 4);
      const ModMatrix m = random_system(rng, p, rows, d);
      const auto before = enumerate_solutions(m, p);
      const Eigen::Index a = static_cast<Eigen::Index>(rng() % rows);
      const Eigen::Index b = static_cast<Eigen::Index>(rng() % rows);
      const int c = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(p - 1));

      ModMatrix swapped = m;
      row_switch(swapped, a, b);
      CHECK(enumerate_solutions(swapped, p) == before);
      ModMatrix scaled = m;
      row_scale(scaled, a, c, p);
      CHECK(enumerate_solutions(scaled, p) == before);
      if (a != b) {
        ModMatrix added = m;
        row_add(added, a, b, static_cast<int>(rng() % static_cast<std::uint64_t>(p)), p);
        CHECK(enumerate_solutions(added, p) == before);
      }
    }
  }
  ModMatrix m = ModMatrix::Identity(2, 3);
  CHECK_THROWS_AS(row_scale(m, 0, 3, 3), PreconditionError);
  CHECK_THROWS_AS(row_add(m, 1, 1, 1, 3), PreconditionError);
}

TEST_CASE("row echelon form") {
  ModMatrix m(2, 3);
  m << 1, 1, 1,
       1, 2, 0;
  const EchelonForm e = row_echelon(m, 3);
  CHECK(e.consistent);
  CHECK(e.pivots == std::vector<int>{0, 1});
  ModMatrix want(2, 3);
  want << 1, 0, 2,
          0, 1, 2;
  CHECK(e.reduced == want);

  ModMatrix bad(2, 2);
  bad << 1, 0,
         1, 1;
  CHECK_FALSE(row_echelon(bad, 2).consistent);
  CHECK_FALSE(solve_mod_p(bad, 2));
}

TEST_CASE("gauss_solve matches enumeration") {
  std::mt19937_64 rng(7);
  for (int p : {2, 3, 5}) {
    for (int trial = 0; trial < 300; ++trial) {
      const int d = 1 + static_cast<int>(rng() % 4);
      const int rows = static_cast<int>(rng() % 5);
      const ModMatrix m = random_system(rng, p, rows, d);
      const auto want = enumerate_solutions(m, p);
      CAPTURE(p);
      CAPTURE(trial);

      const auto direct = solve_mod_p(m, p);
      CHECK(direct.has_value() == !want.empty());
      if (direct) CHECK(points_of(*direct) == want);

      LinearSystem sys;
      PrimeSystem ps;
      ps.p = p;
      for (int c = 0; c < d; ++c) ps.columns.push_back({c, 0});
      ps.augmented = m;
      sys.systems.push_back(ps);
      const auto s = gauss_solve(sys);
      CHECK(s.has_value() == !want.empty());
      if (s) {
        CHECK(s->cardinality() == want.size());
        CHECK(points_of(s->spaces[0]) == want);
      }
    }
  }
}

TEST_CASE("affine hulls") {
  std::mt19937_64 rng(3);
  for (int p : {2, 3}) {
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<ModVector> pts;
      const int count = 1 + static_cast<int>(rng() % 4);
      for (int k = 0; k < count; ++k) {
        ModVector v(3);
        for (int c = 0; c < 3; ++c) v(c) = static_cast<int>(rng() % static_cast<std::uint64_t>(p));
        pts.push_back(v);
      }
      const AffineHull h = affine_hull(pts, p, 3);
      for (const ModVector& v : pts) CHECK(h.space.contains(v));
      // The hull is cut out by its equations.
      CHECK(points_of(h.space) == enumerate_solutions(h.equations, p));
      const AffineHull again = affine_hull(h.space.points(), p, 3);
      CHECK(again.closed);
      CHECK(again.space.dimension() == h.space.dimension());
    }
  }
}

TEST_CASE("invariant relations of the prime sums are affine subspaces") {
  for (const char* name : {"z2", "z3"}) {
    const Language lang = template_language(name);
    const int p = lang.base_size;
    for (const BinaryRelation& r : lang.binary) {
      std::vector<ModVector> pts;
      for (auto [a, b] : r.pairs()) pts.push_back((ModVector(2) << a, b).finished());
      const AffineHull h = affine_hull(pts, p, 2);
      CHECK(h.closed);
      CHECK(h.space.cardinality() == r.count());
    }
  }
  CHECK(template_language("z2").binary.size() == 11);
}

TEST_CASE("example 2 gives a rank-2 system of dimension 1") {
  const ParsedFile f = load("example2.json");
  AlgebraCache cache(f.language);
  const FactorizedInstance fi = factorize_instance(f.instance, minimal_linear_congruences(f.instance, cache));
  const LinearSystem sys = build_linear_system(fi);
  REQUIRE(sys.systems.size() == 1);
  CHECK(sys.systems[0].p == 2);
  CHECK(sys.systems[0].columns.size() == 3);
  const EchelonForm e = row_echelon(sys.systems[0].augmented, 2);
  CHECK(e.pivots.size() == 2);
  const auto s = gauss_solve(sys);
  REQUIRE(s);
  CHECK(s->dimension() == 1);
  CHECK(s->cardinality() == 2);

  const LinearResult r = linear_case_solve(f.instance, cache, brute());
  REQUIRE(r.solution);
  CHECK(is_solution(f.instance, *r.solution));
}

TEST_CASE("factorization over z4 uses the mod-2 quotient") {
  const Language lang = template_language("z4_5ary");
  AlgebraCache cache(lang);
  Instance inst = full_instance(4, 2);
  inst.edges.emplace(EdgeKey{0, 1}, shift(4, 1));
  const auto qs = minimal_linear_congruences(inst, cache);
  REQUIRE(qs.size() == 2);
  CHECK(qs[0].congruence.blocks() == std::vector<Subset>{Subset{0, 2}, Subset{1, 3}});
  CHECK(qs[0].primes == std::vector<int>{2});
  const FactorizedInstance fi = factorize_instance(inst, qs);
  CHECK(fi.representative(0, 3) == 1);
  CHECK(fi.factor.edges.at({0, 1}).count() == 2);
  for (Element a = 0; a < 4; ++a) {
    const auto z = fi.image({a, (a + 1) % 4});
    CHECK(fi.block(0, z).contains(a));
  }
}

TEST_CASE("linear loop on z4 instances weakens, adds equations and stays sound") {
  const Language lang = template_language("z4_5ary");
  AlgebraCache cache(lang);
  std::mt19937_64 rng(3);
  int weakened = 0;
  int equations = 0;
  for (int it = 0; it < 400; ++it) {
    const Instance inst = random_z4(lang, rng, 3 + it % 3);
    CAPTURE(it);
    std::vector<LinearEvent> events;
    const LinearResult r = linear_case_solve(inst, cache, brute(), [&](LinearEvent e) { events.push_back(e); });
    const bool sat = brute_force_first(inst).has_value();
    CHECK(r.solution.has_value() == sat);
    if (r.solution) CHECK(is_solution(inst, *r.solution));
    else CHECK_FALSE(r.reason.empty());

    REQUIRE(events.size() >= 2);
    CHECK(events[0].kind == "lin_factor");
    CHECK(events[1].kind == "lin_gauss");
    int last = events[1].witness["dimension"].get<int>();
    for (const LinearEvent& e : events) {
      if (e.kind == "lin_weaken") ++weakened;
      if (e.kind == "lin_eq_add") ++equations;
      if (e.kind == "lin_gauss" && &e != &events[1]) {
        const int dim = e.witness["dimension"].get<int>();
        CHECK(dim < last);
        last = dim;
      }
    }
  }
  CHECK(weakened > 0);
  CHECK(equations > 0);
}
