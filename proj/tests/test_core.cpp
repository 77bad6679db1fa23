#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "zhuk/core.hpp"
#include "zhuk/templates.hpp"

using namespace zhuk;
using namespace zhuk::testing;

TEST_CASE("subset basics") {
  Subset s{0, 2, 3};
  CHECK(s.size() == 3);
  CHECK(s.contains(2));
  CHECK_FALSE(s.contains(1));
  CHECK(s.min() == 0);
  CHECK(s.elements() == std::vector<Element>{0, 2, 3});
  CHECK((s & Subset{1, 2}) == Subset{2});
  CHECK((s - Subset{0}) == Subset{2, 3});
  CHECK(Subset::full(3) == Subset{0, 1, 2});
  CHECK(Subset{1}.is_subset_of(s) == false);
}

TEST_CASE("canonical order is size first") {
  CHECK(canonical_less(Subset{3}, Subset{0, 1}));
  CHECK(canonical_less(Subset{0, 2}, Subset{1, 2}));
  CHECK_FALSE(canonical_less(Subset{1, 2}, Subset{1, 2}));
}

TEST_CASE("binary relation algebra") {
  const BinaryRelation r = relation(3, {{0, 1}, {1, 2}});
  const BinaryRelation s = relation(3, {{1, 0}, {2, 2}});
  CHECK(r.count() == 2);
  CHECK(r.transposed() == relation(3, {{1, 0}, {2, 1}}));
  CHECK(r.compose(s) == relation(3, {{0, 0}, {1, 2}}));
  CHECK(r.left_projection() == Subset{0, 1});
  CHECK(r.right_projection() == Subset{1, 2});
  CHECK(r.restricted(Subset{0}, Subset::full(3)) == relation(3, {{0, 1}}));
  CHECK((r | s).count() == 4);
  CHECK((r & s).empty());
  CHECK(BinaryRelation::diagonal(3, Subset{0, 2}) == relation(3, {{0, 0}, {2, 2}}));
  CHECK(BinaryRelation::product(2, Subset{0}, Subset{0, 1}).count() == 2);
  CHECK(relation(3, {{0, 1}}) < relation(3, {{0, 2}}));
}

TEST_CASE("operation table is row-major with the first argument most significant") {
  const OperationTable op = OperationTable::from_function(3, 2, [](std::span<const Element> x) { return x[0]; });
  CHECK(op.index_of(std::vector<Element>{2, 1}) == 7);
  CHECK(op({2, 1}) == 2);
  CHECK_THROWS_AS(OperationTable(2, 2, {0, 1, 1}), PreconditionError);
}

TEST_CASE("solutions and restriction") {
  Instance inst = full_instance(2, 2);
  inst.edges.emplace(EdgeKey{0, 1}, relation(2, {{0, 1}, {1, 0}}));
  CHECK(is_solution(inst, {0, 1}));
  CHECK_FALSE(is_solution(inst, {1, 1}));
  CHECK_FALSE(is_solution(inst, {0}));
  const Instance r = restrict_instance(inst, 0, Subset{1});
  CHECK(r.domains[0] == Subset{1});
  CHECK(r.edges.at({0, 1}) == relation(2, {{1, 0}}));
  CHECK_THROWS_AS(restrict_instance(r, 0, Subset{0}), PreconditionError);
}

TEST_CASE("validation reports every violation") {
  const Language lang = template_language("z2");
  Instance inst = full_instance(2, 2);
  inst.edges.emplace(EdgeKey{0, 1}, relation(2, {{0, 0}, {0, 1}, {1, 1}}));
  const ValidationReport rep = validate_instance(inst, lang);
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0] == "edge (0,1): relation not Ω-invariant");

  inst.edges.clear();
  inst.domains[1] = Subset{0};
  inst.edges.emplace(EdgeKey{0, 1}, relation(2, {{0, 1}}));
  CHECK_FALSE(validate_instance(inst, lang).ok());
}

TEST_CASE("instance files round-trip") {
  for (const char* name : {"example1.json", "example2.json", "fig1.json", "fig2.json", "fig3.json"}) {
    CAPTURE(name);
    const ParsedFile f = load(name);
    const ParsedFile g = parse_instance(serialize_instance(f.instance, f.language));
    CHECK(g.instance == f.instance);
    CHECK(g.language.wnu == f.language.wnu);
    CHECK(g.language.element_names == f.language.element_names);
    CHECK(canonical_instance_json(g.instance) == canonical_instance_json(f.instance));
  }
}

TEST_CASE("parse errors carry a location") {
  CHECK_THROWS_WITH_AS(parse_instance("[1,2]"), "/: top level must be an object", ParseError);
  CHECK_THROWS_AS(parse_instance("{"), ParseError);
  const std::string base = R"({"base_size": 2, "wnu": {"arity": 3, "table": [0,1,1,0,1,0,0,1]}, "n": 1, )";
  CHECK_THROWS_WITH_AS(parse_instance(base + R"("domains": [[0, 5]]})"), doctest::Contains("element out of range"),
                       ParseError);
  CHECK_THROWS_WITH_AS(parse_instance(base + R"("domains": [[0]], "edges": [{"from": 0, "to": 3, "tuples": []}]})"),
                       doctest::Contains("variable out of range"), ParseError);
  CHECK_THROWS_WITH_AS(parse_instance(base + R"("domains": [[0]], "edges": [{"from": 0, "to": 0, "tuples": [[0]]}]})"),
                       doctest::Contains("arity mismatch"), ParseError);
}

TEST_CASE("element names are used in formatting") {
  const ParsedFile f = load("example2.json");
  CHECK(format_assignment({0, 1, 0}, f.language) == "x0=a x1=b x2=a");
  CHECK(format_subset(Subset{0, 1}, f.language) == "{a,b}");
}
