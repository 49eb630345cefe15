#include <cmath>
#include <random>

#include "doctest.h"
#include "fodd/interpretation.hpp"
#include "fodd/manager.hpp"
#include "fodd/paths.hpp"
#include "support/fodd_testing.hpp"

using namespace fodd;
using fodd::testing::World;

namespace {

bool sorted_paths(Fodd b) {
  for (Fodd n : topological_order(b)) {
    if (n.is_leaf()) continue;
    for (Fodd c : {n.high(), n.low()})
      if (!c.is_leaf() && !(n.label() < c.label())) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("leaves are interned and rounded") {
  World w;
  CHECK(w.m->leaf(10) == w.m->leaf(10));
  CHECK(w.m->leaf(0) == w.m->zero());
  CHECK(w.m->leaf(0.9 * 0.7) == w.m->leaf(0.63));
  CHECK_THROWS_AS(w.m->leaf(-1), InvariantError);
  CHECK_THROWS_AS(w.m->leaf(INFINITY), InvariantError);
  CHECK(w.m->signed_leaf(-2).value() == -2);
}

TEST_CASE("node construction applies R1 and R2 and checks the order") {
  World w;
  CHECK(w.m->node(w.P(w.x), w.leaf(5), w.leaf(5)) == w.leaf(5));
  Fodd a = w.m->node(w.P(w.x), w.leaf(1), w.leaf(0));
  Fodd b = w.m->node(w.P(w.x), w.leaf(1), w.leaf(0));
  CHECK(a == b);
  CHECK(a.high() == w.leaf(1));
  CHECK(a.low() == w.leaf(0));
  CHECK_THROWS_AS(w.m->node(w.Q(w.x, w.x), a, w.leaf(0)), OrderError);
  CHECK_THROWS_AS(w.m->node(w.P(w.x), a, w.leaf(0)), OrderError);
}

TEST_CASE("label order") {
  World w;
  CHECK(Label::equality(w.x, w.y) < w.P(w.a));
  CHECK(w.P(w.y) < w.Q(w.a, w.a));
  CHECK(w.P(w.a) < w.P(w.x));
  CHECK(w.P(w.x) < w.P(Term::parameter("u*")));
  CHECK(Label::equality(w.y, w.x) == Label::equality(w.x, w.y));
  CHECK(Label::equality(w.x, w.x).is_trivial_equality());
}

TEST_CASE("ite builds sorted diagrams from any label position") {
  World w;
  Fodd inner = w.ite(w.P(w.x), w.leaf(3), w.leaf(1));
  Fodd b = w.ite(w.Q(w.x, w.y), inner, w.leaf(2));
  CHECK(sorted_paths(b));
  CHECK(w.ite(Label::equality(w.x, w.x), w.leaf(4), w.leaf(2)) == w.leaf(4));
  for (int n : {1, 2}) {
    for (const auto& I : fodd::testing::all_interpretations(w, n)) {
      fodd::testing::for_each_valuation({w.x, w.y}, I, [&](const Valuation& z) {
        double expect = I.holds(w.q, std::vector<int>{z.at(w.x), z.at(w.y)})
                            ? (I.holds(w.p, std::vector<int>{z.at(w.x)}) ? 3 : 1)
                            : 2;
        CHECK(evaluate(b, I, z) == expect);
      });
    }
  }
}

TEST_CASE("evaluate") {
  World w;
  Interpretation I(w.m->predicates(), {"1", "2"});
  I.set(w.p, std::vector<int>{0});
  Fodd b = w.ite(w.P(w.x), w.leaf(1), w.leaf(0));
  CHECK(evaluate(w.leaf(7), I, {}) == 7);
  CHECK(evaluate(b, I, {{w.x, 0}}) == 1);
  CHECK(evaluate(b, I, {{w.x, 1}}) == 0);
  Fodd e = w.ite(Label::equality(w.x, w.y), w.leaf(2), w.leaf(3));
  CHECK(evaluate(e, I, {{w.x, 0}, {w.y, 0}}) == 2);
  CHECK(evaluate(e, I, {{w.x, 0}, {w.y, 1}}) == 3);
  CHECK_THROWS_AS(evaluate(b, I, {}), InvariantError);
  CHECK_THROWS_AS(evaluate(w.ite(w.P(w.a), w.leaf(1), w.leaf(0)), I, {}), InvariantError);
}

TEST_CASE("map value") {
  World w;
  Interpretation I(w.m->predicates(), {"1", "2"});
  I.set(w.p, std::vector<int>{0});
  CHECK(map_value(w.leaf(4), I) == 4);
  CHECK(map_value(w.ite(w.P(w.x), w.leaf(1), w.leaf(0)), I) == 1);
  auto r = map_value_full(w.ite(w.P(w.x), w.leaf(1), w.leaf(0)), I);
  CHECK(r.witness.at(w.x) == 0);

  Fodd b1 = w.ite(w.P(w.x), w.leaf(1), w.ite(w.P(w.y), w.leaf(0), w.leaf(1)));
  for (int n : {1, 2, 3})
    for (const auto& J : fodd::testing::all_interpretations(w, n)) CHECK(map_value(b1, J) == 1);

  MapOptions tight;
  tight.max_valuations = 3;
  Fodd two = w.ite(w.Q(w.x, w.y), w.leaf(1), w.leaf(0));
  CHECK_THROWS_AS(map_value(two, I, {}, tight), LimitError);
}

TEST_CASE("map value agrees with brute force on random diagrams") {
  World w;
  std::mt19937 rng(11);
  auto small = fodd::testing::all_interpretations(w, 2);
  for (int i = 0; i < 100; ++i) {
    Fodd b = fodd::testing::random_fodd(w, rng);
    for (const auto& I : small) REQUIRE(map_value(b, I) == fodd::testing::brute_map(b, I));
  }
}

TEST_CASE("path formulas") {
  World w;
  Fodd qy = w.ite(w.P(w.y), w.leaf(1), w.leaf(0));
  Fodd b = w.ite(w.P(w.x), qy, w.leaf(0));
  PathIndex idx(b);
  REQUIRE(idx.node_formulas(b));
  CHECK(idx.node_formulas(b)->size() == 1);
  CHECK(idx.node_formulas(b)->front().empty());
  auto ef = idx.edge_formulas({qy, true});
  REQUIRE(ef);
  REQUIRE(ef->size() == 1);
  CHECK(ef->front() == PathFormula{{w.P(w.x), true}, {w.P(w.y), true}});

  // Diamond: both edges of the root reach the shared node.
  Fodd shared = w.ite(w.Q(w.x, w.y), w.leaf(2), w.leaf(0));
  Fodd left = w.ite(w.P(w.y), shared, w.leaf(1));
  Fodd d = w.ite(w.P(w.x), left, shared);
  auto nf = path_formulas(d, shared);
  REQUIRE(nf);
  CHECK(nf->size() == 2);
  std::set<PathFormula> got(nf->begin(), nf->end());
  CHECK(got.contains(PathFormula{{w.P(w.x), false}}));
  CHECK(got.contains(PathFormula{{w.P(w.x), true}, {w.P(w.y), true}}));
}

TEST_CASE("path cap marks overflow") {
  World w;
  Fodd b = w.leaf(0);
  std::vector<Term> terms{w.x, w.y, w.z, w.a};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) b = w.ite(w.Q(terms[i], terms[j]), b, w.ite(w.P(terms[j]), b, w.leaf(i + j)));
  PathIndex idx(b, 2);
  bool overflow = false;
  for (Fodd n : topological_order(b))
    if (!idx.node_formulas(n)) overflow = true;
  CHECK(overflow);
}

TEST_CASE("rename") {
  World w;
  CHECK(rename(w.leaf(5), {{w.x, w.y}}) == w.leaf(5));
  CHECK(rename(w.ite(w.P(w.x), w.leaf(1), w.leaf(0)), {{w.x, w.y}}) == w.ite(w.P(w.y), w.leaf(1), w.leaf(0)));

  // q(x1,y1)?(q(x2,y2)?1:0):0 with x2 -> x1 may need reordering.
  Term x1 = Term::variable("x1"), y1 = Term::variable("y1"), x2 = Term::variable("x2"), y2 = Term::variable("y2");
  Fodd b = w.ite(w.Q(x2, y1), w.ite(w.Q(y2, x1), w.leaf(1), w.leaf(0)), w.leaf(3));
  std::map<Term, Term> sub{{x2, x1}, {y2, y1}};
  Fodd r = rename(b, sub);
  CHECK(sorted_paths(r));
  for (int n : {1, 2})
    for (const auto& I : fodd::testing::all_interpretations(w, n))
      fodd::testing::for_each_valuation({x1, y1}, I, [&](const Valuation& z) {
        Valuation composed = z;
        composed[x2] = z.at(x1);
        composed[y2] = z.at(y1);
        CHECK(evaluate(r, I, z) == evaluate(b, I, composed));
      });
}

TEST_CASE("splice and replace_nodes") {
  World w;
  Fodd inner = w.ite(w.P(w.y), w.leaf(2), w.leaf(0));
  Fodd b = w.ite(w.P(w.x), inner, w.leaf(1));
  Fodd sub = w.ite(Label::equality(w.x, w.y), w.leaf(5), w.leaf(6));
  Fodd s = splice(b, inner, sub);
  CHECK(sorted_paths(s));
  for (const auto& I : fodd::testing::all_interpretations(w, 2))
    fodd::testing::for_each_valuation({w.x, w.y}, I, [&](const Valuation& z) {
      double expect = I.holds(w.p, std::vector<int>{z.at(w.x)}) ? evaluate(sub, I, z) : 1;
      CHECK(evaluate(s, I, z) == expect);
    });
  Fodd r = replace_nodes(b, {{inner.id(), w.leaf(9)}});
  CHECK(r == w.ite(w.P(w.x), w.leaf(9), w.leaf(1)));
}

TEST_CASE("structural queries") {
  World w;
  Fodd b = w.ite(w.P(w.x), w.ite(w.Q(w.x, w.a), w.leaf(3), w.leaf(1)), w.leaf(1));
  CHECK(node_count(b) == 4);
  CHECK(internal_count(b) == 2);
  CHECK(min_leaf(b) == 1);
  CHECK(max_leaf(b) == 3);
  CHECK(leaf_values(b) == std::set<double>{1, 3});
  CHECK(variables_of(b) == std::set<Term>{w.x});
  CHECK(terms_of(b, TermSort::Constant) == std::set<Term>{w.a});
  CHECK(descendants(b).size() == 4);
}
