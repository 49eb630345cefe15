#include "doctest.h"
#include "fodd/parser.hpp"
#include "fodd/rmdp.hpp"
#include "support/fodd_testing.hpp"

using namespace fodd;

namespace {

const std::string kDomains = FODD_DOMAIN_DIR;

bool mentions(const std::vector<std::string>& msgs, const std::string& text) {
  for (const auto& m : msgs)
    if (m.find(text) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("shipped domains validate") {
  for (const char* file : {"logistics.dom", "logistics_absorbing.dom", "random2.dom", "two_outcomes.dom"}) {
    RmdpModel m = load_domain(kDomains + "/" + file);
    CHECK(validate(m).empty());
  }
}

TEST_CASE("validation reports each violation") {
  const char* bad = R"((domain d
    (predicates (p 1) (q 1))
    (discount 1)
    (reward (if (p u*) 1 0))
    (action go (params u* u*)
      (alternative s (tvd p (X) (if (= X u*) 2 (if (q Y) 1 0))) (tvd q (X Z) 0))
      (alternative s)
      (prob s (if (p Y) 0.5 0.25)))
    (action go (params v*)
      (alternative t (tvd p (X) (if (p w*) 1 0)))
      (prob t 1.5))))";
  RmdpModel model = parse_domain(bad, false);
  model.actions[1].params.push_back(Term::variable("v"));
  auto msgs = validate(model);
  CHECK(mentions(msgs, "discount"));
  CHECK(mentions(msgs, "reward mentions action parameter u*"));
  CHECK(mentions(msgs, "duplicate parameter u*"));
  CHECK(mentions(msgs, "duplicate action go"));
  CHECK(mentions(msgs, "duplicate action go, alternative s"));
  CHECK(mentions(msgs, "must end in '*'"));
  CHECK(mentions(msgs, "is not 0 or 1"));
  CHECK(mentions(msgs, "Y is a variable"));
  CHECK(mentions(msgs, "parameter count differs from arity"));
  CHECK(mentions(msgs, "unknown action parameter w*"));
  CHECK(mentions(msgs, "contains free variables"));
  CHECK(mentions(msgs, "must lie in [0, 1]"));
  CHECK(mentions(msgs, "do not sum to 1"));

  const char* absorbing = R"((domain d (predicates (p 1)) (absorbing)
    (reward (if (p x) 2 (if (p y) 1 0)))))";
  CHECK(mentions(validate(parse_domain(absorbing, false)), "exactly one non-zero reward leaf"));
}

TEST_CASE("TVD instantiation and the frame default") {
  RmdpModel m = load_domain(kDomains + "/logistics.dom");
  int bin = m.predicates().require("Bin");
  int tin = m.predicates().require("Tin");
  const auto& unload = m.action("unload");
  Term b = Term::variable("b"), c = Term::variable("c"), t = Term::variable("t");
  Fodd succ = instantiate_tvd(m, unload.alternatives[0], bin, {b, c});
  CHECK(variables_of(succ) == std::set<Term>{b, c});
  CHECK(terms_of(succ, TermSort::Parameter) == std::set<Term>{Term::parameter("b*"), Term::parameter("t*")});
  CHECK(leaf_values(succ) == std::set<double>{0, 1});

  // No TVD for Tin: the atom keeps its value.
  Fodd frame = instantiate_tvd(m, unload.alternatives[0], tin, {t, c});
  CHECK(frame == m.mgr().literal(Label::atom(tin, {t, c})));
  Fodd fail = instantiate_tvd(m, unload.alternatives[1], bin, {b, c});
  CHECK(fail == m.mgr().literal(Label::atom(bin, {b, c})));
  CHECK_THROWS_AS(instantiate_tvd(m, unload.alternatives[0], bin, {b}), InvariantError);

  // The instantiated TVD tracks the intended dynamics on a concrete state.
  Interpretation s = parse_state(read_file(kDomains + "/examples/on_truck_rain.state"), m);
  int b1 = *s.element("b1"), t1 = *s.element("t1"), paris = *s.element("Paris");
  Valuation z{{b, b1}, {c, paris}, {Term::parameter("b*"), b1}, {Term::parameter("t*"), t1}};
  CHECK(evaluate(succ, s, z) == 1);
  z[Term::parameter("t*")] = b1;
  CHECK(evaluate(succ, s, z) == 0);
}

TEST_CASE("sort inference") {
  RmdpModel m = load_domain(kDomains + "/logistics.dom");
  CHECK(infer_constant_sorts(m) == std::map<std::string, std::string>{{"Paris", "city"}});
  CHECK(infer_parameter_sorts(m, m.action("unload")) == std::vector<std::string>{"box", "truck"});
  CHECK(infer_parameter_sorts(m, m.action("load")) == std::vector<std::string>{"box", "truck", "city"});
  CHECK(infer_parameter_sorts(m, m.action("drive")) == std::vector<std::string>{"truck", "city"});

  Interpretation s = parse_state(read_file(kDomains + "/examples/on_truck_rain.state"), m);
  auto sorts = element_sorts(m, s);
  CHECK(sorts[*s.element("b1")] == "box");
  CHECK(sorts[*s.element("t1")] == "truck");
  CHECK(sorts[*s.element("Paris")] == "city");

  RmdpModel untyped = load_domain(kDomains + "/two_outcomes.dom");
  CHECK(infer_parameter_sorts(untyped, untyped.action("A")) == std::vector<std::string>{""});
}

TEST_CASE("action lookup") {
  RmdpModel m = load_domain(kDomains + "/logistics.dom");
  CHECK(m.action("drive").params.size() == 2);
  CHECK(m.action("load").alternatives.size() == 2);
  CHECK_THROWS_AS(m.action("fly"), InvariantError);
}
