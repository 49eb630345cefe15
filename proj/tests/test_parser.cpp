#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include "doctest.h"
#include "fodd/export.hpp"
#include "fodd/parser.hpp"
#include "fodd/reductions.hpp"

using namespace fodd;

namespace {

const std::string kDomains = FODD_DOMAIN_DIR;

const char* kSmall = R"((domain small
  (predicates (p 1) (q 2 thing thing))
  (constants a)
  (discount 0.5)
  (background (depth 1) (rule ((q x y)) (p x)))
  (reward (if (p a) 3 (if (q x y) 1 0)))
  (action go
    (params u*)
    (alternative goS (tvd p (X) (if (= X u*) 1 (if (p X) 1 0))))
    (alternative goF)
    (prob goS (if (q u* u*) 0.25 0.75))
    (prob goF (if (q u* u*) 0.75 0.25)))))";

int run(const std::string& args) {
  std::string cmd = std::string(FODD_CLI) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write_temp(const std::string& name, const std::string& text) {
  std::string path = std::string("/tmp/fodd_test_") + name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("domain round trip") {
  RmdpModel m = parse_domain(kSmall);
  CHECK(m.name == "small");
  CHECK(m.discount == 0.5);
  CHECK(m.background.depth == 1);
  CHECK(m.background.rules.size() == 1);
  REQUIRE(m.actions.size() == 1);
  CHECK(m.actions[0].params == std::vector<Term>{Term::parameter("u*")});
  std::string printed = print_domain(m);
  RmdpModel again = parse_domain(printed);
  CHECK(print_domain(again) == printed);

  for (const char* file : {"logistics.dom", "logistics_absorbing.dom", "random2.dom"}) {
    RmdpModel d = load_domain(kDomains + "/" + file);
    std::string text = print_domain(d);
    CHECK(print_domain(parse_domain(text)) == text);
  }
}

TEST_CASE("diagram round trip") {
  Manager m([] {
    PredicateTable t;
    t.add({"p", 1, {}});
    t.add({"q", 2, {}});
    return t;
  }());
  const std::string text = "(if (= x y) (if (p a) 2.5 (if (q x u*) 1 0)) 0.125)";
  Fodd b = parse_diagram(text, m, {"a"});
  CHECK(print_diagram(b) == text);
  CHECK(parse_diagram(print_diagram(b), m, {"a"}) == b);
  CHECK(b.label().args[0].is_variable());
  CHECK(b.high().label().args[0].is_constant());
  CHECK(b.high().low().label().args[1].is_parameter());
  // Unsorted input is rebuilt sorted.
  Fodd c = parse_diagram("(if (q x y) (if (p x) 1 0) 0)", m, {});
  Fodd d = parse_diagram("(if (p x) (if (q x y) 1 0) 0)", m, {});
  CHECK(c == d);
}

TEST_CASE("parse errors carry positions") {
  try {
    parse_domain("(domain d\n  (predicates (p 1))\n  (reward (if (p x) 1)))");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() > 0);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_domain("(domain d (predicates (p 1)) (reward (if (p x) 1 -2)))"), ParseError);
  CHECK_THROWS_AS(parse_domain("(domain d (predicates (p 1)) (reward (if (r x) 1 0)))"), ParseError);
  CHECK_THROWS_AS(parse_domain("(domain d (predicates (p 1)) (reward (if (p x x) 1 0)))"), ParseError);
  CHECK_THROWS_AS(parse_domain("(domain d (predicates (p 1)) (reward 1)"), ParseError);
  CHECK_THROWS_AS(parse_domain("(domain d (bogus))"), ParseError);
}

TEST_CASE("validation errors") {
  // Probabilities do not sum to one and the TVD has a non-binary leaf.
  const char* bad = R"((domain d
    (predicates (p 1))
    (reward (if (p x) 1 0))
    (action go (params u*)
      (alternative s (tvd p (X) (if (= X u*) 2 0)))
      (prob s 0.5))))";
  try {
    parse_domain(bad);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.violations().size() >= 2);
  }
  RmdpModel unchecked = parse_domain(bad, false);
  CHECK_FALSE(validate(unchecked).empty());
}

TEST_CASE("diagram, background, state and value files") {
  auto file = parse_diagram_file(read_file(kDomains + "/examples/blocks.diag"));
  CHECK(internal_count(file.diagram) == 2);
  auto th = parse_background(read_file(kDomains + "/examples/blocks.bg"), file.manager->predicates(), file.constants);
  REQUIRE(th.rules.size() == 1);
  CHECK_FALSE(th.rules[0].head.positive);
  CHECK(internal_count(reduce_full(file.diagram, ReductionOptions{th})) == 1);

  RmdpModel m = load_domain(kDomains + "/logistics.dom");
  Interpretation s = parse_state(read_file(kDomains + "/examples/on_truck_rain.state"), m);
  CHECK(s.size() == 4);
  CHECK(s.binding("Paris") == s.element("Paris"));
  int on = m.predicates().require("On");
  CHECK(s.holds(on, std::vector<int>{*s.element("b1"), *s.element("t1")}));
  Interpretation extra = parse_state("(state (objects b1) (atoms))", m);
  CHECK(extra.size() == 2);  // Paris is added
  CHECK_THROWS_AS(parse_state("(state (objects b1) (atoms (Bin b1 Rome)))", m), ParseError);

  Fodd v = parse_value("(value (if (Bin b Paris) 10 0))", m);
  CHECK(v == m.reward);
  Fodd j = parse_value(export_json(m.reward), m);
  CHECK(j == m.reward);
}

TEST_CASE("JSON and DOT export") {
  RmdpModel m = load_domain(kDomains + "/logistics.dom");
  Fodd b = m.actions[0].alternatives[0].tvds.begin()->second.diagram;
  std::string json = export_json(b);
  CHECK(import_json(json, m.mgr()) == b);
  CHECK(export_json(b) == json);
  std::string dot = export_dot(b);
  CHECK(dot == export_dot(b));
  CHECK(dot.rfind("digraph", 0) == 0);
  CHECK(dot.find("style=dashed") != std::string::npos);
  CHECK_THROWS_AS(import_json("{\"root\": 0}", m.mgr()), InvariantError);
  CHECK_THROWS_AS(import_json("not json", m.mgr()), InvariantError);
}

TEST_CASE("command line exit codes") {
  const std::string dom = kDomains + "/logistics.dom";
  CHECK(run("solve " + dom + " --max-iters 1") == 0);
  CHECK(run("reduce " + kDomains + "/examples/redundant.diag") == 0);
  CHECK(run("") == 1);
  CHECK(run("solve") == 1);
  CHECK(run("solve " + dom + " --out png") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("solve " + write_temp("bad.dom", "(domain d (predicates (p 1)")) == 2);
  CHECK(run("solve /nonexistent/file.dom") == 2);
  CHECK(run("solve " + dom + " --gamma 1.5") == 2);
  CHECK(run("oracle-check " + dom + " --objects box=4,truck=3,city=3 --steps 1") == 3);
  CHECK(run("oracle-check " + dom + " --objects box=1,truck=1,city=2 --steps 1") == 0);

  std::string v = "/tmp/fodd_test_value.json";
  REQUIRE(run("solve " + dom + " --max-iters 1 -o " + v) == 0);
  CHECK(run("eval " + dom + " " + v + " " + kDomains + "/examples/box_in_paris.state") == 0);
  CHECK(run("act " + dom + " " + v + " " + kDomains + "/examples/on_truck_dry.state") == 0);
  CHECK(run("eval " + dom + " " + v + " " + write_temp("bad.state", "(state (objects")) == 2);
}

TEST_CASE("path cap from the environment") {
  ::setenv("FODD_MAX_PATHS", "17", 1);
  CHECK(default_path_cap() == 17);
  ::setenv("FODD_MAX_PATHS", "junk", 1);
  CHECK(default_path_cap() == 256);
  ::unsetenv("FODD_MAX_PATHS");
  CHECK(default_path_cap() == 256);
}
