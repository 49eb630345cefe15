#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "fodd/parser.hpp"
#include "fodd/regression.hpp"
#include "support/fodd_testing.hpp"

using namespace fodd;
using fodd::testing::brute_eval;
using fodd::testing::brute_map;

namespace {

const std::string kDomains = FODD_DOMAIN_DIR;

void for_each_tuple(std::size_t arity, int n, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> args(arity, 0);
  while (true) {
    f(args);
    std::size_t i = 0;
    while (i < arity && ++args[i] == n) args[i++] = 0;
    if (i == arity) return;
  }
}

// Next state under one alternative, read off its TVDs atom by atom.
Interpretation successor(const RmdpModel& m, const Alternative& alt, const Interpretation& I, const Valuation& binding) {
  Interpretation next = I;
  for (const auto& [pid, tvd] : alt.tvds) {
    for_each_tuple(tvd.params.size(), static_cast<int>(I.size()), [&](const std::vector<int>& args) {
      Valuation z = binding;
      for (std::size_t i = 0; i < args.size(); ++i) z[tvd.params[i]] = args[i];
      next.set(pid, args, brute_eval(tvd.diagram, I, z) == 1.0);
    });
  }
  (void)m;
  return next;
}

// Random logistics states over {Paris, o1, o2} that respect the background rules.
std::vector<Interpretation> logistics_states(const RmdpModel& m, int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::bernoulli_distribution coin(0.3);
  int bin = m.predicates().require("Bin"), on = m.predicates().require("On");
  std::vector<Interpretation> out;
  while (static_cast<int>(out.size()) < count) {
    Interpretation I(m.predicates(), {"Paris", "o1", "o2"});
    I.bind("Paris", 0);
    for (std::size_t p = 0; p < I.predicate_count(); ++p)
      for_each_tuple(I.arity(static_cast<int>(p)), 3, [&](const std::vector<int>& args) {
        if (coin(rng)) I.set(static_cast<int>(p), args);
      });
    bool ok = true;
    for (int b = 0; b < 3; ++b) {
      bool any_on = false, any_bin = false;
      for (int o = 0; o < 3; ++o) {
        any_on = any_on || I.holds(on, std::vector<int>{b, o});
        any_bin = any_bin || I.holds(bin, std::vector<int>{b, o});
      }
      ok = ok && !(any_on && any_bin);
    }
    if (ok) out.push_back(I);
  }
  return out;
}

double map_state(Fodd v, const RmdpModel& m, const std::string& file) {
  return map_value(v, parse_state(read_file(kDomains + "/examples/" + file), m));
}

}  // namespace

TEST_CASE("first value iteration step on logistics") {
  RmdpModel m = load_domain(kDomains + "/logistics.dom");
  FreshVariables fresh;
  Fodd v1 = vi_step(m.reward, m, fresh);
  CHECK(map_state(v1, m, "box_in_paris.state") == doctest::Approx(19).epsilon(1e-12));
  CHECK(map_state(v1, m, "on_truck_rain.state") == doctest::Approx(6.3).epsilon(1e-12));
  CHECK(map_state(v1, m, "on_truck_dry.state") == doctest::Approx(8.1).epsilon(1e-12));
  CHECK(max_leaf(v1) == 19);
}

TEST_CASE("regression agrees with the successor state per valuation") {
  RmdpModel m = load_domain(kDomains + "/logistics.dom");
  FreshVariables fresh;
  std::vector<Fodd> values{m.reward, vi_step(m.reward, m, fresh)};
  auto states = logistics_states(m, 12, 5);
  std::size_t checked = 0;
  for (Fodd v : values) {
    for (const auto& a : m.actions) {
      for (const auto& alt : a.alternatives) {
        Fodd r = regress_deterministic(v, m, alt);
        auto vars = fodd::testing::free_terms({v, r});
        for (const auto& p : a.params) vars.insert(p);
        for (const auto& I : states) {
          fodd::testing::for_each_valuation(vars, I, [&](const Valuation& z) {
            Valuation binding;
            for (const auto& p : a.params) binding[p] = z.at(p);
            Interpretation next = successor(m, alt, I, binding);
            if (brute_eval(r, I, z) != brute_eval(v, next, z)) FAIL_CHECK("regression mismatch in ", alt.name);
            ++checked;
          });
        }
      }
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("expected value sums the alternatives' best values") {
  RmdpModel m = load_domain(kDomains + "/logistics.dom");
  FreshVariables fresh;
  Fodd v1 = vi_step(m.reward, m, fresh);
  auto states = logistics_states(m, 6, 9);
  for (const auto& a : m.actions) {
    Fodd t = t_function(v1, m, a, fresh);
    for (const auto& I : states) {
      fodd::testing::for_each_valuation({a.params.begin(), a.params.end()}, I, [&](const Valuation& binding) {
        double expect = 0;
        for (const auto& alt : a.alternatives)
          expect += brute_eval(alt.prob, I, binding) * brute_map(v1, successor(m, alt, I, binding));
        CHECK(brute_map(t, I, binding) == doctest::Approx(expect).epsilon(1e-12));
      });
    }
  }
}

TEST_CASE("standardizing apart changes the expected value") {
  RmdpModel m = load_domain(kDomains + "/two_outcomes.dom");
  int p = m.predicates().require("p"), q = m.predicates().require("q");
  Interpretation I(m.predicates(), {"1", "2"});
  I.set(q, std::vector<int>{0});
  I.set(p, std::vector<int>{1});
  Valuation bind{{Term::parameter("x*"), 0}};
  const auto& a = m.action("A");

  FreshVariables fresh;
  RegressionOptions apart, together;
  together.standardize_apart = false;
  Fodd t_apart = t_function(m.reward, m, a, fresh, apart);
  Fodd t_together = t_function(m.reward, m, a, fresh, together);
  CHECK(map_value(t_apart, I, bind) == doctest::Approx(7.5));
  CHECK(map_value(t_together, I, bind) == doctest::Approx(5));

  // Successor states: success gives {q(1), p(1), p(2)}, failure leaves I.
  Interpretation success = I;
  success.set(p, std::vector<int>{0});
  CHECK(0.5 * brute_map(m.reward, success) + 0.5 * brute_map(m.reward, I) == 7.5);
}

TEST_CASE("value iteration and the stopping rule") {
  CHECK(stopping_threshold(0.1, 0.9) == doctest::Approx(0.1 * 0.1 / 1.8));
  RmdpModel m = load_domain(kDomains + "/logistics.dom");
  SolveOptions opts;
  opts.max_iters = 2;
  SolveResult r = solve(m, opts);
  REQUIRE(r.history.size() == 3);
  CHECK(r.iterations == 2);
  CHECK(r.history[0] == m.reward);
  CHECK(map_state(r.history[1], m, "on_truck_rain.state") == doctest::Approx(6.3));
  // Values grow monotonically from the reward.
  for (const auto& I : logistics_states(m, 8, 3)) {
    CHECK(map_value(r.history[1], I) >= map_value(r.history[0], I));
    CHECK(map_value(r.history[2], I) >= map_value(r.history[1], I) - 1e-9);
  }
  CHECK(r.residual > 0);

  RmdpModel one = load_domain(kDomains + "/two_outcomes.dom");
  SolveOptions loose;
  loose.epsilon = 100;
  SolveResult quick = solve(one, loose);
  CHECK(quick.converged);
  CHECK(quick.residual <= stopping_threshold(100, one.discount));
}

TEST_CASE("diagram distance") {
  RmdpModel m = load_domain(kDomains + "/two_outcomes.dom");
  Manager& mgr = m.mgr();
  int p = m.predicates().require("p");
  Term x = Term::variable("x"), y = Term::variable("y");
  Fodd px = mgr.ite(Label::atom(p, {x}), mgr.leaf(1), mgr.leaf(0));
  Fodd py = mgr.ite(Label::atom(p, {y}), mgr.leaf(1), mgr.leaf(0));
  CHECK(diagram_distance(px, px) == 0);
  CHECK(diagram_distance(px, py) == 0);
  CHECK(diagram_distance(mgr.leaf(3), mgr.leaf(5)) == 2);
  CHECK(diagram_distance(px, mgr.leaf(0)) == 1);

  std::vector<Interpretation> tests;
  Interpretation empty(m.predicates(), {"1"});
  tests.push_back(empty);
  Fodd big = mgr.ite(Label::atom(p, {x}), mgr.leaf(4), mgr.leaf(0));
  double d = diagram_distance(big, px, tests);
  CHECK(d >= 3);
}

TEST_CASE("greedy action extraction") {
  RmdpModel m = load_domain(kDomains + "/logistics.dom");
  FreshVariables fresh;
  Fodd v1 = vi_step(m.reward, m, fresh);
  Interpretation s = parse_state(read_file(kDomains + "/examples/on_truck_dry.state"), m);
  ActionChoice c = extract_action(m, v1, s, element_sorts(m, s));
  CHECK(c.action == "unload");
  REQUIRE(c.binding.size() == 2);
  CHECK(c.binding[0].second == *s.element("b1"));
  CHECK(c.binding[1].second == *s.element("t1"));

  Interpretation home = parse_state(read_file(kDomains + "/examples/box_in_paris.state"), m);
  ActionChoice h = extract_action(m, v1, home, element_sorts(m, home));
  CHECK(h.value == doctest::Approx(10 + 0.9 * 19));
}

TEST_CASE("diagram distance bounds the map difference on random pairs") {
  fodd::testing::World w;
  std::mt19937 rng(23);
  auto d2 = fodd::testing::all_interpretations(w, 2);
  int exact = 0;
  for (int i = 0; i < 200; ++i) {
    Fodd a = fodd::testing::random_fodd(w, rng);
    Fodd b = fodd::testing::random_fodd(w, rng);
    double d = diagram_distance(a, b);
    double worst = 0;
    for (const auto& I : d2) worst = std::max(worst, std::abs(brute_map(a, I) - brute_map(b, I)));
    REQUIRE(d >= worst - 1e-12);
    if (d <= worst + 1e-12) ++exact;
  }
  CHECK(exact > 50);
}
