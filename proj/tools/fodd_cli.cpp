// fodd: solve relational MDPs with first-order decision diagrams.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "fodd/export.hpp"
#include "fodd/oracle.hpp"
#include "fodd/parser.hpp"
#include "fodd/reductions.hpp"
#include "fodd/regression.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kInput = 2, kLimit = 3 };

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string render(fodd::Fodd v, const std::string& format) {
  if (format == "dot") return fodd::export_dot(v);
  if (format == "sexpr") return "(value " + fodd::print_diagram(v) + ")\n";
  return fodd::export_json(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"First-order decision diagram value iteration"};
  app.require_subcommand(1);

  std::string domain, value_file, state_file, diagram_file, background_file, out_format = "json", out_path;
  std::string objects;
  double gamma = -1, epsilon = 0.1;
  int max_iters = 50, steps = 3;
  bool absorbing = false;

  auto* solve = app.add_subcommand("solve", "Relational value iteration");
  solve->add_option("domain", domain, "Domain file")->required();
  solve->add_option("--gamma", gamma, "Discount factor (overrides the domain)");
  solve->add_option("--epsilon", epsilon, "Target accuracy")->check(CLI::PositiveNumber);
  solve->add_option("--max-iters", max_iters, "Iteration limit")->check(CLI::NonNegativeNumber);
  solve->add_flag("--absorbing", absorbing, "Use the absorbing goal formulation");
  solve->add_option("--out", out_format, "Output format")->check(CLI::IsMember({"json", "dot", "sexpr"}));
  solve->add_option("-o,--output", out_path, "Write the value diagram here instead of stdout");

  auto* reduce = app.add_subcommand("reduce", "Reduce a diagram file");
  reduce->add_option("diagram", diagram_file, "Diagram file")->required();
  reduce->add_option("--background", background_file, "Background theory file");
  reduce->add_option("--out", out_format, "Output format")->check(CLI::IsMember({"json", "dot", "sexpr"}));

  auto* eval = app.add_subcommand("eval", "Map of a value diagram on a state");
  eval->add_option("domain", domain, "Domain file")->required();
  eval->add_option("value", value_file, "Value diagram (JSON or (value DIAG))")->required();
  eval->add_option("state", state_file, "State file")->required();

  auto* act = app.add_subcommand("act", "Greedy action for a state");
  act->add_option("domain", domain, "Domain file")->required();
  act->add_option("value", value_file, "Value diagram (JSON or (value DIAG))")->required();
  act->add_option("state", state_file, "State file")->required();

  auto* check = app.add_subcommand("oracle-check", "Compare abstract values with a ground instance");
  check->add_option("domain", domain, "Domain file")->required();
  check->add_option("--objects", objects, "Objects per sort, e.g. box=2,truck=1,city=2")->required();
  check->add_option("--steps", steps, "Number of value-iteration steps")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*solve) {
      auto model = fodd::load_domain(domain, false);
      if (gamma >= 0) model.discount = gamma;
      if (absorbing) model.absorbing = true;
      if (auto v = fodd::validate(model); !v.empty()) throw fodd::ValidationError(v);
      fodd::SolveOptions opts;
      opts.epsilon = epsilon;
      opts.max_iters = max_iters;
      auto start = std::chrono::steady_clock::now();
      auto res = fodd::solve(model, opts);
      double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::fprintf(stderr, "iterations %d residual %.9g threshold %.9g converged %s nodes %zu time %.3fs\n",
                   res.iterations, res.residual, fodd::stopping_threshold(epsilon, model.discount),
                   res.converged ? "yes" : "no", fodd::node_count(res.value), secs);
      emit(render(res.value, out_format), out_path);
      return kOk;
    }
    if (*reduce) {
      auto file = fodd::parse_diagram_file(fodd::read_file(diagram_file));
      fodd::ReductionOptions opts;
      if (!background_file.empty())
        opts.theory = fodd::parse_background(fodd::read_file(background_file), file.manager->predicates(), file.constants);
      fodd::Fodd after = fodd::reduce_full(file.diagram, opts);
      std::fprintf(stderr, "before %zu nodes\nafter %zu nodes\n", fodd::node_count(file.diagram),
                   fodd::node_count(after));
      emit(render(after, out_format == "json" ? "sexpr" : out_format), "");
      return kOk;
    }
    if (*eval || *act) {
      auto model = fodd::load_domain(domain);
      fodd::Fodd v = fodd::parse_value(fodd::read_file(value_file), model);
      auto state = fodd::parse_state(fodd::read_file(state_file), model);
      if (*eval) {
        std::printf("%.12g\n", fodd::map_value(v, state));
        return kOk;
      }
      auto choice = fodd::extract_action(model, v, state, fodd::element_sorts(model, state));
      std::string text = choice.action + "(";
      for (std::size_t i = 0; i < choice.binding.size(); ++i)
        text += (i ? "," : "") + state.elements()[choice.binding[i].second];
      std::printf("%s) %.12g\n", text.c_str(), choice.value);
      return kOk;
    }
    if (*check) {
      auto model = fodd::load_domain(domain);
      auto start = std::chrono::steady_clock::now();
      auto rep = fodd::oracle_check(model, fodd::ObjectSpec::parse(objects), steps);
      double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::printf("states %zu ground-actions %zu\n", rep.states, rep.ground_actions);
      for (std::size_t n = 0; n < rep.deviations.size(); ++n)
        std::printf("step %zu deviation %.3g nodes %zu\n", n, rep.deviations[n], fodd::node_count(rep.values[n]));
      std::printf("max deviation %.3g time %.3fs\n", rep.max_deviation, secs);
      return kOk;
    }
  } catch (const fodd::LimitError& e) {
    std::fprintf(stderr, "limit exceeded: %s\n", e.what());
    return kLimit;
  } catch (const fodd::ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kInput;
  } catch (const fodd::ValidationError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInput;
  }
  return kUsage;
}
