#include "fodd/rmdp.hpp"

#include <cmath>
#include <set>

#include "fodd/algebra.hpp"

namespace fodd {

const ActionSchema& RmdpModel::action(std::string_view name) const {
  for (const auto& a : actions)
    if (a.name == name) return a;
  throw InvariantError("unknown action '" + std::string(name) + "'");
}

namespace {

std::string where(const SourcePos& p) {
  if (p.line == 0) return "";
  return " (line " + std::to_string(p.line) + ", column " + std::to_string(p.column) + ")";
}

bool variable_free(Fodd d) { return terms_of(d, TermSort::Variable).empty(); }

}  // namespace

std::vector<std::string> validate(const RmdpModel& model) {
  std::vector<std::string> out;
  const auto& preds = model.predicates();
  std::set<std::string> constants(model.constants.begin(), model.constants.end());

  if (!(model.discount > 0.0 && model.discount < 1.0))
    out.push_back("discount " + std::to_string(model.discount) + " is outside (0, 1)");

  if (!model.reward.valid()) {
    out.push_back("model has no reward");
  } else {
    if (min_leaf(model.reward) < 0) out.push_back("reward has a negative leaf" + where(model.reward_pos));
    for (const auto& t : terms_of(model.reward, TermSort::Parameter))
      out.push_back("reward mentions action parameter " + t.name + where(model.reward_pos));
    if (model.absorbing) {
      auto leaves = leaf_values(model.reward);
      leaves.erase(0.0);
      if (leaves.size() != 1) out.push_back("absorbing formulation needs exactly one non-zero reward leaf");
    }
  }

  std::set<std::string> action_names;
  for (const auto& a : model.actions) {
    std::string ctx = "action " + a.name;
    if (!action_names.insert(a.name).second) out.push_back("duplicate " + ctx + where(a.pos));
    std::set<Term> params;
    for (const auto& p : a.params) {
      if (!p.is_parameter()) out.push_back(ctx + ": parameter " + p.name + " must end in '*'");
      if (!params.insert(p).second) out.push_back(ctx + ": duplicate parameter " + p.name);
    }
    if (a.alternatives.empty()) out.push_back(ctx + " has no alternatives" + where(a.pos));

    std::set<std::string> alt_names;
    Fodd total;
    for (const auto& alt : a.alternatives) {
      std::string actx = ctx + ", alternative " + alt.name;
      if (!alt_names.insert(alt.name).second) out.push_back("duplicate " + actx + where(alt.pos));
      for (const auto& [pid, tvd] : alt.tvds) {
        std::string tctx = actx + ", TVD for " + preds[pid].name;
        if (tvd.params.size() != preds[pid].arity) out.push_back(tctx + ": parameter count differs from arity" + where(tvd.pos));
        std::set<Term> own(tvd.params.begin(), tvd.params.end());
        if (own.size() != tvd.params.size()) out.push_back(tctx + ": repeated predicate parameter" + where(tvd.pos));
        for (const auto& t : tvd.params)
          if (!t.is_variable()) out.push_back(tctx + ": predicate parameter " + t.name + " must be a variable" + where(tvd.pos));
        for (double v : leaf_values(tvd.diagram))
          if (v != 0.0 && v != 1.0) out.push_back(tctx + ": leaf " + std::to_string(v) + " is not 0 or 1" + where(tvd.pos));
        for (const auto& t : terms_of(tvd.diagram, TermSort::Variable))
          if (!own.contains(t)) out.push_back(tctx + ": " + t.name + " is a variable, not a predicate or action parameter" + where(tvd.pos));
        for (const auto& t : terms_of(tvd.diagram, TermSort::Parameter))
          if (!params.contains(t)) out.push_back(tctx + ": unknown action parameter " + t.name + where(tvd.pos));
      }
      if (!alt.prob.valid()) {
        out.push_back(actx + " has no choice probability" + where(alt.pos));
        continue;
      }
      if (!variable_free(alt.prob)) out.push_back(actx + ": choice probability contains free variables" + where(alt.pos));
      for (const auto& t : terms_of(alt.prob, TermSort::Parameter))
        if (!params.contains(t)) out.push_back(actx + ": choice probability uses unknown parameter " + t.name);
      if (max_leaf(alt.prob) > 1.0 || min_leaf(alt.prob) < 0.0)
        out.push_back(actx + ": choice probability leaves must lie in [0, 1]");
      total = total.valid() ? apply(total, alt.prob, Op::Add) : alt.prob;
    }
    if (total.valid()) {
      bool ok = total.is_leaf() && std::abs(total.value() - 1.0) <= 1e-9;
      if (!ok) out.push_back(ctx + ": choice probabilities do not sum to 1 in every state");
    }
  }

  for (const auto& r : model.background.rules) {
    for (const auto& lit : r.body)
      if (!lit.label.is_equality() && lit.label.predicate < 0) out.push_back("background rule over unknown predicate");
  }
  (void)constants;
  return out;
}

Fodd instantiate_tvd(const Tvd& tvd, const std::vector<Term>& args) {
  if (args.size() != tvd.params.size()) throw InvariantError("TVD instantiation: argument count differs from arity");
  std::map<Term, Term> sub;
  for (std::size_t i = 0; i < args.size(); ++i) sub[tvd.params[i]] = args[i];
  return rename(tvd.diagram, sub);
}

Fodd instantiate_tvd(const RmdpModel& model, const Alternative& alt, int predicate, const std::vector<Term>& args) {
  if (args.size() != model.predicates()[predicate].arity)
    throw InvariantError("TVD instantiation: argument count differs from arity");
  auto it = alt.tvds.find(predicate);
  if (it == alt.tvds.end()) return model.mgr().literal(Label::atom(predicate, args));
  return instantiate_tvd(it->second, args);
}

namespace {

void collect_sorts(Fodd d, const PredicateTable& preds, std::map<Term, std::string>& out) {
  if (!d.valid()) return;
  for (Fodd n : topological_order(d)) {
    if (n.is_leaf() || n.label().is_equality()) continue;
    const auto& decl = preds[n.label().predicate];
    if (decl.sorts.empty()) continue;
    for (std::size_t i = 0; i < n.label().args.size(); ++i) out.emplace(n.label().args[i], decl.sorts[i]);
  }
}

// Equalities propagate sorts between their sides.
void propagate_equalities(Fodd d, std::map<Term, std::string>& out) {
  if (!d.valid()) return;
  for (int round = 0; round < 3; ++round) {
    for (Fodd n : topological_order(d)) {
      if (n.is_leaf() || !n.label().is_equality()) continue;
      const auto& a = n.label().args;
      if (out.contains(a[0])) out.emplace(a[1], out[a[0]]);
      if (out.contains(a[1])) out.emplace(a[0], out[a[1]]);
    }
  }
}

}  // namespace

std::map<std::string, std::string> infer_constant_sorts(const RmdpModel& model) {
  std::map<Term, std::string> found;
  const auto& preds = model.predicates();
  collect_sorts(model.reward, preds, found);
  for (const auto& a : model.actions)
    for (const auto& alt : a.alternatives) {
      collect_sorts(alt.prob, preds, found);
      for (const auto& [_, tvd] : alt.tvds) collect_sorts(tvd.diagram, preds, found);
    }
  for (const auto& r : model.background.rules) {
    for (const auto& lit : r.body) {
      if (lit.label.is_equality() || preds[lit.label.predicate].sorts.empty()) continue;
      for (std::size_t i = 0; i < lit.label.args.size(); ++i)
        found.emplace(lit.label.args[i], preds[lit.label.predicate].sorts[i]);
    }
  }
  std::map<std::string, std::string> out = model.constant_sorts;
  for (const auto& c : model.constants) {
    if (out.contains(c)) continue;
    if (auto it = found.find(Term::constant(c)); it != found.end()) out[c] = it->second;
  }
  return out;
}

std::vector<std::string> infer_parameter_sorts(const RmdpModel& model, const ActionSchema& action) {
  const auto& preds = model.predicates();
  std::map<Term, std::string> found;
  for (const auto& alt : action.alternatives) {
    collect_sorts(alt.prob, preds, found);
    for (const auto& [pid, tvd] : alt.tvds) {
      collect_sorts(tvd.diagram, preds, found);
      const auto& decl = preds[pid];
      if (!decl.sorts.empty())
        for (std::size_t i = 0; i < tvd.params.size(); ++i) found.emplace(tvd.params[i], decl.sorts[i]);
    }
  }
  for (const auto& alt : action.alternatives)
    for (const auto& [_, tvd] : alt.tvds) propagate_equalities(tvd.diagram, found);
  std::vector<std::string> out;
  for (const auto& p : action.params) {
    auto it = found.find(p);
    out.push_back(it == found.end() ? "" : it->second);
  }
  return out;
}

std::vector<std::string> element_sorts(const RmdpModel& model, const Interpretation& state) {
  std::vector<std::string> out(state.size());
  for (const auto& [pred, args] : state.true_atoms()) {
    const auto& sorts = model.predicates()[pred].sorts;
    for (std::size_t i = 0; i < args.size() && i < sorts.size(); ++i)
      if (out[static_cast<std::size_t>(args[i])].empty()) out[static_cast<std::size_t>(args[i])] = sorts[i];
  }
  auto constants = infer_constant_sorts(model);
  for (const auto& [name, element] : state.bindings())
    if (auto it = constants.find(name); it != constants.end() && out[static_cast<std::size_t>(element)].empty())
      out[static_cast<std::size_t>(element)] = it->second;
  return out;
}

}  // namespace fodd
