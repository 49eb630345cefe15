#include "fodd/regression.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

namespace fodd {

ReductionOptions reduction_options(const RmdpModel& model, const RegressionOptions& opts) {
  ReductionOptions r;
  r.theory = model.background;
  r.budget = opts.budget;
  r.weak = opts.weak;
  return r;
}

Fodd regress_deterministic(Fodd v, const RmdpModel& model, const Alternative& alt) {
  Manager& m = model.mgr();
  auto order = topological_order(v);
  std::unordered_map<NodeId, Fodd> done;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Fodd n = *it;
    if (n.is_leaf()) {
      done.emplace(n.id(), n);
      continue;
    }
    Fodd bt = done.at(n.high().id());
    Fodd bf = done.at(n.low().id());
    const Label& l = n.label();
    Fodd out;
    if (l.is_equality()) {
      out = m.ite(l, bt, bf);
    } else {
      Fodd bn = instantiate_tvd(model, alt, l.predicate, l.args);
      Fodd not_bn = apply(m.one(), bn, Op::Subtract);
      out = apply(apply(bn, bt, Op::Multiply), apply(not_bn, bf, Op::Multiply), Op::Add);
    }
    done.emplace(n.id(), out);
  }
  return done.at(v.id());
}

Fodd regress_deterministic(Fodd v, const RmdpModel& model, std::string_view action, std::string_view alternative) {
  for (const auto& alt : model.action(action).alternatives)
    if (alt.name == alternative) return regress_deterministic(v, model, alt);
  throw InvariantError("action " + std::string(action) + " has no alternative " + std::string(alternative));
}

namespace {

Fodd reduce_with(Fodd b, const ReductionOptions& red) { return red.weak ? reduce_full(b, red) : reduce_strong(b); }

Fodd combine_reward(Fodd reward, Fodd discounted, const RmdpModel& model, FreshVariables& fresh,
                    const ReductionOptions& red) {
  std::vector<Fodd> parts{reward, discounted};
  auto apart = standardize_apart(parts, fresh);
  Fodd q = apply(apart[0], apart[1], model.absorbing ? Op::Max : Op::Add);
  return reduce_with(q, red);
}

}  // namespace

Fodd t_function(Fodd v, const RmdpModel& model, const ActionSchema& action, FreshVariables& fresh,
                const RegressionOptions& opts) {
  auto red = reduction_options(model, opts);
  std::vector<Fodd> parts;
  for (const auto& alt : action.alternatives)
    parts.push_back(apply(alt.prob, regress_deterministic(v, model, alt), Op::Multiply));
  if (opts.standardize_apart) parts = standardize_apart(parts, fresh);
  Fodd sum = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) sum = apply(sum, parts[i], Op::Add);
  return reduce_with(sum, red);
}

Fodd q_function(Fodd v, const RmdpModel& model, const ActionSchema& action, FreshVariables& fresh,
                const RegressionOptions& opts) {
  Fodd t = t_function(v, model, action, fresh, opts);
  return combine_reward(model.reward, scalar_combine(t, model.discount, Op::Multiply), model, fresh,
                        reduction_options(model, opts));
}

QFunctionSet q_functions(Fodd v, const RmdpModel& model, FreshVariables& fresh, const RegressionOptions& opts) {
  QFunctionSet out;
  for (const auto& a : model.actions) out[a.name] = {q_function(v, model, a, fresh, opts), a.params};
  return out;
}

Fodd object_maximize(Fodd q, const std::vector<Term>& params, FreshVariables& fresh, const ReductionOptions& red) {
  if (params.empty()) return q;
  std::map<Term, Term> sub;
  for (const auto& p : params) {
    std::string stem = p.name;
    if (!stem.empty() && stem.back() == '*') stem.pop_back();
    sub[p] = fresh.next(stem);
  }
  return reduce_with(rename(q, sub), red);
}

Fodd vi_step(Fodd v, const RmdpModel& model, FreshVariables& fresh, const RegressionOptions& opts) {
  auto red = reduction_options(model, opts);
  std::vector<Fodd> qs;
  for (const auto& a : model.actions) {
    Fodd t = t_function(v, model, a, fresh, opts);
    Fodd objmax = object_maximize(t, a.params, fresh, red);
    qs.push_back(combine_reward(model.reward, scalar_combine(objmax, model.discount, Op::Multiply), model, fresh, red));
  }
  if (qs.empty()) return reduce_with(model.reward, red);
  return max_all(qs, fresh, red);
}

namespace {

constexpr int kMaxCorrespondences = 256;

/// Variables in order of first occurrence, top-down.
std::vector<Term> variables_in_order(Fodd b) {
  std::vector<Term> out;
  std::set<Term> seen;
  for (Fodd n : topological_order(b)) {
    if (n.is_leaf()) continue;
    for (const auto& t : n.label().args)
      if (t.is_variable() && seen.insert(t).second) out.push_back(t);
  }
  return out;
}

Fodd canonical(Fodd b, const std::string& prefix, std::vector<Term>& vars) {
  auto order = variables_in_order(b);
  std::map<Term, Term> sub;
  vars.clear();
  for (std::size_t i = 0; i < order.size(); ++i) {
    Term t = Term::variable(prefix + std::to_string(i));
    sub[order[i]] = t;
    vars.push_back(t);
  }
  return rename(b, sub);
}

Fodd prune(Fodd diff, const BackgroundTheory& theory) {
  if (diff.is_leaf()) return diff;
  return r5_implied(diff, theory);
}

constexpr std::size_t kMaxCoverNodes = 4000;

/// Bound on sup (map(a) - map(b)). map(b) is at least b.sigma under every
/// valuation, so a can be compared with the max of several renamed copies of
/// b at once. Correspondences are searched one variable at a time and kept
/// when they lower the bound.
double one_sided(Fodd a, const std::vector<Term>& targets, Fodd b, const std::vector<Term>& bvars,
                 const BackgroundTheory& theory) {
  int tried = 0;
  Fodd cover;
  double best = std::numeric_limits<double>::infinity();
  auto try_sub = [&](const std::map<Term, Term>& sub) {
    ++tried;
    Fodd renamed = reduce_strong(rename(b, sub));
    Fodd candidate = cover.valid() ? apply(cover, renamed, Op::Max) : renamed;
    if (cover.valid() && node_count(candidate) > kMaxCoverNodes) return false;
    double bound = max_leaf(prune(apply(a, candidate, Op::Subtract), theory));
    if (bound >= best) return false;
    best = bound;
    cover = candidate;
    return true;
  };
  // Positional correspondence first: structurally equal diagrams line up.
  std::map<Term, Term> sub;
  for (std::size_t i = 0; i < bvars.size(); ++i)
    if (i < targets.size() && targets[i].is_variable()) sub[bvars[i]] = targets[i];
  try_sub(sub);
  for (int pass = 0; pass < 3 && best > 0.0 && tried < kMaxCorrespondences; ++pass) {
    bool improved = false;
    for (const auto& v : bvars) {
      for (std::size_t j = 0; j <= targets.size() && best > 0.0 && tried < kMaxCorrespondences; ++j) {
        auto next = sub;
        if (j < targets.size())
          next[v] = targets[j];
        else
          next.erase(v);
        if (next == sub) continue;
        if (try_sub(next)) {
          sub = next;
          improved = true;
        }
      }
    }
    if (!improved) break;
  }
  return best;
}

struct LeafPath {
  double value;
  PathFormula formula;
};

/// Every root-to-leaf path with its formula; nullopt on path overflow.
std::optional<std::vector<LeafPath>> leaf_paths(Fodd d) {
  if (d.is_leaf()) return std::vector<LeafPath>{{d.value(), {}}};
  PathIndex idx(d);
  std::vector<LeafPath> out;
  for (Fodd n : topological_order(d)) {
    if (n.is_leaf()) continue;
    for (bool side : {true, false}) {
      Fodd child = side ? n.high() : n.low();
      if (!child.is_leaf()) continue;
      auto fs = idx.edge_formulas({n, side});
      if (!fs) return std::nullopt;
      for (auto& f : *fs) out.push_back({child.value(), std::move(f)});
    }
  }
  return out;
}

/// Bound on sup (map(a) - map(b)) by path entailment: whenever a path of a
/// is realized, every path of b it entails existentially is realized too, so
/// map(b) is at least that path's leaf. a and b must not share variables.
double path_bound(Fodd a, Fodd b, const BackgroundTheory& theory) {
  auto pa = leaf_paths(a);
  if (!pa) return std::numeric_limits<double>::infinity();
  auto pb = leaf_paths(b);
  std::vector<double> levels;
  if (pb)
    for (const auto& q : *pb) levels.push_back(q.value);
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  double floor = min_leaf(b);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& p : *pa) {
    if (p.value - floor <= worst) continue;
    double guaranteed = floor;
    for (double level : levels) {
      if (level <= floor) break;
      EntailmentQuery q;
      q.antecedent.push_back(p.formula);
      for (const auto& c : *pb)
        if (c.value >= level) q.consequent.push_back(c.formula);
      if (implies_exists(q, theory)) {
        guaranteed = level;
        break;
      }
    }
    worst = std::max(worst, p.value - guaranteed);
  }
  return worst;
}

}  // namespace

double diagram_distance(Fodd a, Fodd b, const std::vector<Interpretation>& tests, const BackgroundTheory& theory) {
  double bound;
  if (a == b) {
    bound = 0.0;
  } else {
    std::vector<Term> av, bv;
    Fodd ca = canonical(a, "#da", av);
    Fodd cb = canonical(b, "#db", bv);
    // Variables may also stand for constants of either diagram.
    std::set<Term> consts = terms_of(a, TermSort::Constant);
    for (const auto& c : terms_of(b, TermSort::Constant)) consts.insert(c);
    std::vector<Term> at = av, bt = bv;
    at.insert(at.end(), consts.begin(), consts.end());
    bt.insert(bt.end(), consts.begin(), consts.end());
    double ab = path_bound(ca, cb, theory);
    if (ab > 0.0) ab = std::min(ab, one_sided(ca, at, cb, bv, theory));
    double ba = path_bound(cb, ca, theory);
    if (ba > 0.0) ba = std::min(ba, one_sided(cb, bt, ca, av, theory));
    bound = std::max({ab, ba, 0.0});
  }
  for (const auto& interp : tests) bound = std::max(bound, std::abs(map_value(a, interp) - map_value(b, interp)));
  return bound;
}

double stopping_threshold(double epsilon, double gamma) { return epsilon * (1.0 - gamma) / (2.0 * gamma); }

SolveResult solve(const RmdpModel& model, const SolveOptions& opts) {
  if (!(opts.epsilon > 0.0)) throw InvariantError("epsilon must be positive");
  auto red = reduction_options(model, opts.regression);
  SolveResult res;
  res.value = reduce_with(model.reward, red);
  res.history.push_back(res.value);
  double threshold = stopping_threshold(opts.epsilon, model.discount);
  FreshVariables fresh;
  for (int i = 1; i <= opts.max_iters; ++i) {
    fresh.set_namespace("i" + std::to_string(i));
    Fodd next = vi_step(res.value, model, fresh, opts.regression);
    res.residual = diagram_distance(next, res.value, opts.tests, model.background);
    res.value = next;
    res.iterations = i;
    res.history.push_back(next);
    if (res.residual <= threshold) {
      res.converged = true;
      break;
    }
  }
  return res;
}

ActionChoice extract_action(const RmdpModel& model, Fodd v, const Interpretation& state,
                            const std::vector<std::string>& element_sorts, const RegressionOptions& opts) {
  if (state.size() == 0) throw InvariantError("state has an empty domain");
  FreshVariables fresh("act");
  std::optional<ActionChoice> best;
  for (const auto& a : model.actions) {
    Fodd q = q_function(v, model, a, fresh, opts);
    auto sorts = infer_parameter_sorts(model, a);
    auto admissible = [&](std::size_t i, int e) {
      return element_sorts.empty() || sorts[i].empty() ||
             (static_cast<std::size_t>(e) < element_sorts.size() &&
              (element_sorts[e].empty() || element_sorts[e] == sorts[i]));
    };
    Valuation fixed;
    std::function<void(std::size_t)> enumerate = [&](std::size_t i) {
      if (i == a.params.size()) {
        ActionChoice c{a.name, {}, map_value(q, state, fixed)};
        for (const auto& p : a.params) c.binding.emplace_back(p, fixed.at(p));
        if (!best || c.value > best->value + 1e-12) best = std::move(c);
        return;
      }
      for (int e = 0; e < static_cast<int>(state.size()); ++e) {
        if (!admissible(i, e)) continue;
        fixed[a.params[i]] = e;
        enumerate(i + 1);
      }
      fixed.erase(a.params[i]);
    };
    enumerate(0);
  }
  if (!best) throw InvariantError("no applicable action binding");
  return *best;
}

}  // namespace fodd
