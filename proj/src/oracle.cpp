#include "fodd/oracle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>

namespace fodd {

ObjectSpec ObjectSpec::parse(std::string_view text) {
  ObjectSpec spec;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(start, end - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) {
      std::size_t eq = item.find('=');
      std::string sort = "object";
      std::string_view num = item;
      if (eq != std::string_view::npos) {
        sort = std::string(item.substr(0, eq));
        num = item.substr(eq + 1);
      }
      int n = 0;
      auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), n);
      if (ec != std::errc() || p != num.data() + num.size() || n < 0 || sort.empty())
        throw InvariantError("bad object spec item '" + std::string(item) + "'");
      for (const auto& [s, _] : spec.counts)
        if (s == sort) throw InvariantError("sort '" + sort + "' listed twice");
      spec.counts.emplace_back(sort, n);
    }
    start = end + 1;
  }
  return spec;
}

namespace {

const std::string kUntyped = "object";

bool typed(const RmdpModel& model) {
  for (const auto& d : model.predicates().decls())
    if (!d.sorts.empty()) return true;
  return false;
}

}  // namespace

GroundMdp::GroundMdp(const RmdpModel& model, const ObjectSpec& objects, const GroundOptions& opts) : model_(&model) {
  const auto& preds = model.predicates();
  bool is_typed = typed(model);
  auto constant_sorts = infer_constant_sorts(model);

  // Objects: each sort's constants first, then generated names.
  std::set<std::string> placed;
  for (const auto& [sort, count] : objects.counts) {
    std::vector<std::string> names;
    for (const auto& c : model.constants) {
      auto it = constant_sorts.find(c);
      std::string cs = it != constant_sorts.end() ? it->second : (is_typed ? "" : kUntyped);
      if (!is_typed) cs = kUntyped;
      if (cs == sort) names.push_back(c);
    }
    if (static_cast<int>(names.size()) > count)
      throw InvariantError("sort " + sort + " needs at least " + std::to_string(names.size()) + " objects for its constants");
    for (int k = static_cast<int>(names.size()) + 1; static_cast<int>(names.size()) < count; ++k) {
      std::string n = sort + std::to_string(k);
      if (std::find(model.constants.begin(), model.constants.end(), n) == model.constants.end()) names.push_back(n);
    }
    for (auto& n : names) {
      placed.insert(n);
      elements_.push_back(n);
      element_sorts_.push_back(sort);
    }
  }
  if (elements_.empty()) throw InvariantError("ground instance has no objects");
  for (const auto& c : model.constants)
    if (!placed.contains(c)) throw InvariantError("constant " + c + " has no object of its sort");

  auto of_sort = [&](const std::string& sort) {
    std::vector<int> out;
    for (int e = 0; e < static_cast<int>(elements_.size()); ++e)
      if (sort.empty() || !is_typed || element_sorts_[e] == sort) out.push_back(e);
    return out;
  };

  // Ground atoms.
  for (int p = 0; p < static_cast<int>(preds.size()); ++p) {
    const auto& decl = preds[p];
    std::vector<std::vector<int>> domains;
    for (std::size_t i = 0; i < decl.arity; ++i) domains.push_back(of_sort(decl.sorts.empty() ? "" : decl.sorts[i]));
    std::vector<int> args;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == decl.arity) {
        atoms_.push_back({p, args});
        if (atoms_.size() > opts.atom_cap)
          throw LimitError("ground atom count exceeds the cap of " + std::to_string(opts.atom_cap));
        return;
      }
      for (int e : domains[i]) {
        args.push_back(e);
        rec(i + 1);
        args.pop_back();
      }
    };
    rec(0);
  }
  if (atoms_.size() > 62) throw LimitError("too many ground atoms");

  // Ground actions, typed by inferred parameter sorts.
  for (int a = 0; a < static_cast<int>(model.actions.size()); ++a) {
    const auto& schema = model.actions[a];
    auto sorts = infer_parameter_sorts(model, schema);
    std::vector<int> args;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == schema.params.size()) {
        actions_.push_back({a, args});
        return;
      }
      for (int e : of_sort(sorts[i])) {
        args.push_back(e);
        rec(i + 1);
        args.pop_back();
      }
    };
    rec(0);
  }

  // Consistent states, then closure under transitions.
  std::uint64_t total = std::uint64_t{1} << atoms_.size();
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    Interpretation interp = interpretation(bits);
    if (consistent(interp)) add_state(bits);
  }
  for (std::size_t s = 0; s < states_.size(); ++s) {
    std::vector<std::vector<Outcome>> per_action;
    for (const auto& ga : actions_) {
      const auto& schema = model.actions[ga.schema];
      Valuation z;
      for (std::size_t i = 0; i < schema.params.size(); ++i) z[schema.params[i]] = ga.args[i];
      std::map<std::uint64_t, double> dist;
      double mass = 0;
      for (const auto& alt : schema.alternatives) {
        double p = evaluate(alt.prob, interps_[s], z);
        mass += p;
        if (p == 0.0) continue;
        std::uint64_t next = states_[s];
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
          auto it = alt.tvds.find(atoms_[i].predicate);
          if (it == alt.tvds.end()) continue;
          Valuation zt = z;
          for (std::size_t k = 0; k < it->second.params.size(); ++k) zt[it->second.params[k]] = atoms_[i].args[k];
          bool v = evaluate(it->second.diagram, interps_[s], zt) > 0.5;
          if (v)
            next |= std::uint64_t{1} << i;
          else
            next &= ~(std::uint64_t{1} << i);
        }
        dist[next] += p;
      }
      if (std::abs(mass - 1.0) > 1e-9) throw InvariantError("outcome probabilities do not sum to 1");
      std::vector<Outcome> out;
      for (const auto& [bits, p] : dist) out.push_back({add_state(bits), p});
      per_action.push_back(std::move(out));
    }
    transitions_.push_back(std::move(per_action));
  }
}

Interpretation GroundMdp::interpretation(std::uint64_t bits) const {
  Interpretation interp(model_->predicates(), elements_);
  for (const auto& c : model_->constants) interp.bind(c, *interp.element(c));
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (bits >> i & 1) interp.set(atoms_[i].predicate, atoms_[i].args);
  return interp;
}

std::size_t GroundMdp::add_state(std::uint64_t bits) {
  auto [it, fresh] = index_.emplace(bits, states_.size());
  if (fresh) {
    states_.push_back(bits);
    interps_.push_back(interpretation(bits));
    rewards_.push_back(map_value(model_->reward, interps_.back()));
  }
  return it->second;
}

namespace {

int resolve(const Term& t, const Interpretation& interp, const std::map<Term, int>& z) {
  if (t.is_constant()) return *interp.binding(t.name);
  return z.at(t);
}

bool literal_holds(const Literal& l, const Interpretation& interp, const std::map<Term, int>& z) {
  bool v;
  if (l.label.is_equality()) {
    v = resolve(l.label.args[0], interp, z) == resolve(l.label.args[1], interp, z);
  } else {
    std::vector<int> args;
    for (const auto& t : l.label.args) args.push_back(resolve(t, interp, z));
    v = interp.holds(l.label.predicate, args);
  }
  return v == l.positive;
}

void collect_vars(const Literal& l, std::set<Term>& out) {
  for (const auto& t : l.label.args)
    if (!t.is_constant()) out.insert(t);
}

}  // namespace

bool GroundMdp::consistent(const Interpretation& interp) const {
  int n = static_cast<int>(interp.size());
  for (const auto& rule : model_->background.rules) {
    std::set<Term> all;
    for (const auto& l : rule.body) collect_vars(l, all);
    collect_vars(rule.head, all);
    std::vector<Term> universal, existential;
    for (const auto& t : all) (rule.existential.contains(t) ? existential : universal).push_back(t);
    std::map<Term, int> z;
    std::function<bool(std::size_t)> head_holds = [&](std::size_t i) {
      if (i == existential.size()) return literal_holds(rule.head, interp, z);
      for (int e = 0; e < n; ++e) {
        z[existential[i]] = e;
        if (head_holds(i + 1)) return true;
      }
      return false;
    };
    std::function<bool(std::size_t)> all_ok = [&](std::size_t i) {
      if (i == universal.size()) {
        for (const auto& l : rule.body)
          if (!literal_holds(l, interp, z)) return true;
        return head_holds(0);
      }
      for (int e = 0; e < n; ++e) {
        z[universal[i]] = e;
        if (!all_ok(i + 1)) return false;
      }
      return true;
    };
    if (!all_ok(0)) return false;
  }
  return true;
}

std::size_t GroundMdp::atom_index(int predicate, const std::vector<int>& args) const {
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (atoms_[i].predicate == predicate && atoms_[i].args == args) return i;
  throw InvariantError("no such ground atom");
}

std::string GroundMdp::describe_state(std::size_t s) const {
  const auto& preds = model_->predicates();
  std::string out = "{";
  bool first = true;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (!(states_[s] >> i & 1)) continue;
    out += first ? "" : ", ";
    first = false;
    out += preds[atoms_[i].predicate].name;
    if (!atoms_[i].args.empty()) {
      out += "(";
      for (std::size_t k = 0; k < atoms_[i].args.size(); ++k) out += (k ? "," : "") + elements_[atoms_[i].args[k]];
      out += ")";
    }
  }
  return out + "}";
}

std::string GroundMdp::describe_action(std::size_t a) const {
  const auto& ga = actions_[a];
  std::string out = model_->actions[ga.schema].name + "(";
  for (std::size_t k = 0; k < ga.args.size(); ++k) out += (k ? "," : "") + elements_[ga.args[k]];
  return out + ")";
}

std::vector<double> tabular_vi(const GroundMdp& g, double gamma, int n, bool absorbing) {
  std::size_t ns = g.state_count();
  std::vector<double> v(ns);
  for (std::size_t s = 0; s < ns; ++s) v[s] = g.reward(s);
  for (int it = 0; it < n; ++it) {
    std::vector<double> next(ns);
    for (std::size_t s = 0; s < ns; ++s) {
      double best = g.actions().empty() ? 0.0 : -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < g.actions().size(); ++a) {
        double e = 0;
        for (const auto& o : g.outcomes(s, a)) e += o.probability * v[o.successor];
        best = std::max(best, e);
      }
      next[s] = absorbing ? std::max(g.reward(s), gamma * best) : g.reward(s) + gamma * best;
    }
    v = std::move(next);
  }
  return v;
}

double compare(Fodd v, const GroundMdp& g, const std::vector<double>& table) {
  double worst = 0;
  for (std::size_t s = 0; s < g.state_count(); ++s)
    worst = std::max(worst, std::abs(map_value(v, g.state(s)) - table[s]));
  return worst;
}

OracleReport oracle_check(const RmdpModel& model, const ObjectSpec& objects, int steps,
                          const RegressionOptions& opts, const GroundOptions& ground) {
  GroundMdp g(model, objects, ground);
  OracleReport rep;
  rep.states = g.state_count();
  rep.ground_actions = g.actions().size();
  auto red = reduction_options(model, opts);
  Fodd v = red.weak ? reduce_full(model.reward, red) : reduce_strong(model.reward);
  FreshVariables fresh;
  for (int n = 0; n <= steps; ++n) {
    if (n > 0) {
      fresh.set_namespace("i" + std::to_string(n));
      v = vi_step(v, model, fresh, opts);
    }
    double d = compare(v, g, tabular_vi(g, model.discount, n, model.absorbing));
    rep.values.push_back(v);
    rep.deviations.push_back(d);
    rep.max_deviation = std::max(rep.max_deviation, d);
  }
  return rep;
}

}  // namespace fodd
