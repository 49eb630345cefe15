#include "fodd/interpretation.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <unordered_map>

namespace fodd {

Interpretation::Interpretation(const PredicateTable& preds, std::vector<std::string> elements)
    : elements_(std::move(elements)) {
  for (const auto& d : preds.decls()) {
    arity_.push_back(d.arity);
    std::size_t cells = 1;
    for (std::size_t i = 0; i < d.arity; ++i) cells *= elements_.size();
    atoms_.emplace_back(cells, false);
  }
}

std::optional<int> Interpretation::element(std::string_view name) const {
  for (std::size_t i = 0; i < elements_.size(); ++i)
    if (elements_[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

void Interpretation::bind(const std::string& constant, int element) {
  if (element < 0 || static_cast<std::size_t>(element) >= size())
    throw InvariantError("constant '" + constant + "' bound outside the domain");
  constants_[constant] = element;
}

std::optional<int> Interpretation::binding(const std::string& constant) const {
  auto it = constants_.find(constant);
  if (it == constants_.end()) return std::nullopt;
  return it->second;
}

std::size_t Interpretation::offset(int predicate, std::span<const int> args) const {
  if (predicate < 0 || static_cast<std::size_t>(predicate) >= arity_.size())
    throw InvariantError("atom over an undeclared predicate");
  if (args.size() != arity_[predicate]) throw InvariantError("atom arity mismatch");
  std::size_t off = 0;
  for (int a : args) {
    if (a < 0 || static_cast<std::size_t>(a) >= size()) throw InvariantError("atom argument outside the domain");
    off = off * size() + static_cast<std::size_t>(a);
  }
  return off;
}

bool Interpretation::holds(int predicate, std::span<const int> args) const {
  return atoms_[predicate][offset(predicate, args)];
}

void Interpretation::set(int predicate, std::span<const int> args, bool value) {
  atoms_[predicate][offset(predicate, args)] = value;
}

std::vector<std::pair<int, std::vector<int>>> Interpretation::true_atoms() const {
  std::vector<std::pair<int, std::vector<int>>> out;
  for (std::size_t p = 0; p < atoms_.size(); ++p) {
    for (std::size_t cell = 0; cell < atoms_[p].size(); ++cell) {
      if (!atoms_[p][cell]) continue;
      std::vector<int> args(arity_[p]);
      std::size_t rest = cell;
      for (std::size_t i = arity_[p]; i-- > 0;) {
        args[i] = static_cast<int>(rest % size());
        rest /= size();
      }
      out.emplace_back(static_cast<int>(p), std::move(args));
    }
  }
  return out;
}

namespace {

// A label with each argument resolved either to a fixed element (>= 0) or
// to a free slot, encoded as -(slot + 1).
struct CompiledLabel {
  int predicate;
  std::vector<int> args;
};

class Evaluator {
public:
  Evaluator(Fodd root, const Interpretation& interp, const Valuation& fixed, bool all_fixed)
      : interp_(interp) {
    for (Fodd n : topological_order(root)) {
      if (n.is_leaf()) continue;
      if (compiled_.contains(n.label_id())) continue;
      const Label& l = n.label();
      CompiledLabel c{l.predicate, {}};
      for (const auto& t : l.args) c.args.push_back(resolve(t, fixed, all_fixed));
      compiled_.emplace(n.label_id(), std::move(c));
    }
  }

  std::size_t slots() const { return slot_terms_.size(); }
  const std::vector<Term>& slot_terms() const { return slot_terms_; }
  const CompiledLabel& compiled(LabelId id) const { return compiled_.at(id); }

  bool truth(const CompiledLabel& c, const std::vector<int>& assign) const {
    auto value = [&](int a) { return a >= 0 ? a : assign[static_cast<std::size_t>(-a - 1)]; };
    if (c.predicate == kEquality) return value(c.args[0]) == value(c.args[1]);
    buf_.clear();
    for (int a : c.args) buf_.push_back(value(a));
    return interp_.holds(c.predicate, buf_);
  }

private:
  int resolve(const Term& t, const Valuation& fixed, bool all_fixed) {
    if (t.is_constant()) {
      auto b = interp_.binding(t.name);
      if (!b) throw InvariantError("constant '" + t.name + "' has no binding");
      return *b;
    }
    if (auto it = fixed.find(t); it != fixed.end()) {
      if (it->second < 0 || static_cast<std::size_t>(it->second) >= interp_.size())
        throw InvariantError("valuation maps '" + t.name + "' outside the domain");
      return it->second;
    }
    if (all_fixed) throw InvariantError("valuation does not bind '" + t.name + "'");
    auto [it, fresh] = slot_index_.emplace(t, static_cast<int>(slot_terms_.size()));
    if (fresh) slot_terms_.push_back(t);
    return -(it->second + 1);
  }

  const Interpretation& interp_;
  std::unordered_map<LabelId, CompiledLabel> compiled_;
  std::map<Term, int> slot_index_;
  std::vector<Term> slot_terms_;
  mutable std::vector<int> buf_;
};

}  // namespace

double evaluate(Fodd b, const Interpretation& interp, const Valuation& z) {
  Evaluator ev(b, interp, z, true);
  std::vector<int> none;
  Fodd n = b;
  while (!n.is_leaf()) n = n.branch(ev.truth(ev.compiled(n.label_id()), none));
  return n.value();
}

MapResult map_value_full(Fodd b, const Interpretation& interp, const Valuation& fixed, const MapOptions& opts) {
  if (interp.size() == 0) throw InvariantError("map over an empty domain");
  Evaluator ev(b, interp, fixed, false);
  double space = std::pow(static_cast<double>(interp.size()), static_cast<double>(ev.slots()));
  if (space > opts.max_valuations)
    throw LimitError("valuation space " + std::to_string(space) + " exceeds the configured cap");

  std::unordered_map<NodeId, double> upper;
  auto topo = topological_order(b);
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    Fodd n = *it;
    upper[n.id()] = n.is_leaf() ? n.value() : std::max(upper[n.high().id()], upper[n.low().id()]);
  }

  const int dom = static_cast<int>(interp.size());
  std::vector<int> assign(ev.slots(), -1);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> best_assign;
  const double ceiling = upper[b.id()];

  std::size_t steps = 0;
  std::function<void(Fodd)> dfs = [&](Fodd n) {
    if (best >= ceiling) return;
    if (++steps > opts.max_steps)
      throw LimitError("map search exceeded " + std::to_string(opts.max_steps) + " steps");
    if (n.is_leaf()) {
      if (n.value() > best) {
        best = n.value();
        best_assign = assign;
      }
      return;
    }
    if (upper[n.id()] <= best) return;
    const auto& c = ev.compiled(n.label_id());
    for (int a : c.args) {
      if (a >= 0) continue;
      auto slot = static_cast<std::size_t>(-a - 1);
      if (assign[slot] >= 0) continue;
      for (int e = 0; e < dom; ++e) {
        assign[slot] = e;
        dfs(n);
      }
      assign[slot] = -1;
      return;
    }
    dfs(n.branch(ev.truth(c, assign)));
  };
  dfs(b);

  MapResult r{best, fixed};
  for (std::size_t i = 0; i < best_assign.size(); ++i)
    if (best_assign[i] >= 0) r.witness[ev.slot_terms()[i]] = best_assign[i];
  return r;
}

}  // namespace fodd
