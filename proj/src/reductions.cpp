#include "fodd/reductions.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <tuple>
#include <unordered_map>

namespace fodd {

std::string to_string(ReductionKind k) {
  switch (k) {
    case ReductionKind::R5: return "R5";
    case ReductionKind::R6: return "R6";
    case ReductionKind::EqualityShortcut: return "R6-equality";
    case ReductionKind::R7Replace: return "R7-replace";
    case ReductionKind::R7Drop: return "R7-drop";
    case ReductionKind::R8: return "R8";
    case ReductionKind::R9: return "R9";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Strong reductions

Fodd reduce_strong(Fodd b) {
  Manager& m = b.manager();
  std::unordered_map<NodeId, Fodd> memo;
  std::function<Fodd(Fodd)> go = [&](Fodd n) -> Fodd {
    if (n.is_leaf()) return n;
    if (auto it = memo.find(n.id()); it != memo.end()) return it->second;
    Fodd r = m.ite(n.label(), go(n.high()), go(n.low()));
    memo.emplace(n.id(), r);
    return r;
  };
  return go(b);
}

Fodd bypass_node(Fodd b, Fodd n, bool branch) { return replace_nodes(b, {{n.id(), n.branch(branch)}}); }

Fodd redirect_edge(Fodd b, const EdgeRef& e, Fodd to) {
  Manager& m = b.manager();
  Fodd q = e.parent;
  Fodd nq = e.branch ? m.ite(q.label(), to, q.low()) : m.ite(q.label(), q.high(), to);
  return replace_nodes(b, {{q.id(), nq}});
}

namespace {

bool has_positive_equality(const std::vector<PathFormula>& nf) {
  for (const auto& f : nf)
    for (const auto& l : f)
      if (l.positive && l.label.is_equality()) return true;
  return false;
}

std::set<Term> variables_in(const std::vector<Fodd>& nodes) {
  std::set<Term> out;
  for (Fodd n : nodes) {
    if (n.is_leaf()) continue;
    for (const auto& t : n.label().args)
      if (t.is_variable()) out.insert(t);
  }
  return out;
}

// Proper ancestors of n within b; their labels make up NF(n).
std::vector<Fodd> ancestors(Fodd b, Fodd n) {
  auto topo = topological_order(b);
  std::unordered_map<NodeId, bool> reaches;
  std::vector<Fodd> out;
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    Fodd x = *it;
    bool r = x == n;
    if (!r && !x.is_leaf()) r = reaches[x.high().id()] || reaches[x.low().id()];
    reaches[x.id()] = r;
    if (r && x != n) out.push_back(x);
  }
  return out;
}

std::set<Term> above_variables(Fodd b, Fodd n) { return variables_in(ancestors(b, n)); }

bool dominates(Fodd a, Fodd b) { return min_leaf(apply(a, b, Op::Subtract)) >= 0.0; }

struct PairHash {
  std::size_t operator()(const std::pair<NodeId, NodeId>& p) const noexcept {
    return static_cast<std::size_t>(p.first) * 0x9E3779B97F4A7C15ull ^ p.second;
  }
};

/// Memo tables shared by the steps of one reduction run. Nodes are
/// immutable, so per-node facts stay valid while the diagram changes.
class Cache {
public:
  explicit Cache(const BackgroundTheory& theory) : theory_(theory) {}

  const BackgroundTheory& theory() const { return theory_; }

  double min(Fodd n) { return extrema(n).first; }
  double max(Fodd n) { return extrema(n).second; }

  bool dominates(Fodd a, Fodd b) {
    auto [it, fresh] = dom_.try_emplace({a.id(), b.id()}, false);
    if (fresh) it->second = fodd::dominates(a, b);
    return it->second;
  }

  const std::set<NodeId>& descendants(Fodd n) {
    auto it = desc_.find(n.id());
    if (it == desc_.end()) it = desc_.emplace(n.id(), fodd::descendants(n)).first;
    return it->second;
  }

  const std::set<Term>& variables(Fodd n) {
    auto it = vars_.find(n.id());
    if (it == vars_.end()) it = vars_.emplace(n.id(), variables_of(n)).first;
    return it->second;
  }

  std::set<Term> shared(Fodd a, Fodd b) {
    const auto& va = variables(a);
    const auto& vb = variables(b);
    std::set<Term> out;
    std::set_intersection(va.begin(), va.end(), vb.begin(), vb.end(), std::inserter(out, out.begin()));
    return out;
  }

  bool entails(EntailmentQuery q) {
    Key key{std::move(q.antecedent), std::move(q.consequent), std::move(q.shared)};
    if (auto it = entail_.find(key); it != entail_.end()) return it->second;
    bool r = implies_exists({std::get<0>(key), std::get<1>(key), std::get<2>(key)}, theory_);
    entail_.emplace(std::move(key), r);
    return r;
  }

  bool reachability(const std::vector<PathFormula>& ante, const std::vector<PathFormula>& cons, std::set<Term> shared) {
    return entails({ante, cons, std::move(shared)});
  }

private:
  using Key = std::tuple<std::vector<PathFormula>, std::vector<PathFormula>, std::set<Term>>;

  std::pair<double, double> extrema(Fodd n) {
    auto it = ext_.find(n.id());
    if (it != ext_.end()) return it->second;
    std::pair<double, double> r = n.is_leaf() ? std::pair{n.value(), n.value()} : std::pair{0.0, 0.0};
    if (!n.is_leaf()) {
      auto hi = extrema(n.high());
      auto lo = extrema(n.low());
      r = {std::min(hi.first, lo.first), std::max(hi.second, lo.second)};
    }
    ext_.emplace(n.id(), r);
    return r;
  }

  const BackgroundTheory& theory_;
  std::unordered_map<NodeId, std::pair<double, double>> ext_;
  std::unordered_map<std::pair<NodeId, NodeId>, bool, PairHash> dom_;
  std::unordered_map<NodeId, std::set<NodeId>> desc_;
  std::unordered_map<NodeId, std::set<Term>> vars_;
  std::map<Key, bool> entail_;
};

bool entails_literal(const std::vector<PathFormula>& nf, const Literal& lit, Cache& cache) {
  EntailmentQuery q;
  q.antecedent = nf;
  q.consequent = {PathFormula{lit}};
  for (const auto& t : lit.label.args)
    if (t.is_variable()) q.shared.insert(t);
  return cache.entails(std::move(q));
}

std::optional<Fodd> r5_step_cached(Fodd b, Cache& cache, std::size_t path_cap) {
  if (b.is_leaf()) return std::nullopt;
  PathIndex idx(b, path_cap);
  for (Fodd n : topological_order(b)) {
    if (n.is_leaf()) continue;
    const auto* nf = idx.node_formulas(n);
    if (!nf) continue;
    if (cache.theory().empty() && !has_positive_equality(*nf)) continue;
    if (entails_literal(*nf, {n.label(), true}, cache)) return bypass_node(b, n, true);
    if (entails_literal(*nf, {n.label(), false}, cache)) return bypass_node(b, n, false);
  }
  return std::nullopt;
}

}  // namespace

std::optional<Fodd> r5_step(Fodd b, const BackgroundTheory& theory, std::size_t path_cap) {
  Cache cache(theory);
  return r5_step_cached(b, cache, path_cap);
}

Fodd r5_implied(Fodd b, const BackgroundTheory& theory, std::size_t path_cap) {
  Cache cache(theory);
  while (auto r = r5_step_cached(b, cache, path_cap)) b = reduce_strong(*r);
  return b;
}

// ---------------------------------------------------------------------------
// R7

bool r7_safe(const EdgeRef& e1, const EdgeRef& e2) {
  if (e1 == e2) return false;
  if (e1.parent == e2.parent) return true;
  if (descendants(e1.target()).contains(e2.parent.id())) return false;
  if (descendants(e2.target()).contains(e1.parent.id())) return false;
  return true;
}

namespace {

bool r7_safe_cached(const EdgeRef& e1, const EdgeRef& e2, Cache& cache) {
  if (e1 == e2) return false;
  if (e1.parent == e2.parent) return true;
  if (cache.descendants(e1.target()).contains(e2.parent.id())) return false;
  if (cache.descendants(e2.target()).contains(e1.parent.id())) return false;
  return true;
}

R7Check check_r7_impl(const PathIndex& paths, const EdgeRef& e1, const EdgeRef& e2, Cache& cache, bool exhaustive) {
  R7Check c;
  Fodd t1 = e1.target(), t2 = e2.target(), s2 = e2.sibling_target();
  double lo = cache.min(t1);
  c.v71 = lo >= cache.max(t2);
  c.v73 = c.v71 || cache.dominates(t1, t2);
  auto value_on_sibling = [&] {
    c.v72 = lo >= cache.max(s2);
    c.v74 = c.v72 || cache.dominates(t1, s2);
  };
  if (exhaustive) value_on_sibling();
  if (!exhaustive && !c.v73) return c;
  c.s1 = r7_safe_cached(e1, e2, cache);
  if (!c.s1 && !exhaustive) return c;

  auto ef1 = paths.edge_formulas(e1);
  auto ef2 = paths.edge_formulas(e2);
  if (!ef1 || !ef2) {
    c.paths_known = false;
    return c;
  }
  if (exhaustive || c.v71) c.p71 = cache.reachability(*ef2, *ef1, {});
  if (exhaustive || (c.v73 && !(c.p71 && c.v71))) c.p72 = cache.reachability(*ef2, *ef1, cache.shared(t1, t2));
  if (!exhaustive) {
    if (!c.can_replace()) return c;
    value_on_sibling();
  }
  if (exhaustive || (!c.v72 && c.v74)) c.p73 = cache.reachability(*ef2, *ef1, cache.shared(t1, s2));
  return c;
}

}  // namespace

R7Check check_r7(const PathIndex& paths, const EdgeRef& e1, const EdgeRef& e2, const BackgroundTheory& theory) {
  Cache cache(theory);
  return check_r7_impl(paths, e1, e2, cache, true);
}

std::optional<Fodd> r7_replace(Fodd b, const EdgeRef& e1, const EdgeRef& e2, const BackgroundTheory& theory,
                               std::size_t path_cap) {
  PathIndex idx(b, path_cap);
  Cache cache(theory);
  R7Check c = check_r7_impl(idx, e1, e2, cache, false);
  if (!c.can_replace()) return std::nullopt;
  Fodd t2 = e2.target();
  if (t2.is_leaf() && t2.value() == 0.0) return std::nullopt;
  return redirect_edge(b, e2, b.manager().zero());
}

std::optional<Fodd> r7_drop(Fodd b, const EdgeRef& e1, const EdgeRef& e2, const BackgroundTheory& theory,
                            std::size_t path_cap) {
  PathIndex idx(b, path_cap);
  Cache cache(theory);
  R7Check c = check_r7_impl(idx, e1, e2, cache, false);
  if (!c.can_drop()) return std::nullopt;
  return bypass_node(b, e2.parent, !e2.branch);
}

// ---------------------------------------------------------------------------
// R8, R9

std::optional<Fodd> r8_unify(Fodd b, const std::vector<Term>& xs, const std::vector<Term>& ys) {
  if (xs.size() != ys.size()) throw InvariantError("R8 needs variable lists of equal length");
  if (xs.empty()) return b;
  std::map<Term, Term> sub;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!xs[i].is_variable() || !ys[i].is_variable()) throw InvariantError("R8 unifies variables only");
    if (std::find(ys.begin(), ys.end(), xs[i]) != ys.end()) throw InvariantError("R8 variable lists must be disjoint");
    sub[xs[i]] = ys[i];
  }
  Fodd renamed = rename(b, sub);
  if (!dominates(renamed, b)) return std::nullopt;
  return renamed;
}

namespace {

// Variable side of an equality node usable for R9 or the shortcut, with the
// other side. The larger term is preferred.
std::vector<std::pair<Term, Term>> equality_sides(Fodd n) {
  std::vector<std::pair<Term, Term>> out;
  const auto& a = n.label().args;
  if (a[1].is_variable()) out.emplace_back(a[1], a[0]);
  if (a[0].is_variable()) out.emplace_back(a[0], a[1]);
  return out;
}

}  // namespace

std::optional<Fodd> r9_equality(Fodd b, Fodd n) {
  if (n.is_leaf() || !n.label().is_equality()) return std::nullopt;
  std::set<Term> above = above_variables(b, n);
  std::set<Term> low = variables_of(n.low());
  for (const auto& [x, t] : equality_sides(n)) {
    if (above.contains(x) || low.contains(x)) continue;
    Fodd renamed = rename(n.high(), {{x, t}});
    Fodd merged = apply(renamed, n.low(), Op::Max);
    return splice(b, n, merged);
  }
  return std::nullopt;
}

std::optional<Fodd> equality_shortcut(Fodd b, Fodd n) {
  if (n.is_leaf() || !n.label().is_equality()) return std::nullopt;
  if (min_leaf(n.high()) < max_leaf(n.low())) return std::nullopt;
  std::set<Term> above = above_variables(b, n);
  for (const auto& [x, t] : equality_sides(n)) {
    if (above.contains(x)) continue;
    return splice(b, n, rename(n.high(), {{x, t}}));
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Scheduler

std::vector<EdgeRef> document_edges(Fodd b) {
  std::vector<EdgeRef> out;
  for (Fodd n : topological_order(b)) {
    if (n.is_leaf()) continue;
    out.push_back({n, true});
    out.push_back({n, false});
  }
  return out;
}

namespace {

struct Step {
  ReductionKind kind;
  Fodd result;
};

bool is_zero(Fodd f) { return f.is_leaf() && f.value() == 0.0; }

// Try drop, then replace, for one ordered edge pair.
std::optional<Step> try_pair(Fodd b, const PathIndex& idx, const EdgeRef& e1, const EdgeRef& e2, Cache& cache,
                             bool sibling) {
  R7Check c = check_r7_impl(idx, e1, e2, cache, false);
  if (!c.can_replace()) return std::nullopt;
  ReductionKind drop = sibling ? ReductionKind::R6 : ReductionKind::R7Drop;
  ReductionKind repl = sibling ? ReductionKind::R6 : ReductionKind::R7Replace;
  if (c.can_drop()) return Step{drop, bypass_node(b, e2.parent, !e2.branch)};
  if (!is_zero(e2.target())) return Step{repl, redirect_edge(b, e2, b.manager().zero())};
  return std::nullopt;
}

std::vector<std::pair<Term, Term>> r8_candidates(Fodd b) {
  std::map<std::pair<int, std::size_t>, std::set<Term>> slots;
  for (Fodd n : topological_order(b)) {
    if (n.is_leaf()) continue;
    const Label& l = n.label();
    for (std::size_t i = 0; i < l.args.size(); ++i)
      if (l.args[i].is_variable()) slots[{l.predicate, l.is_equality() ? 0 : i}].insert(l.args[i]);
  }
  std::set<std::pair<Term, Term>> pairs;
  for (const auto& [_, vars] : slots)
    for (const auto& x : vars)
      for (const auto& y : vars)
        if (x != y) pairs.emplace(x, y);
  std::vector<std::pair<Term, Term>> out(pairs.begin(), pairs.end());
  if (out.size() > 32) out.resize(32);  // 16 unordered pairs, both directions
  return out;
}

std::optional<Step> next_step(Fodd cur, const ReductionOptions& opts, Cache& cache) {
  if (auto r = r5_step_cached(cur, cache, opts.path_cap)) return Step{ReductionKind::R5, *r};
  if (!opts.weak || cur.is_leaf()) return std::nullopt;

  const std::size_t size = internal_count(cur);
  auto topo = topological_order(cur);

  if (opts.equality_reduction) {
    for (Fodd n : topo) {
      if (n.is_leaf() || !n.label().is_equality()) continue;
      if (auto r = r9_equality(cur, n)) {
        Fodd s = reduce_strong(*r);
        if (internal_count(s) <= size) return Step{ReductionKind::R9, s};
      }
    }
  }

  PathIndex idx(cur, opts.path_cap);
  for (Fodd n : topo) {
    if (n.is_leaf()) continue;
    if (n.label().is_equality()) {
      if (auto r = equality_shortcut(cur, n)) {
        Fodd s = reduce_strong(*r);
        if (s != cur && internal_count(s) <= size) return Step{ReductionKind::EqualityShortcut, s};
      }
    }
    for (bool first : {true, false}) {
      if (auto st = try_pair(cur, idx, {n, first}, {n, !first}, cache, true)) return st;
    }
  }

  auto edges = document_edges(cur);
  int budget = opts.budget.per_pass_cap;
  for (const auto& e1 : edges) {
    for (const auto& e2 : edges) {
      if (e1.parent == e2.parent) continue;
      if (budget-- <= 0) goto r8;
      if (auto st = try_pair(cur, idx, e1, e2, cache, false)) return st;
    }
  }

r8:
  for (const auto& [x, y] : r8_candidates(cur)) {
    if (auto r = r8_unify(cur, {x}, {y})) {
      Fodd s = reduce_strong(*r);
      if (s != cur && internal_count(s) <= size) return Step{ReductionKind::R8, s};
    }
  }
  return std::nullopt;
}

}  // namespace

Fodd reduce_full(Fodd b, const ReductionOptions& opts) {
  Fodd input = b;
  Fodd cur = reduce_strong(b);
  Cache cache(opts.theory);
  for (int applied = 0; applied < opts.budget.max_passes; ++applied) {
    auto st = next_step(cur, opts, cache);
    if (!st) break;
    Fodd next = reduce_strong(st->result);
    if (opts.trace) opts.trace({st->kind, cur, next});
    cur = next;
  }
  if (node_count(cur) > node_count(input)) return input;
  return cur;
}

Fodd prune_dominated(Fodd b, Fodd by, const ReductionOptions& opts) {
  if (b.is_leaf()) return b;
  // Leaf paths of `by`, best first; overflowing edges are left out.
  std::vector<std::pair<double, PathFormula>> covers;
  if (by.is_leaf()) {
    covers.push_back({by.value(), {}});
  } else {
    PathIndex idx(by, opts.path_cap);
    for (Fodd n : topological_order(by)) {
      if (n.is_leaf()) continue;
      for (bool side : {true, false}) {
        Fodd child = side ? n.high() : n.low();
        if (!child.is_leaf()) continue;
        if (auto fs = idx.edge_formulas({n, side}))
          for (auto& f : *fs) covers.push_back({child.value(), std::move(f)});
      }
    }
  }
  Manager& m = b.manager();
  Fodd low = m.signed_leaf(min_leaf(b));
  PathIndex idx(b, opts.path_cap);
  std::map<std::pair<NodeId, bool>, bool> dropped;
  for (Fodd n : topological_order(b)) {
    if (n.is_leaf()) continue;
    for (bool side : {true, false}) {
      Fodd child = side ? n.high() : n.low();
      if (!child.is_leaf() || child == low) continue;
      auto fs = idx.edge_formulas({n, side});
      if (!fs) continue;
      EntailmentQuery q;
      q.antecedent = std::move(*fs);
      for (const auto& [v, f] : covers)
        if (v >= child.value()) q.consequent.push_back(f);
      if (!q.consequent.empty() && implies_exists(q, opts.theory)) dropped[{n.id(), side}] = true;
    }
  }
  if (dropped.empty()) return b;
  std::unordered_map<NodeId, Fodd> memo;
  std::function<Fodd(Fodd)> go = [&](Fodd n) -> Fodd {
    if (n.is_leaf()) return n;
    if (auto it = memo.find(n.id()); it != memo.end()) return it->second;
    Fodd hi = dropped.contains({n.id(), true}) ? low : go(n.high());
    Fodd lo = dropped.contains({n.id(), false}) ? low : go(n.low());
    Fodd r = m.node(n.label(), hi, lo);
    memo.emplace(n.id(), r);
    return r;
  };
  return reduce_strong(go(b));
}

Fodd max_all(std::span<const Fodd> diagrams, FreshVariables& fresh, const ReductionOptions& opts) {
  if (diagrams.empty()) throw InvariantError("max_all needs at least one diagram");
  auto parts = standardize_apart(diagrams, fresh);
  std::sort(parts.begin(), parts.end(), [](Fodd a, Fodd b) { return node_count(a) < node_count(b); });
  Fodd acc = reduce_full(parts.front(), opts);
  for (std::size_t i = 1; i < parts.size(); ++i) {
    Fodd next = prune_dominated(parts[i], acc, opts);
    acc = prune_dominated(acc, next, opts);
    acc = reduce_full(apply(acc, next, Op::Max), opts);
  }
  return acc;
}

}  // namespace fodd
