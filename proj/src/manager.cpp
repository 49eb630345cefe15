#include "fodd/manager.hpp"

#include <bit>
#include <cmath>
#include <functional>
#include <limits>

#include "fodd/algebra.hpp"

namespace fodd {

double round_leaf(double v) {
  if (std::abs(v) < 1e6) v = std::round(v * 1e12) / 1e12;
  return v == 0.0 ? 0.0 : v;  // folds -0
}

// ---------------------------------------------------------------------------
// Fodd accessors

bool Fodd::is_leaf() const { return mgr_->at(id_).leaf; }
double Fodd::value() const {
  const auto& n = mgr_->at(id_);
  if (!n.leaf) throw InvariantError("value() on an internal node");
  return n.value;
}
LabelId Fodd::label_id() const {
  const auto& n = mgr_->at(id_);
  if (n.leaf) throw InvariantError("label() on a leaf");
  return n.label;
}
const Label& Fodd::label() const { return mgr_->label(label_id()); }
Fodd Fodd::high() const {
  const auto& n = mgr_->at(id_);
  if (n.leaf) throw InvariantError("high() on a leaf");
  return {mgr_, n.hi};
}
Fodd Fodd::low() const {
  const auto& n = mgr_->at(id_);
  if (n.leaf) throw InvariantError("low() on a leaf");
  return {mgr_, n.lo};
}

// ---------------------------------------------------------------------------
// Manager

Manager::Manager(PredicateTable preds) : preds_(std::move(preds)) {}

Fodd Manager::make_leaf(double v) {
  v = round_leaf(v);
  auto bits = std::bit_cast<std::uint64_t>(v);
  std::lock_guard lock(mutex_);
  if (auto it = leaves_.find(bits); it != leaves_.end()) return {this, it->second};
  auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{true, v, 0, 0, 0});
  leaves_.emplace(bits, id);
  return {this, id};
}

Fodd Manager::leaf(double value) {
  if (!std::isfinite(value)) throw InvariantError("leaf value must be finite");
  if (value < 0) throw InvariantError("leaf value must be non-negative, got " + std::to_string(value));
  return make_leaf(value);
}

Fodd Manager::signed_leaf(double value) {
  if (!std::isfinite(value)) throw InvariantError("leaf value must be finite");
  return make_leaf(value);
}

LabelId Manager::intern(const Label& label) {
  if (label.is_equality()) {
    if (label.args.size() != 2) throw InvariantError("equality label needs two terms");
  } else {
    if (label.predicate < 0 || static_cast<std::size_t>(label.predicate) >= preds_.size())
      throw InvariantError("label refers to an undeclared predicate");
    if (preds_[label.predicate].arity != label.args.size())
      throw InvariantError("arity mismatch for predicate '" + preds_[label.predicate].name + "'");
  }
  std::lock_guard lock(mutex_);
  if (auto it = label_index_.find(label); it != label_index_.end()) return it->second;
  auto id = static_cast<LabelId>(labels_.size());
  labels_.push_back(label);
  label_index_.emplace(label, id);
  return id;
}

const Label& Manager::label(LabelId id) const { return labels_.at(id); }

std::size_t Manager::interned_nodes() const {
  std::lock_guard lock(mutex_);
  return nodes_.size();
}

Fodd Manager::node(const Label& label, Fodd t, Fodd f) {
  if (t.mgr_ != this || f.mgr_ != this) throw InvariantError("mixing diagrams from different managers");
  if (t == f) return t;
  LabelId lid = intern(label);
  for (Fodd c : {t, f}) {
    if (!c.is_leaf() && !(label < c.label()))
      throw OrderError("order violation: " + describe(label) + " above " + describe(c.label()));
  }
  Key key{lid, t.id_, f.id_};
  std::lock_guard lock(mutex_);
  if (auto it = unique_.find(key); it != unique_.end()) return {this, it->second};
  auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{false, 0.0, lid, t.id_, f.id_});
  unique_.emplace(key, id);
  return {this, id};
}

Fodd Manager::ite(const Label& label, Fodd t, Fodd f) {
  if (label.is_trivial_equality()) return t;
  if (t == f) return t;
  bool sorted = (t.is_leaf() || label < t.label()) && (f.is_leaf() || label < f.label());
  if (sorted) return node(label, t, f);
  Fodd ind = node(label, one(), zero());
  Fodd neg = node(label, zero(), one());
  return apply(apply(ind, t, Op::Multiply), apply(neg, f, Op::Multiply), Op::Add);
}

// ---------------------------------------------------------------------------
// Structural queries

std::vector<Fodd> topological_order(Fodd root) {
  // Reverse postorder of a DFS is a topological order of the DAG.
  std::vector<Fodd> post;
  std::set<NodeId> seen;
  std::vector<std::pair<Fodd, int>> stack{{root, 0}};
  seen.insert(root.id());
  while (!stack.empty()) {
    auto& [n, state] = stack.back();
    if (n.is_leaf() || state == 2) {
      post.push_back(n);
      stack.pop_back();
      continue;
    }
    Fodd child = state == 0 ? n.high() : n.low();
    ++state;
    if (seen.insert(child.id()).second) stack.emplace_back(child, 0);
  }
  return {post.rbegin(), post.rend()};
}

std::size_t node_count(Fodd root) { return topological_order(root).size(); }

std::size_t internal_count(Fodd root) {
  std::size_t n = 0;
  for (Fodd f : topological_order(root)) n += f.is_leaf() ? 0 : 1;
  return n;
}

std::set<double> leaf_values(Fodd root) {
  std::set<double> out;
  for (Fodd f : topological_order(root))
    if (f.is_leaf()) out.insert(f.value());
  return out;
}

double min_leaf(Fodd root) { return *leaf_values(root).begin(); }
double max_leaf(Fodd root) { return *leaf_values(root).rbegin(); }

std::set<Term> terms_of(Fodd root, TermSort sort) {
  std::set<Term> out;
  for (Fodd f : topological_order(root)) {
    if (f.is_leaf()) continue;
    for (const auto& t : f.label().args)
      if (t.sort == sort) out.insert(t);
  }
  return out;
}

std::set<NodeId> descendants(Fodd root) {
  std::set<NodeId> out;
  for (Fodd f : topological_order(root)) out.insert(f.id());
  return out;
}

Fodd replace_nodes(Fodd root, const std::unordered_map<NodeId, Fodd>& replacement) {
  if (replacement.empty()) return root;
  Manager& m = root.manager();
  std::unordered_map<NodeId, Fodd> memo;
  std::function<Fodd(Fodd)> go = [&](Fodd n) -> Fodd {
    if (auto it = replacement.find(n.id()); it != replacement.end()) return it->second;
    if (n.is_leaf()) return n;
    if (auto it = memo.find(n.id()); it != memo.end()) return it->second;
    Fodd r = m.node(n.label(), go(n.high()), go(n.low()));
    memo.emplace(n.id(), r);
    return r;
  };
  return go(root);
}

Fodd splice(Fodd root, Fodd target, Fodd sub) {
  Manager& m = root.manager();
  if (root == target) return sub;
  bool direct = true;
  if (!sub.is_leaf()) {
    for (Fodd n : topological_order(root)) {
      if (n.is_leaf()) continue;
      if ((n.high() == target || n.low() == target) && !(n.label() < sub.label())) {
        direct = false;
        break;
      }
    }
  }
  if (direct) return replace_nodes(root, {{target.id(), sub}});

  Fodd ba = replace_nodes(root, {{target.id(), m.zero()}});
  std::unordered_map<NodeId, Fodd> memo;
  std::function<Fodd(Fodd)> reach = [&](Fodd n) -> Fodd {
    if (n == target) return m.one();
    if (n.is_leaf()) return m.zero();
    if (auto it = memo.find(n.id()); it != memo.end()) return it->second;
    Fodd r = m.node(n.label(), reach(n.high()), reach(n.low()));
    memo.emplace(n.id(), r);
    return r;
  };
  Fodd bb = reach(root);
  return apply(ba, apply(bb, sub, Op::Multiply), Op::Add);
}

Fodd rename(Fodd root, const std::map<Term, Term>& sub) {
  if (sub.empty()) return root;
  Manager& m = root.manager();
  std::unordered_map<NodeId, Fodd> memo;
  std::function<Fodd(Fodd)> go = [&](Fodd n) -> Fodd {
    if (n.is_leaf()) return n;
    if (auto it = memo.find(n.id()); it != memo.end()) return it->second;
    Fodd r = m.ite(substitute(n.label(), sub), go(n.high()), go(n.low()));
    memo.emplace(n.id(), r);
    return r;
  };
  return go(root);
}

}  // namespace fodd
