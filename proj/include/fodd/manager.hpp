#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <set>
#include <unordered_map>
#include <vector>

#include "fodd/term.hpp"

namespace fodd {

using NodeId = std::uint32_t;
using LabelId = std::uint32_t;

/// Raised by Manager::node when a label does not strictly precede the root
/// labels of its children.
class OrderError : public InvariantError {
public:
  using InvariantError::InvariantError;
};

class Manager;

/// Handle to an interned diagram node. Cheap to copy; equality is node
/// identity, which (by interning) is structural identity.
class Fodd {
public:
  Fodd() = default;

  bool valid() const { return mgr_ != nullptr; }
  Manager& manager() const { return *mgr_; }
  NodeId id() const { return id_; }

  bool is_leaf() const;
  double value() const;
  LabelId label_id() const;
  const Label& label() const;
  Fodd high() const;  ///< true branch
  Fodd low() const;   ///< false branch
  Fodd branch(bool which) const { return which ? high() : low(); }

  friend bool operator==(const Fodd& a, const Fodd& b) { return a.mgr_ == b.mgr_ && a.id_ == b.id_; }
  friend bool operator<(const Fodd& a, const Fodd& b) { return a.id_ < b.id_; }

private:
  friend class Manager;
  Fodd(Manager* m, NodeId id) : mgr_(m), id_(id) {}
  Manager* mgr_ = nullptr;
  NodeId id_ = 0;
};

/// Leaf values are rounded to 12 decimal places before interning so that
/// arithmetically equal results share a leaf.
double round_leaf(double v);

/// Unique table for labels and nodes. Nodes are immutable once created and
/// never freed while the manager lives; node references stay stable.
/// Interning is serialized by an internal mutex.
class Manager {
public:
  explicit Manager(PredicateTable preds = {});
  Manager(const Manager&) = delete;
  Manager& operator=(const Manager&) = delete;

  PredicateTable& predicates() { return preds_; }
  const PredicateTable& predicates() const { return preds_; }

  /// Non-negative finite leaf.
  Fodd leaf(double value);
  /// Any finite leaf. Only reduction condition tests (differences) use
  /// negative values; they never end up in value functions.
  Fodd signed_leaf(double value);
  Fodd zero() { return leaf(0.0); }
  Fodd one() { return leaf(1.0); }

  /// Internal node with R1 (equal children) and R2 (interning) applied.
  /// The label must strictly precede the root labels of both children.
  Fodd node(const Label& label, Fodd t, Fodd f);

  /// Internal node that tolerates any label position: falls back to
  /// combining [l * t] + [(1 - l) * f] with apply, which yields a sorted
  /// diagram. Trivial equalities (t = t) select the true branch.
  Fodd ite(const Label& label, Fodd t, Fodd f);

  /// Indicator diagram: label ? 1 : 0.
  Fodd literal(const Label& label) { return ite(label, one(), zero()); }

  LabelId intern(const Label& label);
  const Label& label(LabelId id) const;

  std::size_t interned_nodes() const;

  std::string describe(const Label& l) const { return to_string(l, preds_); }

private:
  friend class Fodd;
  struct Node {
    bool leaf = true;
    double value = 0.0;
    LabelId label = 0;
    NodeId hi = 0;
    NodeId lo = 0;
  };
  struct Key {
    LabelId label;
    NodeId hi, lo;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      return (static_cast<std::size_t>(k.label) * 0x9E3779B97F4A7C15ull) ^
             (static_cast<std::size_t>(k.hi) << 21) ^ k.lo;
    }
  };

  const Node& at(NodeId id) const { return nodes_[id]; }
  Fodd make_leaf(double v);

  PredicateTable preds_;
  std::deque<Label> labels_;
  std::unordered_map<Label, LabelId, LabelHash> label_index_;
  std::deque<Node> nodes_;
  std::unordered_map<Key, NodeId, KeyHash> unique_;
  std::unordered_map<std::uint64_t, NodeId> leaves_;
  mutable std::mutex mutex_;
};

// ---------------------------------------------------------------------------
// Structural queries

/// Nodes reachable from the root, parents before children.
std::vector<Fodd> topological_order(Fodd root);

/// Number of distinct reachable nodes, leaves included.
std::size_t node_count(Fodd root);
/// Number of distinct reachable internal nodes.
std::size_t internal_count(Fodd root);

/// min(B) / max(B): extrema over reachable leaves.
double min_leaf(Fodd root);
double max_leaf(Fodd root);
std::set<double> leaf_values(Fodd root);

/// Terms of the given sort appearing in any reachable label.
std::set<Term> terms_of(Fodd root, TermSort sort);
inline std::set<Term> variables_of(Fodd root) { return terms_of(root, TermSort::Variable); }

/// Set of node ids in the sub-diagram rooted at `root` (root included).
std::set<NodeId> descendants(Fodd root);

/// Replace nodes by id (each occurrence, i.e. every path through them) and
/// rebuild ancestors. Replacements must keep the order valid under every
/// parent of a replaced node; Manager::node throws otherwise.
Fodd replace_nodes(Fodd root, const std::unordered_map<NodeId, Fodd>& replacement);

/// Replace node `target` by `sub` without any order precondition, via
/// B_a + B_b * sub where B_a is B with target set to 0 and B_b is the
/// indicator of reaching target.
Fodd splice(Fodd root, Fodd target, Fodd sub);

/// Simultaneous term renaming; the result is rebuilt sorted. Per valuation,
/// rename(B, s) under z equals B under z composed with s.
Fodd rename(Fodd root, const std::map<Term, Term>& sub);

}  // namespace fodd
