#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "fodd/manager.hpp"

namespace fodd {

/// An edge, given by its source node and branch.
struct EdgeRef {
  Fodd parent;
  bool branch = true;

  Fodd target() const { return parent.branch(branch); }
  Fodd sibling_target() const { return parent.branch(!branch); }
  Literal literal() const { return {parent.label(), branch}; }
  friend bool operator==(const EdgeRef&, const EdgeRef&) = default;
};

/// 256, or the value of FODD_MAX_PATHS when set to a positive integer.
std::size_t default_path_cap();

/// Node formulas of every reachable node, as sets of root-to-node literal
/// conjunctions (a DNF). A node whose formula set would exceed the cap is
/// marked as overflowed, and so is everything below it.
class PathIndex {
public:
  explicit PathIndex(Fodd root, std::size_t cap = default_path_cap());

  /// NF(n); nullopt on overflow or if n is unreachable.
  const std::vector<PathFormula>* node_formulas(Fodd n) const;
  /// EF(e) = NF(source) extended by the edge literal.
  std::optional<std::vector<PathFormula>> edge_formulas(const EdgeRef& e) const;

  Fodd root() const { return root_; }

private:
  Fodd root_;
  std::unordered_map<NodeId, std::optional<std::vector<PathFormula>>> nf_;
};

std::optional<std::vector<PathFormula>> path_formulas(Fodd root, Fodd node);
std::optional<std::vector<PathFormula>> path_formulas(Fodd root, const EdgeRef& edge);

/// Terms of the given sort in a set of formulas.
std::set<Term> formula_terms(const std::vector<PathFormula>& formulas, TermSort sort);

}  // namespace fodd
