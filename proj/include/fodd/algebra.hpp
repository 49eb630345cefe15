#pragma once

#include <span>
#include <string>
#include <vector>

#include "fodd/manager.hpp"

namespace fodd {

enum class Op { Add, Subtract, Multiply, Max };

/// Label-ordered merge of two diagrams with a memo table over node pairs.
/// Per valuation, the result equals op applied to the two operands' values.
Fodd apply(Fodd a, Fodd b, Op op);

/// Apply op between every leaf and c. With `value_function` set, a negative
/// resulting leaf is an InvariantError.
Fodd scalar_combine(Fodd b, double c, Op op, bool value_function = true);

/// Generator of fresh variable names, namespaced so that names from
/// different value-iteration rounds never collide.
class FreshVariables {
public:
  explicit FreshVariables(std::string ns = "s") : ns_(std::move(ns)) {}

  /// Fresh variable; the stem of `hint` (text before the first '_') is kept
  /// for readability.
  Term next(const Term& hint);
  Term next(std::string_view stem = "v");

  void set_namespace(std::string ns) { ns_ = std::move(ns); }
  const std::string& ns() const { return ns_; }

private:
  std::string ns_;
  unsigned long counter_ = 0;
};

/// Rename all variables of `b` to fresh ones.
Fodd rename_apart(Fodd b, FreshVariables& fresh);

/// Rename variables so no variable occurs in two output diagrams. Action
/// parameters are left alone. A single diagram is returned unchanged.
std::vector<Fodd> standardize_apart(std::span<const Fodd> diagrams, FreshVariables& fresh);

}  // namespace fodd
