#pragma once

#include <set>
#include <vector>

#include "fodd/term.hpp"

namespace fodd {

/// body -> head. Variables are universally quantified, except the ones
/// listed in `existential`, which are quantified inside the head
/// (body -> exists v. head).
struct Rule {
  std::vector<Literal> body;
  Literal head;
  std::set<Term> existential;
};

/// Argument of a derived literal that holds for every term, produced by a
/// universal head variable that does not occur in the body.
extern const Term kAnyTerm;

struct BackgroundTheory {
  std::vector<Rule> rules;
  /// Rounds of rule application used by the entailment checks.
  int depth = 2;

  bool empty() const { return rules.empty(); }
};

struct Saturation {
  /// The literal set is unsatisfiable (some l and ~l, or ~(t = t)).
  bool contradiction = false;
  /// Closure of the input; positive equalities are kept and every other
  /// literal is rewritten to the smallest term of its equality class.
  std::set<Literal> literals;
};

Saturation saturate(const std::vector<Literal>& literals, const BackgroundTheory& theory, int depth);

struct EntailmentQuery {
  std::vector<PathFormula> antecedent;
  std::vector<PathFormula> consequent;
  /// Variables bound identically on both sides.
  std::set<Term> shared;
};

/// Sound test of: for every antecedent disjunct A, some consequent disjunct C
/// and substitution of C's non-shared variables put every literal of C into
/// the saturation of A. False means unknown.
bool implies_exists(const EntailmentQuery& q, const BackgroundTheory& theory);

/// Convenience wrapper with the theory's own depth.
inline Saturation saturate(const std::vector<Literal>& literals, const BackgroundTheory& theory) {
  return saturate(literals, theory, theory.depth);
}

}  // namespace fodd
