#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fodd/algebra.hpp"
#include "fodd/paths.hpp"
#include "fodd/reasoner.hpp"

namespace fodd {

struct ReductionBudget {
  /// Upper bound on applied reductions in one reduce_full call.
  int max_passes = 500;
  /// Upper bound on R7 edge pairs whose reachability condition is checked
  /// per pass.
  int per_pass_cap = 20000;
};

enum class ReductionKind { R5, R6, EqualityShortcut, R7Replace, R7Drop, R8, R9 };

std::string to_string(ReductionKind k);

struct ReductionEvent {
  ReductionKind kind;
  Fodd before;
  Fodd after;
};

struct ReductionOptions {
  BackgroundTheory theory;
  ReductionBudget budget;
  std::size_t path_cap = default_path_cap();
  /// Apply R6-R9. Off leaves only the strong reductions.
  bool weak = true;
  /// Permit R9, whose correctness needs domains with at least two objects.
  bool equality_reduction = true;
  std::function<void(const ReductionEvent&)> trace;
};

/// Rebuild the diagram sorted with R1-R4 applied; trivial equalities take
/// their true branch.
Fodd reduce_strong(Fodd b);

/// One R5 step: the first node (top-down) whose node formula entails its
/// label or the label's negation is bypassed. nullopt when none applies.
std::optional<Fodd> r5_step(Fodd b, const BackgroundTheory& theory, std::size_t path_cap = default_path_cap());
/// R5 to fixpoint.
Fodd r5_implied(Fodd b, const BackgroundTheory& theory, std::size_t path_cap = default_path_cap());

/// Outcome of checking the R7 conditions for an edge pair.
struct R7Check {
  bool s1 = false;
  bool p71 = false, p72 = false, p73 = false;
  bool v71 = false, v72 = false, v73 = false, v74 = false;
  bool paths_known = true;

  bool can_replace() const { return s1 && ((p71 && v71) || (p72 && v73)); }
  bool can_drop() const { return can_replace() && (v72 || (p73 && v74)); }
};

/// Evaluate every R7 condition for (e1, e2).
R7Check check_r7(const PathIndex& paths, const EdgeRef& e1, const EdgeRef& e2, const BackgroundTheory& theory);

/// S1 only.
bool r7_safe(const EdgeRef& e1, const EdgeRef& e2);

/// Redirect edge e2 to leaf 0 if the replace conditions hold.
std::optional<Fodd> r7_replace(Fodd b, const EdgeRef& e1, const EdgeRef& e2, const BackgroundTheory& theory,
                               std::size_t path_cap = default_path_cap());
/// Bypass source(e2) to target(sibling(e2)) if the drop conditions hold.
std::optional<Fodd> r7_drop(Fodd b, const EdgeRef& e1, const EdgeRef& e2, const BackgroundTheory& theory,
                            std::size_t path_cap = default_path_cap());

/// Unconditional edge redirection and node bypass (the operators alone).
Fodd redirect_edge(Fodd b, const EdgeRef& e, Fodd to);
Fodd bypass_node(Fodd b, Fodd n, bool branch);

/// R8: rename xs to ys when V8 (B{xs/ys} - B >= 0) holds.
std::optional<Fodd> r8_unify(Fodd b, const std::vector<Term>& xs, const std::vector<Term>& ys);

/// R9 on equality node n when E9.1 holds. Sound for domains of size >= 2.
std::optional<Fodd> r9_equality(Fodd b, Fodd n);

/// Equality shortcut of the sibling case: node t = y with y absent above n
/// and min(n.t) >= max(n.f) is replaced by n.t{y/t}.
std::optional<Fodd> equality_shortcut(Fodd b, Fodd n);

/// Deterministic schedule, each applied change restarting from the top:
/// strong, R5, R9 top-down, sibling pairs (R6) and the equality shortcut,
/// R7 pairs in document order (drop before replace), R8.
Fodd reduce_full(Fodd b, const ReductionOptions& opts = {});

/// Redirect each leaf edge of b whose every path existentially entails a
/// path of `by` with a leaf at least as large to b's smallest leaf. For b
/// and `by` standardized apart, max(map(by), map(result)) equals
/// max(map(by), map(b)).
Fodd prune_dominated(Fodd b, Fodd by, const ReductionOptions& opts = {});

/// Standardize apart, fold with max, reduce.
Fodd max_all(std::span<const Fodd> diagrams, FreshVariables& fresh, const ReductionOptions& opts = {});

/// Edges in document order: nodes top-down, true branch before false.
std::vector<EdgeRef> document_edges(Fodd b);

}  // namespace fodd
