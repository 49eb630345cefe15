#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fodd/interpretation.hpp"
#include "fodd/reductions.hpp"
#include "fodd/rmdp.hpp"

namespace fodd {

struct RegressionOptions {
  /// Rename the alternatives' regression results apart before summing them.
  bool standardize_apart = true;
  /// Apply weak reductions after each arithmetic stage.
  bool weak = true;
  ReductionBudget budget;
};

/// Reduction settings for a model: its background theory plus `opts`.
ReductionOptions reduction_options(const RmdpModel& model, const RegressionOptions& opts = {});

/// Regression of V through one deterministic alternative by block
/// combination: each atom node n with processed children Bt, Bf becomes
/// [Bn * Bt] + [(1 - Bn) * Bf] where Bn is n's instantiated TVD. Equality
/// nodes regress to themselves.
Fodd regress_deterministic(Fodd v, const RmdpModel& model, const Alternative& alt);
Fodd regress_deterministic(Fodd v, const RmdpModel& model, std::string_view action, std::string_view alternative);

/// Expected next-step value sum_j prob_j * Regr(V, A_j), with the action
/// parameters left as parameters.
Fodd t_function(Fodd v, const RmdpModel& model, const ActionSchema& action, FreshVariables& fresh,
                const RegressionOptions& opts = {});

/// R + gamma * T (max(R, gamma * T) for absorbing models), parameters kept.
Fodd q_function(Fodd v, const RmdpModel& model, const ActionSchema& action, FreshVariables& fresh,
                const RegressionOptions& opts = {});

struct QFunction {
  Fodd q;
  std::vector<Term> params;
};
using QFunctionSet = std::map<std::string, QFunction>;

QFunctionSet q_functions(Fodd v, const RmdpModel& model, FreshVariables& fresh, const RegressionOptions& opts = {});

/// Replace the given action parameters by fresh variables and reduce.
Fodd object_maximize(Fodd q, const std::vector<Term>& params, FreshVariables& fresh,
                     const ReductionOptions& red = {});

/// One value-iteration step: max over actions of R + gamma * objmax(T).
Fodd vi_step(Fodd v, const RmdpModel& model, FreshVariables& fresh, const RegressionOptions& opts = {});

/// Upper bound on sup_I |map(a) - map(b)|: for each direction
/// max_leaf(x - max_sigma y.sigma) over a greedily chosen set of variable
/// correspondences sigma, clamped below by the exact deviation on `tests`.
double diagram_distance(Fodd a, Fodd b, const std::vector<Interpretation>& tests = {},
                        const BackgroundTheory& theory = {});

struct SolveOptions {
  double epsilon = 0.1;
  int max_iters = 50;
  RegressionOptions regression;
  /// Interpretations used to clamp the residual bound from below.
  std::vector<Interpretation> tests;
};

struct SolveResult {
  Fodd value;
  int iterations = 0;
  double residual = std::numeric_limits<double>::infinity();
  bool converged = false;
  /// V_0 .. V_iterations.
  std::vector<Fodd> history;
};

/// Stopping threshold epsilon (1 - gamma) / (2 gamma).
double stopping_threshold(double epsilon, double gamma);

SolveResult solve(const RmdpModel& model, const SolveOptions& opts = {});

struct ActionChoice {
  std::string action;
  /// Parameter name -> element.
  std::vector<std::pair<Term, int>> binding;
  double value = 0.0;
};

/// Greedy action for `state` under V: per action, the Q value maximized over
/// parameter bindings. Ties go to the first declared action, then the
/// lexicographically smallest binding. `element_sorts`, when given, limits
/// each parameter to elements of its inferred sort.
ActionChoice extract_action(const RmdpModel& model, Fodd v, const Interpretation& state,
                            const std::vector<std::string>& element_sorts = {}, const RegressionOptions& opts = {});

}  // namespace fodd
