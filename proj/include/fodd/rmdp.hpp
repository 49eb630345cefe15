#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fodd/interpretation.hpp"
#include "fodd/manager.hpp"
#include "fodd/reasoner.hpp"

namespace fodd {

struct SourcePos {
  int line = 0;
  int column = 0;
};

/// Truth value diagram: next-state truth of predicate(params) under one
/// deterministic alternative.
struct Tvd {
  int predicate = 0;
  std::vector<Term> params;
  Fodd diagram;
  SourcePos pos;
};

struct Alternative {
  std::string name;
  /// Keyed by predicate index; absent predicates keep their truth value.
  std::map<int, Tvd> tvds;
  Fodd prob;
  SourcePos pos;
};

struct ActionSchema {
  std::string name;
  std::vector<Term> params;
  std::vector<Alternative> alternatives;
  SourcePos pos;
};

struct RmdpModel {
  std::string name;
  std::shared_ptr<Manager> manager;
  std::vector<std::string> constants;
  /// Explicitly declared constant sorts (optional).
  std::map<std::string, std::string> constant_sorts;
  std::vector<ActionSchema> actions;
  Fodd reward;
  BackgroundTheory background;
  double discount = 0.9;
  bool absorbing = false;
  SourcePos reward_pos;

  const PredicateTable& predicates() const { return manager->predicates(); }
  Manager& mgr() const { return *manager; }
  const ActionSchema& action(std::string_view name) const;
};

/// All invariant violations, one message each; empty iff the model is valid.
std::vector<std::string> validate(const RmdpModel& model);

/// The alternative's TVD for `predicate` with its parameters renamed to
/// `args` (the frame diagram p(args) ? 1 : 0 when none is given). The result
/// is rebuilt sorted.
Fodd instantiate_tvd(const RmdpModel& model, const Alternative& alt, int predicate, const std::vector<Term>& args);
Fodd instantiate_tvd(const Tvd& tvd, const std::vector<Term>& args);

/// Sort of every constant: declared, or inferred from the argument positions
/// it occupies in the model's diagrams and rules. nullopt when a constant
/// has no sort information.
std::map<std::string, std::string> infer_constant_sorts(const RmdpModel& model);

/// Sort of each action parameter inferred from argument positions in the
/// action's TVDs and probability diagrams; empty string when unconstrained.
std::vector<std::string> infer_parameter_sorts(const RmdpModel& model, const ActionSchema& action);

/// Sort of each element of a state, read off the argument positions of its
/// true atoms and the sorts of bound constants; empty when unknown.
std::vector<std::string> element_sorts(const RmdpModel& model, const Interpretation& state);

}  // namespace fodd
