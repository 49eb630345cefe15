#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fodd/interpretation.hpp"
#include "fodd/regression.hpp"
#include "fodd/rmdp.hpp"

namespace fodd {

/// Object counts per sort, e.g. "box=2,truck=1,city=2". Domains without
/// predicate sorts use the single sort "object".
struct ObjectSpec {
  std::vector<std::pair<std::string, int>> counts;

  static ObjectSpec parse(std::string_view text);
};

struct GroundAtom {
  int predicate;
  std::vector<int> args;
};

struct GroundAction {
  int schema;  ///< index into RmdpModel::actions
  std::vector<int> args;
};

struct Outcome {
  std::size_t successor;
  double probability;
};

struct GroundOptions {
  std::size_t atom_cap = 24;
};

/// Ground instantiation of a model. Every state is a truth assignment to the
/// ground atoms (bit i = atoms[i]); transitions come from evaluating the
/// instantiated TVDs and choice probabilities at the state.
class GroundMdp {
public:
  GroundMdp(const RmdpModel& model, const ObjectSpec& objects, const GroundOptions& opts = {});

  const std::vector<std::string>& elements() const { return elements_; }
  const std::vector<std::string>& element_sorts() const { return element_sorts_; }
  const std::vector<GroundAtom>& atoms() const { return atoms_; }
  const std::vector<GroundAction>& actions() const { return actions_; }

  /// States consistent with the background theory, plus every state
  /// reachable from them.
  std::size_t state_count() const { return states_.size(); }
  std::uint64_t state_bits(std::size_t s) const { return states_[s]; }
  const Interpretation& state(std::size_t s) const { return interps_[s]; }
  double reward(std::size_t s) const { return rewards_[s]; }
  /// Outgoing distribution of ground action a in state s, merged by successor.
  const std::vector<Outcome>& outcomes(std::size_t s, std::size_t a) const { return transitions_[s][a]; }

  /// Atom set as an interpretation over the ground objects.
  Interpretation interpretation(std::uint64_t bits) const;
  std::string describe_state(std::size_t s) const;
  std::string describe_action(std::size_t a) const;
  std::size_t atom_index(int predicate, const std::vector<int>& args) const;

private:
  std::size_t add_state(std::uint64_t bits);
  bool consistent(const Interpretation& interp) const;

  const RmdpModel* model_;
  std::vector<std::string> elements_;
  std::vector<std::string> element_sorts_;
  std::vector<GroundAtom> atoms_;
  std::vector<GroundAction> actions_;
  std::vector<std::uint64_t> states_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
  std::vector<Interpretation> interps_;
  std::vector<double> rewards_;
  std::vector<std::vector<std::vector<Outcome>>> transitions_;
};

/// V_0 = r and n exact Bellman backups; with `absorbing`, the backup is
/// max(r, gamma * max_a E[V]).
std::vector<double> tabular_vi(const GroundMdp& g, double gamma, int n, bool absorbing = false);

/// max over states of |map(V, s) - table[s]|.
double compare(Fodd v, const GroundMdp& g, const std::vector<double>& table);

struct OracleReport {
  std::size_t states = 0;
  std::size_t ground_actions = 0;
  /// |map(V_n) - tabular V_n| maximized over states, for n = 0..steps.
  std::vector<double> deviations;
  double max_deviation = 0.0;
  std::vector<Fodd> values;
};

/// Run `steps` abstract value-iteration steps and compare each V_n with the
/// tabular n-step values of the ground instance.
OracleReport oracle_check(const RmdpModel& model, const ObjectSpec& objects, int steps,
                          const RegressionOptions& opts = {}, const GroundOptions& ground = {});

}  // namespace fodd
