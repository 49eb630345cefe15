#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fodd/manager.hpp"

namespace fodd {

/// Finite relational structure: elements 0..n-1 (with display names),
/// constant bindings, and the set of true ground atoms.
class Interpretation {
public:
  Interpretation() = default;
  Interpretation(const PredicateTable& preds, std::vector<std::string> elements);

  std::size_t size() const { return elements_.size(); }
  const std::vector<std::string>& elements() const { return elements_; }
  std::optional<int> element(std::string_view name) const;

  void bind(const std::string& constant, int element);
  std::optional<int> binding(const std::string& constant) const;
  const std::map<std::string, int>& bindings() const { return constants_; }

  bool holds(int predicate, std::span<const int> args) const;
  void set(int predicate, std::span<const int> args, bool value = true);

  /// True atoms as (predicate, arguments), ordered by predicate then args.
  std::vector<std::pair<int, std::vector<int>>> true_atoms() const;

  std::size_t predicate_count() const { return arity_.size(); }
  std::size_t arity(int predicate) const { return arity_.at(static_cast<std::size_t>(predicate)); }

  friend bool operator==(const Interpretation&, const Interpretation&) = default;

private:
  std::size_t offset(int predicate, std::span<const int> args) const;

  std::vector<std::string> elements_;
  std::map<std::string, int> constants_;
  std::vector<std::size_t> arity_;
  std::vector<std::vector<bool>> atoms_;
};

/// Assignment of variables and action parameters to elements.
using Valuation = std::map<Term, int>;

/// Value of the single leaf reached under `z`. Throws InvariantError on an
/// unbound term.
double evaluate(Fodd b, const Interpretation& interp, const Valuation& z);

struct MapOptions {
  /// Guard on |domain|^|free terms|. The search binds terms lazily, so the
  /// default is far above what exhaustive enumeration could afford.
  double max_valuations = 1e15;
  /// Guard on the number of search nodes visited.
  std::size_t max_steps = 100'000'000;
};

struct MapResult {
  double value = 0.0;
  /// A maximizing valuation over the terms it had to bind.
  Valuation witness;
};

/// max over valuations of evaluate(b, I, .). Variables and action
/// parameters not fixed by `fixed` are maximized over. Branch and bound over
/// lazily bound terms; exact.
MapResult map_value_full(Fodd b, const Interpretation& interp, const Valuation& fixed = {},
                         const MapOptions& opts = {});

inline double map_value(Fodd b, const Interpretation& interp, const Valuation& fixed = {},
                        const MapOptions& opts = {}) {
  return map_value_full(b, interp, fixed, opts).value;
}

}  // namespace fodd
