#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fodd {

/// Raised when a diagram or model element breaks a structural invariant.
class InvariantError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Raised when a configured size guard is exceeded.
class LimitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Term sorts in their ordering position: constants precede variables,
/// variables precede action parameters.
enum class TermSort : unsigned char { Constant = 0, Variable = 1, Parameter = 2 };

struct Term {
  TermSort sort = TermSort::Variable;
  std::string name;

  static Term constant(std::string n) { return {TermSort::Constant, std::move(n)}; }
  static Term variable(std::string n) { return {TermSort::Variable, std::move(n)}; }
  static Term parameter(std::string n) { return {TermSort::Parameter, std::move(n)}; }

  bool is_constant() const { return sort == TermSort::Constant; }
  bool is_variable() const { return sort == TermSort::Variable; }
  bool is_parameter() const { return sort == TermSort::Parameter; }

  friend auto operator<=>(const Term&, const Term&) = default;
  friend bool operator==(const Term&, const Term&) = default;
};

std::string to_string(const Term& t);

/// Predicate index reserved for the equality "predicate"; it precedes every
/// declared predicate in the label order.
inline constexpr int kEquality = -1;

/// Node label: either an atom P(t1..tn) or an equality t1 = t2.
///
/// The derived ordering is the label order: equalities first, then atoms by
/// predicate declaration index, then argument-wise with each argument compared
/// by sort and then by name.
struct Label {
  int predicate = kEquality;
  std::vector<Term> args;

  bool is_equality() const { return predicate == kEquality; }

  /// Equality with its two sides put in term order, so t1 = t2 and t2 = t1
  /// are the same label.
  static Label equality(Term a, Term b);
  static Label atom(int predicate, std::vector<Term> args) { return {predicate, std::move(args)}; }

  /// An equality whose sides are the same term.
  bool is_trivial_equality() const { return is_equality() && args[0] == args[1]; }

  friend auto operator<=>(const Label&, const Label&) = default;
  friend bool operator==(const Label&, const Label&) = default;
};

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept {
    return std::hash<std::string>{}(t.name) * 3 + static_cast<std::size_t>(t.sort);
  }
};

struct LabelHash {
  std::size_t operator()(const Label& l) const noexcept {
    std::size_t h = std::hash<int>{}(l.predicate);
    for (const auto& a : l.args) h = h * 1000003u ^ TermHash{}(a);
    return h;
  }
};

/// Apply a term substitution to a label (simultaneous; unmapped terms stay).
template <class Map>
Label substitute(const Label& l, const Map& sub) {
  std::vector<Term> args;
  args.reserve(l.args.size());
  for (const auto& a : l.args) {
    auto it = sub.find(a);
    args.push_back(it == sub.end() ? a : it->second);
  }
  if (l.is_equality()) return Label::equality(std::move(args[0]), std::move(args[1]));
  return Label::atom(l.predicate, std::move(args));
}

struct PredicateDecl {
  std::string name;
  std::size_t arity = 0;
  /// Optional argument sort names; used by the ground oracle for typed
  /// instantiation, ignored by the diagram semantics.
  std::vector<std::string> sorts;
};

/// Declared predicates; the declaration index is the predicate order.
class PredicateTable {
public:
  int add(PredicateDecl decl);
  std::optional<int> find(std::string_view name) const;
  int require(std::string_view name) const;
  const PredicateDecl& operator[](int index) const { return decls_.at(static_cast<std::size_t>(index)); }
  std::size_t size() const { return decls_.size(); }
  const std::vector<PredicateDecl>& decls() const { return decls_; }

private:
  std::vector<PredicateDecl> decls_;
  std::unordered_map<std::string, int> index_;
};

std::string to_string(const Label& l, const PredicateTable& preds);

/// Signed literal over a label.
struct Literal {
  Label label;
  bool positive = true;

  Literal negated() const { return {label, !positive}; }
  friend auto operator<=>(const Literal&, const Literal&) = default;
  friend bool operator==(const Literal&, const Literal&) = default;
};

std::string to_string(const Literal& l, const PredicateTable& preds);

/// Conjunction of literals along one root-to-target path, in label order.
using PathFormula = std::vector<Literal>;

}  // namespace fodd
