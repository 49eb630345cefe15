#include "fodd/term.hpp"

#include <sstream>

namespace fodd {

std::string to_string(const Term& t) { return t.name; }

Label Label::equality(Term a, Term b) {
  if (b < a) std::swap(a, b);
  return {kEquality, {std::move(a), std::move(b)}};
}

int PredicateTable::add(PredicateDecl decl) {
  if (index_.count(decl.name)) throw InvariantError("duplicate predicate '" + decl.name + "'");
  if (!decl.sorts.empty() && decl.sorts.size() != decl.arity)
    throw InvariantError("predicate '" + decl.name + "': sort list does not match arity");
  int id = static_cast<int>(decls_.size());
  index_.emplace(decl.name, id);
  decls_.push_back(std::move(decl));
  return id;
}

std::optional<int> PredicateTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int PredicateTable::require(std::string_view name) const {
  auto id = find(name);
  if (!id) throw InvariantError("unknown predicate '" + std::string(name) + "'");
  return *id;
}

std::string to_string(const Label& l, const PredicateTable& preds) {
  std::ostringstream os;
  if (l.is_equality()) {
    os << l.args[0].name << " = " << l.args[1].name;
    return os.str();
  }
  os << preds[l.predicate].name;
  if (!l.args.empty()) {
    os << '(';
    for (std::size_t i = 0; i < l.args.size(); ++i) os << (i ? ", " : "") << l.args[i].name;
    os << ')';
  }
  return os.str();
}

std::string to_string(const Literal& l, const PredicateTable& preds) {
  return (l.positive ? "" : "~") + to_string(l.label, preds);
}

}  // namespace fodd
