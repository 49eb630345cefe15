#include "fodd/reasoner.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>

namespace fodd {

const Term kAnyTerm = Term::constant("#all");

namespace {

using Subst = std::map<Term, Term>;

const Term kWildcard = Term::constant("#w");

bool compatible(const std::vector<Term>& a, const std::vector<Term>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i] && a[i] != kAnyTerm && b[i] != kAnyTerm) return false;
  return true;
}

// Literal set closed under its positive equalities: each term is replaced by
// the smallest member of its class.
struct View {
  std::map<Term, Term> rep;
  std::set<Literal> facts;  // without positive equalities
  bool contradiction = false;

  Term find(const Term& t) const {
    auto it = rep.find(t);
    return it == rep.end() ? t : it->second;
  }

  Literal normalize(const Literal& l) const {
    return {substitute(l.label, rep), l.positive};
  }
};

View build_view(const std::set<Literal>& raw) {
  View v;
  std::map<Term, Term> parent;
  std::function<Term(const Term&)> root = [&](const Term& t) -> Term {
    auto it = parent.find(t);
    if (it == parent.end() || it->second == t) return t;
    Term r = root(it->second);
    parent[t] = r;
    return r;
  };
  for (const auto& l : raw) {
    if (!l.positive || !l.label.is_equality()) continue;
    if (l.label.args[0] == kAnyTerm || l.label.args[1] == kAnyTerm) continue;
    Term a = root(l.label.args[0]);
    Term b = root(l.label.args[1]);
    if (a == b) continue;
    if (b < a) std::swap(a, b);
    parent[b] = a;
    parent.emplace(a, a);
  }
  for (const auto& [t, _] : parent) {
    Term r = root(t);
    if (r != t) v.rep[t] = r;
  }
  for (const auto& l : raw) {
    if (l.positive && l.label.is_equality()) continue;
    Literal n = v.normalize(l);
    if (!n.positive && n.label.is_trivial_equality()) v.contradiction = true;
    v.facts.insert(n);
  }
  for (const auto& neg : v.facts) {
    if (neg.positive || neg.label.is_equality()) continue;
    Literal lo{Label{neg.label.predicate, {}}, false};
    for (auto it = v.facts.lower_bound(lo); it != v.facts.end() && it->label.predicate == neg.label.predicate; ++it)
      if (it->positive && compatible(it->label.args, neg.label.args)) v.contradiction = true;
  }
  return v;
}

class Matcher {
public:
  Matcher(const View& view, const std::set<Term>& patvars) : view_(view), patvars_(patvars) {}

  /// Calls on_match for each extension of s covering all patterns; stops and
  /// returns true as soon as on_match returns true.
  bool run(std::vector<Literal> patterns, Subst s, const std::function<bool(const Subst&)>& on_match) {
    patterns_ = std::move(patterns);
    on_match_ = &on_match;
    auto rank = [](const Literal& l) { return !l.label.is_equality() ? 0 : (l.positive ? 1 : 2); };
    std::stable_sort(patterns_.begin(), patterns_.end(), [&](const Literal& a, const Literal& b) { return rank(a) < rank(b); });
    return step(0, s);
  }

private:
  // Every remaining pattern still needs a fact it could match.
  bool viable(std::size_t from, const Subst& s) const {
    for (std::size_t j = from; j < patterns_.size(); ++j) {
      const Literal& p = patterns_[j];
      if (p.label.is_equality() && p.positive) continue;
      if (count(p, s, 1) == 0) return false;
    }
    return true;
  }

  bool unbound_equality(std::size_t j, const Subst& s) const {
    const Literal& p = patterns_[j];
    return p.label.is_equality() && p.positive && !resolve(p.label.args[0], s) && !resolve(p.label.args[1], s);
  }

  bool deferrable(std::size_t i, const Subst& s) const {
    for (std::size_t j = i + 1; j < patterns_.size(); ++j)
      if (!unbound_equality(j, s)) return true;
    return false;
  }

  bool step(std::size_t i, Subst& s) {
    if (i == patterns_.size()) return (*on_match_)(s);
    if (!viable(i, s)) return false;
    const Literal& p = patterns_[i];
    if (p.label.is_equality() && p.positive) {
      auto a = resolve(p.label.args[0], s);
      auto b = resolve(p.label.args[1], s);
      if (a && b) return *a == *b && step(i + 1, s);
      if (!a && !b && deferrable(i, s)) {
        // Later patterns may still bind a side.
        std::rotate(patterns_.begin() + i, patterns_.begin() + i + 1, patterns_.end());
        bool r = step(i, s);
        std::rotate(patterns_.begin() + i, patterns_.end() - 1, patterns_.end());
        return r;
      }
      Subst ext = s;
      if (a) ext[p.label.args[1]] = *a;
      else if (b) ext[p.label.args[0]] = *b;
      else {
        ext[p.label.args[0]] = kWildcard;
        ext[p.label.args[1]] = kWildcard;
      }
      return step(i + 1, ext);
    }
    bool found = false;
    for_each_fact(p, [&](const std::vector<Term>& fact) {
      Subst ext = s;
      if (unify_args(p.label.args, fact, ext) && step(i + 1, ext)) found = true;
      return !found;
    });
    return found;
  }

  bool is_pattern(const Term& t) const { return t.is_variable() && patvars_.contains(t); }

  std::optional<Term> resolve(const Term& t, const Subst& s) const {
    if (is_pattern(t)) {
      auto it = s.find(t);
      if (it == s.end()) return std::nullopt;
      return it->second;
    }
    return view_.find(t);
  }

  bool unify_args(const std::vector<Term>& pat, const std::vector<Term>& fact, Subst& s) const {
    // A universal fact argument matches anything and leaves a pattern
    // variable unbound.
    for (std::size_t i = 0; i < pat.size(); ++i) {
      if (fact[i] == kAnyTerm) continue;
      if (auto r = resolve(pat[i], s)) {
        if (*r != fact[i]) return false;
      } else {
        s[pat[i]] = fact[i];
      }
    }
    return true;
  }

  // Whether fact args match the pattern under s, without binding. Repeated
  // unbound variables are not checked against each other here.
  bool compatible_with(const std::vector<Term>& pat, const std::vector<Term>& fact, const Subst& s) const {
    for (std::size_t i = 0; i < pat.size(); ++i) {
      if (fact[i] == kAnyTerm) continue;
      if (auto r = resolve(pat[i], s); r && *r != fact[i]) return false;
    }
    return true;
  }

  template <class F>
  void for_each_fact(const Literal& p, F&& f) const {
    Literal lo{Label{p.label.predicate, {}}, false};
    for (auto it = view_.facts.lower_bound(lo); it != view_.facts.end() && it->label.predicate == p.label.predicate; ++it) {
      if (it->positive != p.positive || it->label.args.size() != p.label.args.size()) continue;
      if (!f(it->label.args)) return;
      if (p.label.is_equality()) {
        std::vector<Term> flipped{it->label.args[1], it->label.args[0]};
        if (!f(flipped)) return;
      }
    }
  }

  // Number of compatible facts, counting no further than limit.
  std::size_t count(const Literal& p, const Subst& s, std::size_t limit) const {
    std::size_t n = 0;
    for_each_fact(p, [&](const std::vector<Term>& fact) {
      if (compatible_with(p.label.args, fact, s)) ++n;
      return n < limit;
    });
    return n;
  }

  const View& view_;
  const std::set<Term>& patvars_;
  std::vector<Literal> patterns_;
  const std::function<bool(const Subst&)>* on_match_ = nullptr;
};

std::set<Term> literal_variables(const std::vector<Literal>& lits) {
  std::set<Term> out;
  for (const auto& l : lits)
    for (const auto& t : l.label.args)
      if (t.is_variable()) out.insert(t);
  return out;
}

Literal instantiate(const Literal& l, const Subst& s) { return {substitute(l.label, s), l.positive}; }

Saturation finish(const View& v) {
  Saturation out;
  out.contradiction = v.contradiction;
  out.literals = v.facts;
  for (const auto& [t, r] : v.rep) out.literals.insert({Label::equality(r, t), true});
  return out;
}

// P(..s..) and ~P(..t..) differing in one argument give s != t.
void add_disequalities(std::set<Literal>& lits) {
  std::vector<Literal> found;
  for (const auto& a : lits) {
    if (!a.positive || a.label.is_equality()) continue;
    for (const auto& b : lits) {
      if (b.positive || b.label.predicate != a.label.predicate) continue;
      int diff = -1, count = 0;
      for (std::size_t i = 0; i < a.label.args.size(); ++i) {
        if (a.label.args[i] != b.label.args[i]) {
          diff = static_cast<int>(i);
          ++count;
        }
      }
      if (count != 1) continue;
      const Term& s = a.label.args[static_cast<std::size_t>(diff)];
      const Term& t = b.label.args[static_cast<std::size_t>(diff)];
      if (s == kAnyTerm || t == kAnyTerm) continue;
      found.push_back({Label::equality(s, t), false});
    }
  }
  lits.insert(found.begin(), found.end());
}

}  // namespace

Saturation saturate(const std::vector<Literal>& literals, const BackgroundTheory& theory, int depth) {
  if (depth < 0) throw InvariantError("saturation depth must be non-negative");
  std::set<Literal> raw(literals.begin(), literals.end());
  int skolem = 0;
  for (int round = 0; round < depth; ++round) {
    View view = build_view(raw);
    if (view.contradiction) return finish(view);
    std::vector<Literal> derived;
    for (const auto& rule : theory.rules) {
      std::set<Term> body_vars = literal_variables(rule.body);
      // Existential head variables get reserved names so they cannot clash
      // with terms of the literal set; universal ones become kAnyTerm.
      Subst head_sub;
      std::set<Term> existential;
      for (const auto& t : rule.head.label.args) {
        if (!t.is_variable() || body_vars.contains(t) || head_sub.contains(t)) continue;
        if (rule.existential.contains(t)) {
          Term r = Term::variable("#e" + std::to_string(head_sub.size()));
          head_sub.emplace(t, r);
          existential.insert(r);
        } else {
          head_sub.emplace(t, kAnyTerm);
        }
      }
      const Literal head_pattern = instantiate(rule.head, head_sub);
      Matcher body(view, body_vars);
      body.run(rule.body, {}, [&](const Subst& s) {
        Subst full = s;
        for (const auto& v : body_vars) full.emplace(v, kAnyTerm);
        Literal partial = instantiate(head_pattern, full);
        if (partial.positive && partial.label.is_equality() &&
            (partial.label.args[0] == kAnyTerm || partial.label.args[1] == kAnyTerm))
          return false;
        if (!existential.empty()) {
          Matcher head(view, existential);
          if (head.run({partial}, {}, [](const Subst&) { return true; })) return false;
          Subst skolems;
          for (const auto& h : existential) skolems[h] = Term::constant("#sk" + std::to_string(++skolem));
          partial = instantiate(partial, skolems);
        }
        derived.push_back(view.normalize(partial));
        return false;
      });
    }
    std::size_t before = raw.size();
    raw.insert(derived.begin(), derived.end());
    if (raw.size() == before) break;
  }
  return finish(build_view(raw));
}

bool implies_exists(const EntailmentQuery& q, const BackgroundTheory& theory) {
  for (const auto& a : q.antecedent) {
    Saturation sat = saturate(a, theory, theory.depth);
    if (sat.contradiction) continue;
    std::set<Literal> raw = sat.literals;
    add_disequalities(raw);
    View view = build_view(raw);
    bool found = false;
    for (const auto& c : q.consequent) {
      std::set<Term> patvars;
      for (const auto& v : literal_variables(c))
        if (!q.shared.contains(v)) patvars.insert(v);
      Matcher m(view, patvars);
      if (m.run(c, {}, [](const Subst&) { return true; })) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace fodd
