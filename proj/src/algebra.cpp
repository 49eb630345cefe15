#include "fodd/algebra.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

namespace fodd {

namespace {

double combine(double a, double b, Op op) {
  switch (op) {
    case Op::Add: return a + b;
    case Op::Subtract: return a - b;
    case Op::Multiply: return a * b;
    case Op::Max: return std::max(a, b);
  }
  return 0.0;
}

struct PairHash {
  std::size_t operator()(const std::pair<NodeId, NodeId>& p) const noexcept {
    return (static_cast<std::size_t>(p.first) << 32) ^ p.second;
  }
};

}  // namespace

Fodd apply(Fodd a, Fodd b, Op op) {
  if (&a.manager() != &b.manager()) throw InvariantError("apply over different managers");
  Manager& m = a.manager();
  std::unordered_map<std::pair<NodeId, NodeId>, Fodd, PairHash> memo;

  std::function<Fodd(Fodd, Fodd)> go = [&](Fodd x, Fodd y) -> Fodd {
    if (x.is_leaf() && y.is_leaf()) return m.signed_leaf(combine(x.value(), y.value(), op));
    switch (op) {
      case Op::Add:
        if (x.is_leaf() && x.value() == 0.0) return y;
        if (y.is_leaf() && y.value() == 0.0) return x;
        break;
      case Op::Subtract:
        if (y.is_leaf() && y.value() == 0.0) return x;
        if (x == y) return m.zero();
        break;
      case Op::Multiply:
        if ((x.is_leaf() && x.value() == 0.0) || (y.is_leaf() && y.value() == 0.0)) return m.zero();
        if (x.is_leaf() && x.value() == 1.0) return y;
        if (y.is_leaf() && y.value() == 1.0) return x;
        break;
      case Op::Max:
        if (x == y) return x;
        break;
    }
    auto key = std::make_pair(x.id(), y.id());
    if (auto it = memo.find(key); it != memo.end()) return it->second;

    const Label* top = nullptr;
    if (!x.is_leaf()) top = &x.label();
    if (!y.is_leaf() && (top == nullptr || y.label() < *top)) top = &y.label();
    Label label = *top;
    bool xs = !x.is_leaf() && x.label() == label;
    bool ys = !y.is_leaf() && y.label() == label;
    Fodd t = go(xs ? x.high() : x, ys ? y.high() : y);
    Fodd f = go(xs ? x.low() : x, ys ? y.low() : y);
    Fodd r = m.node(label, t, f);
    memo.emplace(key, r);
    return r;
  };
  return go(a, b);
}

Fodd scalar_combine(Fodd b, double c, Op op, bool value_function) {
  Manager& m = b.manager();
  std::unordered_map<NodeId, Fodd> memo;
  std::function<Fodd(Fodd)> go = [&](Fodd n) -> Fodd {
    if (auto it = memo.find(n.id()); it != memo.end()) return it->second;
    Fodd r;
    if (n.is_leaf()) {
      double v = round_leaf(combine(n.value(), c, op));
      if (value_function && v < 0) throw InvariantError("scalar operation produced a negative leaf");
      r = m.signed_leaf(v);
    } else {
      r = m.node(n.label(), go(n.high()), go(n.low()));
    }
    memo.emplace(n.id(), r);
    return r;
  };
  return go(b);
}

Term FreshVariables::next(const Term& hint) {
  auto cut = hint.name.find('_');
  return next(std::string_view(hint.name).substr(0, cut));
}

Term FreshVariables::next(std::string_view stem) {
  if (stem.empty()) stem = "v";
  return Term::variable(std::string(stem) + "_" + ns_ + "." + std::to_string(++counter_));
}

Fodd rename_apart(Fodd b, FreshVariables& fresh) {
  std::map<Term, Term> sub;
  for (const auto& v : variables_of(b)) sub.emplace(v, fresh.next(v));
  return rename(b, sub);
}

std::vector<Fodd> standardize_apart(std::span<const Fodd> diagrams, FreshVariables& fresh) {
  std::vector<Fodd> out(diagrams.begin(), diagrams.end());
  if (out.size() < 2) return out;
  for (auto& d : out) d = rename_apart(d, fresh);
  return out;
}

}  // namespace fodd
