#include "fodd/paths.hpp"

#include <cstdlib>
#include <set>

namespace fodd {

std::size_t default_path_cap() {
  if (const char* env = std::getenv("FODD_MAX_PATHS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 256;
}

PathIndex::PathIndex(Fodd root, std::size_t cap) : root_(root) {
  std::unordered_map<NodeId, std::set<PathFormula>> acc;
  std::unordered_map<NodeId, bool> overflow;
  acc[root.id()].insert(PathFormula{});
  for (Fodd n : topological_order(root)) {
    bool over = overflow[n.id()] || acc[n.id()].size() > cap;
    if (over) {
      nf_[n.id()] = std::nullopt;
    } else {
      nf_[n.id()] = std::vector<PathFormula>(acc[n.id()].begin(), acc[n.id()].end());
    }
    if (n.is_leaf()) continue;
    for (bool b : {true, false}) {
      NodeId c = n.branch(b).id();
      if (over) {
        overflow[c] = true;
        continue;
      }
      if (overflow[c]) continue;
      auto& dst = acc[c];
      for (const auto& f : *nf_[n.id()]) {
        PathFormula g = f;
        g.push_back({n.label(), b});
        dst.insert(std::move(g));
        if (dst.size() > cap) break;
      }
      if (dst.size() > cap) {
        overflow[c] = true;
        dst.clear();
      }
    }
    acc.erase(n.id());
  }
}

const std::vector<PathFormula>* PathIndex::node_formulas(Fodd n) const {
  auto it = nf_.find(n.id());
  if (it == nf_.end() || !it->second) return nullptr;
  return &*it->second;
}

std::optional<std::vector<PathFormula>> PathIndex::edge_formulas(const EdgeRef& e) const {
  const auto* nf = node_formulas(e.parent);
  if (!nf) return std::nullopt;
  std::vector<PathFormula> out;
  out.reserve(nf->size());
  for (const auto& f : *nf) {
    out.push_back(f);
    out.back().push_back(e.literal());
  }
  return out;
}

std::optional<std::vector<PathFormula>> path_formulas(Fodd root, Fodd node) {
  PathIndex idx(root);
  const auto* nf = idx.node_formulas(node);
  if (!nf) return std::nullopt;
  return *nf;
}

std::optional<std::vector<PathFormula>> path_formulas(Fodd root, const EdgeRef& edge) {
  return PathIndex(root).edge_formulas(edge);
}

std::set<Term> formula_terms(const std::vector<PathFormula>& formulas, TermSort sort) {
  std::set<Term> out;
  for (const auto& f : formulas)
    for (const auto& lit : f)
      for (const auto& t : lit.label.args)
        if (t.sort == sort) out.insert(t);
  return out;
}

}  // namespace fodd
