#include "fodd/export.hpp"

#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace fodd {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

const char* sort_name(TermSort s) {
  switch (s) {
    case TermSort::Constant: return "constant";
    case TermSort::Variable: return "variable";
    case TermSort::Parameter: return "parameter";
  }
  return "variable";
}

TermSort parse_sort(const std::string& s) {
  if (s == "constant") return TermSort::Constant;
  if (s == "variable") return TermSort::Variable;
  if (s == "parameter") return TermSort::Parameter;
  throw InvariantError("unknown term sort '" + s + "'");
}

}  // namespace

std::string export_dot(Fodd b) {
  std::ostringstream o;
  o << "digraph fodd {\n";
  auto order = topological_order(b);
  for (Fodd n : order) {
    if (n.is_leaf()) {
      std::ostringstream v;
      v << n.value();
      o << "  n" << n.id() << " [shape=box, label=\"" << v.str() << "\"];\n";
    } else {
      o << "  n" << n.id() << " [shape=ellipse, label=\"" << escape(n.manager().describe(n.label())) << "\"];\n";
    }
  }
  for (Fodd n : order) {
    if (n.is_leaf()) continue;
    o << "  n" << n.id() << " -> n" << n.high().id() << " [style=solid];\n";
    o << "  n" << n.id() << " -> n" << n.low().id() << " [style=dashed];\n";
  }
  o << "}\n";
  return o.str();
}

std::string export_json(Fodd b) {
  using nlohmann::json;
  const auto& preds = b.manager().predicates();
  json nodes = json::array();
  for (Fodd n : topological_order(b)) {
    json j;
    j["id"] = n.id();
    if (n.is_leaf()) {
      j["leaf"] = n.value();
    } else {
      const Label& l = n.label();
      json args = json::array();
      for (const auto& t : l.args) args.push_back({{"sort", sort_name(t.sort)}, {"name", t.name}});
      j["label"] = {{"predicate", l.is_equality() ? std::string("=") : preds[l.predicate].name}, {"args", args}};
      j["high"] = n.high().id();
      j["low"] = n.low().id();
    }
    nodes.push_back(std::move(j));
  }
  json out{{"root", b.id()}, {"nodes", nodes}};
  return out.dump(2) + "\n";
}

Fodd import_json(std::string_view text, Manager& m) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvariantError(std::string("bad diagram JSON: ") + e.what());
  }
  try {
    std::unordered_map<NodeId, Fodd> built;
    // Nodes are listed parents first; build children before parents.
    const auto& list = j.at("nodes");
    for (auto it = list.rbegin(); it != list.rend(); ++it) {
      const json& n = *it;
      NodeId id = n.at("id").get<NodeId>();
      if (n.contains("leaf")) {
        built[id] = m.leaf(n.at("leaf").get<double>());
        continue;
      }
      const json& lj = n.at("label");
      std::vector<Term> args;
      for (const auto& a : lj.at("args"))
        args.push_back({parse_sort(a.at("sort").get<std::string>()), a.at("name").get<std::string>()});
      std::string pname = lj.at("predicate").get<std::string>();
      Label l;
      if (pname == "=") {
        if (args.size() != 2) throw InvariantError("equality needs two arguments");
        l = Label::equality(args[0], args[1]);
      } else {
        int pid = m.predicates().require(pname);
        if (args.size() != m.predicates()[pid].arity) throw InvariantError("arity mismatch for " + pname);
        l = Label::atom(pid, std::move(args));
      }
      auto hi = built.find(n.at("high").get<NodeId>());
      auto lo = built.find(n.at("low").get<NodeId>());
      if (hi == built.end() || lo == built.end()) throw InvariantError("node list is not in topological order");
      built[id] = m.ite(l, hi->second, lo->second);
    }
    auto root = built.find(j.at("root").get<NodeId>());
    if (root == built.end()) throw InvariantError("root node missing");
    return root->second;
  } catch (const json::exception& e) {
    throw InvariantError(std::string("bad diagram JSON: ") + e.what());
  }
}

}  // namespace fodd
