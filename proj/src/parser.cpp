#include "fodd/parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "fodd/export.hpp"

namespace fodd {

ParseError::ParseError(const std::string& msg, int line, int column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

namespace {

std::string join_violations(const std::vector<std::string>& v) {
  std::string out = "model is invalid:";
  for (const auto& s : v) out += "\n  " + s;
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::runtime_error(join_violations(violations)), violations_(std::move(violations)) {}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

struct SExpr {
  bool list = false;
  std::string atom;
  std::vector<SExpr> items;
  SourcePos pos;

  bool is(std::string_view word) const { return !list && atom == word; }
  bool headed(std::string_view word) const { return list && !items.empty() && items[0].is(word); }
};

[[noreturn]] void fail(const SExpr& at, const std::string& msg) { throw ParseError(msg, at.pos.line, at.pos.column); }

class Reader {
public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    skip();
    while (i_ < text_.size()) {
      out.push_back(read());
      skip();
    }
    return out;
  }

private:
  void advance() {
    if (text_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip() {
    while (i_ < text_.size()) {
      char c = text_[i_];
      if (c == ';') {
        while (i_ < text_.size() && text_[i_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read() {
    SExpr e;
    e.pos = {line_, col_};
    char c = text_[i_];
    if (c == ')') throw ParseError("unexpected ')'", line_, col_);
    if (c == '(') {
      e.list = true;
      advance();
      while (true) {
        skip();
        if (i_ >= text_.size()) throw ParseError("unterminated list", e.pos.line, e.pos.column);
        if (text_[i_] == ')') {
          advance();
          break;
        }
        e.items.push_back(read());
      }
      return e;
    }
    std::size_t start = i_;
    while (i_ < text_.size()) {
      char d = text_[i_];
      if (d == '(' || d == ')' || d == ';' || std::isspace(static_cast<unsigned char>(d))) break;
      advance();
    }
    e.atom = std::string(text_.substr(start, i_ - start));
    return e;
  }

  std::string_view text_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

SExpr read_one(std::string_view text, std::string_view head) {
  auto all = Reader(text).read_all();
  if (all.empty()) throw ParseError("empty input", 1, 1);
  if (all.size() > 1) fail(all[1], "unexpected trailing form");
  if (!all[0].headed(head)) fail(all[0], "expected (" + std::string(head) + " ...)");
  return all[0];
}

const std::string& atom_of(const SExpr& e, const char* what) {
  if (e.list) fail(e, std::string("expected ") + what);
  return e.atom;
}

double number_of(const SExpr& e) {
  const std::string& s = atom_of(e, "a number");
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) fail(e, "expected a number, got '" + s + "'");
  return v;
}

/// Term classification and label/diagram construction over one manager.
struct Builder {
  Manager& m;
  const std::set<std::string>& constants;

  Term term(const SExpr& e) const {
    const std::string& s = atom_of(e, "a term");
    if (s.size() > 1 && s.back() == '*') return Term::parameter(s);
    if (constants.contains(s)) return Term::constant(s);
    return Term::variable(s);
  }

  Label label(const SExpr& e) const {
    if (!e.list || e.items.empty()) fail(e, "expected a label (P TERM...) or (= TERM TERM)");
    const std::string& head = atom_of(e.items[0], "a predicate name");
    if (head == "=") {
      if (e.items.size() != 3) fail(e, "equality takes two terms");
      return Label::equality(term(e.items[1]), term(e.items[2]));
    }
    auto pid = m.predicates().find(head);
    if (!pid) fail(e.items[0], "unknown predicate '" + head + "'");
    std::vector<Term> args;
    for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(term(e.items[i]));
    if (args.size() != m.predicates()[*pid].arity)
      fail(e, "predicate " + head + " expects " + std::to_string(m.predicates()[*pid].arity) + " arguments");
    return Label::atom(*pid, std::move(args));
  }

  Literal literal(const SExpr& e) const {
    if (e.headed("not")) {
      if (e.items.size() != 2) fail(e, "(not LABEL) takes one label");
      return {label(e.items[1]), false};
    }
    return {label(e), true};
  }

  Fodd diagram(const SExpr& e) const {
    if (!e.list) {
      double v = number_of(e);
      if (v < 0) fail(e, "negative leaf " + e.atom);
      return m.leaf(v);
    }
    if (!e.headed("if") || e.items.size() != 4) fail(e, "expected NUMBER or (if LABEL DIAG DIAG)");
    Label l = label(e.items[1]);
    return m.ite(l, diagram(e.items[2]), diagram(e.items[3]));
  }

  Rule rule(const SExpr& e) const {
    if (!e.headed("rule") || e.items.size() != 3 || !e.items[1].list) fail(e, "expected (rule (LIT...) LIT)");
    Rule r;
    for (const auto& l : e.items[1].items) r.body.push_back(literal(l));
    const SExpr* head = &e.items[2];
    if (head->headed("exists")) {
      if (head->items.size() != 3 || !head->items[1].list) fail(*head, "expected (exists (VAR...) LIT)");
      for (const auto& v : head->items[1].items) {
        Term t = term(v);
        if (!t.is_variable()) fail(v, "existential binds variables only");
        r.existential.insert(t);
      }
      head = &head->items[2];
    }
    r.head = literal(*head);
    return r;
  }
};

void parse_predicates(const SExpr& sec, PredicateTable& preds) {
  for (std::size_t i = 1; i < sec.items.size(); ++i) {
    const SExpr& d = sec.items[i];
    if (!d.list || d.items.size() < 2) fail(d, "expected (P ARITY sort...)");
    PredicateDecl decl;
    decl.name = atom_of(d.items[0], "a predicate name");
    if (decl.name == "=" || decl.name == "not" || decl.name == "if") fail(d.items[0], "reserved predicate name");
    double a = number_of(d.items[1]);
    if (a < 0 || a != std::floor(a)) fail(d.items[1], "arity must be a non-negative integer");
    decl.arity = static_cast<std::size_t>(a);
    for (std::size_t k = 2; k < d.items.size(); ++k) decl.sorts.push_back(atom_of(d.items[k], "a sort name"));
    if (!decl.sorts.empty() && decl.sorts.size() != decl.arity) fail(d, "sort list length differs from arity");
    if (preds.find(decl.name)) fail(d.items[0], "duplicate predicate '" + decl.name + "'");
    preds.add(std::move(decl));
  }
}

void parse_constants(const SExpr& sec, RmdpModel& model) {
  for (std::size_t i = 1; i < sec.items.size(); ++i) {
    const SExpr& c = sec.items[i];
    std::string name;
    if (c.list) {
      if (c.items.size() != 2) fail(c, "expected C or (C sort)");
      name = atom_of(c.items[0], "a constant");
      model.constant_sorts[name] = atom_of(c.items[1], "a sort name");
    } else {
      name = c.atom;
    }
    if (name.empty() || name.back() == '*') fail(c, "constant names cannot end in '*'");
    for (const auto& existing : model.constants)
      if (existing == name) fail(c, "duplicate constant '" + name + "'");
    model.constants.push_back(name);
  }
}

BackgroundTheory background_section(const SExpr& sec, const Builder& b) {
  BackgroundTheory theory;
  for (std::size_t i = 1; i < sec.items.size(); ++i) {
    const SExpr& r = sec.items[i];
    if (r.headed("depth")) {
      if (r.items.size() != 2) fail(r, "expected (depth N)");
      theory.depth = static_cast<int>(number_of(r.items[1]));
      continue;
    }
    theory.rules.push_back(b.rule(r));
  }
  return theory;
}

ActionSchema parse_action(const SExpr& sec, const Builder& b) {
  if (sec.items.size() < 2) fail(sec, "expected (action NAME ...)");
  ActionSchema a;
  a.name = atom_of(sec.items[1], "an action name");
  a.pos = sec.pos;
  std::vector<std::pair<std::string, const SExpr*>> probs;
  for (std::size_t i = 2; i < sec.items.size(); ++i) {
    const SExpr& part = sec.items[i];
    if (part.headed("params")) {
      for (std::size_t k = 1; k < part.items.size(); ++k) {
        Term t = b.term(part.items[k]);
        if (!t.is_parameter()) fail(part.items[k], "action parameters must end in '*'");
        a.params.push_back(t);
      }
    } else if (part.headed("alternative")) {
      if (part.items.size() < 2) fail(part, "expected (alternative NAME (tvd ...)...)");
      Alternative alt;
      alt.name = atom_of(part.items[1], "an alternative name");
      alt.pos = part.pos;
      for (std::size_t k = 2; k < part.items.size(); ++k) {
        const SExpr& t = part.items[k];
        if (!t.headed("tvd") || t.items.size() != 4 || !t.items[2].list) fail(t, "expected (tvd P (x...) DIAG)");
        const std::string& pname = atom_of(t.items[1], "a predicate name");
        auto pid = b.m.predicates().find(pname);
        if (!pid) fail(t.items[1], "unknown predicate '" + pname + "'");
        if (alt.tvds.contains(*pid)) fail(t, "second TVD for " + pname);
        Tvd tvd;
        tvd.predicate = *pid;
        tvd.pos = t.pos;
        for (const auto& x : t.items[2].items) tvd.params.push_back(b.term(x));
        tvd.diagram = b.diagram(t.items[3]);
        alt.tvds.emplace(*pid, std::move(tvd));
      }
      a.alternatives.push_back(std::move(alt));
    } else if (part.headed("prob")) {
      if (part.items.size() != 3) fail(part, "expected (prob ALT DIAG)");
      probs.emplace_back(atom_of(part.items[1], "an alternative name"), &part);
    } else {
      fail(part, "expected (params ...), (alternative ...) or (prob ...)");
    }
  }
  for (const auto& [name, e] : probs) {
    Alternative* target = nullptr;
    for (auto& alt : a.alternatives)
      if (alt.name == name) target = &alt;
    if (!target) fail(*e, "probability for unknown alternative '" + name + "'");
    if (target->prob.valid()) fail(*e, "second probability for alternative '" + name + "'");
    target->prob = b.diagram(e->items[2]);
  }
  return a;
}

}  // namespace

RmdpModel parse_domain(std::string_view text, bool check) {
  SExpr top = read_one(text, "domain");
  if (top.items.size() < 2) fail(top, "expected (domain NAME ...)");
  RmdpModel model;
  model.name = atom_of(top.items[1], "a domain name");
  PredicateTable preds;
  for (std::size_t i = 2; i < top.items.size(); ++i) {
    const SExpr& sec = top.items[i];
    if (sec.headed("predicates")) parse_predicates(sec, preds);
    if (sec.headed("constants")) parse_constants(sec, model);
  }
  model.manager = std::make_shared<Manager>(std::move(preds));
  std::set<std::string> constants(model.constants.begin(), model.constants.end());
  Builder b{*model.manager, constants};
  bool seen_reward = false;
  for (std::size_t i = 2; i < top.items.size(); ++i) {
    const SExpr& sec = top.items[i];
    if (sec.headed("predicates") || sec.headed("constants")) continue;
    if (sec.headed("discount")) {
      if (sec.items.size() != 2) fail(sec, "expected (discount G)");
      model.discount = number_of(sec.items[1]);
    } else if (sec.headed("absorbing")) {
      model.absorbing = true;
    } else if (sec.headed("background")) {
      model.background = background_section(sec, b);
    } else if (sec.headed("reward")) {
      if (sec.items.size() != 2) fail(sec, "expected (reward DIAG)");
      if (seen_reward) fail(sec, "second reward");
      model.reward_pos = sec.pos;
      model.reward = b.diagram(sec.items[1]);
      seen_reward = true;
    } else if (sec.headed("action")) {
      model.actions.push_back(parse_action(sec, b));
    } else {
      fail(sec, "unknown section");
    }
  }
  if (!seen_reward) fail(top, "domain has no reward");
  if (check) {
    auto v = validate(model);
    if (!v.empty()) throw ValidationError(std::move(v));
  }
  return model;
}

RmdpModel load_domain(const std::string& path, bool check) { return parse_domain(read_file(path), check); }

namespace {

std::string number_text(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

std::string label_text(const Label& l, const PredicateTable& preds) {
  std::string out = "(" + (l.is_equality() ? std::string("=") : preds[l.predicate].name);
  for (const auto& a : l.args) out += " " + a.name;
  return out + ")";
}

std::string literal_text(const Literal& l, const PredicateTable& preds) {
  return l.positive ? label_text(l.label, preds) : "(not " + label_text(l.label, preds) + ")";
}

void diagram_text(Fodd b, std::string& out) {
  if (b.is_leaf()) {
    out += number_text(b.value());
    return;
  }
  out += "(if " + label_text(b.label(), b.manager().predicates()) + " ";
  diagram_text(b.high(), out);
  out += " ";
  diagram_text(b.low(), out);
  out += ")";
}

}  // namespace

std::string print_diagram(Fodd b) {
  std::string out;
  diagram_text(b, out);
  return out;
}

std::string print_domain(const RmdpModel& model) {
  const auto& preds = model.predicates();
  std::ostringstream o;
  o << "(domain " << model.name << "\n  (predicates";
  for (const auto& d : preds.decls()) {
    o << " (" << d.name << " " << d.arity;
    for (const auto& s : d.sorts) o << " " << s;
    o << ")";
  }
  o << ")\n";
  if (!model.constants.empty()) {
    o << "  (constants";
    for (const auto& c : model.constants) {
      auto it = model.constant_sorts.find(c);
      if (it == model.constant_sorts.end())
        o << " " << c;
      else
        o << " (" << c << " " << it->second << ")";
    }
    o << ")\n";
  }
  o << "  (discount " << number_text(model.discount) << ")\n";
  if (model.absorbing) o << "  (absorbing)\n";
  if (!model.background.empty()) {
    o << "  (background (depth " << model.background.depth << ")";
    for (const auto& r : model.background.rules) {
      o << "\n    (rule (";
      for (std::size_t i = 0; i < r.body.size(); ++i) o << (i ? " " : "") << literal_text(r.body[i], preds);
      o << ") ";
      if (r.existential.empty()) {
        o << literal_text(r.head, preds);
      } else {
        o << "(exists (";
        bool first = true;
        for (const auto& v : r.existential) {
          o << (first ? "" : " ") << v.name;
          first = false;
        }
        o << ") " << literal_text(r.head, preds) << ")";
      }
      o << ")";
    }
    o << ")\n";
  }
  o << "  (reward " << print_diagram(model.reward) << ")\n";
  for (const auto& a : model.actions) {
    o << "  (action " << a.name << "\n    (params";
    for (const auto& p : a.params) o << " " << p.name;
    o << ")";
    for (const auto& alt : a.alternatives) {
      o << "\n    (alternative " << alt.name;
      for (const auto& [pid, tvd] : alt.tvds) {
        o << "\n      (tvd " << preds[pid].name << " (";
        for (std::size_t i = 0; i < tvd.params.size(); ++i) o << (i ? " " : "") << tvd.params[i].name;
        o << ") " << print_diagram(tvd.diagram) << ")";
      }
      o << ")";
    }
    for (const auto& alt : a.alternatives)
      if (alt.prob.valid()) o << "\n    (prob " << alt.name << " " << print_diagram(alt.prob) << ")";
    o << ")\n";
  }
  o << ")\n";
  return o.str();
}

Fodd parse_diagram(std::string_view text, Manager& m, const std::set<std::string>& constants) {
  auto all = Reader(text).read_all();
  if (all.size() != 1) throw ParseError("expected exactly one diagram", 1, 1);
  return Builder{m, constants}.diagram(all[0]);
}

DiagramFile parse_diagram_file(std::string_view text) {
  SExpr top = read_one(text, "diagram");
  PredicateTable preds;
  DiagramFile out;
  const SExpr* body = nullptr;
  for (std::size_t i = 1; i < top.items.size(); ++i) {
    const SExpr& sec = top.items[i];
    if (sec.headed("predicates")) {
      parse_predicates(sec, preds);
    } else if (sec.headed("constants")) {
      for (std::size_t k = 1; k < sec.items.size(); ++k) out.constants.insert(atom_of(sec.items[k], "a constant"));
    } else {
      if (body) fail(sec, "second diagram");
      body = &sec;
    }
  }
  if (!body) fail(top, "diagram file has no diagram");
  out.manager = std::make_shared<Manager>(std::move(preds));
  out.diagram = Builder{*out.manager, out.constants}.diagram(*body);
  return out;
}

BackgroundTheory parse_background(std::string_view text, const PredicateTable& preds,
                                  const std::set<std::string>& constants) {
  SExpr top = read_one(text, "background");
  Manager scratch(preds);
  return background_section(top, Builder{scratch, constants});
}

Interpretation parse_state(std::string_view text, const RmdpModel& model) {
  SExpr top = read_one(text, "state");
  std::vector<std::string> objects;
  const SExpr* atoms = nullptr;
  for (std::size_t i = 1; i < top.items.size(); ++i) {
    const SExpr& sec = top.items[i];
    if (sec.headed("objects")) {
      for (std::size_t k = 1; k < sec.items.size(); ++k) {
        const std::string& o = atom_of(sec.items[k], "an object name");
        for (const auto& existing : objects)
          if (existing == o) fail(sec.items[k], "duplicate object '" + o + "'");
        objects.push_back(o);
      }
    } else if (sec.headed("atoms")) {
      atoms = &sec;
    } else {
      fail(sec, "expected (objects ...) or (atoms ...)");
    }
  }
  for (const auto& c : model.constants) {
    bool listed = false;
    for (const auto& o : objects) listed = listed || o == c;
    if (!listed) objects.push_back(c);
  }
  if (objects.empty()) fail(top, "state has no objects");
  const auto& preds = model.predicates();
  Interpretation interp(preds, objects);
  for (const auto& c : model.constants) interp.bind(c, *interp.element(c));
  if (atoms) {
    for (std::size_t k = 1; k < atoms->items.size(); ++k) {
      const SExpr& a = atoms->items[k];
      if (!a.list || a.items.empty()) fail(a, "expected (P o...)");
      const std::string& pname = atom_of(a.items[0], "a predicate name");
      auto pid = preds.find(pname);
      if (!pid) fail(a.items[0], "unknown predicate '" + pname + "'");
      if (a.items.size() - 1 != preds[*pid].arity) fail(a, "wrong number of arguments for " + pname);
      std::vector<int> args;
      for (std::size_t j = 1; j < a.items.size(); ++j) {
        const std::string& o = atom_of(a.items[j], "an object");
        auto e = interp.element(o);
        if (!e) fail(a.items[j], "unknown object '" + o + "'");
        args.push_back(*e);
      }
      interp.set(*pid, args);
    }
  }
  return interp;
}

Fodd parse_value(std::string_view text, const RmdpModel& model) {
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return import_json(text, model.mgr());
  SExpr top = read_one(text, "value");
  if (top.items.size() != 2) fail(top, "expected (value DIAG)");
  std::set<std::string> constants(model.constants.begin(), model.constants.end());
  return Builder{model.mgr(), constants}.diagram(top.items[1]);
}

}  // namespace fodd
