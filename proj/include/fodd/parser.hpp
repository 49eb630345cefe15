#pragma once

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fodd/interpretation.hpp"
#include "fodd/rmdp.hpp"

namespace fodd {

/// Syntax error with the 1-based position of the offending token.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

/// Model that parsed but broke one or more invariants.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

private:
  std::vector<std::string> violations_;
};

/// Parse a domain file; validate() runs unless `check` is false.
RmdpModel parse_domain(std::string_view text, bool check = true);
RmdpModel load_domain(const std::string& path, bool check = true);

/// Domain text that parses back to the same model.
std::string print_domain(const RmdpModel& model);

/// DIAG := NUMBER | (if LABEL DIAG DIAG), over the given manager's
/// predicates; tokens in `constants` are constants.
Fodd parse_diagram(std::string_view text, Manager& m, const std::set<std::string>& constants);
std::string print_diagram(Fodd b);

/// Standalone diagram file:
/// (diagram (predicates (P ARITY)...) (constants C...) DIAG).
struct DiagramFile {
  std::shared_ptr<Manager> manager;
  std::set<std::string> constants;
  Fodd diagram;
};
DiagramFile parse_diagram_file(std::string_view text);

/// (background (rule (LIT...) LIT)...) over existing predicates.
BackgroundTheory parse_background(std::string_view text, const PredicateTable& preds,
                                  const std::set<std::string>& constants);

/// (state (objects o...) (atoms (P o...)...)). Each model constant is bound
/// to the object of the same name, which is added when not listed.
Interpretation parse_state(std::string_view text, const RmdpModel& model);

/// Value diagram for a model: either JSON exported by export_json or
/// (value DIAG).
Fodd parse_value(std::string_view text, const RmdpModel& model);

std::string read_file(const std::string& path);

}  // namespace fodd
