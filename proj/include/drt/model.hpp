#pragma once

// Concrete syntax: model files with action declarations, communication
// table, named processes and specifications, and check directives.

#include <optional>
#include <string>
#include <vector>

#include "drt/equiv.hpp"
#include "drt/term.hpp"

namespace drt {

class ParseError : public TermError {
 public:
  ParseError(const std::string& msg, size_t line, size_t col)
      : TermError("line " + std::to_string(line) + ", col " +
                  std::to_string(col) + ": " + msg),
        line(line),
        col(col) {}
  size_t line, col;
};

struct CheckDirective {
  Rel rel;
  std::string rel_text;
  TermRef lhs;
  TermRef rhs;
  std::string lhs_text;
  std::string rhs_text;
  std::optional<bool> expect;
  size_t line = 0;
};

struct Model {
  ActionTable acts;
  std::vector<std::pair<std::string, TermRef>> procs;
  std::vector<std::pair<std::string, SpecRef>> specs;
  std::vector<CheckDirective> checks;

  TermRef proc(const std::string& name) const;  // named proc or spec constant
  bool has_proc(const std::string& name) const;
};

// Parses and validates a model: all names must resolve and every
// specification must pass the guardedness check.
Model parse_model(const std::string& text, unsigned guard_depth = 8);

// Parses a single term against an existing model's scope (used by tools).
TermRef parse_term(const std::string& text, Model& model);

}  // namespace drt
