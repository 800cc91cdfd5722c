#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "ssfp/milp/model.hpp"

namespace ssfp::milp {

/// Syntax error in LP text, with 1-based line and column.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int column);
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// Writes the model in CPLEX LP format. Variables keep declaration order
/// (every variable is listed in the objective, zero coefficients included);
/// numbers use 17 significant digits so values survive a round trip.
/// Implied-integer markers are written as `\ implied-integer <name>` comment
/// lines, which other LP readers ignore.
std::string export_lp(const Model& model);

/// Reads the subset of CPLEX LP emitted by export_lp: one minimised
/// objective, linear rows, Bounds, Binary/Binaries and End sections.
Model parse_lp(std::string_view text);

}  // namespace ssfp::milp
