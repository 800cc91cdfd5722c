#include "ssfp/milp/lp_format.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ssfp/error.hpp"

namespace ssfp::milp {

ParseError::ParseError(const std::string& message, int line, int column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

constexpr size_t kWrapColumn = 200;
constexpr const char* kImpliedDirective = "implied-integer";

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "+inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Appends " + 2 x" style terms, wrapping long rows onto indented lines.
class ExpressionWriter {
 public:
  explicit ExpressionWriter(std::string& out) : out_(out), line_start_(out.size()) {}

  void term(double coef, const std::string& name) {
    std::string piece;
    const bool first = (count_++ == 0);
    const double mag = std::abs(coef);
    const bool negative = std::signbit(coef) && coef != 0.0;
    if (first) {
      piece = negative ? "-" : "";
    } else {
      piece = negative ? " - " : " + ";
    }
    if (mag != 1.0) piece += format_number(mag) + " ";
    piece += name;
    if (out_.size() - line_start_ + piece.size() > kWrapColumn) {
      out_ += "\n  ";
      line_start_ = out_.size() - 2;
      if (!first && piece.front() == ' ') piece.erase(0, 1);
    }
    out_ += piece;
  }

 private:
  std::string& out_;
  size_t line_start_;
  int count_ = 0;
};

const char* sense_token(Sense s) {
  switch (s) {
    case Sense::kLessEqual: return "<=";
    case Sense::kEqual: return "=";
    case Sense::kGreaterEqual: return ">=";
  }
  return "=";
}

}  // namespace

std::string export_lp(const Model& model) {
  std::string out;
  out += "\\ Problem: " + (model.name().empty() ? std::string("model") : model.name()) + "\n";
  for (const Variable& v : model.variables()) {
    if (v.implied_integer) out += std::string("\\ ") + kImpliedDirective + " " + v.name + "\n";
  }

  out += "Minimize\n obj:";
  {
    if (model.num_variables() > 0) out += " ";
    ExpressionWriter w(out);
    for (const Variable& v : model.variables()) w.term(v.objective, v.name);
  }
  out += "\nSubject To\n";
  for (const Constraint& c : model.constraints()) {
    out += " " + c.name + ":";
    if (!c.terms.empty()) out += " ";
    ExpressionWriter w(out);
    for (const Term& t : c.terms) w.term(t.coef, model.variables()[static_cast<size_t>(t.var.index)].name);
    out += " ";
    out += sense_token(c.sense);
    out += " " + format_number(c.rhs) + "\n";
  }

  out += "Bounds\n";
  for (const Variable& v : model.variables()) {
    if (v.kind == VarKind::kBinary) continue;
    const bool lo_inf = std::isinf(v.lower);
    const bool hi_inf = std::isinf(v.upper);
    if (!lo_inf && v.lower == v.upper) {
      out += " " + v.name + " = " + format_number(v.lower) + "\n";
    } else if (lo_inf && hi_inf) {
      out += " " + v.name + " free\n";
    } else if (hi_inf) {
      out += " " + v.name + " >= " + format_number(v.lower) + "\n";
    } else {
      out += " " + format_number(v.lower) + " <= " + v.name + " <= " + format_number(v.upper) + "\n";
    }
  }

  out += "Binary\n";
  for (const Variable& v : model.variables()) {
    if (v.kind == VarKind::kBinary) out += " " + v.name + "\n";
  }
  out += "End\n";
  return out;
}

namespace {

enum class Section { kNone, kObjective, kConstraints, kBounds, kBinary, kEnd };

enum class TokKind { kName, kNumber, kSense, kPlus, kMinus, kColon };

struct Token {
  TokKind kind;
  std::string text;
  double number = 0.0;
  Sense sense = Sense::kEqual;
  int line = 0;
  int column = 0;
};

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '[' || c == ']' || c == '{' || c == '}' ||
         c == '!' || c == '"' || c == '#' || c == '$' || c == '%' || c == '&' || c == '(' || c == ')' ||
         c == '/' || c == ',' || c == ';' || c == '?' || c == '@' || c == '\'' || c == '`' || c == '|' || c == '~';
}

bool is_name_char(char c) { return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '.'; }

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<Section> header_of(std::string_view line) {
  const std::string l = lower(trim(line));
  if (l == "minimize" || l == "minimise" || l == "minimum" || l == "min") return Section::kObjective;
  if (l == "maximize" || l == "maximise" || l == "maximum" || l == "max") return std::nullopt;
  if (l == "subject to" || l == "such that" || l == "st" || l == "s.t.") return Section::kConstraints;
  if (l == "bounds" || l == "bound") return Section::kBounds;
  if (l == "binary" || l == "binaries" || l == "bin") return Section::kBinary;
  if (l == "end") return Section::kEnd;
  return std::nullopt;
}

bool is_infinity_word(const std::string& w) {
  const std::string l = lower(w);
  return l == "inf" || l == "infinity";
}

// Splits one line (comment already stripped) into tokens.
void tokenize(std::string_view line, int line_no, std::vector<Token>& out) {
  size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    const int col = static_cast<int>(i) + 1;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '+') {
      out.push_back({TokKind::kPlus, "+", 0, Sense::kEqual, line_no, col});
      ++i;
    } else if (c == '-') {
      out.push_back({TokKind::kMinus, "-", 0, Sense::kEqual, line_no, col});
      ++i;
    } else if (c == ':') {
      out.push_back({TokKind::kColon, ":", 0, Sense::kEqual, line_no, col});
      ++i;
    } else if (c == '<' || c == '>' || c == '=') {
      std::string op(1, c);
      if (i + 1 < line.size() && (line[i + 1] == '=' || line[i + 1] == '<' || line[i + 1] == '>')) op += line[i + 1];
      Sense s;
      if (op == "<" || op == "<=" || op == "=<") {
        s = Sense::kLessEqual;
      } else if (op == ">" || op == ">=" || op == "=>") {
        s = Sense::kGreaterEqual;
      } else if (op == "=") {
        s = Sense::kEqual;
      } else {
        throw ParseError("unknown operator '" + op + "'", line_no, col);
      }
      out.push_back({TokKind::kSense, op, 0, s, line_no, col});
      i += op.size();
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = line.data() + i;
      char* end = nullptr;
      std::string buf(line.substr(i));
      const double value = std::strtod(buf.c_str(), &end);
      const size_t len = static_cast<size_t>(end - buf.c_str());
      if (len == 0) throw ParseError("malformed number", line_no, col);
      out.push_back({TokKind::kNumber, std::string(begin, len), value, Sense::kEqual, line_no, col});
      i += len;
    } else if (is_name_start(c)) {
      size_t j = i;
      while (j < line.size() && is_name_char(line[j])) ++j;
      std::string word(line.substr(i, j - i));
      if (is_infinity_word(word)) {
        out.push_back({TokKind::kNumber, word, kInfinity, Sense::kEqual, line_no, col});
      } else {
        out.push_back({TokKind::kName, word, 0, Sense::kEqual, line_no, col});
      }
      i = j;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", line_no, col);
    }
  }
}

struct PendingVariable {
  std::string name;
  VarKind kind = VarKind::kContinuous;
  double lower = 0.0;
  double upper = kInfinity;
  double objective = 0.0;
  bool implied = false;
};

struct PendingRow {
  std::string name;
  std::vector<std::pair<int, double>> terms;
  Sense sense = Sense::kEqual;
  double rhs = 0.0;
};

class Parser {
 public:
  Model run(std::string_view text) {
    std::vector<Token> pending;  // tokens of the current objective/constraint section
    Section section = Section::kNone;
    int line_no = 0;
    size_t pos = 0;
    std::vector<std::string> implied;
    while (pos <= text.size()) {
      size_t nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      std::string_view raw = text.substr(pos, nl - pos);
      pos = nl + 1;
      ++line_no;
      if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

      const size_t comment = raw.find('\\');
      if (comment != std::string_view::npos) {
        std::string_view note = trim(raw.substr(comment + 1));
        const std::string_view directive = kImpliedDirective;
        constexpr std::string_view kProblem = "Problem:";
        if (line_no == 1 && note.substr(0, kProblem.size()) == kProblem) name_ = trim(note.substr(kProblem.size()));
        if (note.substr(0, directive.size()) == directive) {
          std::string_view name = trim(note.substr(directive.size()));
          if (name.empty()) throw ParseError("implied-integer directive without a name", line_no, static_cast<int>(comment) + 1);
          implied.emplace_back(name);
        }
        raw = raw.substr(0, comment);
      }
      if (trim(raw).empty()) {
        if (pos > text.size()) break;
        continue;
      }

      if (auto h = header_of(raw)) {
        flush(section, pending);
        section = *h;
        if (section == Section::kObjective) seen_objective_ = true;
        if (section == Section::kEnd) break;
        continue;
      }
      {
        const std::string l = lower(trim(raw));
        if (l == "maximize" || l == "maximise" || l == "maximum" || l == "max")
          throw ParseError("only minimisation is supported", line_no, 1);
        if (l == "general" || l == "generals" || l == "gen" || l == "semi-continuous" || l == "sos")
          throw ParseError("unsupported section '" + std::string(trim(raw)) + "'", line_no, 1);
      }

      switch (section) {
        case Section::kNone:
          throw ParseError("content before the objective section", line_no, 1);
        case Section::kObjective:
        case Section::kConstraints:
          tokenize(raw, line_no, pending);
          break;
        case Section::kBounds: {
          std::vector<Token> toks;
          tokenize(raw, line_no, toks);
          parse_bound(toks, line_no);
          break;
        }
        case Section::kBinary: {
          std::vector<Token> toks;
          tokenize(raw, line_no, toks);
          for (const Token& t : toks) {
            if (t.kind != TokKind::kName) throw ParseError("expected a variable name", t.line, t.column);
            PendingVariable& v = vars_[var(t.text)];
            v.kind = VarKind::kBinary;
            v.lower = 0.0;
            v.upper = 1.0;
          }
          break;
        }
        case Section::kEnd:
          break;
      }
      if (pos > text.size()) break;
    }
    flush(section, pending);
    if (!seen_objective_) throw ParseError("missing objective section", line_no, 1);

    for (const std::string& name : implied) {
      auto it = index_.find(name);
      if (it == index_.end()) throw ParseError("implied-integer marker for unknown variable " + name, 1, 1);
      vars_[static_cast<size_t>(it->second)].implied = true;
    }

    Model model(name_);
    for (const PendingVariable& v : vars_) {
      const VarId id = model.add_variable(v.name, v.kind, v.lower, v.upper, v.objective);
      if (v.implied) model.set_implied_integer(id, true);
    }
    for (PendingRow& r : rows_) {
      std::vector<Term> terms;
      terms.reserve(r.terms.size());
      for (auto [idx, coef] : r.terms) terms.push_back(Term{VarId{idx}, coef});
      model.add_constraint(std::move(r.name), std::move(terms), r.sense, r.rhs);
    }
    return model;
  }

 private:
  int var(const std::string& name) {
    auto [it, inserted] = index_.emplace(name, static_cast<int>(vars_.size()));
    if (inserted) vars_.push_back(PendingVariable{name});
    return it->second;
  }

  // Parses "[sign] [coef] name" terms from toks[i..] until a sense token or the end.
  std::vector<std::pair<int, double>> expression(const std::vector<Token>& toks, size_t& i, bool allow_end) {
    std::vector<std::pair<int, double>> terms;
    while (i < toks.size() && toks[i].kind != TokKind::kSense) {
      double sign = 1.0;
      bool saw_sign = false;
      while (i < toks.size() && (toks[i].kind == TokKind::kPlus || toks[i].kind == TokKind::kMinus)) {
        if (toks[i].kind == TokKind::kMinus) sign = -sign;
        saw_sign = true;
        ++i;
      }
      if (!terms.empty() && !saw_sign) {
        const Token& t = i < toks.size() ? toks[i] : toks.back();
        throw ParseError("expected '+' or '-' between terms", t.line, t.column);
      }
      if (i >= toks.size()) {
        const Token& t = toks.back();
        throw ParseError("dangling sign at end of expression", t.line, t.column);
      }
      double coef = 1.0;
      if (toks[i].kind == TokKind::kNumber) {
        coef = toks[i].number;
        ++i;
        if (i >= toks.size() || toks[i].kind != TokKind::kName) {
          const Token& t = toks[i - 1];
          throw ParseError("constant terms are not supported", t.line, t.column);
        }
      }
      if (toks[i].kind != TokKind::kName) throw ParseError("expected a variable name", toks[i].line, toks[i].column);
      terms.emplace_back(var(toks[i].text), sign * coef);
      ++i;
    }
    if (i >= toks.size() && !allow_end) {
      const Token& t = toks.back();
      throw ParseError("constraint has no relational operator", t.line, t.column);
    }
    return terms;
  }

  void flush(Section section, std::vector<Token>& toks) {
    if (toks.empty()) return;
    size_t i = 0;
    if (section == Section::kObjective) {
      if (toks.size() >= 2 && toks[0].kind == TokKind::kName && toks[1].kind == TokKind::kColon) i = 2;
      for (auto [idx, coef] : expression(toks, i, true)) vars_[static_cast<size_t>(idx)].objective += coef;
      if (i < toks.size()) throw ParseError("unexpected token in objective", toks[i].line, toks[i].column);
    } else if (section == Section::kConstraints) {
      while (i < toks.size()) {
        PendingRow row;
        if (i + 1 < toks.size() && toks[i].kind == TokKind::kName && toks[i + 1].kind == TokKind::kColon) {
          row.name = toks[i].text;
          i += 2;
        } else {
          row.name = "R" + std::to_string(rows_.size() + 1);
        }
        row.terms = expression(toks, i, false);
        row.sense = toks[i].sense;
        ++i;
        double sign = 1.0;
        while (i < toks.size() && (toks[i].kind == TokKind::kPlus || toks[i].kind == TokKind::kMinus)) {
          if (toks[i].kind == TokKind::kMinus) sign = -sign;
          ++i;
        }
        if (i >= toks.size() || toks[i].kind != TokKind::kNumber) {
          const Token& t = i < toks.size() ? toks[i] : toks.back();
          throw ParseError("expected a numeric right-hand side", t.line, t.column);
        }
        row.rhs = sign * toks[i].number;
        ++i;
        rows_.push_back(std::move(row));
      }
    }
    toks.clear();
  }

  // Reads an optionally signed number (or infinity) at toks[i].
  static std::optional<double> signed_number(const std::vector<Token>& toks, size_t& i) {
    double sign = 1.0;
    size_t j = i;
    while (j < toks.size() && (toks[j].kind == TokKind::kPlus || toks[j].kind == TokKind::kMinus)) {
      if (toks[j].kind == TokKind::kMinus) sign = -sign;
      ++j;
    }
    if (j < toks.size() && toks[j].kind == TokKind::kNumber) {
      i = j + 1;
      return sign * toks[j].number;
    }
    return std::nullopt;
  }

  void parse_bound(const std::vector<Token>& toks, int line_no) {
    size_t i = 0;
    auto fail = [&](const std::string& msg) {
      const Token& t = i < toks.size() ? toks[i] : toks.back();
      throw ParseError(msg, line_no, t.column);
    };
    std::optional<double> left = signed_number(toks, i);
    if (left) {
      // v <= x [<= w]  or  v >= x [>= w]
      if (i >= toks.size() || toks[i].kind != TokKind::kSense) fail("expected a relational operator");
      const Sense s1 = toks[i++].sense;
      if (i >= toks.size() || toks[i].kind != TokKind::kName) fail("expected a variable name");
      PendingVariable& v = vars_[static_cast<size_t>(var(toks[i++].text))];
      apply(v, s1 == Sense::kLessEqual ? Sense::kGreaterEqual : (s1 == Sense::kGreaterEqual ? Sense::kLessEqual : s1), *left);
      if (i < toks.size()) {
        if (toks[i].kind != TokKind::kSense) fail("expected a relational operator");
        const Sense s2 = toks[i++].sense;
        auto right = signed_number(toks, i);
        if (!right) fail("expected a number");
        apply(v, s2, *right);
      }
    } else {
      if (i >= toks.size() || toks[i].kind != TokKind::kName) fail("expected a variable name");
      PendingVariable& v = vars_[static_cast<size_t>(var(toks[i++].text))];
      if (i < toks.size() && toks[i].kind == TokKind::kName && lower(toks[i].text) == "free") {
        v.lower = -kInfinity;
        v.upper = kInfinity;
        ++i;
      } else {
        if (i >= toks.size() || toks[i].kind != TokKind::kSense) fail("expected a relational operator");
        const Sense s = toks[i++].sense;
        auto right = signed_number(toks, i);
        if (!right) fail("expected a number");
        apply(v, s, *right);
      }
    }
    if (i != toks.size()) fail("trailing tokens in bound");
  }

  // Applies "x <sense> value".
  static void apply(PendingVariable& v, Sense s, double value) {
    switch (s) {
      case Sense::kLessEqual: v.upper = value; break;
      case Sense::kGreaterEqual: v.lower = value; break;
      case Sense::kEqual: v.lower = v.upper = value; break;
    }
  }

  std::vector<PendingVariable> vars_;
  std::unordered_map<std::string, int> index_;
  std::vector<PendingRow> rows_;
  std::string name_;
  bool seen_objective_ = false;
};

}  // namespace

Model parse_lp(std::string_view text) {
  Parser p;
  try {
    return p.run(text);
  } catch (const ValidationError& e) {
    throw ParseError(e.what(), 0, 0);
  }
}

}  // namespace ssfp::milp
