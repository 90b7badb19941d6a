#include "osq/dsl.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <string>

#include "osq/gates.hpp"
#include "osq/operators.hpp"

namespace osq::dsl {

namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

struct Token {
  enum class Kind { ident, number, punct };
  Kind kind = Kind::punct;
  std::string text;
  int line = 1;
  int col = 1;  // 1-based byte offset into the (CR-stripped) line

  // number payload
  Complex value{0.0, 0.0};
  bool pure_int = false;  // text matches [+-]?[0-9]+
  bool int_ok = false;    // int_value holds the label/dim value
  long long int_value = 0;
};

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

SourceSpan token_span(const Token& t) {
  return SourceSpan{t.line, t.col, static_cast<int>(t.text.size())};
}

std::string describe_char(char c) {
  if (c >= 0x20 && c < 0x7f) return std::string("'") + c + "'";
  char buf[16];
  std::snprintf(buf, sizeof buf, "byte 0x%02X", static_cast<unsigned char>(c));
  return buf;
}

// End index of a float literal starting at i ([+-]? digits [. digits?] |
// [+-]? . digits, optional exponent), or npos if none starts here.
std::size_t scan_float(std::string_view s, std::size_t i) {
  std::size_t j = i;
  if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
  std::size_t digits = 0;
  while (j < s.size() && is_digit(s[j])) ++j, ++digits;
  if (j < s.size() && s[j] == '.') {
    ++j;
    while (j < s.size() && is_digit(s[j])) ++j, ++digits;
  }
  if (digits == 0) return std::string_view::npos;
  if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
    std::size_t k = j + 1;
    if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
    std::size_t exp_digits = 0;
    while (k < s.size() && is_digit(s[k])) ++k, ++exp_digits;
    if (exp_digits > 0) j = k;  // otherwise leave the 'e' for the next token
  }
  return j;
}

// Parses s[begin, end) as a double; a leading '+' is skipped because
// std::from_chars does not accept one.  Returns false on overflow.
bool parse_double(std::string_view s, std::size_t begin, std::size_t end,
                  double& out) {
  if (begin < end && s[begin] == '+') ++begin;
  const char* first = s.data() + begin;
  const char* last = s.data() + end;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

bool float_is_pure_int(std::string_view text) {
  std::size_t i = 0;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) ++i;
  if (i == text.size()) return false;
  for (; i < text.size(); ++i) {
    if (!is_digit(text[i])) return false;
  }
  return true;
}

// Lexes one (CR-stripped) line.  Returns false after emitting a diagnostic;
// the caller skips the line but keeps parsing the rest of the file.
bool lex_line(std::string_view line, int line_no, std::vector<Token>& out,
              std::vector<Diagnostic>& diags) {
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == ' ' || c == '\t') {
      ++i;
      continue;
    }
    if (c == '#') break;  // comment to end of line
    if (is_ident_start(c)) {
      std::size_t j = i + 1;
      while (j < line.size() && is_ident_char(line[j])) ++j;
      Token t;
      t.kind = Token::Kind::ident;
      t.text = std::string(line.substr(i, j - i));
      t.line = line_no;
      t.col = static_cast<int>(i) + 1;
      out.push_back(std::move(t));
      i = j;
      continue;
    }
    if (c == '(' || c == ')' || c == '[' || c == ']' || c == '=' || c == ',') {
      Token t;
      t.kind = Token::Kind::punct;
      t.text = std::string(1, c);
      t.line = line_no;
      t.col = static_cast<int>(i) + 1;
      out.push_back(std::move(t));
      ++i;
      continue;
    }
    const std::size_t real_end = scan_float(line, i);
    if (real_end != std::string_view::npos) {
      Token t;
      t.kind = Token::Kind::number;
      t.line = line_no;
      t.col = static_cast<int>(i) + 1;

      double real = 0.0;
      bool ok = parse_double(line, i, real_end, real);
      double imag = 0.0;
      std::size_t end = real_end;
      bool has_imag = false;
      if (real_end < line.size() &&
          (line[real_end] == '+' || line[real_end] == '-')) {
        const std::size_t imag_end = scan_float(line, real_end);
        if (imag_end != std::string_view::npos && imag_end < line.size() &&
            line[imag_end] == 'i') {
          ok = ok && parse_double(line, real_end, imag_end, imag);
          end = imag_end + 1;
          has_imag = true;
        }
      }
      t.text = std::string(line.substr(i, end - i));
      if (!ok) {
        diags.push_back({Severity::error, "numeric literal out of range",
                         token_span(t)});
        return false;
      }
      t.value = Complex(real, imag);
      if (!has_imag && float_is_pure_int(t.text)) {
        t.pure_int = true;
        std::string_view digits(t.text);
        std::size_t begin = (digits[0] == '+') ? 1 : 0;
        auto [ptr, ec] = std::from_chars(digits.data() + begin,
                                         digits.data() + digits.size(),
                                         t.int_value);
        t.int_ok = (ec == std::errc{} && ptr == digits.data() + digits.size());
      }
      out.push_back(std::move(t));
      i = end;
      continue;
    }
    diags.push_back({Severity::error,
                     "unexpected character " + describe_char(c),
                     SourceSpan{line_no, static_cast<int>(i) + 1, 1}});
    return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Line parser
// ---------------------------------------------------------------------------

class LineParser {
 public:
  LineParser(const std::vector<Token>& tokens, int line, int line_len,
             std::vector<Diagnostic>& diags)
      : tokens_(tokens), line_(line), line_len_(line_len), diags_(diags) {}

  const Token* peek() const {
    return pos_ < tokens_.size() ? &tokens_[pos_] : nullptr;
  }
  const Token* take() { return pos_ < tokens_.size() ? &tokens_[pos_++] : nullptr; }

  SourceSpan here() const {
    if (const Token* t = peek()) return token_span(*t);
    return SourceSpan{line_, line_len_ + 1, 0};
  }

  void fail(const std::string& message) {
    diags_.push_back({Severity::error, message, here()});
  }

  void fail_at(const SourceSpan& span, const std::string& message) {
    diags_.push_back({Severity::error, message, span});
  }

  const Token* expect_ident(const std::string& what) {
    const Token* t = peek();
    if (!t || t->kind != Token::Kind::ident) {
      fail("expected " + what);
      return nullptr;
    }
    return take();
  }

  bool expect_keyword(const std::string& keyword) {
    const Token* t = peek();
    if (!t || t->kind != Token::Kind::ident || t->text != keyword) {
      fail("expected '" + keyword + "'");
      return false;
    }
    take();
    return true;
  }

  bool expect_punct(char c) {
    const Token* t = peek();
    if (!t || t->kind != Token::Kind::punct || t->text[0] != c) {
      fail(std::string("expected '") + c + "'");
      return false;
    }
    take();
    return true;
  }

  bool at_punct(char c) const {
    const Token* t = peek();
    return t && t->kind == Token::Kind::punct && t->text[0] == c;
  }

  const Token* expect_number(const std::string& what) {
    const Token* t = peek();
    if (!t || t->kind != Token::Kind::number) {
      fail("expected " + what);
      return nullptr;
    }
    return take();
  }

  // Emits a diagnostic if tokens remain; returns true when the line is clean.
  bool finish() {
    if (peek()) {
      fail("unexpected trailing tokens");
      return false;
    }
    return true;
  }

  SourceSpan span_from(const Token& first) const {
    const Token& last = tokens_.back();
    return SourceSpan{first.line, first.col,
                      last.col + static_cast<int>(last.text.size()) -
                          first.col};
  }

 private:
  const std::vector<Token>& tokens_;
  std::size_t pos_ = 0;
  int line_;
  int line_len_;
  std::vector<Diagnostic>& diags_;
};

bool expect_int_token(const Token& t, const std::string& what, int& out,
                      std::vector<Diagnostic>& diags) {
  if (!t.pure_int) {
    diags.push_back({Severity::error, "expected " + what, token_span(t)});
    return false;
  }
  if (!t.int_ok || t.int_value > std::numeric_limits<int>::max() ||
      t.int_value < std::numeric_limits<int>::min()) {
    diags.push_back(
        {Severity::error, "integer out of range", token_span(t)});
    return false;
  }
  out = static_cast<int>(t.int_value);
  return true;
}

bool parse_basis_ident(LineParser& lp, Basis& out) {
  const Token* t = lp.peek();
  if (!t || t->kind != Token::Kind::ident ||
      (t->text != "number" && t->text != "phase")) {
    lp.fail("expected 'number' or 'phase'");
    return false;
  }
  out = (t->text == "number") ? Basis::number : Basis::phase;
  lp.take();
  return true;
}

const std::set<std::string>& gate_names() {
  static const std::set<std::string> names = {"X",   "Z", "F",    "SUM",
                                              "D",   "S", "KERR", "CUSTOM"};
  return names;
}

// ---------------------------------------------------------------------------
// Per-construct parsers (the leading keyword token is already consumed)
// ---------------------------------------------------------------------------

bool parse_header(LineParser& lp, const Token& first, CircuitAST& ast,
                  std::vector<Diagnostic>& diags) {
  const Token* value = lp.expect_number("dimension");
  if (!value) return false;
  int dim = 0;
  if (!expect_int_token(*value, "integer dimension", dim, diags)) {
    return false;
  }
  if (!lp.finish()) return false;
  ast.dim = dim;
  ast.dim_span = lp.span_from(first);
  return true;
}

bool parse_declaration(LineParser& lp, const Token& first, CircuitAST& ast,
                       std::vector<Diagnostic>& diags) {
  Declaration decl;
  const Token* name = lp.expect_ident("qudit name");
  if (!name) return false;
  decl.name = name->text;
  if (!lp.expect_keyword("encoding") || !lp.expect_punct('=')) return false;
  if (!parse_basis_ident(lp, decl.encoding)) return false;
  if (!lp.expect_keyword("init") || !lp.expect_punct('=')) return false;

  if (lp.at_punct('[')) {
    lp.take();
    VectorLiteral vec;
    while (true) {
      const Token* entry = lp.expect_number("amplitude");
      if (!entry) return false;
      vec.entries.push_back(entry->value);
      if (lp.at_punct(',')) {
        lp.take();
        continue;
      }
      break;
    }
    if (!lp.expect_punct(']')) return false;
    decl.init = std::move(vec);
  } else {
    const Token* label = lp.expect_number("integer label or vector literal");
    if (!label) return false;
    int value = 0;
    if (!expect_int_token(*label, "integer label or vector literal", value,
                          diags)) {
      return false;
    }
    decl.init = value;
  }
  if (!lp.finish()) return false;
  decl.span = lp.span_from(first);
  ast.declarations.push_back(std::move(decl));
  return true;
}

bool parse_gate(LineParser& lp, const Token& first, CircuitAST& ast) {
  GateStmt stmt;
  const Token* name = lp.expect_ident("gate name");
  if (!name) return false;
  if (!gate_names().count(name->text)) {
    lp.fail_at(token_span(*name), "unknown gate '" + name->text + "'");
    return false;
  }
  stmt.gate = name->text;

  if (lp.at_punct('(')) {
    lp.take();
    while (true) {
      const Token* key = lp.expect_ident("parameter name");
      if (!key) return false;
      if (!lp.expect_punct('=')) return false;
      const Token* value = lp.expect_number("parameter value");
      if (!value) return false;
      stmt.params.push_back({key->text, value->value, token_span(*key)});
      if (lp.at_punct(',')) {
        lp.take();
        continue;
      }
      break;
    }
    if (!lp.expect_punct(')')) return false;
  }

  const Token* operand = lp.expect_ident("operand");
  if (!operand) return false;
  stmt.operands.push_back(operand->text);
  if (const Token* t = lp.peek(); t && t->kind == Token::Kind::ident) {
    stmt.operands.push_back(t->text);
    lp.take();
  }
  if (!lp.finish()) return false;
  stmt.span = lp.span_from(first);
  ast.statements.push_back(std::move(stmt));
  return true;
}

bool parse_measure(LineParser& lp, const Token& first, CircuitAST& ast) {
  MeasureStmt stmt;
  const Token* operand = lp.expect_ident("operand");
  if (!operand) return false;
  stmt.operand = operand->text;
  if (!lp.expect_keyword("basis") || !lp.expect_punct('=')) return false;
  if (!parse_basis_ident(lp, stmt.basis)) return false;
  if (!lp.finish()) return false;
  stmt.span = lp.span_from(first);
  ast.statements.push_back(std::move(stmt));
  return true;
}

bool parse_loss(LineParser& lp, const Token& first, CircuitAST& ast) {
  LossStmt stmt;
  const Token* operand = lp.expect_ident("operand");
  if (!operand) return false;
  stmt.operand = operand->text;
  if (!lp.expect_keyword("gamma_t") || !lp.expect_punct('=')) return false;
  const Token* value = lp.expect_number("real number");
  if (!value) return false;
  if (value->value.imag() != 0.0) {
    lp.fail("expected real number");
    return false;
  }
  stmt.gamma_t = value->value.real();
  if (!lp.finish()) return false;
  stmt.span = lp.span_from(first);
  ast.statements.push_back(std::move(stmt));
  return true;
}

// ---------------------------------------------------------------------------
// Number formatting (canonical unparse)
// ---------------------------------------------------------------------------

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_complex(Complex c) {
  std::string s = format_double(c.real());
  if (c.imag() != 0.0) {
    s += (c.imag() < 0.0) ? '-' : '+';
    s += format_double(std::abs(c.imag()));
    s += 'i';
  }
  return s;
}

const char* basis_keyword(Basis b) {
  return b == Basis::phase ? "phase" : "number";
}

// ---------------------------------------------------------------------------
// Validation helpers
// ---------------------------------------------------------------------------

// Parses a CUSTOM parameter key of the form m<row>_<col>.
bool parse_custom_key(const std::string& key, int& row, int& col) {
  if (key.size() < 4 || key[0] != 'm') return false;
  const std::size_t underscore = key.find('_', 1);
  if (underscore == std::string::npos || underscore == 1 ||
      underscore + 1 >= key.size()) {
    return false;
  }
  const auto parse_part = [&](std::size_t begin, std::size_t end, int& out) {
    for (std::size_t i = begin; i < end; ++i) {
      if (!is_digit(key[i])) return false;
    }
    auto [ptr, ec] = std::from_chars(key.data() + begin, key.data() + end, out);
    return ec == std::errc{} && ptr == key.data() + end;
  };
  return parse_part(1, underscore, row) &&
         parse_part(underscore + 1, key.size(), col);
}

struct GateRules {
  std::size_t operand_count;
  std::vector<std::string> required_params;  // exact set unless custom
};

const std::map<std::string, GateRules>& gate_rules() {
  static const std::map<std::string, GateRules> rules = {
      {"X", {1, {}}},          {"Z", {1, {}}},
      {"F", {1, {}}},          {"SUM", {2, {}}},
      {"D", {1, {"alpha"}}},   {"S", {1, {"zeta"}}},
      {"KERR", {1, {"kappa_t"}}},
      {"CUSTOM", {1, {}}},  // parameter set handled separately
  };
  return rules;
}

// Largest CUSTOM matrix the validator will materialize for a unitarity check.
constexpr long long kCustomEntryLimit = 1LL << 22;

// Builds the CUSTOM matrix from m<r>_<c> params, emitting diagnostics into
// `diags`.  Returns std::nullopt when anything is wrong.
std::optional<CMat> custom_matrix(const GateStmt& stmt, int dim,
                                  std::vector<Diagnostic>* diags) {
  bool bad = false;
  const auto report = [&](const std::string& message, const SourceSpan& span) {
    bad = true;
    if (diags) diags->push_back({Severity::error, message, span});
  };
  if (static_cast<long long>(dim) * dim > kCustomEntryLimit) {
    report("CUSTOM gate matrix too large to validate at dim " +
               std::to_string(dim),
           stmt.span);
    return std::nullopt;
  }
  CMat u = CMat::Zero(dim, dim);
  std::vector<bool> seen(static_cast<std::size_t>(dim) * dim, false);
  for (const Param& p : stmt.params) {
    int row = 0, col = 0;
    if (!parse_custom_key(p.key, row, col)) {
      report("unknown parameter '" + p.key + "' for gate CUSTOM", p.span);
      continue;
    }
    if (row < 0 || row >= dim || col < 0 || col >= dim) {
      report("parameter '" + p.key + "' out of range for dim " +
                 std::to_string(dim),
             p.span);
      continue;
    }
    const std::size_t flat = static_cast<std::size_t>(row) * dim + col;
    if (seen[flat]) {
      report("duplicate parameter '" + p.key + "'", p.span);
      continue;
    }
    seen[flat] = true;
    u(row, col) = p.value;
  }
  for (int r = 0; r < dim && !bad; ++r) {
    for (int c = 0; c < dim; ++c) {
      if (!seen[static_cast<std::size_t>(r) * dim + c]) {
        report("gate CUSTOM requires all " + std::to_string(dim) + "x" +
                   std::to_string(dim) + " entries; missing 'm" +
                   std::to_string(r) + "_" + std::to_string(c) + "'",
               stmt.span);
        break;
      }
    }
  }
  if (bad) return std::nullopt;
  const double defect = unitarity_defect(u);
  if (defect > 1e-8) {
    report("CUSTOM parameters do not form a unitary matrix (defect " +
               std::to_string(defect) + ")",
           stmt.span);
    return std::nullopt;
  }
  return u;
}

// True when raising `base` to `exponent` stays within `cap`.
bool fits_within(std::size_t base, int exponent, std::size_t cap) {
  std::size_t v = 1;
  for (int i = 0; i < exponent; ++i) {
    if (base == 0 || v > cap / base) return false;
    v *= base;
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// parse
// ---------------------------------------------------------------------------

ParseResult parse(std::string_view source) {
  std::vector<Diagnostic> diags;
  CircuitAST ast;
  bool header_seen = false;
  bool missing_header_reported = false;
  bool statements_started = false;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    const std::size_t newline = source.find('\n', pos);
    std::string_view line =
        source.substr(pos, newline == std::string_view::npos
                               ? source.size() - pos
                               : newline - pos);
    pos = (newline == std::string_view::npos) ? source.size() + 1 : newline + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::vector<Token> tokens;
    if (!lex_line(line, line_no, tokens, diags)) continue;
    if (tokens.empty()) continue;

    LineParser lp(tokens, line_no, static_cast<int>(line.size()), diags);
    const Token* first = lp.peek();
    if (first->kind != Token::Kind::ident) {
      lp.fail("expected 'dim', 'qudit', 'gate', 'measure', or 'loss'");
      continue;
    }
    if (!header_seen && first->text != "dim" && !missing_header_reported) {
      diags.push_back(
          {Severity::error, "missing dim header", token_span(*first)});
      missing_header_reported = true;
      // keep parsing the line so later constructs still get diagnostics
    }

    if (first->text == "dim") {
      lp.take();
      if (header_seen) {
        diags.push_back(
            {Severity::error, "duplicate dim header", token_span(*first)});
        continue;
      }
      if (parse_header(lp, *first, ast, diags)) header_seen = true;
    } else if (first->text == "qudit") {
      lp.take();
      if (statements_started) {
        diags.push_back({Severity::error, "declaration after statements",
                         token_span(*first)});
      }
      parse_declaration(lp, *first, ast, diags);
    } else if (first->text == "gate") {
      lp.take();
      statements_started = true;
      parse_gate(lp, *first, ast);
    } else if (first->text == "measure") {
      lp.take();
      statements_started = true;
      parse_measure(lp, *first, ast);
    } else if (first->text == "loss") {
      lp.take();
      statements_started = true;
      parse_loss(lp, *first, ast);
    } else {
      lp.fail("expected 'dim', 'qudit', 'gate', 'measure', or 'loss'");
    }
  }

  if (!header_seen && !missing_header_reported) {
    diags.push_back(
        {Severity::error, "missing dim header", SourceSpan{1, 1, 0}});
  }

  ParseResult result;
  bool has_error = false;
  for (const Diagnostic& d : diags) {
    if (d.severity == Severity::error) {
      has_error = true;
      break;
    }
  }
  result.diagnostics = std::move(diags);
  if (!has_error) result.ast = std::move(ast);
  return result;
}

// ---------------------------------------------------------------------------
// unparse
// ---------------------------------------------------------------------------

std::string unparse(const CircuitAST& ast) {
  std::string out;
  out += "dim " + std::to_string(ast.dim) + "\n";
  for (const Declaration& decl : ast.declarations) {
    out += "qudit " + decl.name + " encoding=" + basis_keyword(decl.encoding) +
           " init=";
    if (const int* label = std::get_if<int>(&decl.init)) {
      out += std::to_string(*label);
    } else {
      const VectorLiteral& vec = std::get<VectorLiteral>(decl.init);
      out += '[';
      for (std::size_t i = 0; i < vec.entries.size(); ++i) {
        if (i > 0) out += ',';
        out += format_complex(vec.entries[i]);
      }
      out += ']';
    }
    out += '\n';
  }
  for (const Stmt& stmt : ast.statements) {
    if (const auto* gate = std::get_if<GateStmt>(&stmt)) {
      out += "gate " + gate->gate;
      if (!gate->params.empty()) {
        out += '(';
        for (std::size_t i = 0; i < gate->params.size(); ++i) {
          if (i > 0) out += ',';
          out += gate->params[i].key + "=" + format_complex(gate->params[i].value);
        }
        out += ')';
      }
      for (const std::string& operand : gate->operands) {
        out += ' ' + operand;
      }
    } else if (const auto* meas = std::get_if<MeasureStmt>(&stmt)) {
      out += "measure " + meas->operand +
             " basis=" + basis_keyword(meas->basis);
    } else {
      const LossStmt& loss = std::get<LossStmt>(stmt);
      out += "loss " + loss.operand + " gamma_t=" + format_double(loss.gamma_t);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// ast_equal
// ---------------------------------------------------------------------------

bool ast_equal(const CircuitAST& a, const CircuitAST& b) {
  if (a.dim != b.dim) return false;
  if (a.declarations.size() != b.declarations.size()) return false;
  for (std::size_t i = 0; i < a.declarations.size(); ++i) {
    const Declaration& da = a.declarations[i];
    const Declaration& db = b.declarations[i];
    if (da.name != db.name || da.encoding != db.encoding) return false;
    if (da.init.index() != db.init.index()) return false;
    if (const int* la = std::get_if<int>(&da.init)) {
      if (*la != std::get<int>(db.init)) return false;
    } else {
      const auto& va = std::get<VectorLiteral>(da.init).entries;
      const auto& vb = std::get<VectorLiteral>(db.init).entries;
      if (va != vb) return false;
    }
  }
  if (a.statements.size() != b.statements.size()) return false;
  for (std::size_t i = 0; i < a.statements.size(); ++i) {
    const Stmt& sa = a.statements[i];
    const Stmt& sb = b.statements[i];
    if (sa.index() != sb.index()) return false;
    if (const auto* ga = std::get_if<GateStmt>(&sa)) {
      const auto& gb = std::get<GateStmt>(sb);
      if (ga->gate != gb.gate || ga->operands != gb.operands) return false;
      if (ga->params.size() != gb.params.size()) return false;
      for (std::size_t j = 0; j < ga->params.size(); ++j) {
        if (ga->params[j].key != gb.params[j].key ||
            ga->params[j].value != gb.params[j].value) {
          return false;
        }
      }
    } else if (const auto* ma = std::get_if<MeasureStmt>(&sa)) {
      const auto& mb = std::get<MeasureStmt>(sb);
      if (ma->operand != mb.operand || ma->basis != mb.basis) return false;
    } else {
      const auto& la = std::get<LossStmt>(sa);
      const auto& lb = std::get<LossStmt>(sb);
      if (la.operand != lb.operand || la.gamma_t != lb.gamma_t) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

ValidateResult validate(const CircuitAST& ast) {
  ValidateResult result;
  std::vector<Diagnostic>& diags = result.diagnostics;

  if (ast.dim < 1) {
    diags.push_back({Severity::error,
                     "dim must be at least 1, got " + std::to_string(ast.dim),
                     ast.dim_span});
  }

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ast.declarations.size(); ++i) {
    const Declaration& decl = ast.declarations[i];
    if (index.count(decl.name)) {
      diags.push_back({Severity::error,
                       "duplicate qudit name '" + decl.name + "'", decl.span});
    } else {
      index.emplace(decl.name, i);
    }
    if (const int* label = std::get_if<int>(&decl.init)) {
      if (*label < 0 || *label >= ast.dim) {
        diags.push_back({Severity::error,
                         "init label " + std::to_string(*label) +
                             " out of range [0," + std::to_string(ast.dim) +
                             ")",
                         decl.span});
      }
    } else {
      const VectorLiteral& vec = std::get<VectorLiteral>(decl.init);
      if (static_cast<int>(vec.entries.size()) != ast.dim) {
        diags.push_back({Severity::error,
                         "init vector has length " +
                             std::to_string(vec.entries.size()) +
                             ", expected " + std::to_string(ast.dim),
                         decl.span});
      } else {
        double norm_sq = 0.0;
        for (Complex c : vec.entries) norm_sq += std::norm(c);
        const double norm = std::sqrt(norm_sq);
        if (norm < 1e-12) {
          diags.push_back(
              {Severity::error, "init vector has zero norm", decl.span});
        } else if (std::abs(norm - 1.0) > 1e-8) {
          diags.push_back({Severity::warning,
                           "init vector norm deviates from 1 by " +
                               std::to_string(std::abs(norm - 1.0)) +
                               "; it will be renormalized",
                           decl.span});
        }
      }
    }
  }

  const auto resolve = [&](const std::string& name,
                           const SourceSpan& span) -> const Declaration* {
    const auto it = index.find(name);
    if (it == index.end()) {
      diags.push_back(
          {Severity::error, "unknown qudit '" + name + "'", span});
      return nullptr;
    }
    return &ast.declarations[it->second];
  };

  for (const Stmt& stmt : ast.statements) {
    if (const auto* gate = std::get_if<GateStmt>(&stmt)) {
      const auto rules_it = gate_rules().find(gate->gate);
      if (rules_it == gate_rules().end()) {
        // Unreachable through parse(); guards hand-built ASTs.
        diags.push_back({Severity::error,
                         "unknown gate '" + gate->gate + "'", gate->span});
        continue;
      }
      const GateRules& rules = rules_it->second;

      bool operands_ok = gate->operands.size() == rules.operand_count;
      if (!operands_ok) {
        diags.push_back({Severity::error,
                         "gate " + gate->gate + " takes exactly " +
                             (rules.operand_count == 1 ? std::string("one operand")
                                                       : std::string("two operands")),
                         gate->span});
      }
      std::vector<const Declaration*> decls;
      for (const std::string& operand : gate->operands) {
        decls.push_back(resolve(operand, gate->span));
      }
      for (const Declaration* d : decls) operands_ok = operands_ok && d;

      if (gate->gate == "CUSTOM") {
        custom_matrix(*gate, ast.dim, &diags);
      } else {
        std::set<std::string> seen;
        for (const Param& p : gate->params) {
          if (!seen.insert(p.key).second) {
            diags.push_back({Severity::error,
                             "duplicate parameter '" + p.key + "'", p.span});
            continue;
          }
          const auto& required = rules.required_params;
          if (std::find(required.begin(), required.end(), p.key) ==
              required.end()) {
            diags.push_back({Severity::error,
                             required.empty()
                                 ? "gate " + gate->gate + " takes no parameters"
                                 : "unknown parameter '" + p.key +
                                       "' for gate " + gate->gate,
                             p.span});
          }
        }
        for (const std::string& req : rules.required_params) {
          if (!seen.count(req)) {
            diags.push_back({Severity::error,
                             "gate " + gate->gate + " requires parameter '" +
                                 req + "'",
                             gate->span});
          }
        }
        if (gate->gate == "KERR") {
          for (const Param& p : gate->params) {
            if (p.key == "kappa_t" && p.value.imag() != 0.0) {
              diags.push_back({Severity::error,
                               "parameter kappa_t must be real", p.span});
            }
          }
        }
      }

      if (gate->gate == "SUM" && operands_ok) {
        if (gate->operands[0] == gate->operands[1]) {
          diags.push_back({Severity::error,
                           "gate SUM operands must be distinct", gate->span});
        } else {
          // Encoding rule: the Kerr interaction adds the control's number
          // label into the target's phase label, so the control must be
          // number-encoded and the target phase-encoded.  Point at the
          // offending declaration, not the gate.
          const Declaration* control = decls[0];
          const Declaration* target = decls[1];
          if (control->encoding != Basis::number) {
            diags.push_back(
                {Severity::error,
                 "SUM requires a number-encoded control and a phase-encoded "
                 "target; control '" +
                     control->name + "' is phase-encoded",
                 control->span});
          }
          if (target->encoding != Basis::phase) {
            diags.push_back(
                {Severity::error,
                 "SUM requires a number-encoded control and a phase-encoded "
                 "target; target '" +
                     target->name + "' is number-encoded",
                 target->span});
          }
        }
      }
    } else if (const auto* meas = std::get_if<MeasureStmt>(&stmt)) {
      resolve(meas->operand, meas->span);
    } else {
      const LossStmt& loss = std::get<LossStmt>(stmt);
      resolve(loss.operand, loss.span);
      if (!(loss.gamma_t >= 0.0) || !std::isfinite(loss.gamma_t)) {
        diags.push_back({Severity::error,
                         "gamma_t must be finite and >= 0", loss.span});
      }
    }
  }

  result.ok = true;
  for (const Diagnostic& d : diags) {
    if (d.severity == Severity::error) {
      result.ok = false;
      break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// lower
// ---------------------------------------------------------------------------

Program lower(const CircuitAST& ast, SumMode mode,
              std::size_t amplitude_cap) {
  if (!validate(ast).ok) {
    throw std::invalid_argument(
        "lower: circuit failed validation; run validate() for diagnostics");
  }
  const int d = ast.dim;
  const std::size_t base = static_cast<std::size_t>(d);

  if (!fits_within(base, static_cast<int>(ast.declarations.size()),
                   amplitude_cap)) {
    throw CapacityError("register of " +
                        std::to_string(ast.declarations.size()) +
                        " qudits at dim " + std::to_string(d) +
                        " exceeds the amplitude cap of " +
                        std::to_string(amplitude_cap));
  }
  for (const Stmt& stmt : ast.statements) {
    if (const auto* gate = std::get_if<GateStmt>(&stmt)) {
      const int arity = (gate->gate == "SUM") ? 2 : 1;
      if (!fits_within(base, 2 * arity, amplitude_cap)) {
        throw CapacityError("gate " + gate->gate + " at dim " +
                            std::to_string(d) +
                            " would materialize a matrix larger than the "
                            "amplitude cap of " +
                            std::to_string(amplitude_cap));
      }
    }
  }

  Program program;
  program.dim = d;
  program.amplitude_cap = amplitude_cap;

  std::map<std::string, int> index;
  for (const Declaration& decl : ast.declarations) {
    index.emplace(decl.name, static_cast<int>(program.qudits.size()));
    Preparation prep;
    prep.name = decl.name;
    prep.spec.encoding = decl.encoding;
    if (const int* label = std::get_if<int>(&decl.init)) {
      prep.spec.init = *label;
    } else {
      const VectorLiteral& vec = std::get<VectorLiteral>(decl.init);
      CVec v(vec.entries.size());
      for (std::size_t i = 0; i < vec.entries.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = vec.entries[i];
      }
      prep.spec.init = std::move(v);
    }
    program.qudits.push_back(std::move(prep));
  }

  // Gate families are dim-wide constants; build each at most once.
  std::optional<PauliPair> pauli;
  const auto ensure_pauli = [&]() -> PauliPair& {
    if (!pauli) pauli = pauli_generators(d);
    return *pauli;
  };
  const auto param_value = [](const GateStmt& stmt, const char* key) {
    for (const Param& p : stmt.params) {
      if (p.key == key) return p.value;
    }
    return Complex(0.0, 0.0);
  };

  for (const Stmt& stmt : ast.statements) {
    if (const auto* gate = std::get_if<GateStmt>(&stmt)) {
      GateInstruction inst;
      for (const std::string& operand : gate->operands) {
        inst.targets.push_back(index.at(operand));
      }
      if (gate->gate == "X") {
        inst.op = ensure_pauli().x;
      } else if (gate->gate == "Z") {
        inst.op = ensure_pauli().z;
      } else if (gate->gate == "F") {
        inst.op = fourier_operator(d);
      } else if (gate->gate == "D") {
        inst.op = displacement(d, param_value(*gate, "alpha"));
      } else if (gate->gate == "S") {
        inst.op = squeeze(d, param_value(*gate, "zeta"));
      } else if (gate->gate == "KERR") {
        inst.op = kerr(d, param_value(*gate, "kappa_t").real());
      } else if (gate->gate == "SUM") {
        if (mode == SumMode::kerr) {
          inst.op = sum_via_kerr(d, 2.0 * std::numbers::pi / d);
        } else {
          // Same gate, built through the permutation route: transport
          // |s₁,s₂⟩ ↦ |s₁,s₁+s₂⟩ into the target's phase encoding.
          const Operator perm = sum_permutation(d);
          const CMat id_f =
              kron(CMat::Identity(d, d), fourier_operator(d).entries);
          Operator op;
          op.dim = d * d;
          op.arity = 2;
          op.structure = OpStructure::general;
          op.entries = id_f * perm.entries * id_f.adjoint();
          inst.op = std::move(op);
        }
      } else {  // CUSTOM; validate() already proved the matrix well-formed
        Operator op;
        op.dim = d;
        op.arity = 1;
        op.structure = OpStructure::general;
        op.entries = *custom_matrix(*gate, d, nullptr);
        inst.op = std::move(op);
      }
      program.instructions.push_back(std::move(inst));
    } else if (const auto* meas = std::get_if<MeasureStmt>(&stmt)) {
      program.instructions.push_back(
          MeasureInstruction{index.at(meas->operand), meas->basis});
    } else {
      const LossStmt& loss = std::get<LossStmt>(stmt);
      LossModel model;
      model.gamma_t = loss.gamma_t;
      program.instructions.push_back(
          LossInstruction{index.at(loss.operand), model});
    }
  }
  return program;
}

}  // namespace osq::dsl
