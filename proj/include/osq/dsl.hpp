#ifndef OSQ_DSL_HPP
#define OSQ_DSL_HPP

// Circuit DSL (.osq): a line-oriented description of a qudit register and an
// instruction list, e.g.
//
//   # SUM demo
//   dim 3
//   qudit a encoding=number init=1
//   qudit b encoding=phase init=[0,1,0]
//   gate SUM a b
//   measure b basis=phase
//   loss a gamma_t=0.25
//
// One construct per line; `#` starts a comment; declarations precede
// statements.  Numeric literals are floats with an optional contiguous
// imaginary tail (`0.5-0.25i`).
//
// parse() and validate() are total: malformed input comes back as
// Diagnostics with source spans, never as exceptions.  lower() turns a
// validated circuit into an engine Program; its only failure mode is
// CapacityError when the register or a gate matrix would exceed the
// amplitude cap.

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "osq/engine.hpp"

namespace osq::dsl {

// 1-based line/column of a source region; column counts bytes.
struct SourceSpan {
  int line = 1;
  int column = 1;
  int length = 0;
};

enum class Severity { error, warning };

struct Diagnostic {
  Severity severity = Severity::error;
  std::string message;
  SourceSpan span;
};

struct VectorLiteral {
  std::vector<Complex> entries;
};

struct Declaration {
  std::string name;
  Basis encoding = Basis::number;
  std::variant<int, VectorLiteral> init = 0;
  SourceSpan span;
};

struct Param {
  std::string key;
  Complex value{0.0, 0.0};
  SourceSpan span;
};

struct GateStmt {
  std::string gate;
  std::vector<Param> params;
  std::vector<std::string> operands;
  SourceSpan span;
};

struct MeasureStmt {
  std::string operand;
  Basis basis = Basis::number;
  SourceSpan span;
};

struct LossStmt {
  std::string operand;
  double gamma_t = 0.0;
  SourceSpan span;
};

using Stmt = std::variant<GateStmt, MeasureStmt, LossStmt>;

struct CircuitAST {
  int dim = 0;
  SourceSpan dim_span;  // header location, for diagnostics about dim itself
  std::vector<Declaration> declarations;
  std::vector<Stmt> statements;
};

// Structural equality, ignoring spans; numeric fields compare with ==.
bool ast_equal(const CircuitAST& a, const CircuitAST& b);

struct ParseResult {
  std::optional<CircuitAST> ast;  // set iff no error-severity diagnostics
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return ast.has_value(); }
};

// Never throws; recovers at line granularity so one bad line does not mask
// diagnostics for the rest of the file.
ParseResult parse(std::string_view source);

// Canonical source text for an AST; parse(unparse(ast)) reproduces the AST
// exactly (ast_equal) for every AST parse can produce.
std::string unparse(const CircuitAST& ast);

struct ValidateResult {
  std::vector<Diagnostic> diagnostics;
  bool ok = false;  // true iff no error-severity diagnostics (warnings fine)
};

// Semantic checks: name resolution, gate arities and parameter sets, label
// ranges, vector lengths and norms, loss strengths, and the SUM encoding
// rule (control number-encoded, target phase-encoded).  Never throws.
ValidateResult validate(const CircuitAST& ast);

// How `gate SUM` is realized when lowering.
enum class SumMode { kerr, permutation };

// Translates a validated circuit into an engine Program.  Both modes produce
// programs whose output states agree to numerical precision: kerr emits the
// diagonal exp(−i·(2π/d)·N̂⊗N̂); permutation emits the label-permutation SUM
// transported into the target's phase encoding, (𝟙⊗F)·P·(𝟙⊗F†).
// Throws std::invalid_argument if the AST fails validation and CapacityError
// if the register (d^m) or any gate matrix would exceed `amplitude_cap`.
Program lower(const CircuitAST& ast, SumMode mode = SumMode::kerr,
              std::size_t amplitude_cap = kDefaultAmplitudeCap);

}  // namespace osq::dsl

#endif  // OSQ_DSL_HPP
