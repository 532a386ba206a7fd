#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "indiga/poly.hpp"
#include "indiga/tower.hpp"

namespace indiga {

// Shared tokenizer for expressions and session lines.
struct Token {
  enum class Kind { Number, Name, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string text);
  const Token& peek() const { return tokens_[at_]; }
  Token next();
  bool at_end() const { return peek().kind == Token::Kind::End; }
  // Consume the token if it matches exactly (text of a name or punct).
  bool eat(const std::string& text);
  void expect(const std::string& text);
  [[noreturn]] void fail(const std::string& message) const;

 private:
  std::string text_;
  std::vector<Token> tokens_;
  size_t at_ = 0;
};

// Expression tree for element formulas, derivation rule right-hand sides,
// and coaction candidates. Sym may carry an index expression (X[2*i+1]).
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Op { Num, Sym, Add, Sub, Mul, Div, Pow, Neg };
  Op op = Op::Num;
  Rational num;                 // Num
  std::string name;             // Sym
  ExprPtr index;                // Sym: optional index expression
  ExprPtr lhs, rhs;             // binary ops; Neg/Pow use lhs
  unsigned long exponent = 0;   // Pow
};

ExprPtr parse_expr(Lexer& lex);
ExprPtr parse_expr_text(const std::string& text);  // whole string must parse
std::string render_expr(const ExprPtr& e);

// Numeric evaluation with an integer environment (rule index variables);
// nullopt when the expression mentions an unbound symbol.
std::optional<Rational> eval_expr_rational(const ExprPtr& e, const std::map<std::string, long>& env);

// Polynomial over the symbols occurring (sorted universe); env-bound names
// evaluate to constants, indices must come out as nonnegative integers.
Poly eval_expr_formula(const ExprPtr& e, const std::map<std::string, long>& env);

// Element-level evaluation: symbols resolve through the callback.
using ElementResolver = std::function<TowerElement(const VarId&)>;
TowerElement eval_expr_element(const ExprPtr& e, const TowerPtr& tower, const ElementResolver& resolve);

// Index pattern a*i + b (a >= 1, b >= 0) for family rules.
struct AffineIndex {
  long stride = 0;
  long offset = 0;
  // Matches k when k = stride*i + offset for an integer i >= 0.
  std::optional<long> match(long k) const;
};
AffineIndex extract_affine(const ExprPtr& index_expr);

}  // namespace indiga
