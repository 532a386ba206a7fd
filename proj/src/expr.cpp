#include "indiga/expr.hpp"

#include <cctype>
#include <sstream>

namespace indiga {

Lexer::Lexer(std::string text) : text_(std::move(text)) {
  size_t i = 0;
  while (i < text_.size()) {
    char c = text_[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.pos = i;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) ++j;
      t.kind = Token::Kind::Number;
      t.text = text_.substr(i, j - i);
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      // Names may contain '.' (fixture bindings like D.der) and a prime
      // (series parameters T', T''); '-' is always an operator here, so
      // hyphenated command words are split off by the session parser.
      size_t j = i;
      while (j < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_' ||
              text_[j] == '\'' || text_[j] == '.')) {
        ++j;
      }
      t.kind = Token::Kind::Name;
      t.text = text_.substr(i, j - i);
      i = j;
    } else {
      t.kind = Token::Kind::Punct;
      if (c == '-' && i + 1 < text_.size() && text_[i + 1] == '>') {
        t.text = "->";
        i += 2;
      } else {
        t.text = std::string(1, c);
        ++i;
      }
    }
    tokens_.push_back(std::move(t));
  }
  Token end;
  end.kind = Token::Kind::End;
  end.pos = text_.size();
  tokens_.push_back(end);
}

Token Lexer::next() {
  Token t = tokens_[at_];
  if (t.kind != Token::Kind::End) ++at_;
  return t;
}

bool Lexer::eat(const std::string& text) {
  if (peek().kind != Token::Kind::End && peek().text == text) {
    ++at_;
    return true;
  }
  return false;
}

void Lexer::expect(const std::string& text) {
  if (!eat(text)) fail("expected '" + text + "'");
}

void Lexer::fail(const std::string& message) const {
  std::ostringstream msg;
  msg << message << " at column " << (peek().pos + 1);
  if (peek().kind != Token::Kind::End) msg << " near '" << peek().text << "'";
  throw ParseError(msg.str());
}

namespace {

ExprPtr make_num(Rational v) {
  auto e = std::make_shared<Expr>();
  e->op = Expr::Op::Num;
  e->num = std::move(v);
  return e;
}

ExprPtr make_binary(Expr::Op op, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->lhs = std::move(a);
  e->rhs = std::move(b);
  return e;
}

ExprPtr parse_atom(Lexer& lex);

ExprPtr parse_power(Lexer& lex) {
  ExprPtr base = parse_atom(lex);
  if (lex.eat("^")) {
    Token t = lex.next();
    if (t.kind != Token::Kind::Number) throw ParseError("exponent must be a literal nonnegative integer");
    auto e = std::make_shared<Expr>();
    e->op = Expr::Op::Pow;
    e->lhs = base;
    e->exponent = std::stoul(t.text);
    return e;
  }
  return base;
}

ExprPtr parse_product(Lexer& lex) {
  ExprPtr e = parse_power(lex);
  while (true) {
    if (lex.eat("*")) {
      e = make_binary(Expr::Op::Mul, e, parse_power(lex));
    } else if (lex.eat("/")) {
      e = make_binary(Expr::Op::Div, e, parse_power(lex));
    } else if (lex.peek().kind == Token::Kind::Name ||
               (lex.peek().kind == Token::Kind::Punct && lex.peek().text == "(")) {
      // Juxtaposition multiplies: 2i, (i+1)X[i+1].
      e = make_binary(Expr::Op::Mul, e, parse_power(lex));
    } else {
      return e;
    }
  }
}

ExprPtr parse_sum(Lexer& lex) {
  ExprPtr e = parse_product(lex);
  while (true) {
    if (lex.eat("+")) {
      e = make_binary(Expr::Op::Add, e, parse_product(lex));
    } else if (lex.peek().kind == Token::Kind::Punct && lex.peek().text == "-") {
      lex.next();
      e = make_binary(Expr::Op::Sub, e, parse_product(lex));
    } else {
      return e;
    }
  }
}

ExprPtr parse_atom(Lexer& lex) {
  if (lex.eat("(")) {
    ExprPtr e = parse_sum(lex);
    lex.expect(")");
    return e;
  }
  if (lex.eat("-")) {
    auto e = std::make_shared<Expr>();
    e->op = Expr::Op::Neg;
    e->lhs = parse_power(lex);
    return e;
  }
  Token t = lex.next();
  if (t.kind == Token::Kind::Number) return make_num(Rational::from_string(t.text));
  if (t.kind == Token::Kind::Name) {
    auto e = std::make_shared<Expr>();
    e->op = Expr::Op::Sym;
    e->name = t.text;
    if (lex.eat("[")) {
      e->index = parse_sum(lex);
      lex.expect("]");
    }
    return e;
  }
  throw ParseError("expected a number, a name, or '(' at column " + std::to_string(t.pos + 1));
}

}  // namespace

ExprPtr parse_expr(Lexer& lex) { return parse_sum(lex); }

ExprPtr parse_expr_text(const std::string& text) {
  Lexer lex(text);
  ExprPtr e = parse_expr(lex);
  if (!lex.at_end()) lex.fail("trailing input after expression");
  return e;
}

std::string render_expr(const ExprPtr& e) {
  switch (e->op) {
    case Expr::Op::Num:
      return e->num.str();
    case Expr::Op::Sym:
      return e->index ? e->name + "[" + render_expr(e->index) + "]" : e->name;
    case Expr::Op::Add:
      return "(" + render_expr(e->lhs) + " + " + render_expr(e->rhs) + ")";
    case Expr::Op::Sub:
      return "(" + render_expr(e->lhs) + " - " + render_expr(e->rhs) + ")";
    case Expr::Op::Mul:
      return "(" + render_expr(e->lhs) + "*" + render_expr(e->rhs) + ")";
    case Expr::Op::Div:
      return "(" + render_expr(e->lhs) + "/" + render_expr(e->rhs) + ")";
    case Expr::Op::Pow:
      return render_expr(e->lhs) + "^" + std::to_string(e->exponent);
    case Expr::Op::Neg:
      return "-" + render_expr(e->lhs);
  }
  return "?";
}

std::optional<Rational> eval_expr_rational(const ExprPtr& e, const std::map<std::string, long>& env) {
  switch (e->op) {
    case Expr::Op::Num:
      return e->num;
    case Expr::Op::Sym: {
      if (e->index) return std::nullopt;
      auto it = env.find(e->name);
      if (it == env.end()) return std::nullopt;
      return Rational(it->second);
    }
    case Expr::Op::Add:
    case Expr::Op::Sub:
    case Expr::Op::Mul:
    case Expr::Op::Div: {
      auto a = eval_expr_rational(e->lhs, env);
      auto b = eval_expr_rational(e->rhs, env);
      if (!a || !b) return std::nullopt;
      switch (e->op) {
        case Expr::Op::Add:
          return *a + *b;
        case Expr::Op::Sub:
          return *a - *b;
        case Expr::Op::Mul:
          return *a * *b;
        default:
          if (b->is_zero()) throw Error("division by zero in expression");
          return *a / *b;
      }
    }
    case Expr::Op::Pow: {
      auto a = eval_expr_rational(e->lhs, env);
      if (!a) return std::nullopt;
      return a->pow(e->exponent);
    }
    case Expr::Op::Neg: {
      auto a = eval_expr_rational(e->lhs, env);
      if (!a) return std::nullopt;
      return -*a;
    }
  }
  return std::nullopt;
}

namespace {

long eval_index(const ExprPtr& idx, const std::map<std::string, long>& env) {
  auto v = eval_expr_rational(idx, env);
  if (!v) throw ParseError("index expression does not evaluate to a number: " + render_expr(idx));
  if (!v->is_integer()) throw ParseError("index expression is not an integer: " + render_expr(idx));
  return v->to_long();
}

void collect_symbols(const ExprPtr& e, const std::map<std::string, long>& env, std::set<VarId>& out) {
  switch (e->op) {
    case Expr::Op::Num:
      return;
    case Expr::Op::Sym: {
      if (!e->index && env.count(e->name)) return;  // evaluates to a number
      long idx = e->index ? eval_index(e->index, env) : -1;
      if (e->index && idx < 0) throw IllDefinedDerivation("negative family index " + e->name + "[" + std::to_string(idx) + "]");
      out.insert(e->index ? VarId(e->name, idx) : VarId(e->name));
      return;
    }
    case Expr::Op::Pow:
    case Expr::Op::Neg:
      collect_symbols(e->lhs, env, out);
      return;
    default:
      collect_symbols(e->lhs, env, out);
      collect_symbols(e->rhs, env, out);
      return;
  }
}

Poly eval_formula(const ExprPtr& e, const std::map<std::string, long>& env, const UniversePtr& uni) {
  switch (e->op) {
    case Expr::Op::Num:
      return Poly::constant(uni, e->num);
    case Expr::Op::Sym: {
      if (!e->index && env.count(e->name)) return Poly::constant(uni, Rational(env.at(e->name)));
      long idx = e->index ? eval_index(e->index, env) : -1;
      return Poly::variable(uni, e->index ? VarId(e->name, idx) : VarId(e->name));
    }
    case Expr::Op::Add:
      return eval_formula(e->lhs, env, uni) + eval_formula(e->rhs, env, uni);
    case Expr::Op::Sub:
      return eval_formula(e->lhs, env, uni) - eval_formula(e->rhs, env, uni);
    case Expr::Op::Mul:
      return eval_formula(e->lhs, env, uni) * eval_formula(e->rhs, env, uni);
    case Expr::Op::Div: {
      auto d = eval_expr_rational(e->rhs, env);
      if (!d) throw ParseError("division only by rational constants: " + render_expr(e->rhs));
      if (d->is_zero()) throw Error("division by zero in expression");
      return eval_formula(e->lhs, env, uni) * d->inverse();
    }
    case Expr::Op::Pow:
      return eval_formula(e->lhs, env, uni).pow(e->exponent);
    case Expr::Op::Neg:
      return -eval_formula(e->lhs, env, uni);
  }
  return Poly(uni);
}

}  // namespace

Poly eval_expr_formula(const ExprPtr& e, const std::map<std::string, long>& env) {
  std::set<VarId> syms;
  collect_symbols(e, env, syms);
  UniversePtr uni = make_universe(std::vector<VarId>(syms.begin(), syms.end()));
  return eval_formula(e, env, uni);
}

TowerElement eval_expr_element(const ExprPtr& e, const TowerPtr& tower, const ElementResolver& resolve) {
  switch (e->op) {
    case Expr::Op::Num:
      return tower->constant_element(e->num);
    case Expr::Op::Sym: {
      std::map<std::string, long> env;
      long idx = e->index ? eval_index(e->index, env) : -1;
      return resolve(e->index ? VarId(e->name, idx) : VarId(e->name));
    }
    case Expr::Op::Add:
      return eval_expr_element(e->lhs, tower, resolve) + eval_expr_element(e->rhs, tower, resolve);
    case Expr::Op::Sub:
      return eval_expr_element(e->lhs, tower, resolve) - eval_expr_element(e->rhs, tower, resolve);
    case Expr::Op::Mul:
      return eval_expr_element(e->lhs, tower, resolve) * eval_expr_element(e->rhs, tower, resolve);
    case Expr::Op::Div: {
      auto d = eval_expr_rational(e->rhs, {});
      if (!d) throw ParseError("division only by rational constants: " + render_expr(e->rhs));
      if (d->is_zero()) throw Error("division by zero in expression");
      return eval_expr_element(e->lhs, tower, resolve) * d->inverse();
    }
    case Expr::Op::Pow:
      return eval_expr_element(e->lhs, tower, resolve).pow(e->exponent);
    case Expr::Op::Neg:
      return -eval_expr_element(e->lhs, tower, resolve);
  }
  throw Error("unreachable expression node");
}

std::optional<long> AffineIndex::match(long k) const {
  if (stride == 0) return k == offset ? std::optional<long>(0) : std::nullopt;
  long d = k - offset;
  if (d % stride != 0) return std::nullopt;
  long i = d / stride;
  if (i < 0) return std::nullopt;
  return i;
}

AffineIndex extract_affine(const ExprPtr& e) {
  switch (e->op) {
    case Expr::Op::Num: {
      if (!e->num.is_integer()) throw ParseError("index pattern must be integral");
      return AffineIndex{0, e->num.to_long()};
    }
    case Expr::Op::Sym: {
      if (e->index || e->name != "i") throw ParseError("index patterns may only use the variable i");
      return AffineIndex{1, 0};
    }
    case Expr::Op::Add: {
      AffineIndex a = extract_affine(e->lhs), b = extract_affine(e->rhs);
      return AffineIndex{a.stride + b.stride, a.offset + b.offset};
    }
    case Expr::Op::Sub: {
      AffineIndex a = extract_affine(e->lhs), b = extract_affine(e->rhs);
      return AffineIndex{a.stride - b.stride, a.offset - b.offset};
    }
    case Expr::Op::Mul: {
      auto cl = eval_expr_rational(e->lhs, {});
      auto cr = eval_expr_rational(e->rhs, {});
      if (cl && cl->is_integer()) {
        AffineIndex b = extract_affine(e->rhs);
        return AffineIndex{cl->to_long() * b.stride, cl->to_long() * b.offset};
      }
      if (cr && cr->is_integer()) {
        AffineIndex a = extract_affine(e->lhs);
        return AffineIndex{cr->to_long() * a.stride, cr->to_long() * a.offset};
      }
      throw ParseError("index pattern must be affine in i");
    }
    case Expr::Op::Neg: {
      AffineIndex a = extract_affine(e->lhs);
      return AffineIndex{-a.stride, -a.offset};
    }
    default:
      throw ParseError("index pattern must be affine in i");
  }
}

}  // namespace indiga
