#include "indiga/session.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <random>
#include <set>
#include <sstream>

#include "indiga/derivation.hpp"
#include "indiga/exponential.hpp"
#include "indiga/expr.hpp"
#include "indiga/slice.hpp"
#include "indiga/tower.hpp"
#include "indiga/version.hpp"

namespace indiga {

namespace {

const std::set<std::string> kIntOptions = {"level", "power", "deg", "samples",
                                           "depth", "shift", "levels"};
const std::set<std::string> kTowerKinds = {"adic", "cutoff", "discrete", "tensor", "quotient",
                                           "localize"};
const std::set<std::string> kCommands = {
    "check-integrable", "exp",       "verify-coaction", "verify-coaction-candidate",
    "flow",             "flow-check", "invariants",      "invariant-test",
    "slice",            "reynolds",  "cylinder",        "localize",
    "metric",           "orbit"};

struct RulePair {
  std::string lhs_name;
  ExprPtr lhs_index;  // null for plain symbols
  ExprPtr rhs;
};

struct Value {
  enum class Kind { Rat, Name, Expr, List, Pairs };
  Kind kind = Kind::Name;
  Rational rat;
  std::string name;
  ExprPtr expr;
  std::vector<Value> list;
  std::vector<std::pair<std::string, Rational>> pairs;
};

struct Stmt {
  int line = 0;
  std::string text;
  std::string head;
  std::string name;     // let target
  std::string kind;     // let payload head
  std::string subkind;  // tower kind / elem form / der form
  std::vector<std::string> words;
  std::map<std::string, Value> keyvals;
  std::vector<RulePair> rules;
  ExprPtr expr;  // elem body
  std::map<std::string, long> intopts;
};

Rational parse_rational(Lexer& lex) {
  bool neg = lex.eat("-");
  Token t = lex.next();
  if (t.kind != Token::Kind::Number) {
    throw ParseError("expected a number at column " + std::to_string(t.pos + 1));
  }
  Rational r = Rational::from_string(t.text);
  if (lex.eat("/")) {
    Token d = lex.next();
    if (d.kind != Token::Kind::Number) {
      throw ParseError("expected a denominator at column " + std::to_string(d.pos + 1));
    }
    r = r / Rational::from_string(d.text);
  }
  return neg ? -r : r;
}

Value parse_value(Lexer& lex) {
  Value v;
  const Token& t = lex.peek();
  if (t.kind == Token::Kind::Punct && t.text == "[") {
    lex.next();
    // A pair list (x=3, y=1/2) or an expression list.
    Lexer probe = lex;
    Token first = probe.next();
    bool pairs = first.kind == Token::Kind::Name && probe.peek().text == "=";
    if (pairs) {
      v.kind = Value::Kind::Pairs;
      while (!lex.eat("]")) {
        Token n = lex.next();
        if (n.kind != Token::Kind::Name) {
          throw ParseError("expected a name at column " + std::to_string(n.pos + 1));
        }
        lex.expect("=");
        v.pairs.emplace_back(n.text, parse_rational(lex));
        lex.eat(",");
      }
      return v;
    }
    v.kind = Value::Kind::List;
    while (!lex.eat("]")) {
      Value item;
      const Token& p = lex.peek();
      if (p.kind == Token::Kind::Number ||
          (p.kind == Token::Kind::Punct && p.text == "-")) {
        item.kind = Value::Kind::Rat;
        item.rat = parse_rational(lex);
      } else {
        item.kind = Value::Kind::Expr;
        item.expr = parse_expr(lex);
        // Pure names stay names so they can resolve as bindings.
        if (item.expr->op == Expr::Op::Sym && !item.expr->index) {
          item.kind = Value::Kind::Name;
          item.name = item.expr->name;
        }
      }
      v.list.push_back(std::move(item));
      lex.eat(",");
    }
    return v;
  }
  if (t.kind == Token::Kind::Punct && t.text == "(") {
    lex.next();
    v.kind = Value::Kind::Expr;
    v.expr = parse_expr(lex);
    lex.expect(")");
    return v;
  }
  if (t.kind == Token::Kind::Number || (t.kind == Token::Kind::Punct && t.text == "-")) {
    v.kind = Value::Kind::Rat;
    v.rat = parse_rational(lex);
    return v;
  }
  if (t.kind == Token::Kind::Name) {
    v.kind = Value::Kind::Name;
    v.name = lex.next().text;
    return v;
  }
  throw ParseError("expected a value at column " + std::to_string(t.pos + 1));
}

std::vector<RulePair> parse_rules(Lexer& lex) {
  std::vector<RulePair> rules;
  lex.expect("{");
  while (!lex.eat("}")) {
    Token n = lex.next();
    if (n.kind != Token::Kind::Name) {
      throw ParseError("expected a generator name at column " + std::to_string(n.pos + 1));
    }
    RulePair r;
    r.lhs_name = n.text;
    if (lex.eat("[")) {
      r.lhs_index = parse_expr(lex);
      lex.expect("]");
    }
    lex.expect("->");
    r.rhs = parse_expr(lex);
    rules.push_back(std::move(r));
    lex.eat(",");
  }
  return rules;
}

std::string expect_name(Lexer& lex, const std::string& what) {
  Token t = lex.next();
  if (t.kind != Token::Kind::Name) {
    throw ParseError("expected " + what + " at column " + std::to_string(t.pos + 1));
  }
  return t.text;
}

// Shared tail: key=value options, bare integer options, rule blocks,
// positional words.
void parse_tail(Lexer& lex, Stmt& stmt) {
  while (!lex.at_end()) {
    const Token& t = lex.peek();
    if (t.kind == Token::Kind::Name) {
      if (kIntOptions.count(t.text)) {
        std::string key = lex.next().text;
        lex.eat("=");
        bool neg = lex.eat("-");
        Token n = lex.next();
        if (n.kind != Token::Kind::Number) {
          throw ParseError("option '" + key + "' needs an integer at column " +
                           std::to_string(n.pos + 1));
        }
        long val = std::stol(n.text);
        stmt.intopts[key] = neg ? -val : val;
        continue;
      }
      std::string word = lex.next().text;
      if (lex.eat("=")) {
        if (lex.peek().kind == Token::Kind::Punct && lex.peek().text == "{") {
          stmt.rules = parse_rules(lex);
          Value marker;
          marker.kind = Value::Kind::Name;
          marker.name = "rules";
          stmt.keyvals[word] = marker;
        } else {
          stmt.keyvals[word] = parse_value(lex);
        }
      } else {
        stmt.words.push_back(word);
      }
      continue;
    }
    if (t.kind == Token::Kind::Number) {
      stmt.words.push_back(lex.next().text);
      continue;
    }
    if (t.kind == Token::Kind::Punct && t.text == "{") {
      stmt.rules = parse_rules(lex);
      continue;
    }
    lex.fail("unexpected token in statement");
  }
}

Stmt parse_statement(const std::string& text, int line) {
  Stmt stmt;
  stmt.line = line;
  stmt.text = text;
  size_t sp = 0;
  while (sp < text.size() && !std::isspace(static_cast<unsigned char>(text[sp]))) ++sp;
  stmt.head = text.substr(0, sp);
  Lexer lex(text.substr(sp));

  if (stmt.head == "let") {
    stmt.name = expect_name(lex, "a binding name");
    lex.expect("=");
    stmt.kind = expect_name(lex, "a binding kind");
    if (stmt.kind == "tower") {
      stmt.subkind = expect_name(lex, "a tower kind");
      if (!kTowerKinds.count(stmt.subkind)) {
        throw ParseError("unknown tower kind '" + stmt.subkind + "'");
      }
      if (stmt.subkind == "tensor" || stmt.subkind == "quotient" || stmt.subkind == "localize") {
        stmt.words.push_back(expect_name(lex, "a tower name"));
        if (stmt.subkind == "tensor") stmt.words.push_back(expect_name(lex, "a tower name"));
      }
      parse_tail(lex, stmt);
    } else if (stmt.kind == "elem") {
      stmt.words.push_back(expect_name(lex, "a tower name"));
      if (lex.peek().kind == Token::Kind::Name && lex.peek().text == "prod") {
        lex.next();
        stmt.subkind = "prod";
        stmt.words.push_back(expect_name(lex, "a family name"));
        if (!lex.at_end()) lex.fail("trailing input after family name");
      } else {
        stmt.subkind = "expr";
        stmt.expr = parse_expr(lex);
        if (!lex.at_end()) lex.fail("trailing input after expression");
      }
    } else if (stmt.kind == "der") {
      if (lex.peek().kind == Token::Kind::Name &&
          (lex.peek().text == "scale" || lex.peek().text == "sum")) {
        stmt.subkind = lex.next().text;
        stmt.words.push_back(expect_name(lex, "a derivation name"));
        if (stmt.subkind == "sum") stmt.words.push_back(expect_name(lex, "a derivation name"));
        parse_tail(lex, stmt);
      } else {
        stmt.subkind = "map";
        stmt.words.push_back(expect_name(lex, "a tower name"));
        parse_tail(lex, stmt);
        if (stmt.rules.empty()) throw ParseError("derivation needs a { gen -> image } block");
      }
    } else if (stmt.kind == "dual") {
      parse_tail(lex, stmt);
      if (!stmt.keyvals.count("vars") || stmt.rules.empty()) {
        throw ParseError("dual binding needs vars=[...] and delta={...}");
      }
    } else if (stmt.kind == "quotient" || stmt.kind == "localize") {
      stmt.words.push_back(expect_name(lex, "a derivation name"));
      parse_tail(lex, stmt);
    } else {
      throw ParseError("unknown binding kind '" + stmt.kind + "'");
    }
    return stmt;
  }

  if (!kCommands.count(stmt.head)) {
    throw ParseError("unknown statement '" + stmt.head + "'");
  }
  parse_tail(lex, stmt);
  return stmt;
}

// ---------------------------------------------------------------------------

struct Ctx {
  SessionConfig config;
  GroebnerCaps caps;
  std::map<std::string, TowerPtr> towers;
  std::map<std::string, TowerElement> elems;
  std::map<std::string, ContinuousDerivation> ders;
  std::map<std::string, DualCoordinateData> duals;
  std::mt19937_64 rng;
};

const TowerPtr& tower_of(Ctx& ctx, const std::string& name) {
  auto it = ctx.towers.find(name);
  if (it == ctx.towers.end()) throw NameError("unbound tower '" + name + "'");
  return it->second;
}

const TowerElement& elem_of(Ctx& ctx, const std::string& name) {
  auto it = ctx.elems.find(name);
  if (it == ctx.elems.end()) throw NameError("unbound element '" + name + "'");
  return it->second;
}

const ContinuousDerivation& der_of(Ctx& ctx, const std::string& name) {
  auto it = ctx.ders.find(name);
  if (it == ctx.ders.end()) throw NameError("unbound derivation '" + name + "'");
  return it->second;
}

const DualCoordinateData& dual_of(Ctx& ctx, const std::string& name) {
  auto it = ctx.duals.find(name);
  if (it == ctx.duals.end()) throw NameError("unbound dual construction '" + name + "'");
  return it->second;
}

void bind_fresh(Ctx& ctx, const std::string& name) {
  if (ctx.towers.count(name) || ctx.elems.count(name) || ctx.ders.count(name) ||
      ctx.duals.count(name)) {
    throw NameError("name '" + name + "' is already bound");
  }
}

ElementResolver make_resolver(Ctx& ctx, const TowerPtr& tower) {
  return [&ctx, tower](const VarId& v) -> TowerElement {
    if (!v.indexed()) {
      auto it = ctx.elems.find(v.name);
      if (it != ctx.elems.end() && it->second.tower() == tower) return it->second;
    }
    if (tower->is_generator(v)) return tower->generator_element(v);
    throw NameError("unbound symbol " + v.str());
  };
}

TowerElement value_to_element(Ctx& ctx, const TowerPtr& tower, const Value& v) {
  switch (v.kind) {
    case Value::Kind::Rat:
      return tower->constant_element(v.rat);
    case Value::Kind::Name:
      return make_resolver(ctx, tower)(VarId(v.name));
    case Value::Kind::Expr:
      return eval_expr_element(v.expr, tower, make_resolver(ctx, tower));
    default:
      throw ParseError("expected an element value");
  }
}

Rational value_to_rational(const Value& v) {
  if (v.kind != Value::Kind::Rat) throw ParseError("expected a rational value");
  return v.rat;
}

const Value& need_value(const Stmt& stmt, const std::string& key) {
  auto it = stmt.keyvals.find(key);
  if (it == stmt.keyvals.end()) {
    throw ParseError("statement needs " + key + "=...");
  }
  return it->second;
}

std::vector<VarId> value_to_vars(const Value& v) {
  if (v.kind != Value::Kind::List) throw ParseError("expected a [name, ...] list");
  std::vector<VarId> out;
  for (const Value& item : v.list) {
    if (item.kind != Value::Kind::Name) throw ParseError("expected plain variable names");
    out.emplace_back(item.name);
  }
  return out;
}

std::vector<Rational> value_to_rationals(const Value& v) {
  if (v.kind != Value::Kind::List) throw ParseError("expected a [number, ...] list");
  std::vector<Rational> out;
  for (const Value& item : v.list) out.push_back(value_to_rational(item));
  return out;
}

long intopt(const Stmt& stmt, const std::string& key, long fallback) {
  auto it = stmt.intopts.find(key);
  return it != stmt.intopts.end() ? it->second : fallback;
}

IntegrabilityWindow window_of(const Ctx& ctx, const Stmt& stmt) {
  IntegrabilityWindow w;
  w.max_level = static_cast<int>(intopt(stmt, "level", ctx.config.depth));
  w.max_power = static_cast<int>(intopt(stmt, "power", ctx.config.power));
  return w;
}

std::vector<Poly> formulas_over(const std::vector<VarId>& vars, const Value& v) {
  if (v.kind != Value::Kind::List) throw ParseError("expected a [poly, ...] list");
  UniversePtr uni = make_universe(vars);
  std::vector<Poly> out;
  for (const Value& item : v.list) {
    if (item.kind == Value::Kind::Rat) {
      out.push_back(Poly::constant(uni, item.rat));
      continue;
    }
    ExprPtr e = item.kind == Value::Kind::Expr ? item.expr : parse_expr_text(item.name);
    out.push_back(eval_expr_formula(e, {}).reuniverse(uni));
  }
  return out;
}

std::vector<TowerElement> sample_elements(Ctx& ctx, const TowerPtr& tower, int count, int depth) {
  std::vector<TowerElement> out;
  std::vector<VarId> gens = tower->generators(depth + 1);
  for (const VarId& g : gens) {
    if (static_cast<int>(out.size()) >= count) break;
    out.push_back(tower->generator_element(g));
  }
  std::uniform_int_distribution<int> coeff(-3, 3);
  std::uniform_int_distribution<int> nterms(1, 3);
  std::uniform_int_distribution<int> expo(0, 2);
  UniversePtr uni = gens.empty() ? make_universe({}) : make_universe(gens);
  std::uniform_int_distribution<size_t> pick(0, gens.empty() ? 0 : gens.size() - 1);
  while (static_cast<int>(out.size()) < count) {
    if (gens.empty()) {
      out.push_back(tower->constant_element(Rational(coeff(ctx.rng))));
      continue;
    }
    Poly p(uni);
    int terms = nterms(ctx.rng);
    for (int t = 0; t < terms; ++t) {
      Monomial m(uni->size(), 0);
      m[pick(ctx.rng)] += static_cast<uint32_t>(expo(ctx.rng));
      m[pick(ctx.rng)] += static_cast<uint32_t>(expo(ctx.rng));
      if (monomial_degree(m) > ctx.config.deg) continue;
      int c = coeff(ctx.rng);
      p.add_term(m, Rational(c == 0 ? 1 : c));
    }
    if (p.is_zero()) p = Poly::constant(uni, Rational(1));
    out.push_back(tower->element_from_formula(p));
  }
  return out;
}

Json levels_json(const TowerPtr& tower, const TowerElement& b, int depth) {
  Json out = Json::array();
  for (int n = 0; n <= depth; ++n) {
    out.push_back(Json{{"level", n}, {"value", b.rep(n).render(tower->level(n)->order)}});
  }
  return out;
}

// ---------------------------------------------------------------------------

Json run_let(Ctx& ctx, const Stmt& stmt) {
  bind_fresh(ctx, stmt.name);
  if (stmt.kind == "tower") {
    TowerPtr t;
    if (stmt.subkind == "adic" || stmt.subkind == "discrete") {
      std::vector<VarId> vars = value_to_vars(need_value(stmt, "vars"));
      std::vector<Poly> gens;
      if (stmt.keyvals.count("ideal")) gens = formulas_over(vars, stmt.keyvals.at("ideal"));
      t = stmt.subkind == "adic" ? make_adic_tower(vars, gens, ctx.caps)
                                 : make_discrete_tower(vars, gens, ctx.caps);
    } else if (stmt.subkind == "cutoff") {
      const Value& fam = need_value(stmt, "family");
      if (fam.kind != Value::Kind::Name) throw ParseError("family must be a name");
      std::vector<Rational> centers;
      if (stmt.keyvals.count("centers")) centers = value_to_rationals(stmt.keyvals.at("centers"));
      t = make_cutoff_tower(fam.name, centers, ctx.caps);
    } else if (stmt.subkind == "tensor") {
      t = tensor_tower(tower_of(ctx, stmt.words.at(0)), tower_of(ctx, stmt.words.at(1)));
    } else if (stmt.subkind == "quotient") {
      const TowerPtr& base = tower_of(ctx, stmt.words.at(0));
      const Value& rels = need_value(stmt, "rels");
      if (rels.kind != Value::Kind::List) throw ParseError("rels must be a list");
      std::vector<TowerElement> relations;
      for (const Value& item : rels.list) relations.push_back(value_to_element(ctx, base, item));
      t = quotient_tower(base, relations);
    } else {  // localize
      const TowerPtr& base = tower_of(ctx, stmt.words.at(0));
      t = localization_tower(base, value_to_element(ctx, base, need_value(stmt, "f")));
    }
    ctx.towers.emplace(stmt.name, t);
    return Json{{"bound", "tower"}, {"describe", t->describe()}};
  }
  if (stmt.kind == "elem") {
    const TowerPtr& tower = tower_of(ctx, stmt.words.at(0));
    TowerElement e = stmt.subkind == "prod"
                         ? partial_product_element(tower, stmt.words.at(1))
                         : eval_expr_element(stmt.expr, tower, make_resolver(ctx, tower));
    ctx.elems.emplace(stmt.name, std::move(e));
    return Json{{"bound", "elem"}};
  }
  if (stmt.kind == "der") {
    if (stmt.subkind == "scale") {
      const ContinuousDerivation& d = der_of(ctx, stmt.words.at(0));
      TowerElement by = value_to_element(ctx, d.tower(), need_value(stmt, "by"));
      ctx.ders.emplace(stmt.name, scale_by_invariant(d, by, ctx.config.depth));
      return Json{{"bound", "der"}, {"form", "scale"}};
    }
    if (stmt.subkind == "sum") {
      const ContinuousDerivation& a = der_of(ctx, stmt.words.at(0));
      const ContinuousDerivation& b = der_of(ctx, stmt.words.at(1));
      ctx.ders.emplace(stmt.name, sum_commuting(a, b, ctx.config.depth));
      return Json{{"bound", "der"}, {"form", "sum"}};
    }
    const TowerPtr& tower = tower_of(ctx, stmt.words.at(0));
    std::map<VarId, TowerElement> images;
    std::vector<ContinuousDerivation::IndexRule> rules;
    for (const RulePair& r : stmt.rules) {
      if (!r.lhs_index) {
        images.emplace(VarId(r.lhs_name),
                       eval_expr_element(r.rhs, tower, make_resolver(ctx, tower)));
        continue;
      }
      auto lit = eval_expr_rational(r.lhs_index, {});
      if (lit) {
        if (!lit->is_integer() || lit->to_long() < 0) {
          throw ParseError("generator index must be a nonnegative integer");
        }
        images.emplace(VarId(r.lhs_name, lit->to_long()),
                       eval_expr_element(r.rhs, tower, make_resolver(ctx, tower)));
        continue;
      }
      rules.push_back({r.lhs_name, extract_affine(r.lhs_index), r.rhs,
                       render_expr(r.rhs)});
    }
    std::optional<int> shift;
    if (stmt.intopts.count("shift")) shift = static_cast<int>(stmt.intopts.at("shift"));
    ctx.ders.emplace(stmt.name, ContinuousDerivation::make(tower, std::move(images),
                                                           std::move(rules), shift,
                                                           ctx.config.depth));
    return Json{{"bound", "der"}, {"form", "map"}};
  }
  if (stmt.kind == "dual") {
    std::vector<VarId> vars = value_to_vars(need_value(stmt, "vars"));
    std::map<VarId, Poly> delta;
    for (const RulePair& r : stmt.rules) {
      if (r.lhs_index) throw ParseError("dual generators are plain symbols");
      delta.emplace(VarId(r.lhs_name), eval_expr_formula(r.rhs, {}));
    }
    int levels = static_cast<int>(intopt(stmt, "levels", ctx.config.depth));
    DualCoordinateData data = dual_derivation(vars, delta, levels, 64, ctx.caps);
    Json basis = Json::array();
    for (const Poly& b : data.basis) basis.push_back(b.render());
    Json dims = Json::array();
    for (size_t d : data.dims) dims.push_back(d);
    ctx.towers.emplace(stmt.name, data.tower);
    ctx.ders.emplace(stmt.name, data.derivation);
    ctx.duals.emplace(stmt.name, std::move(data));
    return Json{{"bound", "dual"}, {"dims", dims}, {"basis", basis}};
  }
  // quotient / localize bundles: a new tower plus the transported derivation.
  const ContinuousDerivation& d = der_of(ctx, stmt.words.at(0));
  if (stmt.kind == "quotient") {
    const Value& rels = need_value(stmt, "rels");
    if (rels.kind != Value::Kind::List) throw ParseError("rels must be a list");
    std::vector<TowerElement> relations;
    for (const Value& item : rels.list) {
      relations.push_back(value_to_element(ctx, d.tower(), item));
    }
    auto [t, dq] = quotient_derivation(d, relations, ctx.config.depth);
    ctx.towers.emplace(stmt.name, t);
    ctx.ders.emplace(stmt.name, dq);
    return Json{{"bound", "quotient"}, {"relations", relations.size()},
                {"relation_derivatives_vanish_to", ctx.config.depth}};
  }
  TowerElement f = value_to_element(ctx, d.tower(), need_value(stmt, "f"));
  auto [t, dl] = localize_derivation(d, f, ctx.config.depth);
  ctx.towers.emplace(stmt.name, t);
  ctx.ders.emplace(stmt.name, dl);
  return Json{{"bound", "localize"}};
}

Json run_command(Ctx& ctx, const Stmt& stmt, bool* ok) {
  const std::string& cmd = stmt.head;
  const int depth = static_cast<int>(intopt(stmt, "level", ctx.config.depth));

  if (cmd == "check-integrable") {
    const ContinuousDerivation& d = der_of(ctx, stmt.words.at(0));
    IntegrabilityVerdict v = check_integrable(d, window_of(ctx, stmt));
    Json out{{"status", v.status_str()},
             {"filtration", v.filtration_holds},
             {"window", Json{{"level", v.window.max_level}, {"power", v.window.max_power}}},
             {"detail", v.detail}};
    if (d.declared_shift()) out["declared_shift"] = *d.declared_shift();
    if (v.status == IntegrabilityVerdict::Status::Certified) {
      Json orders = Json::array();
      for (int n = 0; n <= v.window.max_level; ++n) {
        auto it = v.level_orders.find(n);
        orders.push_back(it == v.level_orders.end() ? 0 : static_cast<long>(it->second));
      }
      out["orders"] = orders;
    }
    if (v.status == IntegrabilityVerdict::Status::Refuted) {
      const auto& w0 = v.witnesses.front();
      out["witness"] = Json{{"generator", w0.generator.str()},
                            {"power", w0.power},
                            {"level", w0.observed_level}};
      Json all = Json::array();
      for (const auto& w : v.witnesses) {
        all.push_back(Json{{"generator", w.generator.str()},
                           {"formula", w.formula.render()},
                           {"source_level", w.source_level},
                           {"power", w.power},
                           {"level", w.observed_level},
                           {"escaped_to", w.escaped_to},
                           {"replayed", replay_witness(d, w)}});
      }
      out["witnesses"] = all;
    }
    return out;
  }

  if (cmd == "exp") {
    const ContinuousDerivation& d = der_of(ctx, stmt.words.at(0));
    const TowerElement& b = elem_of(ctx, stmt.words.at(1));
    RestrictedExponential e = make_exponential(d, window_of(ctx, stmt));
    RestrictedSeries s = e.apply(b);
    Json levels = Json::array();
    for (int n = 0; n <= depth; ++n) {
      levels.push_back(Json{{"level", n},
                            {"series", s.at_level(n).render(d.tower()->level(n)->order)}});
    }
    return Json{{"element", stmt.words.at(1)}, {"levels", levels}};
  }

  if (cmd == "verify-coaction" || cmd == "verify-coaction-candidate") {
    CoactionMap map;
    TowerPtr tower;
    if (cmd == "verify-coaction") {
      const ContinuousDerivation& d = der_of(ctx, stmt.words.at(0));
      tower = d.tower();
      map = coaction_of(make_exponential(d, window_of(ctx, stmt)));
    } else {
      tower = tower_of(ctx, stmt.words.at(0));
      std::map<VarId, Poly> images;
      for (const RulePair& r : stmt.rules) {
        if (r.lhs_index) throw ParseError("candidate generators are plain symbols");
        images.emplace(VarId(r.lhs_name), eval_expr_formula(r.rhs, {}));
      }
      map = coaction_from_formulas(tower, images);
    }
    int n = static_cast<int>(intopt(stmt, "samples", 20));
    std::vector<TowerElement> samples = sample_elements(ctx, tower, n, depth);
    CoactionReport rep = verify_coaction(map, samples, depth);
    Json out{{"pass", rep.pass}, {"samples", rep.samples}, {"depth", rep.depth}};
    if (!rep.pass) {
      out["check"] = rep.failed_check;
      out["sample"] = rep.sample_index;
      out["level"] = rep.level;
      out["coefficient"] = rep.param_monomial;
      out["residual"] = rep.residual;
    }
    if (cmd == "verify-coaction") *ok = rep.pass;
    return out;
  }

  if (cmd == "flow") {
    const ContinuousDerivation& d = der_of(ctx, stmt.words.at(0));
    const TowerElement& b = elem_of(ctx, stmt.words.at(1));
    RestrictedExponential e = make_exponential(d, window_of(ctx, stmt));
    const Value& tv = need_value(stmt, "t");
    TowerElement moved = [&] {
      if (tv.kind == Value::Kind::Rat) return e.flow_at(tv.rat, b);
      return e.flow_at(value_to_element(ctx, d.tower(), tv), b, depth);
    }();
    Json out{{"t", tv.kind == Value::Kind::Rat ? tv.rat.str() : tv.name},
             {"element", stmt.words.at(1)},
             {"levels", levels_json(d.tower(), moved, depth)}};
    return out;
  }

  if (cmd == "flow-check") {
    const ContinuousDerivation& d = der_of(ctx, stmt.words.at(0));
    const TowerElement& b = elem_of(ctx, stmt.words.at(1));
    RestrictedExponential e = make_exponential(d, window_of(ctx, stmt));
    Rational t = value_to_rational(need_value(stmt, "t"));
    Rational t2 = value_to_rational(need_value(stmt, "t2"));
    bool group = element_compare(e.flow_at(t, e.flow_at(t2, b)), e.flow_at(t + t2, b), depth).equal;
    bool ident = element_compare(e.flow_at(t, e.flow_at(-t, b)), b, depth).equal;
    *ok = group && ident;
    return Json{{"t", t.str()}, {"t2", t2.str()}, {"group_law", group}, {"identity", ident}};
  }

  if (cmd == "invariants") {
    const ContinuousDerivation& d = der_of(ctx, stmt.words.at(0));
    unsigned long deg = static_cast<unsigned long>(intopt(stmt, "deg", ctx.config.deg));
    KernelReport rep = kernel_basis(d, depth, deg);
    Json basis = Json::array();
    for (const Poly& p : rep.basis) basis.push_back(p.render(d.tower()->level(depth)->order));
    return Json{{"level", rep.level},
                {"deg", rep.deg_bound},
                {"audit_level", rep.audit_level},
                {"basis", basis}};
  }

  if (cmd == "invariant-test") {
    const ContinuousDerivation& d = der_of(ctx, stmt.words.at(0));
    const TowerElement& b = elem_of(ctx, stmt.words.at(1));
    RestrictedExponential e = make_exponential(d, window_of(ctx, stmt));
    InvariantReport rep = invariant_test(e, b, depth);
    Json out{{"element", stmt.words.at(1)}, {"invariant", rep.invariant}, {"depth", rep.depth}};
    if (!rep.invariant) {
      out["first_bad_level"] = rep.first_bad_level;
      out["residual"] = rep.residual;
    }
    return out;
  }

  if (cmd == "slice") {
    const ContinuousDerivation& d = der_of(ctx, stmt.words.at(0));
    RestrictedExponential e = make_exponential(d, window_of(ctx, stmt));
    const Value& cands = need_value(stmt, "candidates");
    if (cands.kind != Value::Kind::List) throw ParseError("candidates must be a list");
    std::vector<TowerElement> elems;
    std::vector<std::string> names;
    for (const Value& item : cands.list) {
      elems.push_back(value_to_element(ctx, d.tower(), item));
      names.push_back(item.kind == Value::Kind::Name ? item.name : "<expr>");
    }
    SliceSearch search = find_local_slice(e, elems, depth, window_of(ctx, stmt));
    Json out{{"found", search.found.has_value()}};
    if (search.found) {
      out["candidate"] = names.at(search.index);
      out["index"] = search.index;
      out["s1_levels"] = levels_json(d.tower(), search.found->s1, depth);
    }
    Json rejected = Json::array();
    for (const std::string& r : search.rejected) rejected.push_back(r);
    out["rejected"] = rejected;
    return out;
  }

  if (cmd == "reynolds" || cmd == "cylinder") {
    const ContinuousDerivation& d = der_of(ctx, stmt.words.at(0));
    RestrictedExponential e = make_exponential(d, window_of(ctx, stmt));
    TowerElement s = value_to_element(ctx, d.tower(), need_value(stmt, "s"));
    TowerElement b = value_to_element(ctx, d.tower(), need_value(stmt, "b"));
    SliceData sd = make_slice(e, s, depth, window_of(ctx, stmt));
    if (cmd == "reynolds") {
      TowerElement r = dixmier_reynolds(sd, b);
      bool idem = element_compare(dixmier_reynolds(sd, r), r, depth).equal;
      *ok = idem;
      return Json{{"levels", levels_json(sd.localized, r, depth)}, {"idempotent", idem}};
    }
    CylinderDecomposition cd = cylinder_decompose(sd, b);
    Json coeffs = Json::array();
    for (size_t i = 0; i < cd.coefficients.size(); ++i) {
      coeffs.push_back(Json{
          {"i", i},
          {"value", cd.coefficients[i].rep(depth).render(sd.localized->level(depth)->order)}});
    }
    *ok = cd.reconstructs;
    return Json{{"coefficients", coeffs}, {"reconstructs", cd.reconstructs}};
  }

  if (cmd == "localize") {
    const TowerPtr& tower = tower_of(ctx, stmt.words.at(0));
    TowerElement f = value_to_element(ctx, tower, need_value(stmt, "f"));
    ZeroLocalizationReport rep = is_zero_localization(tower, f, depth);
    Json zs = Json::array();
    for (bool z : rep.level_zero) zs.push_back(z);
    Json out{{"zero", rep.zero},
             {"first_nonzero_level", rep.first_nonzero_level},
             {"level_zero", zs},
             {"depth", rep.depth}};
    if (!rep.zero) {
      TowerPtr loc = localization_tower(tower, f);
      TowerElement inv = loc->generator_element(VarId("w")) * transport_element(loc, f);
      out["inversion"] = element_compare(inv, loc->constant_element(Rational(1)), depth).equal;
    }
    return out;
  }

  if (cmd == "metric") {
    const TowerElement& a = elem_of(ctx, stmt.words.at(0));
    const TowerElement& b = elem_of(ctx, stmt.words.at(1));
    int n = stmt.words.size() > 2 ? std::stoi(stmt.words.at(2)) : ctx.config.depth;
    CompareResult cr = element_compare(a, b, n);
    return Json{{"a", stmt.words.at(0)},
                {"b", stmt.words.at(1)},
                {"depth", cr.depth},
                {"equal", cr.equal},
                {"first_divergence", cr.first_divergence},
                {"metric", cr.metric.str()}};
  }

  if (cmd == "orbit") {
    const DualCoordinateData& dual = dual_of(ctx, stmt.words.at(0));
    Rational t = value_to_rational(need_value(stmt, "t"));
    std::vector<Rational> coords = value_to_rationals(need_value(stmt, "coords"));
    IntegrabilityWindow w;
    w.max_level = static_cast<int>(dual.dims.size()) - 1;
    w.max_power = ctx.config.power;
    RestrictedExponential e = make_exponential(dual.derivation, w);
    std::vector<Rational> moved = orbit_coordinates(dual, e, coords, t);
    Json before = Json::array(), after = Json::array();
    for (const Rational& c : coords) before.push_back(c.str());
    for (const Rational& c : moved) after.push_back(c.str());
    Json out{{"t", t.str()}, {"coords", before}, {"result", after}};
    if (stmt.keyvals.count("point")) {
      const Value& pv = stmt.keyvals.at("point");
      if (pv.kind != Value::Kind::Pairs) throw ParseError("point must be [var=value, ...]");
      std::map<VarId, Rational> point;
      Json pj = Json::object();
      for (const auto& [name, val] : pv.pairs) {
        point.emplace(VarId(name), val);
        pj[name] = val.str();
      }
      out["point"] = pj;
      out["value_at_point"] = dual_point_value(dual, moved, point).str();
    }
    return out;
  }

  throw ParseError("unknown statement '" + cmd + "'");
}

}  // namespace

SessionScript parse_session(const std::string& name, const std::string& text) {
  SessionScript script;
  script.name = name;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    size_t b = line.find_last_not_of(" \t\r");
    std::string trimmed = line.substr(a, b - a + 1);
    try {
      parse_statement(trimmed, lineno);
    } catch (const Error& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
    script.statements.push_back({lineno, trimmed});
  }
  return script;
}

std::string render_session(const SessionScript& script) {
  std::string out;
  for (const auto& st : script.statements) {
    out += st.text;
    out += '\n';
  }
  return out;
}

Report execute(const SessionScript& script, const SessionConfig& config) {
  Ctx ctx;
  ctx.config = config;
  ctx.caps = GroebnerCaps{config.groebner_cap, config.groebner_cap};
  ctx.rng.seed(config.seed);

  Report rep;
  rep.body = Json{{"report_version", kReportVersion},
                  {"tool", "indiga"},
                  {"version", kVersion},
                  {"script", script.name},
                  {"seed", config.seed},
                  {"config", Json{{"depth", config.depth},
                                  {"power", config.power},
                                  {"deg", config.deg},
                                  {"groebner_cap", config.groebner_cap}}},
                  {"records", Json::array()},
                  {"failed", 0}};

  for (size_t i = 0; i < script.statements.size(); ++i) {
    const SessionStatement& st = script.statements[i];
    auto t0 = std::chrono::steady_clock::now();
    Json rec{{"index", i}, {"line", st.line}, {"statement", st.text}};
    bool ok = true;
    try {
      Stmt stmt = parse_statement(st.text, st.line);
      rec["kind"] = stmt.head;
      Json payload = stmt.head == "let" ? run_let(ctx, stmt) : run_command(ctx, stmt, &ok);
      rec["ok"] = ok;
      for (auto& [k, v] : payload.items()) rec[k] = v;
    } catch (const Error& e) {
      ok = false;
      if (!rec.contains("kind")) rec["kind"] = "error";
      rec["ok"] = false;
      rec["error"] = Json{{"kind", e.kind()}, {"message", e.what()}};
    } catch (const std::exception& e) {
      ok = false;
      if (!rec.contains("kind")) rec["kind"] = "error";
      rec["ok"] = false;
      rec["error"] = Json{{"kind", "Error"}, {"message", e.what()}};
    }
    auto t1 = std::chrono::steady_clock::now();
    rep.timings_ms.push_back(
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count());
    rep.body["records"].push_back(std::move(rec));
    if (!ok) {
      ++rep.failed;
      if (config.fail_fast) break;
    }
  }
  rep.body["failed"] = rep.failed;
  return rep;
}

std::string emit_json(const Report& r) { return r.body.dump(2) + "\n"; }

std::string emit_text(const Report& r) {
  std::ostringstream out;
  const Json& b = r.body;
  out << b["tool"].get<std::string>() << " " << b["version"].get<std::string>() << " — script '"
      << b["script"].get<std::string>() << "' (seed " << b["seed"] << ", depth "
      << b["config"]["depth"] << ", power " << b["config"]["power"] << ", deg "
      << b["config"]["deg"] << ")\n";
  size_t i = 0;
  for (const Json& rec : b["records"]) {
    std::string flag = rec["ok"].get<bool>() ? "ok  " : "FAIL";
    long ms = i < r.timings_ms.size() ? r.timings_ms[i] : 0;
    out << "  " << flag << " " << ms << "ms  " << rec["statement"].get<std::string>() << "\n";
    Json detail = rec;
    detail.erase("index");
    detail.erase("line");
    detail.erase("statement");
    detail.erase("kind");
    detail.erase("ok");
    if (!detail.empty()) out << "       " << detail.dump() << "\n";
    ++i;
  }
  out << "failed: " << r.failed << "\n";
  return out.str();
}

}  // namespace indiga
