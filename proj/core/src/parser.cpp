#include "hobmc/parser.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "hobmc/formula.hpp"

namespace hobmc {

ParseError::ParseError(int line, int column, const std::string& msg, std::vector<std::string> expected)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << line << ":" << column << ": " << msg;
        if (!expected.empty()) {
          os << " (expected ";
          for (std::size_t i = 0; i < expected.size(); ++i) os << (i ? ", " : "") << expected[i];
          os << ")";
        }
        return os.str();
      }()),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

namespace {

enum class Tok {
  Ident,
  Int,
  Keyword,
  Symbol,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t value = 0;
  SourceLoc loc;
};

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {
      "Refs", "Methods", "Main", "let", "letrec", "in",  "if",  "then", "else", "fun", "skip",
      "fail", "assert",  "fst",  "snd", "and",    "or",  "div", "mod",  "Int",  "Unit", "int", "unit"};
  return k;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run(std::set<std::string>& identifiers) {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.loc = {line_, col_};
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
                                      src_[pos_] == '\'')) {
          advance();
        }
        t.text = std::string(src_.substr(start, pos_ - start));
        t.kind = keywords().count(t.text) ? Tok::Keyword : Tok::Ident;
        if (t.kind == Tok::Ident) identifiers.insert(t.text);
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        t.text = std::string(src_.substr(start, pos_ - start));
        t.kind = Tok::Int;
        try {
          t.value = std::stoll(t.text);
        } catch (const std::out_of_range&) {
          throw ParseError(t.loc.line, t.loc.column, "integer literal out of range");
        }
      } else {
        static const char* const symbols[] = {":=", "++", "->", "==", "<>", "!=", "<=", ">=", "&&", "||",
                                              "(",  ")",  ",",  ";",  ":",  "!",  "+",  "-",  "*",  "/",
                                              "%",  "=",  "<",  ">"};
        bool matched = false;
        for (const char* s : symbols) {
          std::string_view sv(s);
          if (src_.substr(pos_, sv.size()) == sv) {
            t.kind = Tok::Symbol;
            t.text = std::string(sv);
            for (std::size_t i = 0; i < sv.size(); ++i) advance();
            matched = true;
            break;
          }
        }
        if (!matched) throw ParseError(line_, col_, std::string("unexpected character '") + c + "'");
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    for (;;) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
      if (src_.substr(pos_, 2) == "(*") {
        int depth = 0;
        int l = line_, c = col_;
        do {
          if (pos_ >= src_.size()) throw ParseError(l, c, "unterminated comment");
          if (src_.substr(pos_, 2) == "(*") {
            ++depth;
            advance();
            advance();
          } else if (src_.substr(pos_, 2) == "*)") {
            --depth;
            advance();
            advance();
          } else {
            advance();
          }
        } while (depth > 0);
        continue;
      }
      return;
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

SurfacePtr node(SurfaceTerm t) { return std::make_shared<const SurfaceTerm>(std::move(t)); }

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  SourceProgram program() {
    SourceProgram p;
    if (is_kw("Refs")) {
      next();
      expect_sym(":");
      while (peek().kind == Tok::Ident) p.refs.push_back(ref_decl());
    }
    if (is_kw("Methods")) {
      next();
      expect_sym(":");
      while (peek().kind == Tok::Ident) p.methods.push_back(method_decl());
    }
    if (!is_kw("Main")) fail_expected({"Refs:", "Methods:", "Main"});
    p.main = main_decl();
    if (is_sym(";")) next();
    if (peek().kind != Tok::End) fail_expected({"end of input"});
    return p;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool is_sym(const char* s, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Symbol && peek(ahead).text == s;
  }
  bool is_kw(const char* s, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Keyword && peek(ahead).text == s;
  }

  [[noreturn]] void fail_expected(std::vector<std::string> expected) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.loc.line, t.loc.column, "unexpected " + found, std::move(expected));
  }

  void expect_sym(const char* s) {
    if (!is_sym(s)) fail_expected({std::string("'") + s + "'"});
    next();
  }
  void expect_kw(const char* s) {
    if (!is_kw(s)) fail_expected({s});
    next();
  }
  std::string ident() {
    if (peek().kind != Tok::Ident) fail_expected({"identifier"});
    return next().text;
  }

  // --- types --------------------------------------------------------------

  Type type() {
    Type left = prod_type();
    if (is_sym("->")) {
      next();
      return Type::arrow(left, type());
    }
    return left;
  }

  Type prod_type() {
    Type t = atom_type();
    while (is_sym("*")) {
      next();
      t = Type::prod(t, atom_type());
    }
    return t;
  }

  Type atom_type() {
    if (is_kw("Int") || is_kw("int")) {
      next();
      return Type::integer();
    }
    if (is_kw("Unit") || is_kw("unit")) {
      next();
      return Type::unit();
    }
    if (is_sym("(")) {
      next();
      Type t = type();
      expect_sym(")");
      return t;
    }
    fail_expected({"Int", "Unit", "'('"});
  }

  /// `:(T)`
  Type annotation() {
    expect_sym(":");
    expect_sym("(");
    Type t = type();
    expect_sym(")");
    return t;
  }

  /// `(x:T)` repeated; `()` for none.
  std::vector<Param> params(bool allow_empty) {
    std::vector<Param> ps;
    if (allow_empty && is_sym("(") && is_sym(")", 1)) {
      next();
      next();
      return ps;
    }
    while (is_sym("(") && peek(1).kind == Tok::Ident && is_sym(":", 2)) {
      next();
      Param p;
      p.name = ident();
      expect_sym(":");
      p.type = type();
      expect_sym(")");
      ps.push_back(std::move(p));
    }
    return ps;
  }

  // --- declarations -------------------------------------------------------

  RefDecl ref_decl() {
    RefDecl d;
    d.loc = peek().loc;
    d.name = ident();
    d.type = annotation();
    expect_sym("=");
    d.init = literal();
    expect_sym(";");
    return d;
  }

  SurfacePtr literal() {
    SurfaceTerm t;
    t.loc = peek().loc;
    if (is_sym("-") && peek(1).kind == Tok::Int) {
      next();
      t.kind = SurfaceKind::Int;
      t.value = -next().value;
      return node(std::move(t));
    }
    if (peek().kind == Tok::Int) {
      t.kind = SurfaceKind::Int;
      t.value = next().value;
      return node(std::move(t));
    }
    if (is_kw("skip")) {
      next();
      t.kind = SurfaceKind::Unit;
      return node(std::move(t));
    }
    if (is_sym("(") && is_sym(")", 1)) {
      next();
      next();
      t.kind = SurfaceKind::Unit;
      return node(std::move(t));
    }
    if (peek().kind == Tok::Ident) {
      t.kind = SurfaceKind::Ident;
      t.ident = next().text;
      return node(std::move(t));
    }
    if (is_sym("(")) {
      next();
      SurfacePtr a = literal();
      expect_sym(",");
      SurfacePtr b = literal();
      expect_sym(")");
      t.kind = SurfaceKind::Pair;
      t.kids = {a, b};
      return node(std::move(t));
    }
    fail_expected({"literal"});
  }

  MethodDecl method_decl() {
    MethodDecl d;
    d.loc = peek().loc;
    d.name = ident();
    d.params = params(false);
    if (d.params.empty()) fail_expected({"parameter '(x:T)'"});
    d.result = annotation();
    expect_sym("=");
    d.body = seq();
    expect_sym(";");
    return d;
  }

  MainDecl main_decl() {
    MainDecl d;
    d.loc = peek().loc;
    expect_kw("Main");
    d.params = params(true);
    d.result = annotation();
    expect_sym(":");
    d.body = seq();
    return d;
  }

  // --- terms --------------------------------------------------------------

  /// A `;` ends the current body when what follows starts a declaration.
  bool at_decl_boundary() const {
    // peek(0) is ';'
    const Token& a = peek(1);
    if (a.kind == Tok::End) return true;
    if (a.kind == Tok::Keyword && a.text == "Main") return true;
    return a.kind == Tok::Ident && is_sym("(", 2) && peek(3).kind == Tok::Ident && is_sym(":", 4);
  }

  SurfacePtr seq() {
    SurfacePtr first = stmt();
    if (is_sym(";") && !at_decl_boundary()) {
      SourceLoc loc = peek().loc;
      next();
      SurfaceTerm t;
      t.kind = SurfaceKind::Seq;
      t.loc = loc;
      t.kids = {first, seq()};
      return node(std::move(t));
    }
    return first;
  }

  SurfacePtr stmt() {
    SurfaceTerm t;
    t.loc = peek().loc;
    if (is_kw("let")) {
      next();
      t.kind = SurfaceKind::Let;
      t.ident = ident();
      t.annot = annotation();
      expect_sym("=");
      SurfacePtr bound = seq();
      expect_kw("in");
      t.kids = {bound, seq()};
      return node(std::move(t));
    }
    if (is_kw("letrec")) {
      next();
      t.kind = SurfaceKind::Letrec;
      t.ident = ident();
      t.annot = annotation();
      expect_sym("=");
      expect_kw("fun");
      t.params = params(false);
      if (t.params.empty()) fail_expected({"parameter '(x:T)'"});
      expect_sym("->");
      SurfacePtr fn = seq();
      expect_kw("in");
      t.kids = {fn, seq()};
      return node(std::move(t));
    }
    if (is_kw("fun")) {
      next();
      t.kind = SurfaceKind::Lambda;
      t.params = params(false);
      if (t.params.empty()) fail_expected({"parameter '(x:T)'"});
      expect_sym("->");
      t.kids = {seq()};
      return node(std::move(t));
    }
    if (is_kw("if")) {
      next();
      t.kind = SurfaceKind::If;
      SurfacePtr c = seq();
      expect_kw("then");
      SurfacePtr a = stmt();
      expect_kw("else");
      SurfacePtr b = stmt();
      t.kids = {c, a, b};
      return node(std::move(t));
    }
    if (peek().kind == Tok::Ident && is_sym(":=", 1)) {
      t.kind = SurfaceKind::Assign;
      t.ident = next().text;
      next();
      t.kids = {stmt()};
      return node(std::move(t));
    }
    return or_expr();
  }

  SurfacePtr binary(SurfacePtr a, BinOpKind op, SurfacePtr b, SourceLoc loc) {
    SurfaceTerm t;
    t.kind = SurfaceKind::BinOp;
    t.op = op;
    t.loc = loc;
    t.kids = {std::move(a), std::move(b)};
    return node(std::move(t));
  }

  SurfacePtr or_expr() {
    SurfacePtr a = and_expr();
    while (is_sym("||") || is_kw("or")) {
      SourceLoc loc = next().loc;
      a = binary(a, BinOpKind::Or, and_expr(), loc);
    }
    return a;
  }

  SurfacePtr and_expr() {
    SurfacePtr a = cmp_expr();
    while (is_sym("&&") || is_kw("and")) {
      SourceLoc loc = next().loc;
      a = binary(a, BinOpKind::And, cmp_expr(), loc);
    }
    return a;
  }

  SurfacePtr cmp_expr() {
    SurfacePtr a = add_expr();
    static const std::map<std::string, BinOpKind> ops = {
        {"=", BinOpKind::Eq}, {"==", BinOpKind::Eq}, {"<>", BinOpKind::Ne}, {"!=", BinOpKind::Ne},
        {"<", BinOpKind::Lt}, {"<=", BinOpKind::Le}, {">", BinOpKind::Gt},  {">=", BinOpKind::Ge}};
    if (peek().kind == Tok::Symbol) {
      auto it = ops.find(peek().text);
      if (it != ops.end()) {
        SourceLoc loc = next().loc;
        return binary(a, it->second, add_expr(), loc);
      }
    }
    return a;
  }

  SurfacePtr add_expr() {
    SurfacePtr a = mul_expr();
    while (is_sym("+") || is_sym("-")) {
      BinOpKind op = peek().text == "+" ? BinOpKind::Add : BinOpKind::Sub;
      SourceLoc loc = next().loc;
      a = binary(a, op, mul_expr(), loc);
    }
    return a;
  }

  SurfacePtr mul_expr() {
    SurfacePtr a = unary();
    for (;;) {
      BinOpKind op;
      if (is_sym("*")) {
        op = BinOpKind::Mul;
      } else if (is_sym("/") || is_kw("div")) {
        op = BinOpKind::Div;
      } else if (is_sym("%") || is_kw("mod")) {
        op = BinOpKind::Mod;
      } else {
        return a;
      }
      SourceLoc loc = next().loc;
      a = binary(a, op, unary(), loc);
    }
  }

  SurfacePtr unary() {
    if (is_sym("-")) {
      SourceLoc loc = next().loc;
      if (peek().kind == Tok::Int) {
        SurfaceTerm t;
        t.kind = SurfaceKind::Int;
        t.loc = loc;
        t.value = -next().value;
        return node(std::move(t));
      }
      SurfaceTerm zero;
      zero.kind = SurfaceKind::Int;
      zero.loc = loc;
      return binary(node(std::move(zero)), BinOpKind::Sub, unary(), loc);
    }
    return application();
  }

  bool starts_atom() const {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int:
        return true;
      case Tok::Ident:
        return !is_sym(":=", 1);
      case Tok::Keyword:
        return t.text == "skip" || t.text == "fail" || t.text == "assert" || t.text == "fst" || t.text == "snd";
      case Tok::Symbol:
        return t.text == "(" || t.text == "!";
      case Tok::End:
        return false;
    }
    return false;
  }

  SurfacePtr application() {
    SourceLoc loc = peek().loc;
    SurfacePtr head = atom();
    if (!starts_atom()) return head;
    SurfaceTerm t;
    t.kind = SurfaceKind::App;
    t.loc = loc;
    t.kids.push_back(head);
    while (starts_atom()) t.kids.push_back(atom());
    return node(std::move(t));
  }

  SurfacePtr atom() {
    SurfaceTerm t;
    t.loc = peek().loc;
    const Token& tok = peek();
    if (tok.kind == Tok::Int) {
      t.kind = SurfaceKind::Int;
      t.value = next().value;
      return node(std::move(t));
    }
    if (tok.kind == Tok::Ident) {
      std::string name = next().text;
      if (is_sym("++")) {
        next();
        t.kind = SurfaceKind::Incr;
        t.ident = name;
        return node(std::move(t));
      }
      t.kind = SurfaceKind::Ident;
      t.ident = name;
      return node(std::move(t));
    }
    if (is_kw("skip")) {
      next();
      t.kind = SurfaceKind::Unit;
      return node(std::move(t));
    }
    if (is_kw("fail")) {
      next();
      t.kind = SurfaceKind::Fail;
      return node(std::move(t));
    }
    if (is_kw("assert")) {
      next();
      t.kind = SurfaceKind::Assert;
      t.kids = {atom()};
      return node(std::move(t));
    }
    if (is_kw("fst") || is_kw("snd")) {
      t.kind = SurfaceKind::Proj;
      t.index = next().text == "fst" ? 1 : 2;
      t.annot = annotation();
      t.kids = {atom()};
      return node(std::move(t));
    }
    if (is_sym("!")) {
      next();
      t.kind = SurfaceKind::Deref;
      t.ident = ident();
      return node(std::move(t));
    }
    if (is_sym("(")) {
      next();
      if (is_sym(")")) {
        next();
        t.kind = SurfaceKind::Unit;
        return node(std::move(t));
      }
      SurfacePtr a = seq();
      if (is_sym(",")) {
        next();
        SurfacePtr b = seq();
        expect_sym(")");
        t.kind = SurfaceKind::Pair;
        t.kids = {a, b};
        return node(std::move(t));
      }
      expect_sym(")");
      return a;
    }
    fail_expected({"term"});
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

Value literal_value(const SurfacePtr& lit, const Type& expected, const std::map<std::string, Name>& methods) {
  switch (lit->kind) {
    case SurfaceKind::Int:
      return Value::integer(lit->value);
    case SurfaceKind::Unit:
      return Value::unit();
    case SurfaceKind::Ident: {
      auto it = methods.find(lit->ident);
      if (it == methods.end()) throw ElaborationError(lit->loc, "initial value " + lit->ident + " is not a method");
      return Value::meth(it->second);
    }
    case SurfaceKind::Pair: {
      if (!expected.is_prod()) throw ElaborationError(lit->loc, "pair literal for a non-product reference");
      return Value::pair(literal_value(lit->kids[0], expected.left(), methods),
                         literal_value(lit->kids[1], expected.right(), methods));
    }
    default:
      throw ElaborationError(lit->loc, "reference initialiser must be a literal");
  }
}

bool reserved_smt_symbol(const std::string& s, const std::vector<RefDecl>& refs) {
  static const std::regex generated("^(ret|fn)[0-9]+$");
  if (std::regex_match(s, generated)) return true;
  for (const auto& r : refs) {
    if (s.size() > r.name.size() + 1 && s.compare(0, r.name.size() + 1, r.name + "_") == 0) {
      std::string tail = s.substr(r.name.size() + 1);
      if (std::all_of(tail.begin(), tail.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace

SourceProgram parse(std::string_view text) {
  std::set<std::string> identifiers;
  auto toks = Lexer(text).run(identifiers);
  SourceProgram p = Parser(std::move(toks)).program();
  p.identifiers = std::move(identifiers);
  return p;
}

Program elaborate(const SourceProgram& p, Bound bound) {
  std::map<std::string, Name> refs, methods;
  for (const auto& r : p.refs) {
    if (!refs.emplace(r.name, Name::ref(r.name, r.type)).second) {
      throw ElaborationError(r.loc, "duplicate reference " + r.name);
    }
  }
  for (const auto& m : p.methods) {
    Type t = m.result;
    for (auto it = m.params.rbegin(); it != m.params.rend(); ++it) t = Type::arrow(it->type, t);
    if (!methods.emplace(m.name, Name::meth(m.name, t)).second) {
      throw ElaborationError(m.loc, "duplicate method " + m.name);
    }
  }

  DesugarContext ctx(refs, methods, p.identifiers);
  Program out;
  out.result = p.main.result;

  // Main's parameters are registered first so binders elsewhere are renamed
  // away from them.
  std::set<std::string> seen;
  for (const auto& prm : p.main.params) {
    if (!seen.insert(prm.name).second) throw ElaborationError(p.main.loc, "duplicate parameter " + prm.name);
    if (!prm.type.is_ground()) {
      throw ElaborationError(p.main.loc, "Main parameter " + prm.name + " must have ground type");
    }
    if (reserved_smt_symbol(prm.name, p.refs)) {
      throw ElaborationError(p.main.loc, "Main parameter name " + prm.name + " is reserved for generated variables");
    }
    if (clashes_with_encoding(prm.name)) {
      throw ElaborationError(p.main.loc, "Main parameter name " + prm.name + " clashes with the solver encoding");
    }
    out.inputs.push_back(ctx.declare_free(prm.name, prm.type, p.main.loc));
  }

  for (const auto& r : p.refs) {
    const Name& rn = refs.at(r.name);
    Value v = literal_value(r.init, r.type, methods);
    if (!(type_of(v) == r.type)) {
      throw ElaborationError(r.loc, "initial value of " + r.name + " does not have type " + r.type.str());
    }
    out.config.store.emplace(rn, v);
  }

  for (const auto& m : p.methods) {
    const Name& mn = methods.at(m.name);
    ctx.push_scope();
    const Param& first = m.params.front();
    Name x = ctx.bind(first.name, first.type, m.loc);
    ctx.add_to_scope(first.name, x);
    TermPtr body;
    if (m.params.size() == 1) {
      body = desugar(m.body, ctx, m.result);
    } else {
      SurfaceTerm lam;
      lam.kind = SurfaceKind::Lambda;
      lam.loc = m.body->loc;
      lam.params.assign(m.params.begin() + 1, m.params.end());
      lam.kids = {m.body};
      body = desugar(std::make_shared<const SurfaceTerm>(std::move(lam)), ctx, mn.type.right());
    }
    ctx.pop_scope();
    out.config.repo.insert(mn, MethodDef{x, body, next_site()});
  }

  ctx.push_scope();
  for (const auto& x : out.inputs) ctx.add_to_scope(x.id, x);
  out.config.term = desugar(p.main.body, ctx, p.main.result);
  ctx.pop_scope();
  out.config.bound = bound;

  try {
    Type t = typecheck(out.config.term);
    if (!(t == p.main.result)) {
      throw ElaborationError(p.main.loc, "Main body has type " + t.str() + ", declared " + p.main.result.str());
    }
  } catch (const TypeError& e) {
    throw ElaborationError(e.subterm() ? e.subterm()->loc : p.main.loc, e.what());
  }
  validate_config(out.config);
  return out;
}

Program parse_program(std::string_view text, Bound bound) { return elaborate(parse(text), bound); }

Program load_program(const std::string& path, Bound bound) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Program p = parse_program(ss.str(), bound);
  auto slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = base.rfind(".bmc");
  p.name = dot == std::string::npos ? base : base.substr(0, dot);
  return p;
}

std::string print_program(const Program& p) {
  std::ostringstream os;
  const Config& c = p.config;
  if (!c.store.empty()) {
    os << "Refs:\n";
    for (const auto& [r, v] : c.store) {
      os << "  " << r.id << " :(" << r.type.str() << ") = ";
      std::string s = to_string(v);
      os << (v.kind == ValueKind::Unit ? "skip" : s) << ";\n";
    }
  }
  if (!c.repo.empty()) {
    os << "Methods:\n";
    for (const auto& m : c.repo.names()) {
      const auto& def = c.repo.at(m);
      os << "  " << m.id << " (" << def.param.id << ":" << def.param.type.str() << ") :(" << m.type.right().str()
         << ") =\n    " << print_term(def.body) << ";\n";
    }
  }
  os << "Main";
  if (p.inputs.empty()) os << " ()";
  for (const auto& x : p.inputs) os << " (" << x.id << ":" << x.type.str() << ")";
  os << " :(" << p.result.str() << "):\n  " << print_term(c.term) << "\n";
  return os.str();
}

}  // namespace hobmc
