#include "fitch/surface.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "fitch/typecheck.hpp"

namespace fitch {

std::string to_string(SourcePos p) { return std::to_string(p.line) + ":" + std::to_string(p.col); }

ParseError::ParseError(SourcePos p, const std::string& msg)
    : std::runtime_error(to_string(p) + ": " + msg), pos(p), detail(msg) {}

ElabError::ElabError(SourcePos p, const std::string& msg)
    : std::runtime_error(to_string(p) + ": " + msg), pos(p), detail(msg) {}

STerm STerm::var(std::string n) {
  STerm t;
  t.kind = Kind::Name;
  t.name = std::move(n);
  return t;
}

STerm STerm::lam(std::string n, Ty ty, STerm body) {
  STerm t;
  t.kind = Kind::Lam;
  t.name = std::move(n);
  t.ty = std::move(ty);
  t.kids.push_back(std::move(body));
  return t;
}

STerm STerm::app(STerm f, STerm a) {
  STerm t;
  t.kind = Kind::App;
  t.pos = f.pos;
  t.kids = {std::move(f), std::move(a)};
  return t;
}

STerm STerm::box(STerm b) {
  STerm t;
  t.kind = Kind::Box;
  t.kids.push_back(std::move(b));
  return t;
}

STerm STerm::unbox(STerm s, std::optional<std::size_t> forced) {
  STerm t;
  t.kind = Kind::Unbox;
  t.forced = forced;
  t.kids.push_back(std::move(s));
  return t;
}

STerm STerm::lift(std::uint64_t k) {
  STerm t;
  t.kind = Kind::Lift;
  t.literal = k;
  return t;
}

STerm STerm::mul(STerm l, STerm r) {
  STerm t;
  t.kind = Kind::Mul;
  t.pos = l.pos;
  t.kids = {std::move(l), std::move(r)};
  return t;
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

struct Token {
  enum class Kind : std::uint8_t { Name, Number, Sym, End };
  Kind kind;
  std::string text;
  SourcePos pos;
  std::uint64_t value = 0;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Token::Kind::End: return "end of input";
    case Token::Kind::Number: return "number " + t.text;
    default: return "'" + t.text + "'";
  }
}

bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  SourcePos pos;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++pos.line;
        pos.col = 1;
      } else {
        ++pos.col;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "--") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const SourcePos start = pos;
    if (name_start(c)) {
      std::size_t j = i;
      while (j < src.size() && name_char(src[j])) ++j;
      out.push_back({Token::Kind::Name, std::string(src.substr(i, j - i)), start});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      Token t{Token::Kind::Number, std::string(src.substr(i, j - i)), start};
      auto [p, ec] = std::from_chars(src.data() + i, src.data() + j, t.value);
      if (ec != std::errc()) throw ParseError(start, "number " + t.text + " is too large");
      out.push_back(std::move(t));
      advance(j - i);
      continue;
    }
    for (std::string_view sym : {"[]", "->"}) {
      if (src.substr(i, 2) == sym) {
        out.push_back({Token::Kind::Sym, std::string(sym), start});
        advance(2);
        goto next;
      }
    }
    if (std::string_view(";,:.\\()*#").find(c) != std::string_view::npos) {
      out.push_back({Token::Kind::Sym, std::string(1, c), start});
      advance(1);
      continue;
    }
    if (c == '[') throw ParseError(start, "expected '[]'");
    throw ParseError(start, std::string("unexpected character '") + c + "'");
  next:;
  }
  out.push_back({Token::Kind::End, "", pos});
  return out;
}

const std::set<std::string, std::less<>> kReserved{"logic", "ext", "ctx", "check", "norm", "eq", "box", "unbox", "lift"};

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  ProblemFile problem() {
    ProblemFile p;
    expect_word("logic");
    const Token& f = peek();
    if (f.kind != Token::Kind::Name) throw ParseError(f.pos, "expected a logic (K, T, K4 or S4) but found " + describe(f));
    auto flavor = parse_flavor(f.text);
    if (!flavor) throw ParseError(f.pos, "unknown logic '" + f.text + "' (expected K, T, K4 or S4)");
    p.logic = *flavor;
    ++at_;
    expect_sym(";");
    while (is_word("ext")) {
      ++at_;
      const Token& e = peek();
      if (e.kind != Token::Kind::Name || e.text != "nat")
        throw ParseError(e.pos, "unknown extension " + describe(e) + " (expected nat)");
      ++at_;
      p.nat = true;
      expect_sym(";");
    }
    expect_word("ctx");
    if (!is_sym(";")) {
      std::set<std::string> seen;
      do {
        const Token& t = peek();
        if (is_sym("#")) {
          ++at_;
          p.ctx.push_back({std::nullopt, CtxEntry::lock(), t.pos});
          continue;
        }
        std::string n = name();
        if (!seen.insert(n).second) throw ParseError(t.pos, "duplicate name '" + n + "' in context");
        expect_sym(":");
        p.ctx.push_back({n, CtxEntry::var(type()), t.pos});
      } while (accept_sym(","));
    }
    expect_sym(";");
    while (true) {
      while (accept_sym(";")) {
      }
      const Token& t = peek();
      if (t.kind == Token::Kind::End) break;
      Directive d{Directive::Kind::Check, t.pos, STerm{}, std::nullopt};
      if (is_word("check")) {
        d.kind = Directive::Kind::Check;
      } else if (is_word("norm")) {
        d.kind = Directive::Kind::Norm;
      } else if (is_word("eq")) {
        d.kind = Directive::Kind::Eq;
      } else {
        throw ParseError(t.pos, "expected a directive (check, norm or eq) but found " + describe(t));
      }
      ++at_;
      d.lhs = term();
      if (d.kind == Directive::Kind::Eq) {
        expect_sym(";");
        d.rhs = term();
      }
      p.directives.push_back(std::move(d));
    }
    if (p.directives.empty()) throw ParseError(peek().pos, "expected at least one directive");
    return p;
  }

  Ty type() {
    Ty dom = unary_type();
    if (accept_sym("->")) return Ty::fun(dom, type());
    return dom;
  }

  STerm term() {
    const Token& t = peek();
    if (accept_sym("\\")) {
      std::string n = name();
      expect_sym(":");
      Ty ty = type();
      expect_sym(".");
      STerm out = STerm::lam(std::move(n), std::move(ty), term());
      out.pos = t.pos;
      return out;
    }
    STerm acc = app();
    while (accept_sym("*")) acc = STerm::mul(std::move(acc), app());
    return acc;
  }

  void finish() {
    if (peek().kind != Token::Kind::End) throw ParseError(peek().pos, "unexpected " + describe(peek()));
  }

 private:
  const Token& peek() const { return toks_[at_]; }
  bool is_sym(std::string_view s) const { return peek().kind == Token::Kind::Sym && peek().text == s; }
  bool is_word(std::string_view s) const { return peek().kind == Token::Kind::Name && peek().text == s; }
  bool accept_sym(std::string_view s) {
    if (!is_sym(s)) return false;
    ++at_;
    return true;
  }
  void expect_sym(std::string_view s) {
    if (!accept_sym(s)) throw ParseError(peek().pos, "expected '" + std::string(s) + "' but found " + describe(peek()));
  }
  void expect_word(std::string_view s) {
    if (!is_word(s)) throw ParseError(peek().pos, "expected '" + std::string(s) + "' but found " + describe(peek()));
    ++at_;
  }
  std::string name() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Name || kReserved.count(t.text))
      throw ParseError(t.pos, "expected a name but found " + describe(t));
    ++at_;
    return t.text;
  }

  Ty unary_type() {
    const Token& t = peek();
    if (accept_sym("[]")) return Ty::box(unary_type());
    if (accept_sym("(")) {
      Ty inner = type();
      expect_sym(")");
      return inner;
    }
    if (t.kind == Token::Kind::Name && t.text == "i") {
      ++at_;
      return Ty::base();
    }
    if (t.kind == Token::Kind::Name && t.text == "Nat") {
      ++at_;
      return Ty::nat();
    }
    throw ParseError(t.pos, "expected a type but found " + describe(t));
  }

  bool at_prim() const {
    const Token& t = peek();
    if (t.kind == Token::Kind::Sym) return t.text == "(";
    if (t.kind != Token::Kind::Name) return false;
    return !kReserved.count(t.text) || t.text == "box" || t.text == "unbox" || t.text == "lift";
  }

  STerm app() {
    STerm acc = prim();
    while (at_prim()) acc = STerm::app(std::move(acc), prim());
    return acc;
  }

  STerm prim() {
    const Token& t = peek();
    STerm out;
    if (accept_sym("(")) {
      out = term();
      expect_sym(")");
      out.pos = t.pos;
      return out;
    }
    if (is_word("box")) {
      ++at_;
      out = STerm::box(prim());
    } else if (is_word("unbox")) {
      ++at_;
      std::optional<std::size_t> forced;
      if (accept_sym(".")) {
        const Token& n = peek();
        if (n.kind != Token::Kind::Number) throw ParseError(n.pos, "expected a suffix length after 'unbox.' but found " + describe(n));
        forced = static_cast<std::size_t>(n.value);
        ++at_;
      }
      out = STerm::unbox(prim(), forced);
    } else if (is_word("lift")) {
      ++at_;
      const Token& n = peek();
      if (n.kind != Token::Kind::Number) throw ParseError(n.pos, "expected a number after 'lift' but found " + describe(n));
      ++at_;
      out = STerm::lift(n.value);
    } else {
      if (t.kind != Token::Kind::Name || kReserved.count(t.text))
        throw ParseError(t.pos, "expected a term but found " + describe(t));
      out = STerm::var(name());
    }
    out.pos = t.pos;
    return out;
  }

  std::vector<Token> toks_;
  std::size_t at_ = 0;
};

}  // namespace

ProblemFile parse_problem(std::string_view src) { return Parser(src).problem(); }

Ty parse_type(std::string_view src) {
  Parser p(src);
  Ty t = p.type();
  p.finish();
  return t;
}

STerm parse_term(std::string_view src) {
  Parser p(src);
  STerm t = p.term();
  p.finish();
  return t;
}

// ---------------------------------------------------------------------------
// Scopes and elaboration

Scope Scope::from(const std::vector<CtxItem>& items) {
  Scope s;
  for (const auto& it : items) {
    s.ctx.push_back(it.entry);
    s.names.push_back(it.name);
  }
  return s;
}

Scope Scope::with_var(std::string name, Ty ty) const {
  Scope s = *this;
  s.ctx.push_back(CtxEntry::var(std::move(ty)));
  s.names.emplace_back(std::move(name));
  return s;
}

Scope Scope::with_lock() const {
  Scope s = *this;
  s.ctx.push_back(CtxEntry::lock());
  s.names.emplace_back(std::nullopt);
  return s;
}

Scope Scope::prefix(std::size_t n) const {
  Scope s;
  s.ctx.assign(ctx.begin(), ctx.begin() + static_cast<std::ptrdiff_t>(n));
  s.names.assign(names.begin(), names.begin() + static_cast<std::ptrdiff_t>(n));
  return s;
}

namespace {

bool mentions_nat(const Ty& t) {
  switch (t.kind()) {
    case Ty::Kind::Nat: return true;
    case Ty::Kind::Fun: return mentions_nat(t.dom()) || mentions_nat(t.cod());
    case Ty::Kind::Box: return mentions_nat(t.body());
    case Ty::Kind::Base: return false;
  }
  return false;
}

class Elaborator {
 public:
  Elaborator(Flavor flavor, bool nat) : flavor_(flavor), nat_(nat) {}

  Elaborated run(const Scope& sc, const STerm& t) {
    switch (t.kind) {
      case STerm::Kind::Name: return lookup(sc, t);
      case STerm::Kind::Lam: {
        if (!nat_ && mentions_nat(t.ty)) throw ElabError(t.pos, "the type Nat requires 'ext nat'");
        Elaborated b = run(sc.with_var(t.name, t.ty), t.kids[0]);
        return {Tm::lam(t.ty, b.tm), Ty::fun(t.ty, b.ty)};
      }
      case STerm::Kind::App: {
        Elaborated f = run(sc, t.kids[0]);
        if (!f.ty.is_fun())
          throw ElabError(t.kids[0].pos, "applying a term of type " + to_string(f.ty) + ", which is not a function type");
        Elaborated a = run(sc, t.kids[1]);
        if (!(a.ty == f.ty.dom()))
          throw ElabError(t.kids[1].pos,
                          "argument has type " + to_string(a.ty) + " but " + to_string(f.ty.dom()) + " was expected");
        return {Tm::app(f.tm, a.tm), f.ty.cod()};
      }
      case STerm::Kind::Box: {
        Elaborated b = run(sc.with_lock(), t.kids[0]);
        return {Tm::box(b.tm), Ty::box(b.ty)};
      }
      case STerm::Kind::Unbox: return unbox(sc, t);
      case STerm::Kind::Lift:
        if (!nat_) throw ElabError(t.pos, "'lift' requires 'ext nat'");
        return {Tm::lift(t.literal), Ty::nat()};
      case STerm::Kind::Mul: {
        if (!nat_) throw ElabError(t.pos, "'*' requires 'ext nat'");
        Elaborated l = run(sc, t.kids[0]);
        Elaborated r = run(sc, t.kids[1]);
        for (const auto* side : {&l, &r})
          if (!side->ty.is_nat())
            throw ElabError(side == &l ? t.kids[0].pos : t.kids[1].pos,
                            "operand of '*' has type " + to_string(side->ty) + " but Nat was expected");
        return {Tm::mul(l.tm, r.tm), Ty::nat()};
      }
    }
    throw ElabError(t.pos, "unknown term");
  }

 private:
  Elaborated lookup(const Scope& sc, const STerm& t) {
    std::size_t idx = 0;
    bool crossed = false;
    for (std::size_t i = sc.ctx.size(); i > 0; --i) {
      const auto& e = sc.ctx[i - 1];
      if (e.is_lock()) {
        crossed = true;
        continue;
      }
      if (sc.names[i - 1] == t.name) {
        if (crossed) throw ElabError(t.pos, "variable '" + t.name + "' is not accessible across a lock");
        return {Tm::var(idx), e.ty()};
      }
      ++idx;
    }
    throw ElabError(t.pos, "unbound variable '" + t.name + "'");
  }

  Elaborated unbox(const Scope& sc, const STerm& t) {
    const STerm& s = t.kids[0];
    const std::string logic(to_string(flavor_));
    auto suffix = [&](std::size_t k) {
      return Ext{{sc.ctx.end() - static_cast<std::ptrdiff_t>(k), sc.ctx.end()}};
    };
    if (t.forced) {
      const std::size_t k = *t.forced;
      if (k > sc.ctx.size())
        throw ElabError(t.pos, "unbox." + std::to_string(k) + ": the context has only " + std::to_string(sc.ctx.size()) +
                                   " entries");
      Ext e = suffix(k);
      if (!ext_valid(flavor_, e))
        throw ElabError(t.pos, "unbox." + std::to_string(k) + ": suffix " + to_string(e.suffix) +
                                   " is not a valid extension in " + logic);
      Elaborated r = run(sc.prefix(sc.ctx.size() - k), s);
      if (!r.ty.is_box())
        throw ElabError(s.pos, "unboxing a term of type " + to_string(r.ty) + ", which is not a box type");
      return {Tm::unbox(r.tm, std::move(e)), r.ty.body()};
    }
    std::optional<ElabError> first;
    for (std::size_t k = 0; k <= sc.ctx.size(); ++k) {
      Ext e = suffix(k);
      if (!ext_valid(flavor_, e)) continue;
      try {
        Elaborated r = run(sc.prefix(sc.ctx.size() - k), s);
        if (r.ty.is_box()) return {Tm::unbox(r.tm, std::move(e)), r.ty.body()};
        if (!first) first.emplace(s.pos, "unboxing a term of type " + to_string(r.ty) + ", which is not a box type");
      } catch (const ElabError& err) {
        if (!first) first = err;
      }
    }
    if (!first) throw ElabError(t.pos, "no suffix of the context is a valid extension in " + logic + " for unbox");
    throw ElabError(t.pos, "cannot infer the extension of unbox in " + logic + " (shortest attempt: " + first->detail + ")");
  }

  Flavor flavor_;
  bool nat_;
};

}  // namespace

Elaborated elaborate(Flavor flavor, bool nat, const Scope& scope, const STerm& t) {
  for (std::size_t i = 0; i < scope.ctx.size(); ++i)
    if (!nat && scope.ctx[i].is_var() && mentions_nat(scope.ctx[i].ty()))
      throw ElabError({}, "the type Nat requires 'ext nat'");
  return Elaborator(flavor, nat).run(scope, t);
}

// ---------------------------------------------------------------------------
// Pretty printing

namespace {

std::string fresh_name(const Scope& sc) {
  static const char* const kBase[] = {"x", "y", "z", "u", "v", "w"};
  for (std::size_t round = 0;; ++round) {
    for (const char* b : kBase) {
      std::string cand = round == 0 ? std::string(b) : b + std::to_string(round);
      if (std::find(sc.names.begin(), sc.names.end(), std::optional<std::string>(cand)) == sc.names.end()) return cand;
    }
  }
}

std::string var_name(const Scope& sc, std::size_t idx) {
  std::size_t seen = 0;
  for (std::size_t i = sc.ctx.size(); i > 0; --i) {
    if (sc.ctx[i - 1].is_lock()) break;
    if (seen++ == idx) return *sc.names[i - 1];
  }
  throw TypeError("variable #" + std::to_string(idx) + " is not in scope");
}

STerm to_surface(Flavor flavor, const Scope& sc, const Tm& t) {
  switch (t.kind()) {
    case Tm::Kind::Var: return STerm::var(var_name(sc, t.index()));
    case Tm::Kind::Lam: {
      std::string n = fresh_name(sc);
      STerm body = to_surface(flavor, sc.with_var(n, t.dom()), t.body());
      return STerm::lam(std::move(n), t.dom(), std::move(body));
    }
    case Tm::Kind::App: return STerm::app(to_surface(flavor, sc, t.fun()), to_surface(flavor, sc, t.arg()));
    case Tm::Kind::Box: return STerm::box(to_surface(flavor, sc.with_lock(), t.body()));
    case Tm::Kind::Unbox: {
      const std::size_t k = t.ext().size();
      if (k > sc.ctx.size()) throw TypeError("unbox extension longer than the context");
      STerm s = to_surface(flavor, sc.prefix(sc.ctx.size() - k), t.scrut());
      // Annotate when inference would stop at a shorter suffix.
      bool forced = false;
      for (std::size_t j = 0; j < k && !forced; ++j) {
        Ext e{{sc.ctx.end() - static_cast<std::ptrdiff_t>(j), sc.ctx.end()}};
        if (!ext_valid(flavor, e)) continue;
        try {
          forced = elaborate(flavor, true, sc.prefix(sc.ctx.size() - j), s).ty.is_box();
        } catch (const ElabError&) {
        }
      }
      return STerm::unbox(std::move(s), forced ? std::optional<std::size_t>(k) : std::nullopt);
    }
    case Tm::Kind::Lift: return STerm::lift(t.literal());
    case Tm::Kind::Mul: return STerm::mul(to_surface(flavor, sc, t.lhs()), to_surface(flavor, sc, t.rhs()));
  }
  throw std::logic_error("unreachable");
}

// Levels: 0 lambda body / top, 1 product operand (left), 2 application
// head and prefix forms, 3 atoms.
std::string render_at(const STerm& t, int level) {
  auto wrap = [&](std::string s, int own) { return level > own ? "(" + s + ")" : s; };
  switch (t.kind) {
    case STerm::Kind::Name: return t.name;
    case STerm::Kind::Lam: return wrap("\\" + t.name + ":" + to_string(t.ty) + ". " + render_at(t.kids[0], 0), 0);
    case STerm::Kind::Mul: return wrap(render_at(t.kids[0], 1) + " * " + render_at(t.kids[1], 2), 1);
    case STerm::Kind::App: return wrap(render_at(t.kids[0], 2) + " " + render_at(t.kids[1], 3), 2);
    case STerm::Kind::Box: return wrap("box " + render_at(t.kids[0], 3), 2);
    case STerm::Kind::Unbox: {
      std::string head = "unbox";
      if (t.forced) head += "." + std::to_string(*t.forced);
      return wrap(head + " " + render_at(t.kids[0], 3), 2);
    }
    case STerm::Kind::Lift: return wrap("lift " + std::to_string(t.literal), 2);
  }
  return "?";
}

}  // namespace

std::string render(const STerm& t) { return render_at(t, 0); }

std::string pretty(Flavor flavor, const Scope& scope, const Tm& t) { return render(to_surface(flavor, scope, t)); }

std::string pretty(Flavor flavor, const Scope& scope, const Nf& n) { return pretty(flavor, scope, embed(n)); }

}  // namespace fitch
