#pragma once

// Named surface syntax: parsing problem files, elaborating to the de Bruijn
// core (including inference of unbox extensions), and printing normal forms
// back in a form that re-elaborates to the same term.

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fitch/syntax.hpp"

namespace fitch {

struct SourcePos {
  std::size_t line = 1;
  std::size_t col = 1;
};

std::string to_string(SourcePos p);

/// Lexical or syntactic error. what() is "line:col: message".
class ParseError : public std::runtime_error {
 public:
  ParseError(SourcePos pos, const std::string& msg);
  SourcePos pos;
  std::string detail;
};

/// Scope or typing error found while elaborating. what() is "line:col: message".
class ElabError : public std::runtime_error {
 public:
  ElabError(SourcePos pos, const std::string& msg);
  SourcePos pos;
  std::string detail;
};

struct STerm {
  enum class Kind : std::uint8_t { Name, Lam, App, Box, Unbox, Lift, Mul };

  Kind kind = Kind::Name;
  SourcePos pos;
  std::string name;                  // Name, Lam binder
  Ty ty;                             // Lam domain
  std::optional<std::size_t> forced; // Unbox `.n`
  std::uint64_t literal = 0;         // Lift
  std::vector<STerm> kids;           // Lam/Box/Unbox: 1, App/Mul: 2

  static STerm var(std::string n);
  static STerm lam(std::string n, Ty ty, STerm body);
  static STerm app(STerm f, STerm a);
  static STerm box(STerm b);
  static STerm unbox(STerm s, std::optional<std::size_t> forced = std::nullopt);
  static STerm lift(std::uint64_t k);
  static STerm mul(STerm l, STerm r);
};

/// A context entry with its name; locks have no name.
struct CtxItem {
  std::optional<std::string> name;
  CtxEntry entry;
  SourcePos pos;
};

struct Directive {
  enum class Kind : std::uint8_t { Check, Norm, Eq };
  Kind kind;
  SourcePos pos;
  STerm lhs;
  std::optional<STerm> rhs;  // Eq only
};

struct ProblemFile {
  Flavor logic = Flavor::K;
  bool nat = false;
  std::vector<CtxItem> ctx;
  std::vector<Directive> directives;
};

ProblemFile parse_problem(std::string_view src);
Ty parse_type(std::string_view src);
STerm parse_term(std::string_view src);

/// Names aligned with a core context (nullopt for locks).
struct Scope {
  Ctx ctx;
  std::vector<std::optional<std::string>> names;

  static Scope from(const std::vector<CtxItem>& items);
  Scope with_var(std::string name, Ty ty) const;
  Scope with_lock() const;
  /// The first `n` entries.
  Scope prefix(std::size_t n) const;
};

struct Elaborated {
  Tm tm;
  Ty ty;
};

/// Resolves names and infers unbox extensions: an unannotated unbox takes
/// the shortest context suffix that is a valid extension for `flavor` and
/// under which the scrutinee has a box type; `unbox.n` forces length n.
/// `lift`, `*` and the type Nat require `nat`.
Elaborated elaborate(Flavor flavor, bool nat, const Scope& scope, const STerm& t);

/// Surface text for `t` (checked in scope.ctx). Bound variables get fresh
/// names that shadow nothing in scope; `.n` is printed exactly where the
/// shortest-suffix inference would pick a different extension.
std::string pretty(Flavor flavor, const Scope& scope, const Tm& t);
std::string pretty(Flavor flavor, const Scope& scope, const Nf& n);

/// Surface rendering of a surface tree with minimal parentheses.
std::string render(const STerm& t);

}  // namespace fitch
