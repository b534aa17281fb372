#pragma once

// Core syntax of the Fitch-style modal calculi: types, lock-carrying
// contexts, order-preserving embeddings, modal accessibility witnesses,
// terms, normal forms and substitutions.
//
// Every value here is immutable after construction. Trees share structure
// through shared_ptr, so copying a Tm/Ty/Nf is cheap.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fitch {

/// The four calculi differ only in which context extensions an unbox may
/// cross (the modal accessibility relation).
enum class Flavor : std::uint8_t { K, T, K4, S4 };

std::string_view to_string(Flavor f);
std::optional<Flavor> parse_flavor(std::string_view s);

/// Raised by typechecking and by operations whose context preconditions fail.
class TypeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Types

class Ty {
 public:
  enum class Kind : std::uint8_t { Base, Nat, Fun, Box };

  /// The base type.
  Ty();

  static Ty base();
  static Ty nat();
  static Ty fun(Ty dom, Ty cod);
  static Ty box(Ty body);

  Kind kind() const;
  bool is_base() const { return kind() == Kind::Base; }
  bool is_nat() const { return kind() == Kind::Nat; }
  bool is_fun() const { return kind() == Kind::Fun; }
  bool is_box() const { return kind() == Kind::Box; }

  // Fun only.
  const Ty& dom() const;
  const Ty& cod() const;
  // Box only.
  const Ty& body() const;

  std::size_t size() const;

  friend bool operator==(const Ty& a, const Ty& b);
  friend std::strong_ordering operator<=>(const Ty& a, const Ty& b);

 private:
  struct Node;
  explicit Ty(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Surface rendering: `i`, `Nat`, `[]A`, `A -> B`.
std::string to_string(const Ty& t);

// ---------------------------------------------------------------------------
// Contexts

class CtxEntry {
 public:
  static CtxEntry var(Ty ty) { return CtxEntry(false, std::move(ty)); }
  static CtxEntry lock() { return CtxEntry(true, Ty()); }

  bool is_lock() const { return lock_; }
  bool is_var() const { return !lock_; }
  /// Meaningful for Var entries only.
  const Ty& ty() const { return ty_; }

  friend bool operator==(const CtxEntry& a, const CtxEntry& b);
  friend std::strong_ordering operator<=>(const CtxEntry& a, const CtxEntry& b);

 private:
  CtxEntry(bool lock, Ty ty) : lock_(lock), ty_(std::move(ty)) {}
  bool lock_;
  Ty ty_;
};

/// Snoc list: the back of the vector is the most recent entry.
using Ctx = std::vector<CtxEntry>;

std::size_t lock_count(std::span<const CtxEntry> entries);
Ctx concat(const Ctx& left, const Ctx& right);
/// `ctx` without its last `n` entries. Throws TypeError if too short.
Ctx drop_last(const Ctx& ctx, std::size_t n);
/// True when `ctx` ends with exactly `suffix`.
bool ends_with(const Ctx& ctx, std::span<const CtxEntry> suffix);

std::string to_string(const CtxEntry& e);
std::string to_string(std::span<const CtxEntry> ctx);

// ---------------------------------------------------------------------------
// Order-preserving embeddings

/// An OPE Γ ≤ Γ'. Stored as one step per entry of the target, left to
/// right; the source is the subsequence of kept entries.
class Ope {
 public:
  enum class Step : std::uint8_t { Drop, Keep, KeepLock };
  struct Entry {
    Step step;
    Ty ty;  // unused for KeepLock
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  /// The embedding [] ≤ [].
  Ope() = default;
  /// Any step sequence is a valid derivation.
  explicit Ope(std::vector<Entry> e) : entries_(std::move(e)) {}
  static Ope identity(const Ctx& ctx);

  // Derivation constructors; each extends the target on the right.
  Ope drop(Ty ty) const;
  Ope keep(Ty ty) const;
  Ope keep_lock() const;

  Ctx source() const;
  Ctx target() const;
  std::span<const Entry> entries() const { return entries_; }
  bool is_identity() const;

  /// Target index of the source variable with de Bruijn index `idx`.
  std::size_t rename(std::size_t idx) const;
  /// Inverse of rename; empty when `idx` names a dropped entry.
  std::optional<std::size_t> unrename(std::size_t idx) const;

  friend bool operator==(const Ope&, const Ope&) = default;

 private:
  std::vector<Entry> entries_;
};

/// `first : Γ ≤ Γ'`, `second : Γ' ≤ Γ''` gives `Γ ≤ Γ''`.
Ope compose(const Ope& first, const Ope& second);

// ---------------------------------------------------------------------------
// Modal accessibility

/// A witness Δ ◁ Γ, recorded as the entries Γ appends to Δ. The source Δ is
/// never stored: inside a term it is always the enclosing context with the
/// suffix removed.
struct Ext {
  std::vector<CtxEntry> suffix;

  /// The single-lock extension Γ ◁ Γ,🔒, valid in every flavor.
  static Ext lock() { return Ext{{CtxEntry::lock()}}; }
  /// The empty extension Γ ◁ Γ (T and S4 only).
  static Ext none() { return Ext{}; }

  std::size_t size() const { return suffix.size(); }
  bool empty() const { return suffix.empty(); }
  std::size_t locks() const { return lock_count(suffix); }

  friend bool operator==(const Ext&, const Ext&) = default;
  friend std::strong_ordering operator<=>(const Ext& a, const Ext& b);
};

bool ext_valid(Flavor flavor, const Ext& e);

/// Transitivity: suffix(e1) ++ suffix(e2). Throws TypeError if the result is
/// not valid for `flavor`.
Ext ext_concat(Flavor flavor, const Ext& e1, const Ext& e2);

struct Factorization {
  Ope ope;
  Ext ext;
  friend bool operator==(const Factorization&, const Factorization&) = default;
};

/// Given e : Δ ◁ Γ and o : Γ ≤ Γ', produce o' : Δ ≤ Δ' and e' : Δ' ◁ Γ'.
///
/// Drops that occur to the right of the first suffix entry stay in the
/// suffix; everything to its left moves into o'. An empty suffix passes o
/// through unchanged. Lock count and the leading entry of the suffix are
/// preserved, so validity in every flavor is preserved too.
Factorization factor(const Ext& e, const Ope& o);

/// For a suffix of shape [🔒, vars...]: the OPE Δ,🔒 ≤ Δ,🔒,vars.
Ope factor_lock(const Ctx& src, const Ext& e);

/// For a lock-free suffix: the OPE Δ ≤ Δ,vars made of drops.
Ope to_ope(const Ctx& src, const Ext& e);

// ---------------------------------------------------------------------------
// Terms

class Tm {
 public:
  enum class Kind : std::uint8_t { Var, Lam, App, Box, Unbox, Lift, Mul };

  /// De Bruijn index counting Var entries only.
  static Tm var(std::size_t idx);
  static Tm lam(Ty dom, Tm body);
  static Tm app(Tm fun, Tm arg);
  static Tm box(Tm body);
  static Tm unbox(Tm scrut, Ext ext);
  static Tm lift(std::uint64_t k);
  static Tm mul(Tm lhs, Tm rhs);

  Kind kind() const;
  std::size_t index() const;      // Var
  const Ty& dom() const;          // Lam
  const Tm& body() const;         // Lam, Box
  const Tm& fun() const;          // App
  const Tm& arg() const;          // App
  const Tm& scrut() const;        // Unbox
  const Ext& ext() const;         // Unbox
  std::uint64_t literal() const;  // Lift
  const Tm& lhs() const;          // Mul
  const Tm& rhs() const;          // Mul

  /// Number of term constructors.
  std::size_t size() const;

  friend bool operator==(const Tm& a, const Tm& b);
  friend std::strong_ordering operator<=>(const Tm& a, const Tm& b);

 private:
  struct Node;
  Tm() = default;
  explicit Tm(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Debug rendering with de Bruijn indices.
std::string to_string(const Tm& t);

// ---------------------------------------------------------------------------
// Normal forms and neutrals

class Nf;

class Ne {
 public:
  enum class Kind : std::uint8_t { Var, App, Unbox };

  static Ne var(std::size_t idx);
  static Ne app(Ne fun, Nf arg);
  static Ne unbox(Ne scrut, Ext ext);

  Kind kind() const;
  std::size_t index() const;
  const Ne& fun() const;
  const Nf& arg() const;
  const Ne& scrut() const;
  const Ext& ext() const;

  friend bool operator==(const Ne& a, const Ne& b);
  friend std::strong_ordering operator<=>(const Ne& a, const Ne& b);

 private:
  struct Node;
  Ne() = default;
  explicit Ne(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
  friend class Nf;
};

class Nf {
 public:
  enum class Kind : std::uint8_t { Up, Lam, Box, Nat };

  static Nf up(Ne ne);
  static Nf lam(Ty dom, Nf body);
  static Nf box(Nf body);
  /// `lift coeff * f1 * ... * fn`; coeff == 0 requires no factors.
  static Nf nat(std::uint64_t coeff, std::vector<Ne> factors);

  Kind kind() const;
  const Ne& ne() const;                       // Up
  const Ty& dom() const;                      // Lam
  const Nf& body() const;                     // Lam, Box
  std::uint64_t coeff() const;                // Nat
  std::span<const Ne> factors() const;        // Nat

  friend bool operator==(const Nf& a, const Nf& b);
  friend std::strong_ordering operator<=>(const Nf& a, const Nf& b);

 private:
  struct Node;
  Nf() = default;
  explicit Nf(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
  friend class Ne;
};

Tm embed(const Ne& n);
Tm embed(const Nf& n);

std::string to_string(const Nf& n);
std::string to_string(const Ne& n);

// ---------------------------------------------------------------------------
// Weakening

Tm weaken(const Ope& o, const Tm& t);
Ne weaken(const Ope& o, const Ne& n);
Nf weaken(const Ope& o, const Nf& n);

/// Inverse of weaken: the unique t' with weaken(o, t') == t, if any.
std::optional<Tm> unweaken(const Ope& o, const Tm& t);

// ---------------------------------------------------------------------------
// Substitutions

/// A substitution Γ ⊢ₛ Δ. One item per entry of Δ, left to right. A term
/// item lives in the context reached by trimming Γ at the lock items to its
/// right; a lock item records the extension Θ ◁ Γ' at that point. The target
/// context Γ is carried along so the substitution can be lifted under binders.
class Sub {
 public:
  struct Item {
    std::optional<Tm> term;  // set for ExtTm
    Ext ext;                 // used for ExtLock
  };

  /// The empty substitution Γ ⊢ₛ [].
  explicit Sub(Ctx target = {}) : target_(std::move(target)) {}
  static Sub identity(const Ctx& ctx);

  /// ExtTm: `t` must live in target().
  Sub extend(Tm t) const;
  /// ExtLock: target() becomes target() ++ suffix(e).
  Sub extend_lock(Ext e) const;

  std::span<const Item> items() const { return items_; }
  const Ctx& target() const { return target_; }

 private:
  Ctx target_;
  std::vector<Item> items_;
};

Sub weaken(const Ope& o, const Sub& s);
Tm substitute(const Sub& s, const Tm& t);

}  // namespace fitch
