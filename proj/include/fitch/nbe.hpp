#pragma once

// Normalization by evaluation over the possible-world model whose worlds
// are contexts, whose intuitionistic accessibility is Ope and whose modal
// accessibility is Ext.

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "fitch/nat.hpp"
#include "fitch/syntax.hpp"

namespace fitch {

class Val;

/// ⟦A → B⟧_w: for every w ≤ w' and argument at w', a result at w'.
using FunClosure = std::function<Val(const Ope&, const Val&)>;
/// ⟦□A⟧_w: for every w ≤ w' and w' ◁ v, a value at v.
using BoxClosure = std::function<Val(const Ope&, const Ext&)>;

class Val {
 public:
  enum class Kind : std::uint8_t { Neutral, Fun, Box, Nat };

  static Val neutral(Ne n);
  static Val fun(FunClosure f);
  static Val box(BoxClosure b);
  static Val nat(NatVal n);

  Kind kind() const;
  const Ne& neutral() const;
  const NatVal& nat() const;
  /// Kripke application; `o` starts at this value's world.
  Val apply(const Ope& o, const Val& arg) const;
  /// Kripke unboxing; `o` starts at this value's world, `e` at o's target.
  Val open(const Ope& o, const Ext& e) const;

 private:
  struct Node;
  explicit Val(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// A semantic environment ⟦Γ⟧_w. Items mirror the entries of Γ; the values
/// to the left of a lock item live in that lock's hidden world u, where
/// u ++ suffix(ext) is the world of the segment to its right.
class Env {
 public:
  struct Item {
    std::optional<Val> val;  // Var entry
    Ext ext;                 // Lock entry: u ◁ (world of the next segment)
  };

  /// ⟦[]⟧_w, the unit environment at world w.
  explicit Env(Ctx world = {}) : world_(std::move(world)) {}

  Env extend(Val v) const;
  /// Pushes a lock whose hidden world is the current world.
  Env extend_lock(Ext m) const;

  const Ctx& world() const { return world_; }
  std::span<const Item> items() const { return items_; }

 private:
  Ctx world_;
  std::vector<Item> items_;
};

/// Monotonicity of values and environments along an Ope.
Val wk_val(const Ope& o, const Val& v);
Env wk_env(const Ope& o, const Env& env);

/// Result of trimming: an environment for Δ at hidden world u, and u ◁ w.
struct Trimmed {
  Env env;
  Ext ext;
};

/// Projects ρ : ⟦Γ⟧_w along e : Δ ◁ Γ to ⟦Δ,🔒⟧_w. Walks the suffix right to
/// left: Var entries discard a value, Lock entries splice the stored
/// extension; an empty suffix uses reflexivity.
Trimmed trim(Flavor flavor, const Env& env, const Ext& e);

Val eval(Flavor flavor, const Tm& t, const Env& env);

Val reflect(const Ty& ty, const Ne& n);
Nf reify(const Ty& ty, const Val& v, const Ctx& world);

/// The identity environment ⟦Γ⟧_Γ.
Env fresh_env(const Ctx& ctx);

/// reify ∘ eval at the identity environment. Throws TypeError when `t`
/// does not check in `ctx`.
Nf norm(Flavor flavor, const Ctx& ctx, const Tm& t);
/// As above, with the already-known type of `t`.
Nf norm(Flavor flavor, const Ctx& ctx, const Tm& t, const Ty& ty);

/// True when every unbox suffix in `n` is empty or starts with a lock, the
/// shape norm produces.
bool is_canonical(const Nf& n);
bool is_canonical(const Ne& n);

}  // namespace fitch
