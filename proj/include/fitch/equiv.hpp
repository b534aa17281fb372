#pragma once

// Deciding βη-equivalence, plus the generators and the bounded rewriting
// oracle that tests use as independent ground truth.

#include <cstddef>
#include <set>
#include <string_view>
#include <vector>

#include "fitch/syntax.hpp"

namespace fitch {

/// norm(t) == norm(u). Throws TypeError when the two terms do not check at
/// the same type in `ctx`.
bool decide_equiv(Flavor flavor, const Ctx& ctx, const Tm& t, const Tm& u);

enum class Rule : std::uint8_t { FunBeta, FunEta, BoxBeta, BoxEta, S4Explicit, NatArith };

std::string_view to_string(Rule r);

/// One application of an equational rule, at `path` (child positions from
/// the root: 0 = first child, 1 = second child), producing the whole
/// rewritten term `result`.
struct RewriteStep {
  Rule rule;
  bool forward;  // false for the right-to-left reading of the rule
  std::vector<std::size_t> path;
  Tm result;
};

/// All single-step rewrites of `t`, in either direction of each rule except
/// β (forward only) and literal folding (forward only). η is expanded only
/// at positions that are not already a λ / box.
std::vector<RewriteStep> rewrite_steps(Flavor flavor, const Ctx& ctx, const Tm& t);

/// Terms reachable from `t` in at most `fuel` rewrite steps.
std::set<Tm> rewrite_closure(Flavor flavor, const Ctx& ctx, const Tm& t, std::size_t fuel);

struct EnumOptions {
  /// Generate `lift k` and `*` at type Nat. Nat is added to the type
  /// universe when set.
  bool nat = false;
  std::vector<std::uint64_t> literals{0, 1, 2};
  /// Additional candidate types for the argument of an application.
  std::vector<Ty> extra_types;
};

/// Every well-typed term of type `ty` in `ctx` with at most `max_size`
/// constructors, ordered by size and then structurally, without duplicates.
/// Applications range over argument types drawn from the subformulas of
/// `ty` and of the context (plus EnumOptions::extra_types).
std::vector<Tm> enumerate_terms(Flavor flavor, const Ctx& ctx, const Ty& ty, std::size_t max_size,
                                const EnumOptions& opts = {});

/// Every normal form (η-long, Nat products with sorted factors) of type
/// `ty` in `ctx` whose embedding has at most `max_size` constructors.
/// Unbox suffixes range over all valid extensions, canonical or not.
std::vector<Nf> enumerate_nfs(Flavor flavor, const Ctx& ctx, const Ty& ty, std::size_t max_size,
                              const EnumOptions& opts = {});

}  // namespace fitch
