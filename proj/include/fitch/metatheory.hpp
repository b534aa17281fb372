#pragma once

// Corollaries of normalization: weakening on the left, strengthening of
// normal forms, and denecessitation (⊢ □A implies ⊢ A).

#include <optional>

#include "fitch/syntax.hpp"

namespace fitch {

/// Moves `t` from `ctx` to `prefix ++ ctx`. Indices count from the right and
/// extensions are stored as suffixes, so the tree itself is unchanged; the
/// function checks `t` in both contexts and returns it. Throws TypeError if
/// `t` does not check in `ctx`.
Tm left_concat(Flavor flavor, const Ctx& prefix, const Ctx& ctx, const Tm& t);

/// The inverse on normal forms: `n` over `prefix ++ ctx` as a normal form
/// over `ctx`, or nullopt when a variable of `n` resolves into `prefix`.
std::optional<Nf> strengthen_nf(Flavor flavor, const Ctx& prefix, const Ctx& ctx, const Nf& n);

/// For a closed `u : □A`, a closed term of type A whose boxing is
/// equivalent to `u`. Throws TypeError if `u` is not closed at a box type.
Tm denecessitate(Flavor flavor, const Tm& u);

}  // namespace fitch
