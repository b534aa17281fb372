#pragma once

#include "fitch/syntax.hpp"

namespace fitch {

/// Synthesizes the type of `t` in `ctx`, or throws TypeError.
///
/// Variables may not be referenced across a lock; an unbox must name a
/// suffix of the current context that is a valid extension for `flavor`,
/// and its scrutinee is checked in the context with that suffix removed.
Ty typecheck(Flavor flavor, const Ctx& ctx, const Tm& t);

/// Type of the variable with de Bruijn index `idx`, or TypeError when it is
/// out of range or hidden behind a lock.
Ty lookup_var(const Ctx& ctx, std::size_t idx);

/// Checks a normal form / neutral and returns its type.
Ty typecheck(Flavor flavor, const Ctx& ctx, const Nf& n);
Ty typecheck(Flavor flavor, const Ctx& ctx, const Ne& n);

}  // namespace fitch
