#pragma once

#include <functional>
#include <vector>

#include "fitch/syntax.hpp"

namespace fitch::testing {

inline Ty I() { return Ty::base(); }
inline Ty N() { return Ty::nat(); }
inline Ty Box(Ty t) { return Ty::box(std::move(t)); }
inline Ty Fn(Ty a, Ty b) { return Ty::fun(std::move(a), std::move(b)); }

inline CtxEntry V(Ty t) { return CtxEntry::var(std::move(t)); }
inline CtxEntry L() { return CtxEntry::lock(); }
inline Ext E(std::vector<CtxEntry> s) { return Ext{std::move(s)}; }

constexpr Flavor kFlavors[] = {Flavor::K, Flavor::T, Flavor::K4, Flavor::S4};

/// Every OPE whose target is `target`: each Var entry is kept or dropped,
/// each lock kept.
inline std::vector<Ope> opes_into(const Ctx& target) {
  std::vector<Ope> out{Ope()};
  for (const auto& e : target) {
    std::vector<Ope> next;
    for (const auto& o : out) {
      if (e.is_lock()) {
        next.push_back(o.keep_lock());
      } else {
        next.push_back(o.keep(e.ty()));
        next.push_back(o.drop(e.ty()));
      }
    }
    out = std::move(next);
  }
  return out;
}

/// Every context over the given entry alphabet with at most `n` entries.
inline std::vector<Ctx> contexts_upto(std::size_t n, const std::vector<CtxEntry>& alphabet) {
  std::vector<Ctx> out{Ctx{}};
  std::vector<Ctx> layer{Ctx{}};
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<Ctx> next;
    for (const auto& c : layer)
      for (const auto& a : alphabet) {
        Ctx d = c;
        d.push_back(a);
        next.push_back(d);
      }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

}  // namespace fitch::testing
