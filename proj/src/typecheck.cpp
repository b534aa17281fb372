#include "fitch/typecheck.hpp"

namespace fitch {

Ty lookup_var(const Ctx& ctx, std::size_t idx) {
  std::size_t seen = 0;
  for (auto it = ctx.rbegin(); it != ctx.rend(); ++it) {
    if (it->is_lock()) throw TypeError("variable #" + std::to_string(idx) + " crosses a lock");
    if (seen++ == idx) return it->ty();
  }
  throw TypeError("unbound variable #" + std::to_string(idx));
}

namespace {

Ctx unbox_prefix(Flavor flavor, const Ctx& ctx, const Ext& e) {
  if (!ext_valid(flavor, e))
    throw TypeError("extension " + to_string(e.suffix) + " is not valid in " + std::string(to_string(flavor)));
  if (!ends_with(ctx, e.suffix))
    throw TypeError("extension " + to_string(e.suffix) + " does not match context " + to_string(ctx));
  return drop_last(ctx, e.size());
}

Ctx snoc(Ctx ctx, CtxEntry e) {
  ctx.push_back(std::move(e));
  return ctx;
}

}  // namespace

Ty typecheck(Flavor flavor, const Ctx& ctx, const Tm& t) {
  switch (t.kind()) {
    case Tm::Kind::Var: return lookup_var(ctx, t.index());
    case Tm::Kind::Lam:
      return Ty::fun(t.dom(), typecheck(flavor, snoc(ctx, CtxEntry::var(t.dom())), t.body()));
    case Tm::Kind::App: {
      Ty f = typecheck(flavor, ctx, t.fun());
      if (!f.is_fun()) throw TypeError("applying a term of non-function type " + to_string(f));
      Ty a = typecheck(flavor, ctx, t.arg());
      if (!(a == f.dom()))
        throw TypeError("argument has type " + to_string(a) + " but " + to_string(f.dom()) + " was expected");
      return f.cod();
    }
    case Tm::Kind::Box: return Ty::box(typecheck(flavor, snoc(ctx, CtxEntry::lock()), t.body()));
    case Tm::Kind::Unbox: {
      Ty s = typecheck(flavor, unbox_prefix(flavor, ctx, t.ext()), t.scrut());
      if (!s.is_box()) throw TypeError("unboxing a term of non-box type " + to_string(s));
      return s.body();
    }
    case Tm::Kind::Lift: return Ty::nat();
    case Tm::Kind::Mul: {
      for (const Tm* side : {&t.lhs(), &t.rhs()}) {
        Ty s = typecheck(flavor, ctx, *side);
        if (!s.is_nat()) throw TypeError("multiplying a term of type " + to_string(s));
      }
      return Ty::nat();
    }
  }
  throw TypeError("unknown term");
}

Ty typecheck(Flavor flavor, const Ctx& ctx, const Ne& n) {
  switch (n.kind()) {
    case Ne::Kind::Var: return lookup_var(ctx, n.index());
    case Ne::Kind::App: {
      Ty f = typecheck(flavor, ctx, n.fun());
      if (!f.is_fun()) throw TypeError("neutral application of non-function");
      Ty a = typecheck(flavor, ctx, n.arg());
      if (!(a == f.dom())) throw TypeError("neutral application argument mismatch");
      return f.cod();
    }
    case Ne::Kind::Unbox: {
      Ty s = typecheck(flavor, unbox_prefix(flavor, ctx, n.ext()), n.scrut());
      if (!s.is_box()) throw TypeError("neutral unbox of non-box");
      return s.body();
    }
  }
  throw TypeError("unknown neutral");
}

Ty typecheck(Flavor flavor, const Ctx& ctx, const Nf& n) {
  switch (n.kind()) {
    case Nf::Kind::Up: {
      Ty t = typecheck(flavor, ctx, n.ne());
      if (!t.is_base()) throw TypeError("up applied at non-base type " + to_string(t));
      return t;
    }
    case Nf::Kind::Lam: return Ty::fun(n.dom(), typecheck(flavor, snoc(ctx, CtxEntry::var(n.dom())), n.body()));
    case Nf::Kind::Box: return Ty::box(typecheck(flavor, snoc(ctx, CtxEntry::lock()), n.body()));
    case Nf::Kind::Nat:
      for (const auto& f : n.factors())
        if (!typecheck(flavor, ctx, f).is_nat()) throw TypeError("non-Nat factor in product");
      return Ty::nat();
  }
  throw TypeError("unknown normal form");
}

}  // namespace fitch
