#include "fitch/metatheory.hpp"

#include "fitch/nbe.hpp"
#include "fitch/typecheck.hpp"

namespace fitch {

Tm left_concat(Flavor flavor, const Ctx& prefix, const Ctx& ctx, const Tm& t) {
  const Ty ty = typecheck(flavor, ctx, t);
  if (!(typecheck(flavor, concat(prefix, ctx), t) == ty)) throw TypeError("left weakening changed the type");
  return t;
}

namespace {

// True when some variable of the term, or the source of some extension,
// lies in the first `boundary` entries of the context.
bool reaches(std::size_t boundary, Ctx& ctx, const Ne& n);

bool reaches(std::size_t boundary, Ctx& ctx, const Nf& n) {
  switch (n.kind()) {
    case Nf::Kind::Up: return reaches(boundary, ctx, n.ne());
    case Nf::Kind::Lam:
    case Nf::Kind::Box: {
      ctx.push_back(n.kind() == Nf::Kind::Lam ? CtxEntry::var(n.dom()) : CtxEntry::lock());
      const bool r = reaches(boundary, ctx, n.body());
      ctx.pop_back();
      return r;
    }
    case Nf::Kind::Nat:
      for (const auto& f : n.factors())
        if (reaches(boundary, ctx, f)) return true;
      return false;
  }
  return true;
}

bool reaches(std::size_t boundary, Ctx& ctx, const Ne& n) {
  switch (n.kind()) {
    case Ne::Kind::Var: {
      // Position of the variable; the term is checked, so no lock intervenes.
      return ctx.size() - 1 - n.index() < boundary;
    }
    case Ne::Kind::App: return reaches(boundary, ctx, n.fun()) || reaches(boundary, ctx, n.arg());
    case Ne::Kind::Unbox: {
      const std::size_t k = n.ext().size();
      if (ctx.size() - k < boundary) return true;
      Ctx inner(ctx.begin(), ctx.end() - static_cast<std::ptrdiff_t>(k));
      return reaches(boundary, inner, n.scrut());
    }
  }
  return true;
}

}  // namespace

std::optional<Nf> strengthen_nf(Flavor flavor, const Ctx& prefix, const Ctx& ctx, const Nf& n) {
  Ctx full = concat(prefix, ctx);
  const Ty ty = typecheck(flavor, full, n);
  if (reaches(prefix.size(), full, n)) return std::nullopt;
  if (!(typecheck(flavor, ctx, n) == ty)) throw TypeError("strengthening changed the type");
  return n;
}

Tm denecessitate(Flavor flavor, const Tm& u) {
  const Ty ty = typecheck(flavor, {}, u);
  if (!ty.is_box()) throw TypeError("denecessitation needs a closed term of box type, got " + to_string(ty));
  const Nf n = norm(flavor, {}, u, ty);
  // A closed normal form of box type has no neutral to be headed by.
  if (n.kind() != Nf::Kind::Box) throw std::logic_error("closed box normal form is not a box");
  auto v = strengthen_nf(flavor, {CtxEntry::lock()}, {}, n.body());
  if (!v) throw std::logic_error("closed normal form mentions a variable");
  return embed(*v);
}

}  // namespace fitch
