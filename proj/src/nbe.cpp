#include "fitch/nbe.hpp"

#include <stdexcept>

#include "fitch/typecheck.hpp"

namespace fitch {

struct Val::Node {
  Kind kind;
  std::optional<Ne> ne;
  FunClosure fun;
  BoxClosure box;
  NatVal nat;
};

Val Val::neutral(Ne n) { return Val(std::make_shared<const Node>(Node{Kind::Neutral, std::move(n), {}, {}, {}})); }
Val Val::fun(FunClosure f) { return Val(std::make_shared<const Node>(Node{Kind::Fun, {}, std::move(f), {}, {}})); }
Val Val::box(BoxClosure b) { return Val(std::make_shared<const Node>(Node{Kind::Box, {}, {}, std::move(b), {}})); }
Val Val::nat(NatVal n) { return Val(std::make_shared<const Node>(Node{Kind::Nat, {}, {}, {}, std::move(n)})); }

Val::Kind Val::kind() const { return node_->kind; }

const Ne& Val::neutral() const {
  if (node_->kind != Kind::Neutral) throw std::logic_error("value is not neutral");
  return *node_->ne;
}

const NatVal& Val::nat() const {
  if (node_->kind != Kind::Nat) throw std::logic_error("value is not a natural number");
  return node_->nat;
}

Val Val::apply(const Ope& o, const Val& arg) const {
  if (node_->kind != Kind::Fun) throw std::logic_error("applying a non-function value");
  return node_->fun(o, arg);
}

Val Val::open(const Ope& o, const Ext& e) const {
  if (node_->kind != Kind::Box) throw std::logic_error("unboxing a non-box value");
  return node_->box(o, e);
}

// ---------------------------------------------------------------------------
// Environments

Env Env::extend(Val v) const {
  Env out = *this;
  out.items_.push_back({std::move(v), Ext{}});
  return out;
}

Env Env::extend_lock(Ext m) const {
  Env out = *this;
  out.world_.insert(out.world_.end(), m.suffix.begin(), m.suffix.end());
  out.items_.push_back({std::nullopt, std::move(m)});
  return out;
}

Val wk_val(const Ope& o, const Val& v) {
  if (o.is_identity()) return v;
  switch (v.kind()) {
    case Val::Kind::Neutral: return Val::neutral(weaken(o, v.neutral()));
    case Val::Kind::Fun:
      return Val::fun([o, v](const Ope& o2, const Val& a) { return v.apply(compose(o, o2), a); });
    case Val::Kind::Box:
      return Val::box([o, v](const Ope& o2, const Ext& e) { return v.open(compose(o, o2), e); });
    case Val::Kind::Nat: {
      NatVal n{v.nat().coeff, {}};
      for (const auto& f : v.nat().factors) n.factors.push_back(weaken(o, f));
      return Val::nat(std::move(n));
    }
  }
  throw std::logic_error("unreachable");
}

Env wk_env(const Ope& o, const Env& env) {
  if (o.is_identity()) return env;
  const auto items = env.items();
  std::vector<Env::Item> out(items.size());
  Ope cur = o;
  for (std::size_t i = items.size(); i > 0; --i) {
    const auto& it = items[i - 1];
    if (it.val) {
      out[i - 1] = {wk_val(cur, *it.val), Ext{}};
    } else {
      auto f = factor(it.ext, cur);
      out[i - 1] = {std::nullopt, std::move(f.ext)};
      cur = std::move(f.ope);
    }
  }
  Env r(cur.target());
  for (auto& it : out) r = it.val ? r.extend(std::move(*it.val)) : r.extend_lock(std::move(it.ext));
  return r;
}

Trimmed trim(Flavor flavor, const Env& env, const Ext& e) {
  const auto items = env.items();
  std::size_t top = items.size();
  Ext acc;
  for (std::size_t si = e.size(); si > 0; --si) {
    if (top == 0) throw TypeError("environment too short for extension");
    const auto& it = items[--top];
    if (e.suffix[si - 1].is_var()) {
      if (!it.val) throw TypeError("environment/extension mismatch");
      continue;
    }
    if (it.val) throw TypeError("environment/extension mismatch");
    acc = ext_concat(flavor, it.ext, acc);
  }
  // Rebuild from the leftmost world; extend_lock re-appends each suffix.
  std::size_t trailing = acc.size();
  for (std::size_t i = 0; i < top; ++i)
    if (!items[i].val) trailing += items[i].ext.size();
  Env rest(drop_last(env.world(), trailing));
  for (std::size_t i = 0; i < top; ++i) rest = items[i].val ? rest.extend(*items[i].val) : rest.extend_lock(items[i].ext);
  return {std::move(rest), std::move(acc)};
}

// ---------------------------------------------------------------------------
// Evaluation

Val eval(Flavor flavor, const Tm& t, const Env& env) {
  switch (t.kind()) {
    case Tm::Kind::Var: {
      const auto items = env.items();
      std::size_t seen = 0;
      for (std::size_t i = items.size(); i > 0; --i) {
        if (!items[i - 1].val) throw TypeError("variable crosses a lock");
        if (seen++ == t.index()) return *items[i - 1].val;
      }
      throw TypeError("unbound variable");
    }
    case Tm::Kind::Lam:
      return Val::fun([flavor, t, env](const Ope& o, const Val& a) {
        return eval(flavor, t.body(), wk_env(o, env).extend(a));
      });
    case Tm::Kind::App:
      return eval(flavor, t.fun(), env).apply(Ope::identity(env.world()), eval(flavor, t.arg(), env));
    case Tm::Kind::Box:
      return Val::box([flavor, t, env](const Ope& o, const Ext& e) {
        return eval(flavor, t.body(), wk_env(o, env).extend_lock(e));
      });
    case Tm::Kind::Unbox: {
      Trimmed tr = trim(flavor, env, t.ext());
      Ope id = Ope::identity(tr.env.world());
      return eval(flavor, t.scrut(), tr.env).open(id, tr.ext);
    }
    case Tm::Kind::Lift: return Val::nat(NatVal::literal(t.literal()));
    case Tm::Kind::Mul:
      return Val::nat(mul_val(eval(flavor, t.lhs(), env).nat(), eval(flavor, t.rhs(), env).nat()));
  }
  throw std::logic_error("unreachable");
}

Val reflect(const Ty& ty, const Ne& n) {
  switch (ty.kind()) {
    case Ty::Kind::Base: return Val::neutral(n);
    case Ty::Kind::Nat: return Val::nat(NatVal::neutral(n));
    case Ty::Kind::Fun:
      return Val::fun([ty, n](const Ope& o, const Val& a) {
        return reflect(ty.cod(), Ne::app(weaken(o, n), reify(ty.dom(), a, o.target())));
      });
    case Ty::Kind::Box:
      return Val::box([ty, n](const Ope& o, const Ext& e) { return reflect(ty.body(), Ne::unbox(weaken(o, n), e)); });
  }
  throw std::logic_error("unreachable");
}

Nf reify(const Ty& ty, const Val& v, const Ctx& world) {
  switch (ty.kind()) {
    case Ty::Kind::Base: return Nf::up(v.neutral());
    case Ty::Kind::Nat: return v.nat().to_nf();
    case Ty::Kind::Fun: {
      Ope up = Ope::identity(world).drop(ty.dom());
      Val r = v.apply(up, reflect(ty.dom(), Ne::var(0)));
      Ctx inner = world;
      inner.push_back(CtxEntry::var(ty.dom()));
      return Nf::lam(ty.dom(), reify(ty.cod(), r, inner));
    }
    case Ty::Kind::Box: {
      Val r = v.open(Ope::identity(world), Ext::lock());
      Ctx inner = world;
      inner.push_back(CtxEntry::lock());
      return Nf::box(reify(ty.body(), r, inner));
    }
  }
  throw std::logic_error("unreachable");
}

Env fresh_env(const Ctx& ctx) {
  Env env;
  for (const auto& entry : ctx) {
    if (entry.is_lock()) {
      env = env.extend_lock(Ext::lock());
    } else {
      env = wk_env(Ope::identity(env.world()).drop(entry.ty()), env).extend(reflect(entry.ty(), Ne::var(0)));
    }
  }
  return env;
}

Nf norm(Flavor flavor, const Ctx& ctx, const Tm& t, const Ty& ty) {
  return reify(ty, eval(flavor, t, fresh_env(ctx)), ctx);
}

Nf norm(Flavor flavor, const Ctx& ctx, const Tm& t) { return norm(flavor, ctx, t, typecheck(flavor, ctx, t)); }

bool is_canonical(const Ne& n) {
  switch (n.kind()) {
    case Ne::Kind::Var: return true;
    case Ne::Kind::App: return is_canonical(n.fun()) && is_canonical(n.arg());
    case Ne::Kind::Unbox:
      return (n.ext().empty() || n.ext().suffix.front().is_lock()) && is_canonical(n.scrut());
  }
  return false;
}

bool is_canonical(const Nf& n) {
  switch (n.kind()) {
    case Nf::Kind::Up: return is_canonical(n.ne());
    case Nf::Kind::Lam:
    case Nf::Kind::Box: return is_canonical(n.body());
    case Nf::Kind::Nat:
      for (const auto& f : n.factors())
        if (!is_canonical(f)) return false;
      return true;
  }
  return false;
}

}  // namespace fitch
