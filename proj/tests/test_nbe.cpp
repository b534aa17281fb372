#include <gtest/gtest.h>

#include "fitch/equiv.hpp"
#include "fitch/nbe.hpp"
#include "fitch/typecheck.hpp"
#include "support.hpp"

namespace fitch::testing {
namespace {

Ctx snoc(Ctx c, CtxEntry e) {
  c.push_back(std::move(e));
  return c;
}

// Independent η-longness check: every Up sits at the base type.
bool eta_long(Flavor f, const Ctx& ctx, const Nf& n) {
  switch (n.kind()) {
    case Nf::Kind::Up: return typecheck(f, ctx, n.ne()).is_base();
    case Nf::Kind::Lam: return eta_long(f, snoc(ctx, V(n.dom())), n.body());
    case Nf::Kind::Box: return eta_long(f, snoc(ctx, L()), n.body());
    case Nf::Kind::Nat: return true;
  }
  return false;
}

struct Setting {
  Flavor flavor;
  Ctx ctx;
  Ty ty;
};

std::vector<Setting> settings() {
  std::vector<Setting> out;
  const std::vector<Ctx> ctxs{
      {V(I()), V(I())},
      {V(Box(I())), L(), V(I())},
      {V(Box(Fn(I(), I()))), V(I())},
  };
  const std::vector<Ty> tys{I(), Fn(I(), I()), Box(I()), Fn(Box(I()), Box(I())), Box(Box(I()))};
  for (Flavor f : kFlavors)
    for (const auto& c : ctxs)
      for (const auto& t : tys) out.push_back({f, c, t});
  return out;
}

TEST(Nbe, WeakenBaseValue) {
  const Ne n = Ne::var(0);
  const Ope o = Ope().keep(I()).drop(I());
  const Val v = wk_val(o, reflect(I(), n));
  ASSERT_EQ(v.kind(), Val::Kind::Neutral);
  EXPECT_EQ(v.neutral(), Ne::var(1));
}

TEST(Nbe, WeakenAtIdentityIsInvisible) {
  const Ctx g{V(Fn(I(), I())), V(Box(I()))};
  const Val f = reflect(Fn(I(), I()), Ne::var(1));
  EXPECT_EQ(reify(Fn(I(), I()), wk_val(Ope::identity(g), f), g), reify(Fn(I(), I()), f, g));
  const Val b = reflect(Box(I()), Ne::var(0));
  EXPECT_EQ(reify(Box(I()), wk_val(Ope::identity(g), b), g), reify(Box(I()), b, g));
}

TEST(Nbe, EvaluationIsNatural) {
  // Evaluating in a weakened identity environment agrees with weakening
  // the normal form, including environments that contain locks.
  std::size_t checked = 0;
  for (const auto& s : settings()) {
    const Env rho = fresh_env(s.ctx);
    for (const auto& t : enumerate_terms(s.flavor, s.ctx, s.ty, 5)) {
      const Nf base = norm(s.flavor, s.ctx, t);
      for (const auto& o : {Ope::identity(s.ctx).drop(I()),
                            [&] {
                              Ope o;
                              for (const auto& e : s.ctx) {
                                o = e.is_lock() ? o.keep_lock() : o.keep(e.ty());
                                if (e.is_lock()) o = o.drop(Box(I()));
                              }
                              return o;
                            }()}) {
        const Env moved = wk_env(o, rho);
        EXPECT_EQ(moved.world(), o.target());
        EXPECT_EQ(reify(s.ty, eval(s.flavor, t, moved), o.target()), weaken(o, base)) << to_string(t);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 1000u);
}

TEST(Nbe, EvalExamples) {
  const Ctx g{V(I())};
  const Env rho = fresh_env(g);
  EXPECT_EQ(eval(Flavor::K, Tm::var(0), rho).neutral(), Ne::var(0));

  // box t evaluates to a closure; opening it at (id, [🔒]) runs t under a lock.
  const Val b = eval(Flavor::K, Tm::box(Tm::lam(I(), Tm::var(0))), Env{});
  ASSERT_EQ(b.kind(), Val::Kind::Box);
  const Val opened = b.open(Ope(), Ext::lock());
  EXPECT_EQ(reify(Fn(I(), I()), opened, {L()}), Nf::lam(I(), Nf::up(Ne::var(0))));

  const Tm t = Tm::unbox(Tm::box(Tm::lam(I(), Tm::var(0))), Ext::lock());
  EXPECT_EQ(reify(Fn(I(), I()), eval(Flavor::K, t, fresh_env({L()})), {L()}), Nf::lam(I(), Nf::up(Ne::var(0))));
}

TEST(Nbe, TrimSingleLock) {
  const Env inner = fresh_env({V(I())});
  const Ext m = E({L(), V(I())});
  const Env rho = inner.extend_lock(m);
  const Trimmed tr = trim(Flavor::K, rho, Ext::lock());
  EXPECT_EQ(tr.env.world(), inner.world());
  EXPECT_EQ(tr.ext, m);
  EXPECT_EQ(tr.env.items().size(), 1u);
}

TEST(Nbe, TrimReflexive) {
  const Env rho = fresh_env({V(Box(I())), V(I())});
  const Trimmed tr = trim(Flavor::S4, rho, Ext::none());
  EXPECT_EQ(tr.env.world(), rho.world());
  EXPECT_TRUE(tr.ext.empty());
  EXPECT_EQ(tr.env.items().size(), 2u);
}

TEST(Nbe, TrimTwoLocks) {
  const Ctx g{V(Box(I())), L(), L()};
  const Trimmed tr = trim(Flavor::S4, fresh_env(g), E({L(), L()}));
  EXPECT_EQ(tr.ext, E({L(), L()}));
  EXPECT_EQ(tr.env.world(), (Ctx{V(Box(I()))}));
  const Tm t = Tm::unbox(Tm::var(0), Ext::lock());
  const Tm lhs = Tm::unbox(Tm::box(t), E({L(), L()}));
  const Tm rhs = substitute(Sub::identity({V(Box(I()))}).extend_lock(E({L(), L()})), t);
  EXPECT_EQ(norm(Flavor::S4, g, lhs), norm(Flavor::S4, g, rhs));
  EXPECT_EQ(norm(Flavor::S4, g, lhs), Nf::up(Ne::unbox(Ne::var(0), E({L(), L()}))));
}

TEST(Nbe, TrimRejectsMismatch) {
  EXPECT_THROW(trim(Flavor::S4, fresh_env({V(I())}), Ext::lock()), TypeError);
  EXPECT_THROW(trim(Flavor::S4, fresh_env({L()}), E({V(I())})), TypeError);
}

TEST(Nbe, ReifyReflect) {
  EXPECT_EQ(reify(I(), reflect(I(), Ne::var(0)), {V(I())}), Nf::up(Ne::var(0)));
  EXPECT_EQ(reify(Fn(I(), I()), reflect(Fn(I(), I()), Ne::var(0)), {V(Fn(I(), I()))}),
            Nf::lam(I(), Nf::up(Ne::app(Ne::var(1), Nf::up(Ne::var(0))))));
  EXPECT_EQ(reify(Box(I()), reflect(Box(I()), Ne::var(0)), {V(Box(I()))}),
            Nf::box(Nf::up(Ne::unbox(Ne::var(0), Ext::lock()))));
}

TEST(Nbe, FreshEnv) {
  EXPECT_TRUE(fresh_env({}).items().empty());
  const Env one = fresh_env({V(I())});
  ASSERT_EQ(one.items().size(), 1u);
  EXPECT_EQ(one.items()[0].val->neutral(), Ne::var(0));
  const Env lock = fresh_env({L()});
  ASSERT_EQ(lock.items().size(), 1u);
  EXPECT_FALSE(lock.items()[0].val.has_value());
  EXPECT_EQ(lock.items()[0].ext, Ext::lock());
  EXPECT_EQ(lock.world(), (Ctx{L()}));
  // Earlier variables are weakened past later ones.
  const Env two = fresh_env({V(I()), L(), V(I())});
  EXPECT_EQ(two.items()[0].val->neutral(), Ne::var(0));
  EXPECT_EQ(two.items()[1].ext, E({L(), V(I())}));
  EXPECT_EQ(two.items()[2].val->neutral(), Ne::var(0));
}

TEST(Nbe, NormExamples) {
  EXPECT_EQ(norm(Flavor::K, {V(Box(I()))}, Tm::var(0)), Nf::box(Nf::up(Ne::unbox(Ne::var(0), Ext::lock()))));
  EXPECT_EQ(norm(Flavor::K, {L()}, Tm::unbox(Tm::box(Tm::lam(I(), Tm::var(0))), Ext::lock())),
            Nf::lam(I(), Nf::up(Ne::var(0))));
  // The two ways of unboxing under an extra variable.
  const Ctx g{V(Box(I())), V(I())};
  const Nf a = norm(Flavor::S4, g, Tm::unbox(Tm::var(0), E({V(I())})));
  const Nf b = norm(Flavor::S4, g, Tm::unbox(weaken(Ope::identity({V(Box(I()))}).drop(I()), Tm::var(0)), Ext::none()));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, Nf::up(Ne::unbox(Ne::var(1), Ext::none())));
}

TEST(Nbe, NormRejectsIllTyped) {
  EXPECT_THROW(norm(Flavor::K, {V(Box(I()))}, Tm::unbox(Tm::var(0), Ext::none())), TypeError);
}

TEST(Nbe, IdempotentTypedEtaLongCanonical) {
  std::size_t checked = 0;
  for (const auto& s : settings())
    for (const auto& t : enumerate_terms(s.flavor, s.ctx, s.ty, 7)) {
      const Nf n = norm(s.flavor, s.ctx, t);
      const Tm back = embed(n);
      ASSERT_EQ(typecheck(s.flavor, s.ctx, back), s.ty);
      EXPECT_EQ(norm(s.flavor, s.ctx, back), n) << to_string(t);
      EXPECT_TRUE(eta_long(s.flavor, s.ctx, n)) << to_string(n);
      EXPECT_TRUE(is_canonical(n)) << to_string(n);
      ++checked;
    }
  EXPECT_GT(checked, 2500u);
}

TEST(Nbe, StabilityOnCanonicalNormalForms) {
  for (const auto& s : settings()) {
    for (const auto& n : enumerate_nfs(s.flavor, s.ctx, s.ty, 6)) {
      const Nf back = norm(s.flavor, s.ctx, embed(n));
      if (s.flavor == Flavor::K || is_canonical(n)) {
        EXPECT_EQ(back, n) << to_string(s.flavor) << " " << to_string(n);
      } else {
        EXPECT_NE(back, n);
        EXPECT_TRUE(is_canonical(back));
      }
    }
  }
}

TEST(Nbe, ClosedBoxNormalFormsAreBoxes) {
  for (Flavor f : kFlavors)
    for (const Ty& ty : {Box(Fn(I(), I())), Box(Box(I())), Box(Fn(Box(I()), I()))})
      for (const auto& n : enumerate_nfs(f, {}, ty, 7)) EXPECT_EQ(n.kind(), Nf::Kind::Box);
}

}  // namespace
}  // namespace fitch::testing
