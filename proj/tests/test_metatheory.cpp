#include <gtest/gtest.h>

#include "fitch/equiv.hpp"
#include "fitch/metatheory.hpp"
#include "fitch/nbe.hpp"
#include "fitch/typecheck.hpp"
#include "support.hpp"

namespace fitch::testing {
namespace {

const Tm kId = Tm::lam(I(), Tm::var(0));

TEST(LeftConcat, Examples) {
  EXPECT_EQ(left_concat(Flavor::K, {}, {}, kId), kId);
  EXPECT_EQ(left_concat(Flavor::K, {L()}, {}, kId), kId);
  const Tm t = Tm::unbox(Tm::box(kId), Ext::lock());
  EXPECT_EQ(left_concat(Flavor::K, {V(I())}, {L()}, t), t);
  EXPECT_EQ(typecheck(Flavor::K, {V(I()), L()}, t), Fn(I(), I()));
  EXPECT_THROW(left_concat(Flavor::K, {V(I())}, {}, Tm::var(0)), TypeError);
}

TEST(LeftConcat, PreservesNormalForms) {
  const Ctx g{V(Box(I())), V(I())};
  for (Flavor f : kFlavors)
    for (const Ctx& prefix : {Ctx{L()}, Ctx{V(I()), L()}, Ctx{V(Box(I()))}})
      for (const auto& t : enumerate_terms(f, g, Box(I()), 5)) {
        const Tm moved = left_concat(f, prefix, g, t);
        EXPECT_EQ(norm(f, concat(prefix, g), moved), norm(f, g, t));
      }
}

TEST(Strengthen, Examples) {
  const Nf up = Nf::up(Ne::var(0));
  EXPECT_EQ(strengthen_nf(Flavor::K, {}, {V(I())}, up), up);
  // [y:i, 🔒] ++ [x:i]: only x is mentioned.
  EXPECT_EQ(strengthen_nf(Flavor::K, {V(I()), L()}, {V(I())}, up), up);
  EXPECT_EQ(strengthen_nf(Flavor::K, {V(I())}, {}, up), std::nullopt);
  EXPECT_EQ(strengthen_nf(Flavor::K, {V(I())}, {V(I())}, Nf::up(Ne::var(1))), std::nullopt);
}

TEST(Strengthen, UnboxSourceInPrefix) {
  // unbox x [🔒] with x in the prefix cannot be strengthened away.
  const Nf n = Nf::up(Ne::unbox(Ne::var(0), Ext::lock()));
  EXPECT_EQ(strengthen_nf(Flavor::K, {V(Box(I()))}, {L()}, n), std::nullopt);
  EXPECT_EQ(strengthen_nf(Flavor::K, {}, {V(Box(I())), L()}, n), n);
}

TEST(Strengthen, LeftInverseOfLeftConcat) {
  const Ctx g{V(Box(I())), L(), V(I())};
  for (Flavor f : kFlavors)
    for (const Ctx& prefix : {Ctx{L()}, Ctx{V(I())}, Ctx{V(I()), L(), V(Box(I()))}})
      for (const auto& n : enumerate_nfs(f, g, Fn(I(), I()), 6)) {
        const auto back = strengthen_nf(f, prefix, g, n);
        ASSERT_TRUE(back.has_value()) << to_string(f) << " " << to_string(n);
        EXPECT_EQ(*back, n);
      }
}

TEST(Denecessitate, Examples) {
  EXPECT_EQ(denecessitate(Flavor::K, Tm::box(kId)), kId);
  const Tm bb = Tm::box(Tm::box(kId));
  const Tm d = denecessitate(Flavor::K4, bb);
  EXPECT_EQ(d.kind(), Tm::Kind::Box);
  EXPECT_EQ(typecheck(Flavor::K4, {}, d), Box(Fn(I(), I())));
  EXPECT_THROW(denecessitate(Flavor::K, kId), TypeError);
  EXPECT_THROW(denecessitate(Flavor::K, Tm::var(0)), TypeError);
}

TEST(Denecessitate, RoundTrip) {
  for (Flavor f : kFlavors)
    for (const Ty& ty : {Box(Fn(I(), I())), Box(Box(Fn(I(), I())))}) {
      const auto us = enumerate_terms(f, {}, ty, 7);
      EXPECT_FALSE(us.empty());
      for (const auto& u : us) {
        const Tm d = denecessitate(f, u);
        EXPECT_EQ(typecheck(f, {}, d), ty.body());
        EXPECT_EQ(norm(f, {}, Tm::box(left_concat(f, {L()}, {}, d))), norm(f, {}, u)) << to_string(u);
      }
    }
}

}  // namespace
}  // namespace fitch::testing
