#include <gtest/gtest.h>

#include <random>

#include "fitch/equiv.hpp"
#include "fitch/nat.hpp"
#include "fitch/nbe.hpp"
#include "fitch/typecheck.hpp"
#include "support.hpp"

namespace fitch::testing {
namespace {

NatVal random_nat(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint64_t> coeff(0, 20);
  std::uniform_int_distribution<std::size_t> len(0, 3), idx(0, 3);
  NatVal v;
  v.coeff = coeff(rng);
  if (v.coeff != 0)
    for (std::size_t n = len(rng); n > 0; --n) v.factors.push_back(Ne::var(idx(rng)));
  return v;
}

TEST(Nat, MulExamples) {
  EXPECT_EQ(mul_val(NatVal::literal(2), NatVal::literal(3)), NatVal::literal(6));
  EXPECT_EQ(mul_val(NatVal::literal(0), NatVal{5, {Ne::var(0)}}), NatVal::literal(0));
  const NatVal nm = mul_val(NatVal::neutral(Ne::var(0)), NatVal::neutral(Ne::var(1)));
  const NatVal mn = mul_val(NatVal::neutral(Ne::var(1)), NatVal::neutral(Ne::var(0)));
  EXPECT_EQ(nm, mn);
  EXPECT_EQ(nm.factors.size(), 2u);
}

TEST(Nat, MulOverflowThrows) {
  EXPECT_THROW(mul_val(NatVal::literal(1ull << 40), NatVal::literal(1ull << 40)), std::overflow_error);
}

TEST(Nat, MonoidLawsOnRandomTriples) {
  std::mt19937_64 rng(7);
  const NatVal one = NatVal::literal(1), zero = NatVal::literal(0);
  for (int i = 0; i < 1000; ++i) {
    const NatVal a = random_nat(rng), b = random_nat(rng), c = random_nat(rng);
    EXPECT_EQ(mul_val(a, b), mul_val(b, a));
    EXPECT_EQ(mul_val(mul_val(a, b), c), mul_val(a, mul_val(b, c)));
    EXPECT_EQ(mul_val(one, a), a);
    EXPECT_EQ(mul_val(zero, a), zero);
    // Independent model: coefficient is the product, factor count the sum.
    const NatVal ab = mul_val(a, b);
    EXPECT_EQ(ab.coeff, a.coeff * b.coeff);
    EXPECT_EQ(ab.factors.size(), ab.coeff == 0 ? 0 : a.factors.size() + b.factors.size());
  }
}

TEST(Nat, NormExamples) {
  const Tm t = Tm::box(Tm::mul(Tm::lift(2), Tm::unbox(Tm::box(Tm::lift(3)), Ext::lock())));
  EXPECT_EQ(norm(Flavor::K, {}, t), Nf::box(Nf::nat(6, {})));

  const Ctx g{V(N())};
  EXPECT_EQ(norm(Flavor::K, g, Tm::mul(Tm::lift(1), Tm::var(0))), norm(Flavor::K, g, Tm::var(0)));
  EXPECT_EQ(norm(Flavor::K, g, Tm::mul(Tm::var(0), Tm::lift(0))), Nf::nat(0, {}));
  EXPECT_EQ(norm(Flavor::K, g, Tm::var(0)), Nf::nat(1, {Ne::var(0)}));
}

TEST(Nat, NormIgnoresAssociationAndOrder) {
  const Ctx g{V(N()), V(N()), V(N())};
  const Tm x = Tm::var(0), y = Tm::var(1), z = Tm::var(2);
  const Nf base = norm(Flavor::K, g, Tm::mul(Tm::mul(x, y), z));
  for (const Tm& t : {Tm::mul(x, Tm::mul(y, z)), Tm::mul(Tm::mul(z, y), x), Tm::mul(y, Tm::mul(z, x))})
    EXPECT_EQ(norm(Flavor::K, g, t), base);
  EnumOptions opts;
  opts.nat = true;
  for (const auto& t : enumerate_terms(Flavor::K, {V(N()), V(N())}, N(), 3, opts))
    for (const auto& u : enumerate_terms(Flavor::K, {V(N()), V(N())}, N(), 3, opts))
      EXPECT_EQ(norm(Flavor::K, {V(N()), V(N())}, Tm::mul(t, u)), norm(Flavor::K, {V(N()), V(N())}, Tm::mul(u, t)));
}

TEST(Nat, VariableUnderBoxIsIllTyped) {
  for (Flavor f : kFlavors)
    EXPECT_THROW(typecheck(f, {}, Tm::lam(N(), Tm::box(Tm::var(0)))), TypeError);
}

TEST(Nat, BindingTimeExamples) {
  EXPECT_TRUE(bt_constant_check(Flavor::K, Tm::lam(N(), Tm::box(Tm::lift(5)))));
  const Tm f = Tm::lam(N(), Tm::box(Tm::mul(Tm::lift(2), Tm::lift(3))));
  EXPECT_TRUE(bt_constant_check(Flavor::K, f));
  EXPECT_EQ(norm(Flavor::K, {}, f), Nf::lam(N(), Nf::box(Nf::nat(6, {}))));
  EXPECT_THROW(bt_constant_check(Flavor::K, Tm::lam(I(), Tm::box(Tm::lift(5)))), TypeError);
}

TEST(Nat, BindingTimeExhaustive) {
  EnumOptions opts;
  opts.nat = true;
  const auto fs = enumerate_terms(Flavor::K, {}, Fn(N(), Box(N())), 7, opts);
  EXPECT_GT(fs.size(), 10u);
  for (const auto& f : fs) EXPECT_TRUE(bt_constant_check(Flavor::K, f)) << to_string(f);
}

}  // namespace
}  // namespace fitch::testing
