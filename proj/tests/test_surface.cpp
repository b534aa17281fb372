#include <gtest/gtest.h>

#include "fitch/equiv.hpp"
#include "fitch/nbe.hpp"
#include "fitch/surface.hpp"
#include "fitch/typecheck.hpp"
#include "support.hpp"

namespace fitch::testing {
namespace {

CtxItem named(std::string n, Ty t) { return {std::move(n), V(std::move(t)), {}}; }
CtxItem lock() { return {std::nullopt, L(), {}}; }

Tm elab(Flavor f, const Scope& s, std::string_view src) { return elaborate(f, false, s, parse_term(src)).tm; }

TEST(Parse, ProblemFile) {
  const ProblemFile p = parse_problem("logic K; ctx x:[]i, #; norm unbox x");
  EXPECT_EQ(p.logic, Flavor::K);
  EXPECT_FALSE(p.nat);
  ASSERT_EQ(p.ctx.size(), 2u);
  EXPECT_EQ(p.ctx[0].name, "x");
  EXPECT_EQ(p.ctx[0].entry, V(Box(I())));
  EXPECT_TRUE(p.ctx[1].entry.is_lock());
  ASSERT_EQ(p.directives.size(), 1u);
  EXPECT_EQ(p.directives[0].kind, Directive::Kind::Norm);
  EXPECT_EQ(p.directives[0].lhs.kind, STerm::Kind::Unbox);
}

TEST(Parse, EqAndExt) {
  const ProblemFile p = parse_problem("logic S4;\next nat;\nctx ;\ncheck lift 2 * lift 3\neq lift 1; lift 1 -- done\n");
  EXPECT_TRUE(p.nat);
  EXPECT_TRUE(p.ctx.empty());
  ASSERT_EQ(p.directives.size(), 2u);
  EXPECT_EQ(p.directives[1].kind, Directive::Kind::Eq);
  EXPECT_EQ(p.directives[1].pos.line, 5u);
  ASSERT_TRUE(p.directives[1].rhs.has_value());
}

TEST(Parse, Types) {
  EXPECT_EQ(parse_type("i -> i -> i"), Fn(I(), Fn(I(), I())));
  EXPECT_EQ(parse_type("(i -> i) -> i"), Fn(Fn(I(), I()), I()));
  EXPECT_EQ(parse_type("[]i -> []i"), Fn(Box(I()), Box(I())));
  EXPECT_EQ(parse_type("[](i -> Nat)"), Box(Fn(I(), N())));
}

TEST(Parse, TermPrecedence) {
  EXPECT_EQ(render(parse_term("f x y")), "f x y");
  EXPECT_EQ(render(parse_term("f (x y)")), "f (x y)");
  EXPECT_EQ(render(parse_term("\\x:i. f x")), "\\x:i. f x");
  EXPECT_EQ(render(parse_term("box unbox.2 x")), "box (unbox.2 x)");
  EXPECT_EQ(render(parse_term("lift 2 * f x * y")), "lift 2 * f x * y");
}

TEST(Parse, Errors) {
  try {
    parse_problem("logic K;\nctx x:i;\nnorm )");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.pos.line, 3u);
    EXPECT_EQ(e.pos.col, 6u);
  }
  EXPECT_THROW(parse_problem("logic Q; ctx ; norm x"), ParseError);
  EXPECT_THROW(parse_problem("logic K; ctx x:i, x:i; norm x"), ParseError);
  EXPECT_THROW(parse_problem("logic K; ctx ;"), ParseError);
  EXPECT_THROW(parse_problem("logic K; ctx x:i; norm x $"), ParseError);
}

TEST(Elaborate, UnboxInference) {
  const Scope k = Scope::from({named("x", Box(I())), lock()});
  EXPECT_EQ(elab(Flavor::K, k, "unbox x"), Tm::unbox(Tm::var(0), Ext::lock()));

  const Scope s = Scope::from({named("x", Box(I()))});
  EXPECT_EQ(elab(Flavor::S4, s, "unbox x"), Tm::unbox(Tm::var(0), Ext::none()));
  EXPECT_EQ(elaborate(Flavor::S4, false, s, parse_term("unbox.0 x")).ty, I());

  const Scope sy = Scope::from({named("x", Box(I())), named("y", I())});
  const Tm forced = elab(Flavor::S4, sy, "unbox.1 x");
  EXPECT_EQ(forced, Tm::unbox(Tm::var(0), E({V(I())})));
  EXPECT_EQ(norm(Flavor::S4, sy.ctx, forced), norm(Flavor::S4, sy.ctx, Tm::unbox(Tm::var(1), Ext::none())));
}

TEST(Elaborate, Errors) {
  const Scope s = Scope::from({named("x", Box(I()))});
  EXPECT_THROW(elab(Flavor::K, s, "unbox x"), ElabError);
  EXPECT_THROW(elab(Flavor::S4, s, "y"), ElabError);
  EXPECT_THROW(elab(Flavor::S4, s, "unbox.2 x"), ElabError);
  EXPECT_THROW(elab(Flavor::K, s, "box x"), ElabError);
  EXPECT_THROW(elab(Flavor::K, s, "x x"), ElabError);
  EXPECT_THROW(elab(Flavor::K, s, "lift 2"), ElabError);
  EXPECT_EQ(elaborate(Flavor::K, true, s, parse_term("lift 2 * lift 3")).ty, N());
}

TEST(Elaborate, Shadowing) {
  const Scope s = Scope::from({named("x", I())});
  EXPECT_EQ(elab(Flavor::K, s, "\\x:i -> i. x"), Tm::lam(Fn(I(), I()), Tm::var(0)));
  EXPECT_EQ(elab(Flavor::K, s, "\\y:i. x"), Tm::lam(I(), Tm::var(1)));
}

TEST(Pretty, Examples) {
  const Scope b = Scope::from({named("x", Box(I()))});
  EXPECT_EQ(pretty(Flavor::K, b, Nf::box(Nf::up(Ne::unbox(Ne::var(0), Ext::lock())))), "box (unbox x)");
  EXPECT_EQ(pretty(Flavor::K, Scope{}, Nf::lam(I(), Nf::up(Ne::var(0)))), "\\x:i. x");
  EXPECT_EQ(pretty(Flavor::K, Scope{}, Nf::nat(6, {})), "lift 6");
  // Names in scope are not reused for binders.
  const Scope x = Scope::from({named("x", I())});
  EXPECT_EQ(pretty(Flavor::K, x, Nf::lam(I(), Nf::up(Ne::var(1)))), "\\y:i. x");
  // The forced suffix is printed only when inference would differ.
  const Scope sy = Scope::from({named("x", Box(I())), named("y", I())});
  EXPECT_EQ(pretty(Flavor::S4, sy, Tm::unbox(Tm::var(0), E({V(I())}))), "unbox.1 x");
  EXPECT_EQ(pretty(Flavor::S4, sy, Tm::unbox(Tm::var(1), Ext::none())), "unbox x");
}

TEST(Pretty, RoundTrip) {
  const std::vector<CtxItem> items{named("x", Box(I())), lock(), named("y", I()), named("f", Box(Fn(I(), I())))};
  const Scope scope = Scope::from(items);
  std::size_t checked = 0;
  for (Flavor f : kFlavors)
    for (const Ty& ty : {I(), Box(I()), Fn(I(), I()), Box(Fn(I(), I()))}) {
      for (const auto& n : enumerate_nfs(f, scope.ctx, ty, 7)) {
        const std::string text = pretty(f, scope, n);
        EXPECT_EQ(elab(f, scope, text), embed(n)) << to_string(f) << " " << text;
        ++checked;
      }
      for (const auto& t : enumerate_terms(f, scope.ctx, ty, 6)) {
        const std::string text = pretty(f, scope, t);
        EXPECT_EQ(elab(f, scope, text), t) << to_string(f) << " " << text;
        ++checked;
      }
    }
  EXPECT_GT(checked, 500u);
}

TEST(Pretty, RoundTripNat) {
  const Scope scope = Scope::from({named("n", N()), named("b", Box(N()))});
  EnumOptions opts;
  opts.nat = true;
  std::size_t checked = 0;
  for (const Ty& ty : {N(), Box(N()), Fn(N(), N())})
    for (const auto& n : enumerate_nfs(Flavor::K, scope.ctx, ty, 6, opts)) {
      const std::string text = pretty(Flavor::K, scope, n);
      EXPECT_EQ(elaborate(Flavor::K, true, scope, parse_term(text)).tm, embed(n)) << text;
      ++checked;
    }
  EXPECT_GT(checked, 20u);
}

}  // namespace
}  // namespace fitch::testing
