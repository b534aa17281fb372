#include "fitch/equiv.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <tuple>

#include "fitch/nbe.hpp"
#include "fitch/typecheck.hpp"

namespace fitch {

bool decide_equiv(Flavor flavor, const Ctx& ctx, const Tm& t, const Tm& u) {
  const Ty a = typecheck(flavor, ctx, t);
  const Ty b = typecheck(flavor, ctx, u);
  if (!(a == b)) throw TypeError("cannot compare a term of type " + to_string(a) + " with one of type " + to_string(b));
  return norm(flavor, ctx, t, a) == norm(flavor, ctx, u, b);
}

std::string_view to_string(Rule r) {
  switch (r) {
    case Rule::FunBeta: return "fun-beta";
    case Rule::FunEta: return "fun-eta";
    case Rule::BoxBeta: return "box-beta";
    case Rule::BoxEta: return "box-eta";
    case Rule::S4Explicit: return "explicit-weakening";
    case Rule::NatArith: return "nat-arith";
  }
  return "?";
}

namespace {

Ctx snoc(Ctx ctx, CtxEntry e) {
  ctx.push_back(std::move(e));
  return ctx;
}

struct Local {
  Rule rule;
  bool forward;
  Tm result;
};

std::size_t leading_vars(const std::vector<CtxEntry>& s) {
  std::size_t k = 0;
  while (k < s.size() && s[k].is_var()) ++k;
  return k;
}

std::vector<Local> local_rewrites(Flavor flavor, const Ctx& ctx, const Tm& t, const Ty& ty) {
  std::vector<Local> out;
  switch (t.kind()) {
    case Tm::Kind::App:
      if (t.fun().kind() == Tm::Kind::Lam)
        out.push_back({Rule::FunBeta, true, substitute(Sub::identity(ctx).extend(t.arg()), t.fun().body())});
      break;
    case Tm::Kind::Lam: {
      const Tm& b = t.body();
      if (b.kind() == Tm::Kind::App && b.arg() == Tm::var(0)) {
        if (auto f = unweaken(Ope::identity(ctx).drop(t.dom()), b.fun())) out.push_back({Rule::FunEta, false, *f});
      }
      break;
    }
    case Tm::Kind::Box: {
      const Tm& b = t.body();
      if (b.kind() == Tm::Kind::Unbox && b.ext() == Ext::lock()) out.push_back({Rule::BoxEta, false, b.scrut()});
      break;
    }
    case Tm::Kind::Unbox: {
      const auto& suf = t.ext().suffix;
      const Ctx prefix = drop_last(ctx, suf.size());
      if (t.scrut().kind() == Tm::Kind::Box)
        out.push_back({Rule::BoxBeta, true, substitute(Sub::identity(prefix).extend_lock(t.ext()), t.scrut().body())});
      // unbox(s, e ++ e') ≡ unbox(wk(e, s), e') for a lock-free e.
      for (std::size_t k = 1; k <= leading_vars(suf); ++k) {
        Ext e{{suf.begin(), suf.begin() + static_cast<std::ptrdiff_t>(k)}};
        Ext rest{{suf.begin() + static_cast<std::ptrdiff_t>(k), suf.end()}};
        if (!ext_valid(flavor, rest)) continue;
        out.push_back({Rule::S4Explicit, true, Tm::unbox(weaken(to_ope(prefix, e), t.scrut()), rest)});
      }
      for (std::size_t k = 1; k <= prefix.size() && prefix[prefix.size() - k].is_var(); ++k) {
        const Ctx inner = drop_last(prefix, k);
        Ext e{{prefix.end() - static_cast<std::ptrdiff_t>(k), prefix.end()}};
        Ext joined = e;
        joined.suffix.insert(joined.suffix.end(), suf.begin(), suf.end());
        if (!ext_valid(flavor, joined)) continue;
        if (auto s = unweaken(to_ope(inner, e), t.scrut()))
          out.push_back({Rule::S4Explicit, false, Tm::unbox(*s, std::move(joined))});
      }
      break;
    }
    case Tm::Kind::Mul: {
      const Tm& l = t.lhs();
      const Tm& r = t.rhs();
      if (l.kind() == Tm::Kind::Lift && r.kind() == Tm::Kind::Lift) {
        std::uint64_t p = 0;
        if (!__builtin_mul_overflow(l.literal(), r.literal(), &p)) out.push_back({Rule::NatArith, true, Tm::lift(p)});
      }
      if (l == Tm::lift(0)) out.push_back({Rule::NatArith, true, Tm::lift(0)});
      if (l == Tm::lift(1)) out.push_back({Rule::NatArith, false, r});
      out.push_back({Rule::NatArith, true, Tm::mul(r, l)});
      if (l.kind() == Tm::Kind::Mul) out.push_back({Rule::NatArith, true, Tm::mul(l.lhs(), Tm::mul(l.rhs(), r))});
      if (r.kind() == Tm::Kind::Mul) out.push_back({Rule::NatArith, false, Tm::mul(Tm::mul(l, r.lhs()), r.rhs())});
      break;
    }
    case Tm::Kind::Var:
    case Tm::Kind::Lift: break;
  }
  if (ty.is_fun() && t.kind() != Tm::Kind::Lam) {
    Tm body = Tm::app(weaken(Ope::identity(ctx).drop(ty.dom()), t), Tm::var(0));
    out.push_back({Rule::FunEta, true, Tm::lam(ty.dom(), std::move(body))});
  }
  if (ty.is_box() && t.kind() != Tm::Kind::Box) out.push_back({Rule::BoxEta, true, Tm::box(Tm::unbox(t, Ext::lock()))});
  if (ty.is_nat() && !(t.kind() == Tm::Kind::Mul && t.lhs() == Tm::lift(1)))
    out.push_back({Rule::NatArith, true, Tm::mul(Tm::lift(1), t)});
  return out;
}

using Rebuild = std::function<Tm(const Tm&)>;

void collect(Flavor flavor, const Ctx& ctx, const Tm& t, std::vector<std::size_t>& path, const Rebuild& rebuild,
             std::vector<RewriteStep>& out) {
  const Ty ty = typecheck(flavor, ctx, t);
  for (auto& l : local_rewrites(flavor, ctx, t, ty)) out.push_back({l.rule, l.forward, path, rebuild(l.result)});

  auto child = [&](std::size_t pos, const Ctx& c, const Tm& sub, Rebuild rb) {
    path.push_back(pos);
    collect(flavor, c, sub, path, rb, out);
    path.pop_back();
  };
  switch (t.kind()) {
    case Tm::Kind::Lam:
      child(0, snoc(ctx, CtxEntry::var(t.dom())), t.body(),
            [&](const Tm& x) { return rebuild(Tm::lam(t.dom(), x)); });
      break;
    case Tm::Kind::App:
      child(0, ctx, t.fun(), [&](const Tm& x) { return rebuild(Tm::app(x, t.arg())); });
      child(1, ctx, t.arg(), [&](const Tm& x) { return rebuild(Tm::app(t.fun(), x)); });
      break;
    case Tm::Kind::Box:
      child(0, snoc(ctx, CtxEntry::lock()), t.body(), [&](const Tm& x) { return rebuild(Tm::box(x)); });
      break;
    case Tm::Kind::Unbox:
      child(0, drop_last(ctx, t.ext().size()), t.scrut(), [&](const Tm& x) { return rebuild(Tm::unbox(x, t.ext())); });
      break;
    case Tm::Kind::Mul:
      child(0, ctx, t.lhs(), [&](const Tm& x) { return rebuild(Tm::mul(x, t.rhs())); });
      child(1, ctx, t.rhs(), [&](const Tm& x) { return rebuild(Tm::mul(t.lhs(), x)); });
      break;
    case Tm::Kind::Var:
    case Tm::Kind::Lift: break;
  }
}

}  // namespace

std::vector<RewriteStep> rewrite_steps(Flavor flavor, const Ctx& ctx, const Tm& t) {
  std::vector<RewriteStep> out;
  std::vector<std::size_t> path;
  collect(flavor, ctx, t, path, [](const Tm& x) { return x; }, out);
  return out;
}

std::set<Tm> rewrite_closure(Flavor flavor, const Ctx& ctx, const Tm& t, std::size_t fuel) {
  std::set<Tm> seen{t};
  std::vector<Tm> frontier{t};
  for (std::size_t round = 0; round < fuel && !frontier.empty(); ++round) {
    std::vector<Tm> next;
    for (const auto& cur : frontier)
      for (auto& step : rewrite_steps(flavor, ctx, cur))
        if (seen.insert(step.result).second) next.push_back(std::move(step.result));
    frontier = std::move(next);
  }
  return seen;
}

// ---------------------------------------------------------------------------
// Enumeration

namespace {

void subformulas(const Ty& t, std::set<Ty>& out) {
  if (!out.insert(t).second) return;
  if (t.is_fun()) {
    subformulas(t.dom(), out);
    subformulas(t.cod(), out);
  } else if (t.is_box()) {
    subformulas(t.body(), out);
  }
}

std::vector<Ty> universe(const Ctx& ctx, const Ty& ty, const EnumOptions& opts) {
  std::set<Ty> u;
  subformulas(ty, u);
  for (const auto& e : ctx)
    if (e.is_var()) subformulas(e.ty(), u);
  for (const auto& t : opts.extra_types) subformulas(t, u);
  if (opts.nat) u.insert(Ty::nat());
  return {u.begin(), u.end()};
}

/// Valid unbox splits of `ctx`: (prefix, extension) pairs, shortest first.
std::vector<std::pair<Ctx, Ext>> splits(Flavor flavor, const Ctx& ctx) {
  std::vector<std::pair<Ctx, Ext>> out;
  for (std::size_t k = 0; k <= ctx.size(); ++k) {
    Ext e{{ctx.end() - static_cast<std::ptrdiff_t>(k), ctx.end()}};
    if (ext_valid(flavor, e)) out.emplace_back(drop_last(ctx, k), std::move(e));
  }
  return out;
}

std::optional<Ty> var_type(const Ctx& ctx, std::size_t idx) {
  std::size_t seen = 0;
  for (auto it = ctx.rbegin(); it != ctx.rend(); ++it) {
    if (it->is_lock()) return std::nullopt;
    if (seen++ == idx) return it->ty();
  }
  return std::nullopt;
}

using Key = std::tuple<Ctx, Ty, std::size_t>;

class TermEnumerator {
 public:
  TermEnumerator(Flavor flavor, std::vector<Ty> types, const EnumOptions& opts)
      : flavor_(flavor), types_(std::move(types)), opts_(opts) {}

  const std::vector<Tm>& exact(const Ctx& ctx, const Ty& ty, std::size_t n) {
    Key key{ctx, ty, n};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::vector<Tm> out;
    if (n == 1) {
      for (std::size_t i = 0;; ++i) {
        auto t = var_type(ctx, i);
        if (!t) break;
        if (*t == ty) out.push_back(Tm::var(i));
      }
      if (opts_.nat && ty.is_nat())
        for (auto k : opts_.literals) out.push_back(Tm::lift(k));
    } else if (n > 1) {
      if (ty.is_fun())
        for (const auto& b : exact(snoc(ctx, CtxEntry::var(ty.dom())), ty.cod(), n - 1)) out.push_back(Tm::lam(ty.dom(), b));
      if (ty.is_box())
        for (const auto& b : exact(snoc(ctx, CtxEntry::lock()), ty.body(), n - 1)) out.push_back(Tm::box(b));
      for (const auto& [prefix, e] : splits(flavor_, ctx))
        for (const auto& s : exact(prefix, Ty::box(ty), n - 1)) out.push_back(Tm::unbox(s, e));
      for (std::size_t a = 1; a + 1 < n; ++a) {
        const std::size_t b = n - 1 - a;
        for (const auto& dom : types_) {
          const auto& fs = exact(ctx, Ty::fun(dom, ty), a);
          if (fs.empty()) continue;
          const auto& xs = exact(ctx, dom, b);
          for (const auto& f : fs)
            for (const auto& x : xs) out.push_back(Tm::app(f, x));
        }
        if (opts_.nat && ty.is_nat()) {
          const auto& ls = exact(ctx, ty, a);
          const auto& rs = exact(ctx, ty, b);
          for (const auto& l : ls)
            for (const auto& r : rs) out.push_back(Tm::mul(l, r));
        }
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return memo_.emplace(std::move(key), std::move(out)).first->second;
  }

 private:
  Flavor flavor_;
  std::vector<Ty> types_;
  const EnumOptions& opts_;
  std::map<Key, std::vector<Tm>> memo_;
};

class NfEnumerator {
 public:
  NfEnumerator(Flavor flavor, std::vector<Ty> types, const EnumOptions& opts)
      : flavor_(flavor), types_(std::move(types)), opts_(opts) {}

  const std::vector<Nf>& nf(const Ctx& ctx, const Ty& ty, std::size_t n) {
    Key key{ctx, ty, n};
    if (auto it = nf_memo_.find(key); it != nf_memo_.end()) return it->second;
    std::vector<Nf> out;
    switch (ty.kind()) {
      case Ty::Kind::Base:
        for (const auto& m : ne(ctx, ty, n)) out.push_back(Nf::up(m));
        break;
      case Ty::Kind::Fun:
        if (n > 1)
          for (const auto& b : nf(snoc(ctx, CtxEntry::var(ty.dom())), ty.cod(), n - 1)) out.push_back(Nf::lam(ty.dom(), b));
        break;
      case Ty::Kind::Box:
        if (n > 1)
          for (const auto& b : nf(snoc(ctx, CtxEntry::lock()), ty.body(), n - 1)) out.push_back(Nf::box(b));
        break;
      case Ty::Kind::Nat:
        if (n == 1) {
          for (auto k : opts_.literals) out.push_back(Nf::nat(k, {}));
        } else {
          std::vector<Ne> acc;
          chains(ctx, n - 1, acc, out);
        }
        break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return nf_memo_.emplace(std::move(key), std::move(out)).first->second;
  }

  const std::vector<Ne>& ne(const Ctx& ctx, const Ty& ty, std::size_t n) {
    Key key{ctx, ty, n};
    if (auto it = ne_memo_.find(key); it != ne_memo_.end()) return it->second;
    std::vector<Ne> out;
    if (n == 1) {
      for (std::size_t i = 0;; ++i) {
        auto t = var_type(ctx, i);
        if (!t) break;
        if (*t == ty) out.push_back(Ne::var(i));
      }
    } else if (n > 1) {
      for (const auto& [prefix, e] : splits(flavor_, ctx))
        for (const auto& s : ne(prefix, Ty::box(ty), n - 1)) out.push_back(Ne::unbox(s, e));
      for (std::size_t a = 1; a + 1 < n; ++a)
        for (const auto& dom : types_) {
          const auto& fs = ne(ctx, Ty::fun(dom, ty), a);
          if (fs.empty()) continue;
          const auto& xs = nf(ctx, dom, n - 1 - a);
          for (const auto& f : fs)
            for (const auto& x : xs) out.push_back(Ne::app(f, x));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return ne_memo_.emplace(std::move(key), std::move(out)).first->second;
  }

 private:
  // `lift k * f1 * ... * fm`, m ≥ 1, factors non-decreasing; `budget` is
  // the size still to be spent on "* fi" links.
  void chains(const Ctx& ctx, std::size_t budget, std::vector<Ne>& acc, std::vector<Nf>& out) {
    if (budget == 0) {
      if (acc.empty()) return;
      for (auto k : opts_.literals)
        if (k != 0) out.push_back(Nf::nat(k, acc));
      return;
    }
    for (std::size_t s = 1; s + 1 <= budget; ++s)
      for (const auto& f : ne(ctx, Ty::nat(), s)) {
        if (!acc.empty() && f < acc.back()) continue;
        acc.push_back(f);
        chains(ctx, budget - 1 - s, acc, out);
        acc.pop_back();
      }
  }

  Flavor flavor_;
  std::vector<Ty> types_;
  const EnumOptions& opts_;
  std::map<Key, std::vector<Nf>> nf_memo_;
  std::map<Key, std::vector<Ne>> ne_memo_;
};

}  // namespace

std::vector<Tm> enumerate_terms(Flavor flavor, const Ctx& ctx, const Ty& ty, std::size_t max_size,
                                const EnumOptions& opts) {
  TermEnumerator en(flavor, universe(ctx, ty, opts), opts);
  std::vector<Tm> out;
  for (std::size_t n = 1; n <= max_size; ++n) {
    const auto& level = en.exact(ctx, ty, n);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

std::vector<Nf> enumerate_nfs(Flavor flavor, const Ctx& ctx, const Ty& ty, std::size_t max_size,
                              const EnumOptions& opts) {
  NfEnumerator en(flavor, universe(ctx, ty, opts), opts);
  std::vector<Nf> out;
  for (std::size_t n = 1; n <= max_size; ++n) {
    const auto& level = en.nf(ctx, ty, n);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

}  // namespace fitch
