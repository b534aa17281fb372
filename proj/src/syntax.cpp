#include "fitch/syntax.hpp"

#include <algorithm>
#include <sstream>

namespace fitch {

std::string_view to_string(Flavor f) {
  switch (f) {
    case Flavor::K: return "K";
    case Flavor::T: return "T";
    case Flavor::K4: return "K4";
    case Flavor::S4: return "S4";
  }
  return "?";
}

std::optional<Flavor> parse_flavor(std::string_view s) {
  if (s == "K") return Flavor::K;
  if (s == "T") return Flavor::T;
  if (s == "K4") return Flavor::K4;
  if (s == "S4") return Flavor::S4;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Ty

struct Ty::Node {
  Kind kind;
  Ty a;
  Ty b;
  std::size_t size;
  Node(Kind k, Ty x, Ty y, std::size_t s) : kind(k), a(std::move(x)), b(std::move(y)), size(s) {}
  // Leaf nodes hold null children; Ty() would recurse.
  explicit Node(Kind k) : kind(k), a(nullptr), b(nullptr), size(1) {}
};

Ty::Ty() : node_(base().node_) {}

Ty Ty::base() {
  static const auto node = std::make_shared<const Node>(Kind::Base);
  return Ty(node);
}

Ty Ty::nat() {
  static const auto node = std::make_shared<const Node>(Kind::Nat);
  return Ty(node);
}

Ty Ty::fun(Ty dom, Ty cod) {
  std::size_t s = 1 + dom.size() + cod.size();
  return Ty(std::make_shared<const Node>(Kind::Fun, std::move(dom), std::move(cod), s));
}

Ty Ty::box(Ty body) {
  std::size_t s = 1 + body.size();
  return Ty(std::make_shared<const Node>(Kind::Box, std::move(body), Ty(nullptr), s));
}

Ty::Kind Ty::kind() const { return node_->kind; }
const Ty& Ty::dom() const { return node_->a; }
const Ty& Ty::cod() const { return node_->b; }
const Ty& Ty::body() const { return node_->a; }
std::size_t Ty::size() const { return node_->size; }

bool operator==(const Ty& a, const Ty& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Ty::Kind::Base:
    case Ty::Kind::Nat: return true;
    case Ty::Kind::Fun: return a.dom() == b.dom() && a.cod() == b.cod();
    case Ty::Kind::Box: return a.body() == b.body();
  }
  return false;
}

std::strong_ordering operator<=>(const Ty& a, const Ty& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  switch (a.kind()) {
    case Ty::Kind::Base:
    case Ty::Kind::Nat: return std::strong_ordering::equal;
    case Ty::Kind::Fun:
      if (auto c = a.dom() <=> b.dom(); c != 0) return c;
      return a.cod() <=> b.cod();
    case Ty::Kind::Box: return a.body() <=> b.body();
  }
  return std::strong_ordering::equal;
}

namespace {

void render_ty(std::ostream& os, const Ty& t, bool arrow_needs_parens) {
  switch (t.kind()) {
    case Ty::Kind::Base: os << "i"; return;
    case Ty::Kind::Nat: os << "Nat"; return;
    case Ty::Kind::Box:
      os << "[]";
      render_ty(os, t.body(), true);
      return;
    case Ty::Kind::Fun:
      if (arrow_needs_parens) os << "(";
      render_ty(os, t.dom(), true);
      os << " -> ";
      render_ty(os, t.cod(), false);
      if (arrow_needs_parens) os << ")";
      return;
  }
}

}  // namespace

std::string to_string(const Ty& t) {
  std::ostringstream os;
  render_ty(os, t, false);
  return os.str();
}

// ---------------------------------------------------------------------------
// Contexts

bool operator==(const CtxEntry& a, const CtxEntry& b) {
  if (a.lock_ != b.lock_) return false;
  return a.lock_ || a.ty_ == b.ty_;
}

std::strong_ordering operator<=>(const CtxEntry& a, const CtxEntry& b) {
  // Locks sort before variables.
  if (a.lock_ != b.lock_) return a.lock_ ? std::strong_ordering::less : std::strong_ordering::greater;
  if (a.lock_) return std::strong_ordering::equal;
  return a.ty_ <=> b.ty_;
}

std::size_t lock_count(std::span<const CtxEntry> entries) {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const CtxEntry& e) { return e.is_lock(); }));
}

Ctx concat(const Ctx& left, const Ctx& right) {
  Ctx out = left;
  out.insert(out.end(), right.begin(), right.end());
  return out;
}

Ctx drop_last(const Ctx& ctx, std::size_t n) {
  if (n > ctx.size()) throw TypeError("context too short for extension");
  return Ctx(ctx.begin(), ctx.end() - static_cast<std::ptrdiff_t>(n));
}

bool ends_with(const Ctx& ctx, std::span<const CtxEntry> suffix) {
  if (suffix.size() > ctx.size()) return false;
  return std::equal(suffix.begin(), suffix.end(), ctx.end() - static_cast<std::ptrdiff_t>(suffix.size()));
}

std::string to_string(const CtxEntry& e) { return e.is_lock() ? "#" : to_string(e.ty()); }

std::string to_string(std::span<const CtxEntry> ctx) {
  std::string out = "[";
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    if (i) out += ", ";
    out += to_string(ctx[i]);
  }
  return out + "]";
}

// ---------------------------------------------------------------------------
// Ope

Ope Ope::identity(const Ctx& ctx) {
  std::vector<Entry> e;
  e.reserve(ctx.size());
  for (const auto& c : ctx) e.push_back(c.is_lock() ? Entry{Step::KeepLock, Ty()} : Entry{Step::Keep, c.ty()});
  return Ope(std::move(e));
}

Ope Ope::drop(Ty ty) const {
  auto e = entries_;
  e.push_back({Step::Drop, std::move(ty)});
  return Ope(std::move(e));
}

Ope Ope::keep(Ty ty) const {
  auto e = entries_;
  e.push_back({Step::Keep, std::move(ty)});
  return Ope(std::move(e));
}

Ope Ope::keep_lock() const {
  auto e = entries_;
  e.push_back({Step::KeepLock, Ty()});
  return Ope(std::move(e));
}

Ctx Ope::source() const {
  Ctx out;
  for (const auto& e : entries_) {
    if (e.step == Step::Keep) out.push_back(CtxEntry::var(e.ty));
    if (e.step == Step::KeepLock) out.push_back(CtxEntry::lock());
  }
  return out;
}

Ctx Ope::target() const {
  Ctx out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.step == Step::KeepLock ? CtxEntry::lock() : CtxEntry::var(e.ty));
  return out;
}

bool Ope::is_identity() const {
  return std::none_of(entries_.begin(), entries_.end(), [](const Entry& e) { return e.step == Step::Drop; });
}

std::size_t Ope::rename(std::size_t idx) const {
  std::size_t seen_source = 0;
  std::size_t seen_target = 0;
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->step == Step::KeepLock) continue;
    if (it->step == Step::Keep) {
      if (seen_source == idx) return seen_target;
      ++seen_source;
    }
    ++seen_target;
  }
  throw TypeError("variable index out of range of embedding");
}

std::optional<std::size_t> Ope::unrename(std::size_t idx) const {
  std::size_t seen_source = 0;
  std::size_t seen_target = 0;
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->step == Step::KeepLock) continue;
    if (seen_target == idx) {
      if (it->step == Step::Drop) return std::nullopt;
      return seen_source;
    }
    if (it->step == Step::Keep) ++seen_source;
    ++seen_target;
  }
  throw TypeError("variable index out of range of embedding");
}

Ope compose(const Ope& first, const Ope& second) {
  const auto f = first.entries();
  std::vector<Ope::Entry> out;
  out.reserve(second.entries().size());
  std::size_t next = 0;
  for (const auto& s : second.entries()) {
    if (s.step == Ope::Step::Drop) {
      out.push_back(s);
      continue;
    }
    if (next >= f.size()) throw TypeError("cannot compose embeddings: context mismatch");
    const auto& fe = f[next++];
    const bool lock_ok = (s.step == Ope::Step::KeepLock) == (fe.step == Ope::Step::KeepLock);
    if (!lock_ok || (s.step == Ope::Step::Keep && !(s.ty == fe.ty)))
      throw TypeError("cannot compose embeddings: context mismatch");
    out.push_back(fe);
  }
  if (next != f.size()) throw TypeError("cannot compose embeddings: context mismatch");
  return Ope(std::move(out));
}

// ---------------------------------------------------------------------------
// Ext

std::strong_ordering operator<=>(const Ext& a, const Ext& b) {
  return std::lexicographical_compare_three_way(a.suffix.begin(), a.suffix.end(), b.suffix.begin(),
                                                b.suffix.end());
}

bool ext_valid(Flavor flavor, const Ext& e) {
  const auto locks = e.locks();
  switch (flavor) {
    case Flavor::K: return !e.empty() && e.suffix.front().is_lock() && locks == 1;
    case Flavor::T: return locks <= 1;
    case Flavor::K4: return !e.empty() && e.suffix.front().is_lock();
    case Flavor::S4: return true;
  }
  return false;
}

Ext ext_concat(Flavor flavor, const Ext& e1, const Ext& e2) {
  Ext out = e1;
  out.suffix.insert(out.suffix.end(), e2.suffix.begin(), e2.suffix.end());
  if (!ext_valid(flavor, out))
    throw TypeError("extension " + to_string(out.suffix) + " is not valid in " + std::string(to_string(flavor)));
  return out;
}

Factorization factor(const Ext& e, const Ope& o) {
  const auto steps = o.entries();
  const auto& suffix = e.suffix;
  std::size_t oi = steps.size();
  std::size_t si = suffix.size();
  std::vector<CtxEntry> out_rev;
  while (si > 0) {
    if (oi == 0) throw TypeError("extension does not match embedding source");
    const auto& step = steps[--oi];
    switch (step.step) {
      case Ope::Step::Drop: out_rev.push_back(CtxEntry::var(step.ty)); break;
      case Ope::Step::Keep:
        --si;
        if (!suffix[si].is_var() || !(suffix[si].ty() == step.ty))
          throw TypeError("extension does not match embedding source");
        out_rev.push_back(suffix[si]);
        break;
      case Ope::Step::KeepLock:
        --si;
        if (!suffix[si].is_lock()) throw TypeError("extension does not match embedding source");
        out_rev.push_back(CtxEntry::lock());
        break;
    }
  }
  Ext ext{std::vector<CtxEntry>(out_rev.rbegin(), out_rev.rend())};
  Ope rest(std::vector<Ope::Entry>(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(oi)));
  return {std::move(rest), std::move(ext)};
}

Ope factor_lock(const Ctx& src, const Ext& e) {
  if (e.empty() || !e.suffix.front().is_lock() || e.locks() != 1)
    throw TypeError("factor_lock needs an extension of shape [#, vars...]");
  Ope o = Ope::identity(src).keep_lock();
  for (std::size_t i = 1; i < e.size(); ++i) o = o.drop(e.suffix[i].ty());
  return o;
}

Ope to_ope(const Ctx& src, const Ext& e) {
  if (e.locks() != 0) throw TypeError("to_ope needs a lock-free extension");
  Ope o = Ope::identity(src);
  for (const auto& entry : e.suffix) o = o.drop(entry.ty());
  return o;
}

// ---------------------------------------------------------------------------
// Tm

struct Tm::Node {
  Kind kind;
  std::uint64_t num = 0;  // Var index or Lift literal
  Ty ty;
  Tm a;
  Tm b;
  Ext ext;
  std::size_t size = 1;
};

Tm Tm::var(std::size_t idx) {
  Node n;
  n.kind = Kind::Var;
  n.num = idx;
  return Tm(std::make_shared<const Node>(std::move(n)));
}

Tm Tm::lam(Ty dom, Tm body) {
  Node n;
  n.kind = Kind::Lam;
  n.ty = std::move(dom);
  n.size = 1 + body.size();
  n.a = std::move(body);
  return Tm(std::make_shared<const Node>(std::move(n)));
}

Tm Tm::app(Tm fun, Tm arg) {
  Node n;
  n.kind = Kind::App;
  n.size = 1 + fun.size() + arg.size();
  n.a = std::move(fun);
  n.b = std::move(arg);
  return Tm(std::make_shared<const Node>(std::move(n)));
}

Tm Tm::box(Tm body) {
  Node n;
  n.kind = Kind::Box;
  n.size = 1 + body.size();
  n.a = std::move(body);
  return Tm(std::make_shared<const Node>(std::move(n)));
}

Tm Tm::unbox(Tm scrut, Ext ext) {
  Node n;
  n.kind = Kind::Unbox;
  n.size = 1 + scrut.size();
  n.a = std::move(scrut);
  n.ext = std::move(ext);
  return Tm(std::make_shared<const Node>(std::move(n)));
}

Tm Tm::lift(std::uint64_t k) {
  Node n;
  n.kind = Kind::Lift;
  n.num = k;
  return Tm(std::make_shared<const Node>(std::move(n)));
}

Tm Tm::mul(Tm lhs, Tm rhs) {
  Node n;
  n.kind = Kind::Mul;
  n.size = 1 + lhs.size() + rhs.size();
  n.a = std::move(lhs);
  n.b = std::move(rhs);
  return Tm(std::make_shared<const Node>(std::move(n)));
}

Tm::Kind Tm::kind() const { return node_->kind; }
std::size_t Tm::index() const { return static_cast<std::size_t>(node_->num); }
const Ty& Tm::dom() const { return node_->ty; }
const Tm& Tm::body() const { return node_->a; }
const Tm& Tm::fun() const { return node_->a; }
const Tm& Tm::arg() const { return node_->b; }
const Tm& Tm::scrut() const { return node_->a; }
const Ext& Tm::ext() const { return node_->ext; }
std::uint64_t Tm::literal() const { return node_->num; }
const Tm& Tm::lhs() const { return node_->a; }
const Tm& Tm::rhs() const { return node_->b; }
std::size_t Tm::size() const { return node_->size; }

bool operator==(const Tm& a, const Tm& b) { return (a <=> b) == 0; }

std::strong_ordering operator<=>(const Tm& a, const Tm& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  switch (a.kind()) {
    case Tm::Kind::Var:
    case Tm::Kind::Lift: return a.node_->num <=> b.node_->num;
    case Tm::Kind::Lam:
      if (auto c = a.dom() <=> b.dom(); c != 0) return c;
      return a.body() <=> b.body();
    case Tm::Kind::Box: return a.body() <=> b.body();
    case Tm::Kind::App:
    case Tm::Kind::Mul:
      if (auto c = a.node_->a <=> b.node_->a; c != 0) return c;
      return a.node_->b <=> b.node_->b;
    case Tm::Kind::Unbox:
      if (auto c = a.ext() <=> b.ext(); c != 0) return c;
      return a.scrut() <=> b.scrut();
  }
  return std::strong_ordering::equal;
}

namespace {

std::string ext_text(const Ext& e) {
  std::string out = "[";
  for (std::size_t i = 0; i < e.suffix.size(); ++i) {
    if (i) out += ",";
    out += to_string(e.suffix[i]);
  }
  return out + "]";
}

}  // namespace

std::string to_string(const Tm& t) {
  switch (t.kind()) {
    case Tm::Kind::Var: return "#" + std::to_string(t.index());
    case Tm::Kind::Lam: return "(lam " + to_string(t.dom()) + ". " + to_string(t.body()) + ")";
    case Tm::Kind::App: return "(" + to_string(t.fun()) + " " + to_string(t.arg()) + ")";
    case Tm::Kind::Box: return "(box " + to_string(t.body()) + ")";
    case Tm::Kind::Unbox: return "(unbox " + to_string(t.scrut()) + " " + ext_text(t.ext()) + ")";
    case Tm::Kind::Lift: return "(lift " + std::to_string(t.literal()) + ")";
    case Tm::Kind::Mul: return "(" + to_string(t.lhs()) + " * " + to_string(t.rhs()) + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Ne / Nf

struct Ne::Node {
  Kind kind;
  std::size_t index = 0;
  Ne fun;
  std::shared_ptr<const Nf> arg;
  Ext ext;
};

struct Nf::Node {
  Kind kind;
  Ne ne;
  Ty ty;
  Nf body;
  std::uint64_t coeff = 0;
  std::vector<Ne> factors;
};

Ne Ne::var(std::size_t idx) {
  Node n;
  n.kind = Kind::Var;
  n.index = idx;
  return Ne(std::make_shared<const Node>(std::move(n)));
}

Ne Ne::app(Ne fun, Nf arg) {
  Node n;
  n.kind = Kind::App;
  n.fun = std::move(fun);
  n.arg = std::make_shared<const Nf>(std::move(arg));
  return Ne(std::make_shared<const Node>(std::move(n)));
}

Ne Ne::unbox(Ne scrut, Ext ext) {
  Node n;
  n.kind = Kind::Unbox;
  n.fun = std::move(scrut);
  n.ext = std::move(ext);
  return Ne(std::make_shared<const Node>(std::move(n)));
}

Ne::Kind Ne::kind() const { return node_->kind; }
std::size_t Ne::index() const { return node_->index; }
const Ne& Ne::fun() const { return node_->fun; }
const Nf& Ne::arg() const { return *node_->arg; }
const Ne& Ne::scrut() const { return node_->fun; }
const Ext& Ne::ext() const { return node_->ext; }

Nf Nf::up(Ne ne) {
  Node n;
  n.kind = Kind::Up;
  n.ne = std::move(ne);
  return Nf(std::make_shared<const Node>(std::move(n)));
}

Nf Nf::lam(Ty dom, Nf body) {
  Node n;
  n.kind = Kind::Lam;
  n.ty = std::move(dom);
  n.body = std::move(body);
  return Nf(std::make_shared<const Node>(std::move(n)));
}

Nf Nf::box(Nf body) {
  Node n;
  n.kind = Kind::Box;
  n.body = std::move(body);
  return Nf(std::make_shared<const Node>(std::move(n)));
}

Nf Nf::nat(std::uint64_t coeff, std::vector<Ne> factors) {
  if (coeff == 0 && !factors.empty()) throw std::invalid_argument("lift 0 normal form cannot carry factors");
  Node n;
  n.kind = Kind::Nat;
  n.coeff = coeff;
  n.factors = std::move(factors);
  return Nf(std::make_shared<const Node>(std::move(n)));
}

Nf::Kind Nf::kind() const { return node_->kind; }
const Ne& Nf::ne() const { return node_->ne; }
const Ty& Nf::dom() const { return node_->ty; }
const Nf& Nf::body() const { return node_->body; }
std::uint64_t Nf::coeff() const { return node_->coeff; }
std::span<const Ne> Nf::factors() const { return node_->factors; }

bool operator==(const Ne& a, const Ne& b) { return (a <=> b) == 0; }
bool operator==(const Nf& a, const Nf& b) { return (a <=> b) == 0; }

std::strong_ordering operator<=>(const Ne& a, const Ne& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  switch (a.kind()) {
    case Ne::Kind::Var: return a.index() <=> b.index();
    case Ne::Kind::App:
      if (auto c = a.fun() <=> b.fun(); c != 0) return c;
      return a.arg() <=> b.arg();
    case Ne::Kind::Unbox:
      if (auto c = a.scrut() <=> b.scrut(); c != 0) return c;
      return a.ext() <=> b.ext();
  }
  return std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const Nf& a, const Nf& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  switch (a.kind()) {
    case Nf::Kind::Up: return a.ne() <=> b.ne();
    case Nf::Kind::Lam:
      if (auto c = a.dom() <=> b.dom(); c != 0) return c;
      return a.body() <=> b.body();
    case Nf::Kind::Box: return a.body() <=> b.body();
    case Nf::Kind::Nat: {
      if (auto c = a.coeff() <=> b.coeff(); c != 0) return c;
      auto fa = a.factors();
      auto fb = b.factors();
      return std::lexicographical_compare_three_way(fa.begin(), fa.end(), fb.begin(), fb.end());
    }
  }
  return std::strong_ordering::equal;
}

Tm embed(const Ne& n) {
  switch (n.kind()) {
    case Ne::Kind::Var: return Tm::var(n.index());
    case Ne::Kind::App: return Tm::app(embed(n.fun()), embed(n.arg()));
    case Ne::Kind::Unbox: return Tm::unbox(embed(n.scrut()), n.ext());
  }
  throw std::logic_error("unreachable");
}

Tm embed(const Nf& n) {
  switch (n.kind()) {
    case Nf::Kind::Up: return embed(n.ne());
    case Nf::Kind::Lam: return Tm::lam(n.dom(), embed(n.body()));
    case Nf::Kind::Box: return Tm::box(embed(n.body()));
    case Nf::Kind::Nat: {
      Tm acc = Tm::lift(n.coeff());
      for (const auto& f : n.factors()) acc = Tm::mul(acc, embed(f));
      return acc;
    }
  }
  throw std::logic_error("unreachable");
}

std::string to_string(const Ne& n) { return to_string(embed(n)); }
std::string to_string(const Nf& n) { return to_string(embed(n)); }

// ---------------------------------------------------------------------------
// Weakening

Tm weaken(const Ope& o, const Tm& t) {
  switch (t.kind()) {
    case Tm::Kind::Var: return Tm::var(o.rename(t.index()));
    case Tm::Kind::Lam: return Tm::lam(t.dom(), weaken(o.keep(t.dom()), t.body()));
    case Tm::Kind::App: return Tm::app(weaken(o, t.fun()), weaken(o, t.arg()));
    case Tm::Kind::Box: return Tm::box(weaken(o.keep_lock(), t.body()));
    case Tm::Kind::Unbox: {
      auto f = factor(t.ext(), o);
      return Tm::unbox(weaken(f.ope, t.scrut()), std::move(f.ext));
    }
    case Tm::Kind::Lift: return t;
    case Tm::Kind::Mul: return Tm::mul(weaken(o, t.lhs()), weaken(o, t.rhs()));
  }
  throw std::logic_error("unreachable");
}

Ne weaken(const Ope& o, const Ne& n) {
  if (o.is_identity()) return n;
  switch (n.kind()) {
    case Ne::Kind::Var: return Ne::var(o.rename(n.index()));
    case Ne::Kind::App: return Ne::app(weaken(o, n.fun()), weaken(o, n.arg()));
    case Ne::Kind::Unbox: {
      auto f = factor(n.ext(), o);
      return Ne::unbox(weaken(f.ope, n.scrut()), std::move(f.ext));
    }
  }
  throw std::logic_error("unreachable");
}

Nf weaken(const Ope& o, const Nf& n) {
  if (o.is_identity()) return n;
  switch (n.kind()) {
    case Nf::Kind::Up: return Nf::up(weaken(o, n.ne()));
    case Nf::Kind::Lam: return Nf::lam(n.dom(), weaken(o.keep(n.dom()), n.body()));
    case Nf::Kind::Box: return Nf::box(weaken(o.keep_lock(), n.body()));
    case Nf::Kind::Nat: {
      std::vector<Ne> fs;
      for (const auto& f : n.factors()) fs.push_back(weaken(o, f));
      std::sort(fs.begin(), fs.end());
      return Nf::nat(n.coeff(), std::move(fs));
    }
  }
  throw std::logic_error("unreachable");
}

namespace {

// Inverse of factor: the extension e with factor(e, o) == (o', e2), if any.
std::optional<Factorization> unfactor(const Ext& e2, const Ope& o) {
  const auto steps = o.entries();
  const auto& suffix = e2.suffix;
  std::size_t oi = steps.size();
  std::vector<CtxEntry> kept_rev;
  for (std::size_t si = suffix.size(); si > 0; --si) {
    if (oi == 0) return std::nullopt;
    const auto& step = steps[--oi];
    const auto& entry = suffix[si - 1];
    if (step.step == Ope::Step::KeepLock) {
      if (!entry.is_lock()) return std::nullopt;
      kept_rev.push_back(entry);
    } else {
      if (!entry.is_var() || !(entry.ty() == step.ty)) return std::nullopt;
      if (step.step == Ope::Step::Keep) kept_rev.push_back(entry);
    }
  }
  Ext e{std::vector<CtxEntry>(kept_rev.rbegin(), kept_rev.rend())};
  Ope rest(std::vector<Ope::Entry>(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(oi)));
  Factorization out{rest, e2};
  if (!(factor(e, o) == out)) return std::nullopt;
  return Factorization{std::move(rest), std::move(e)};
}

}  // namespace

std::optional<Tm> unweaken(const Ope& o, const Tm& t) {
  switch (t.kind()) {
    case Tm::Kind::Var: {
      auto idx = o.unrename(t.index());
      if (!idx) return std::nullopt;
      return Tm::var(*idx);
    }
    case Tm::Kind::Lam: {
      auto b = unweaken(o.keep(t.dom()), t.body());
      if (!b) return std::nullopt;
      return Tm::lam(t.dom(), *b);
    }
    case Tm::Kind::App: {
      auto f = unweaken(o, t.fun());
      if (!f) return std::nullopt;
      auto a = unweaken(o, t.arg());
      if (!a) return std::nullopt;
      return Tm::app(*f, *a);
    }
    case Tm::Kind::Box: {
      auto b = unweaken(o.keep_lock(), t.body());
      if (!b) return std::nullopt;
      return Tm::box(*b);
    }
    case Tm::Kind::Unbox: {
      auto f = unfactor(t.ext(), o);
      if (!f) return std::nullopt;
      auto s = unweaken(f->ope, t.scrut());
      if (!s) return std::nullopt;
      return Tm::unbox(*s, std::move(f->ext));
    }
    case Tm::Kind::Lift: return t;
    case Tm::Kind::Mul: {
      auto l = unweaken(o, t.lhs());
      if (!l) return std::nullopt;
      auto r = unweaken(o, t.rhs());
      if (!r) return std::nullopt;
      return Tm::mul(*l, *r);
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Substitutions

Sub Sub::identity(const Ctx& ctx) {
  Sub s;
  for (const auto& e : ctx) {
    if (e.is_lock()) {
      s = s.extend_lock(Ext::lock());
    } else {
      s = weaken(Ope::identity(s.target()).drop(e.ty()), s).extend(Tm::var(0));
    }
  }
  return s;
}

Sub Sub::extend(Tm t) const {
  Sub s = *this;
  s.items_.push_back({std::move(t), Ext{}});
  return s;
}

Sub Sub::extend_lock(Ext e) const {
  Sub s = *this;
  s.target_.insert(s.target_.end(), e.suffix.begin(), e.suffix.end());
  s.items_.push_back({std::nullopt, std::move(e)});
  return s;
}

Sub weaken(const Ope& o, const Sub& s) {
  const auto items = s.items();
  std::vector<Sub::Item> out(items.size());
  Ope cur = o;
  for (std::size_t i = items.size(); i > 0; --i) {
    const auto& it = items[i - 1];
    if (it.term) {
      out[i - 1] = {weaken(cur, *it.term), Ext{}};
    } else {
      auto f = factor(it.ext, cur);
      out[i - 1] = {std::nullopt, std::move(f.ext)};
      cur = std::move(f.ope);
    }
  }
  Sub r(cur.target());
  for (auto& it : out) r = it.term ? r.extend(std::move(*it.term)) : r.extend_lock(std::move(it.ext));
  return r;
}

namespace {

// The first `n` items of `s`, targeting the context left of the dropped
// lock items. Rebuilding starts from the leftmost world, since extend_lock
// re-appends every kept suffix.
Sub take(const Sub& s, std::size_t n) {
  const auto items = s.items();
  std::size_t trailing = 0;
  for (const auto& it : items)
    if (!it.term) trailing += it.ext.size();
  Sub out(drop_last(s.target(), trailing));
  for (std::size_t i = 0; i < n; ++i) out = items[i].term ? out.extend(*items[i].term) : out.extend_lock(items[i].ext);
  return out;
}

std::optional<Sub> unweaken(const Ope& o, const Sub& s) {
  const auto items = s.items();
  std::vector<Sub::Item> out(items.size());
  Ope cur = o;
  for (std::size_t i = items.size(); i > 0; --i) {
    const auto& it = items[i - 1];
    if (it.term) {
      auto t = unweaken(cur, *it.term);
      if (!t) return std::nullopt;
      out[i - 1] = {std::move(*t), Ext{}};
    } else {
      auto f = unfactor(it.ext, cur);
      if (!f) return std::nullopt;
      out[i - 1] = {std::nullopt, std::move(f->ext)};
      cur = std::move(f->ope);
    }
  }
  Sub r(cur.source());
  for (auto& it : out) r = it.term ? r.extend(std::move(*it.term)) : r.extend_lock(std::move(it.ext));
  return r;
}

// Split `s` at the extension `e` of an unbox, right to left: a Lock entry
// steps past a lock item and prepends its extension; a Var entry drops a
// term item. A Var entry with no lock to its left whose image is the last
// variable is kept in the extension instead when the rest of `s` does not
// mention that variable, so the identity substitution leaves the unbox
// unchanged.
std::pair<Sub, Ext> trim_sub(const Sub& s, const Ext& e) {
  Sub rest = s;
  Ext acc;
  std::size_t locks_left = e.locks();
  for (std::size_t si = e.suffix.size(); si > 0; --si) {
    const auto items = rest.items();
    if (items.empty()) throw TypeError("substitution too short for extension");
    const Sub::Item it = items.back();
    const CtxEntry& entry = e.suffix[si - 1];
    Sub popped = take(rest, items.size() - 1);
    if (entry.is_lock()) {
      if (it.term) throw TypeError("substitution/extension mismatch");
      Ext joined = it.ext;
      joined.suffix.insert(joined.suffix.end(), acc.suffix.begin(), acc.suffix.end());
      acc = std::move(joined);
      --locks_left;
      rest = std::move(popped);
      continue;
    }
    if (!it.term) throw TypeError("substitution/extension mismatch");
    const Ctx& here = popped.target();
    if (locks_left == 0 && *it.term == Tm::var(0) && !here.empty() && here.back() == entry) {
      const Ope o = Ope::identity(drop_last(here, 1)).drop(entry.ty());
      if (auto strengthened = unweaken(o, popped)) {
        acc.suffix.insert(acc.suffix.begin(), entry);
        rest = std::move(*strengthened);
        continue;
      }
    }
    rest = std::move(popped);
  }
  return {std::move(rest), std::move(acc)};
}

}  // namespace

Tm substitute(const Sub& s, const Tm& t) {
  switch (t.kind()) {
    case Tm::Kind::Var: {
      auto items = s.items();
      std::size_t seen = 0;
      for (std::size_t i = items.size(); i > 0; --i) {
        if (!items[i - 1].term) throw TypeError("variable crosses a lock in substitution");
        if (seen++ == t.index()) return *items[i - 1].term;
      }
      throw TypeError("variable out of range of substitution");
    }
    case Tm::Kind::Lam: {
      Sub lifted = weaken(Ope::identity(s.target()).drop(t.dom()), s).extend(Tm::var(0));
      return Tm::lam(t.dom(), substitute(lifted, t.body()));
    }
    case Tm::Kind::App: return Tm::app(substitute(s, t.fun()), substitute(s, t.arg()));
    case Tm::Kind::Box: return Tm::box(substitute(s.extend_lock(Ext::lock()), t.body()));
    case Tm::Kind::Unbox: {
      auto [rest, e] = trim_sub(s, t.ext());
      return Tm::unbox(substitute(rest, t.scrut()), std::move(e));
    }
    case Tm::Kind::Lift: return t;
    case Tm::Kind::Mul: return Tm::mul(substitute(s, t.lhs()), substitute(s, t.rhs()));
  }
  throw std::logic_error("unreachable");
}

}  // namespace fitch
