#include "fitch/nat.hpp"

#include <algorithm>
#include <stdexcept>

#include "fitch/nbe.hpp"
#include "fitch/typecheck.hpp"

namespace fitch {

NatVal NatVal::canonical() const {
  if (coeff == 0) return {0, {}};
  NatVal out = *this;
  std::sort(out.factors.begin(), out.factors.end());
  return out;
}

Nf NatVal::to_nf() const {
  NatVal c = canonical();
  return Nf::nat(c.coeff, std::move(c.factors));
}

bool operator==(const NatVal& a, const NatVal& b) {
  NatVal x = a.canonical();
  NatVal y = b.canonical();
  return x.coeff == y.coeff && x.factors == y.factors;
}

NatVal mul_val(const NatVal& a, const NatVal& b) {
  if (a.coeff == 0 || b.coeff == 0) return {0, {}};
  std::uint64_t c = 0;
  if (__builtin_mul_overflow(a.coeff, b.coeff, &c)) throw std::overflow_error("Nat literal overflow");
  NatVal out{c, a.factors};
  out.factors.insert(out.factors.end(), b.factors.begin(), b.factors.end());
  return out;
}

bool bt_constant_check(Flavor flavor, const Tm& f) {
  const Ty want = Ty::fun(Ty::nat(), Ty::box(Ty::nat()));
  const Ty got = typecheck(flavor, {}, f);
  if (!(got == want)) throw TypeError("expected a closed term of type " + to_string(want) + ", got " + to_string(got));
  const Nf n = norm(flavor, {}, f, got);
  if (n.kind() != Nf::Kind::Lam || n.body().kind() != Nf::Kind::Box) return false;
  const Nf& chain = n.body().body();
  return chain.kind() == Nf::Kind::Nat && chain.factors().empty();
}

}  // namespace fitch
