#pragma once

// Natural-number literals and multiplication: the semantic domain for terms
// of type Nat is a commutative monoid with an absorbing zero.

#include <cstdint>
#include <vector>

#include "fitch/syntax.hpp"

namespace fitch {

/// `coeff * f1 * ... * fn` for stuck Nat-typed neutrals fi. The factor list
/// is a multiset; it is empty whenever coeff is 0.
struct NatVal {
  std::uint64_t coeff = 1;
  std::vector<Ne> factors;

  static NatVal literal(std::uint64_t k) { return {k, {}}; }
  static NatVal neutral(Ne n) { return {1, {std::move(n)}}; }

  /// Factors sorted into the canonical order.
  NatVal canonical() const;
  Nf to_nf() const;

  friend bool operator==(const NatVal& a, const NatVal& b);
};

/// Product in the monoid. Throws std::overflow_error if the coefficient
/// does not fit in 64 bits.
NatVal mul_val(const NatVal& a, const NatVal& b);

/// For a closed f : Nat → □Nat, true iff its normal form is
/// λx. box (lift k) for some k, i.e. the boxed result cannot depend on x.
/// Throws TypeError if f is not closed at that type.
bool bt_constant_check(Flavor flavor, const Tm& f);

}  // namespace fitch
