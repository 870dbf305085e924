#pragma once

// Exact unit quaternions over a cyclotomic field Q(zeta_M), used to build
// finite subgroups of S^3 by closure. No floating point anywhere.

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace grs {

using Rational = boost::multiprecision::cpp_rational;

/// Q(zeta_M) as Q[x] / Phi_M(x). Elements are coefficient vectors of
/// length deg Phi_M, always reduced.
class CyclotomicField {
public:
  explicit CyclotomicField(unsigned m);

  unsigned conductor() const { return m_; }
  std::size_t degree() const { return phi_.size() - 1; }

  using Element = std::vector<Rational>;

  Element zero() const { return Element(degree()); }
  Element from_rational(const Rational& q) const;
  /// zeta_M^k for any integer k.
  Element zeta_power(long long k) const;

  Element add(const Element& a, const Element& b) const;
  Element sub(const Element& a, const Element& b) const;
  Element mul(const Element& a, const Element& b) const;
  Element scale(const Element& a, const Rational& q) const;
  bool is_zero(const Element& a) const;

private:
  Element reduce(std::vector<Rational> poly) const;

  unsigned m_;
  std::vector<Rational> phi_;  // monic, ascending coefficients
};

struct Quaternion {
  CyclotomicField::Element w, x, y, z;
};

class QuaternionAlgebra {
public:
  explicit QuaternionAlgebra(unsigned conductor) : k_(conductor) {}

  const CyclotomicField& field() const { return k_; }
  Quaternion one() const;
  Quaternion make(const CyclotomicField::Element& w, const CyclotomicField::Element& x,
                  const CyclotomicField::Element& y, const CyclotomicField::Element& z) const {
    return {w, x, y, z};
  }
  Quaternion mul(const Quaternion& a, const Quaternion& b) const;
  CyclotomicField::Element norm(const Quaternion& q) const;
  bool is_unit(const Quaternion& q) const;
  /// Canonical text form; equal keys <=> equal quaternions.
  std::string key(const Quaternion& q) const;

private:
  CyclotomicField k_;
};

/// A finite group of unit quaternions with its multiplication table.
struct QuaternionGroupTable {
  std::vector<Quaternion> elements;             // elements[0] is 1
  std::vector<std::vector<std::uint32_t>> mul;  // mul[a][b] = index of a*b
  std::vector<std::uint32_t> inverse;
  bool all_unit = false;
};

/// Closure of the generators under multiplication. Throws InvariantError
/// when the closure grows past `limit` elements.
QuaternionGroupTable close_group(const QuaternionAlgebra& alg, const std::vector<Quaternion>& generators,
                                 std::size_t limit);

}  // namespace grs
