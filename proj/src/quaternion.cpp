#include "grs/quaternion.hpp"

#include <deque>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "grs/errors.hpp"

namespace grs {

namespace {

using Poly = std::vector<Rational>;

void trim(Poly& p) {
  while (p.size() > 1 && p.back() == 0) p.pop_back();
}

// Exact quotient a / b for monic b (remainder must vanish).
Poly divide_exact(Poly a, const Poly& b) {
  const std::size_t db = b.size() - 1;
  if (a.size() < b.size()) return {0};
  Poly q(a.size() - db, 0);
  for (std::size_t i = a.size(); i-- > db;) {
    Rational c = a[i];
    if (c == 0) continue;
    q[i - db] = c;
    for (std::size_t j = 0; j <= db; ++j) a[i - db + j] -= c * b[j];
  }
  trim(a);
  ensure(a.size() == 1 && a[0] == 0, "cyclotomic polynomial division left a remainder");
  trim(q);
  return q;
}

Poly cyclotomic_poly(unsigned m) {
  static std::map<unsigned, Poly> cache;
  if (auto it = cache.find(m); it != cache.end()) return it->second;
  Poly p(m + 1, 0);
  p[0] = -1;
  p[m] = 1;
  for (unsigned d = 1; d < m; ++d)
    if (m % d == 0) p = divide_exact(p, cyclotomic_poly(d));
  cache[m] = p;
  return p;
}

}  // namespace

CyclotomicField::CyclotomicField(unsigned m) : m_(m) {
  require(m >= 1, "cyclotomic conductor must be positive");
  phi_ = cyclotomic_poly(m);
}

CyclotomicField::Element CyclotomicField::reduce(std::vector<Rational> poly) const {
  const std::size_t d = degree();
  for (std::size_t i = poly.size(); i-- > d;) {
    Rational c = poly[i];
    if (c == 0) continue;
    for (std::size_t j = 0; j <= d; ++j) poly[i - d + j] -= c * phi_[j];
  }
  poly.resize(d, 0);
  return poly;
}

CyclotomicField::Element CyclotomicField::from_rational(const Rational& q) const {
  Element e = zero();
  if (degree() == 0) return e;  // only for the zero field, never constructed
  e[0] = q;
  return e;
}

CyclotomicField::Element CyclotomicField::zeta_power(long long k) const {
  long long r = ((k % m_) + m_) % m_;
  std::vector<Rational> p(static_cast<std::size_t>(r) + 1, 0);
  p[static_cast<std::size_t>(r)] = 1;
  return reduce(std::move(p));
}

CyclotomicField::Element CyclotomicField::add(const Element& a, const Element& b) const {
  Element c(a);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += b[i];
  return c;
}

CyclotomicField::Element CyclotomicField::sub(const Element& a, const Element& b) const {
  Element c(a);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] -= b[i];
  return c;
}

CyclotomicField::Element CyclotomicField::mul(const Element& a, const Element& b) const {
  std::vector<Rational> p(a.size() + b.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) p[i + j] += a[i] * b[j];
  }
  return reduce(std::move(p));
}

CyclotomicField::Element CyclotomicField::scale(const Element& a, const Rational& q) const {
  Element c(a);
  for (auto& v : c) v *= q;
  return c;
}

bool CyclotomicField::is_zero(const Element& a) const {
  for (const auto& v : a)
    if (v != 0) return false;
  return true;
}

Quaternion QuaternionAlgebra::one() const {
  return {k_.from_rational(1), k_.zero(), k_.zero(), k_.zero()};
}

Quaternion QuaternionAlgebra::mul(const Quaternion& a, const Quaternion& b) const {
  const auto& K = k_;
  auto m = [&](const auto& u, const auto& v) { return K.mul(u, v); };
  Quaternion r;
  r.w = K.sub(K.sub(K.sub(m(a.w, b.w), m(a.x, b.x)), m(a.y, b.y)), m(a.z, b.z));
  r.x = K.sub(K.add(K.add(m(a.w, b.x), m(a.x, b.w)), m(a.y, b.z)), m(a.z, b.y));
  r.y = K.add(K.add(K.sub(m(a.w, b.y), m(a.x, b.z)), m(a.y, b.w)), m(a.z, b.x));
  r.z = K.add(K.sub(K.add(m(a.w, b.z), m(a.x, b.y)), m(a.y, b.x)), m(a.z, b.w));
  return r;
}

CyclotomicField::Element QuaternionAlgebra::norm(const Quaternion& q) const {
  const auto& K = k_;
  return K.add(K.add(K.mul(q.w, q.w), K.mul(q.x, q.x)), K.add(K.mul(q.y, q.y), K.mul(q.z, q.z)));
}

bool QuaternionAlgebra::is_unit(const Quaternion& q) const {
  return k_.is_zero(k_.sub(norm(q), k_.from_rational(1)));
}

std::string QuaternionAlgebra::key(const Quaternion& q) const {
  std::ostringstream os;
  for (const auto* part : {&q.w, &q.x, &q.y, &q.z}) {
    for (const auto& c : *part) os << c << ',';
    os << ';';
  }
  return os.str();
}

QuaternionGroupTable close_group(const QuaternionAlgebra& alg, const std::vector<Quaternion>& generators,
                                 std::size_t limit) {
  QuaternionGroupTable t;
  std::unordered_map<std::string, std::uint32_t> index;
  auto intern = [&](const Quaternion& q) -> std::pair<std::uint32_t, bool> {
    auto [it, fresh] = index.emplace(alg.key(q), static_cast<std::uint32_t>(t.elements.size()));
    if (fresh) {
      t.elements.push_back(q);
      if (t.elements.size() > limit)
        throw InvariantError("quaternion closure exceeded " + std::to_string(limit) + " elements (bad generators?)");
    }
    return {it->second, fresh};
  };

  intern(alg.one());
  std::deque<std::uint32_t> queue{0};
  while (!queue.empty()) {
    std::uint32_t a = queue.front();
    queue.pop_front();
    for (const Quaternion& g : generators) {
      auto [idx, fresh] = intern(alg.mul(t.elements[a], g));
      if (fresh) queue.push_back(idx);
    }
  }

  // A finite multiplicatively closed subset of a group is a subgroup, so the
  // full table is well defined.
  const std::size_t n = t.elements.size();
  t.mul.assign(n, std::vector<std::uint32_t>(n));
  t.inverse.assign(n, 0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      auto it = index.find(alg.key(alg.mul(t.elements[a], t.elements[b])));
      ensure(it != index.end(), "quaternion closure is not closed");
      t.mul[a][b] = it->second;
      if (it->second == 0) t.inverse[a] = static_cast<std::uint32_t>(b);
    }
  t.all_unit = true;
  for (const Quaternion& q : t.elements) t.all_unit = t.all_unit && alg.is_unit(q);
  return t;
}

}  // namespace grs
