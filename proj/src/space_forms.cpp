#include "grs/space_forms.hpp"

#include <numeric>
#include <regex>

#include "grs/errors.hpp"

namespace grs {

using nlohmann::json;

namespace {

const FactTag kB2Fact{"b2-lower-bound",
                      "b2(A) >= 1 for any Ricci-flat ALE 4-manifold A whose end is S^3/Gamma with this Gamma "
                      "(imported classification fact, not derived here)"};

IntMatrix rows(std::initializer_list<std::initializer_list<long long>> r) {
  std::vector<std::vector<BigInt>> out;
  for (auto row : r) out.emplace_back(row.begin(), row.end());
  return IntMatrix::from_rows(out, out.empty() ? 0 : out.front().size());
}

// <s, t | (st)^2 = s^3 = t^m>, abelianized: 2s + 2t = 3s = m t.
IntMatrix polyhedral_relations(long long m) { return rows({{-1, 2}, {3, -m}}); }

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::cyclic: return "cyclic";
    case Family::binary_dihedral: return "binary-dihedral";
    case Family::binary_tetrahedral: return "binary-tetrahedral";
    case Family::binary_octahedral: return "binary-octahedral";
    case Family::binary_icosahedral: return "binary-icosahedral";
  }
  return "?";
}

Family family_from_string(const std::string& s) {
  for (Family f : {Family::cyclic, Family::binary_dihedral, Family::binary_tetrahedral, Family::binary_octahedral,
                   Family::binary_icosahedral})
    if (to_string(f) == s) return f;
  throw ValidationError("unknown family: " + s);
}

std::string SpaceFormGroup::name() const {
  switch (family) {
    case Family::cyclic: return "Z:" + std::to_string(param);
    case Family::binary_dihedral: return "Dstar:" + std::to_string(param);
    case Family::binary_tetrahedral: return "2T";
    case Family::binary_octahedral: return "2O";
    case Family::binary_icosahedral: return "2I";
  }
  return "?";
}

SpaceFormGroup cyclic_group(std::uint64_t n) {
  require(n >= 1, "cyclic group needs n >= 1");
  SpaceFormGroup g;
  g.family = Family::cyclic;
  g.param = n;
  g.order = n;
  g.relations = IntMatrix::from_rows({{BigInt(n)}}, 1);
  g.flat_end = n == 1;
  return g;
}

SpaceFormGroup binary_dihedral_group(std::uint64_t n) {
  require(n >= 1, "binary dihedral group needs n >= 1");
  SpaceFormGroup g;
  g.family = Family::binary_dihedral;
  g.param = n;
  g.order = 4 * n;
  // generators a, x: a^n = x^2, x a x^-1 = a^-1, a^{2n} = 1
  const long long m = static_cast<long long>(n);
  g.relations = rows({{2 * m, 0}, {-m, 2}, {2, 0}});
  if (n % 2 == 0) g.b2_lower_bound = kB2Fact;
  return g;
}

SpaceFormGroup binary_tetrahedral_group() {
  SpaceFormGroup g;
  g.family = Family::binary_tetrahedral;
  g.param = 0;
  g.order = 24;
  g.relations = polyhedral_relations(3);
  return g;
}

SpaceFormGroup binary_octahedral_group() {
  SpaceFormGroup g;
  g.family = Family::binary_octahedral;
  g.param = 0;
  g.order = 48;
  g.relations = polyhedral_relations(4);
  return g;
}

SpaceFormGroup binary_icosahedral_group() {
  SpaceFormGroup g;
  g.family = Family::binary_icosahedral;
  g.param = 0;
  g.order = 120;
  g.relations = polyhedral_relations(5);
  g.b2_lower_bound = kB2Fact;
  g.rochlin = true;
  return g;
}

bool looks_like_space_form(const std::string& spec) {
  static const std::regex re(R"((Z|Dstar):\d+|2T|2O|2I)");
  return std::regex_match(spec, re);
}

SpaceFormGroup parse_space_form(const std::string& spec) {
  if (spec == "2T") return binary_tetrahedral_group();
  if (spec == "2O") return binary_octahedral_group();
  if (spec == "2I") return binary_icosahedral_group();
  static const std::regex re(R"((Z|Dstar):(\d{1,9}))");
  std::smatch m;
  if (!std::regex_match(spec, m, re)) throw ValidationError("not a space form spec: \"" + spec + "\"");
  std::uint64_t n = std::stoull(m[2].str());
  return m[1] == "Z" ? cyclic_group(n) : binary_dihedral_group(n);
}

std::vector<SpaceFormGroup> catalog(std::optional<Family> filter, std::uint64_t max_param) {
  require(max_param >= 1, "max-param must be >= 1");
  auto want = [&](Family f) { return !filter || *filter == f; };
  std::vector<SpaceFormGroup> out;
  if (want(Family::cyclic))
    for (std::uint64_t n = 1; n <= max_param; ++n) out.push_back(cyclic_group(n));
  if (want(Family::binary_dihedral))
    for (std::uint64_t n = 1; n <= max_param; ++n) out.push_back(binary_dihedral_group(n));
  if (want(Family::binary_tetrahedral)) out.push_back(binary_tetrahedral_group());
  if (want(Family::binary_octahedral)) out.push_back(binary_octahedral_group());
  if (want(Family::binary_icosahedral)) out.push_back(binary_icosahedral_group());
  return out;
}

FgAbelianGroup abelianization(const SpaceFormGroup& g) { return group_from_relations(g.relations); }

QuaternionGenerators quaternion_generators(const SpaceFormGroup& g) {
  auto cos_sin = [](const CyclotomicField& K, unsigned m, unsigned n) {
    // zeta_n = cos + sqrt(-1) sin, with sqrt(-1) = zeta_4 inside Q(zeta_m)
    auto z = K.zeta_power(m / n), zi = K.zeta_power(-static_cast<long long>(m / n));
    auto c = K.scale(K.add(z, zi), Rational(1, 2));
    auto s = K.scale(K.mul(K.sub(z, zi), K.zeta_power(m / 4)), Rational(-1, 2));
    return std::pair{c, s};
  };
  switch (g.family) {
    case Family::cyclic: {
      const unsigned n = static_cast<unsigned>(g.param), m = std::lcm(n, 4u);
      QuaternionAlgebra A(m);
      const auto& K = A.field();
      auto [c, s] = cos_sin(K, m, n);
      return {m, {A.make(c, s, K.zero(), K.zero())}};
    }
    case Family::binary_dihedral: {
      const unsigned n = static_cast<unsigned>(2 * g.param), m = std::lcm(n, 4u);
      QuaternionAlgebra A(m);
      const auto& K = A.field();
      auto [c, s] = cos_sin(K, m, n);
      return {m, {A.make(c, s, K.zero(), K.zero()), A.make(K.zero(), K.zero(), K.from_rational(1), K.zero())}};
    }
    case Family::binary_tetrahedral: {
      QuaternionAlgebra A(4);
      const auto& K = A.field();
      auto h = K.from_rational(Rational(1, 2));
      return {4, {A.make(K.zero(), K.from_rational(1), K.zero(), K.zero()), A.make(h, h, h, h)}};
    }
    case Family::binary_octahedral: {
      QuaternionAlgebra A(8);
      const auto& K = A.field();
      auto r = K.scale(K.sub(K.zeta_power(1), K.zeta_power(3)), Rational(1, 2));  // 1/sqrt(2)
      auto h = K.from_rational(Rational(1, 2));
      return {8, {A.make(r, r, K.zero(), K.zero()), A.make(h, h, h, h)}};
    }
    case Family::binary_icosahedral: {
      QuaternionAlgebra A(5);
      const auto& K = A.field();
      auto inv_phi = K.add(K.zeta_power(1), K.zeta_power(4));  // golden ratio minus 1
      auto phi = K.add(inv_phi, K.from_rational(1));
      auto h = K.from_rational(Rational(1, 2));
      return {5,
              {A.make(h, h, h, h),
               A.make(K.scale(phi, Rational(1, 2)), K.scale(inv_phi, Rational(1, 2)), h, K.zero())}};
    }
  }
  throw InvariantError("unhandled family");
}

QuaternionGroupTable quaternion_table(const SpaceFormGroup& g) {
  QuaternionGenerators gens = quaternion_generators(g);
  QuaternionAlgebra A(gens.conductor);
  QuaternionGroupTable t = close_group(A, gens.generators, 10 * g.order);
  ensure(t.elements.size() == g.order, g.name() + ": closure has " + std::to_string(t.elements.size()) +
                                           " elements, expected " + std::to_string(g.order));
  return t;
}

FgAbelianGroup abelian_structure_from_census(const std::vector<std::vector<std::uint32_t>>& table,
                                             std::uint32_t identity) {
  const std::size_t n = table.size();
  std::vector<std::uint64_t> ord(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    std::uint64_t k = 1;
    for (std::uint32_t y = static_cast<std::uint32_t>(x); y != identity; y = table[y][x]) ++k;
    ord[x] = k;
  }
  ElementaryDivisors ed;
  std::uint64_t rest = n;
  for (std::uint64_t p = 2; rest > 1; ++p) {
    if (rest % p != 0) continue;
    std::uint64_t ppart = 1;
    while (rest % p == 0) rest /= p, ppart *= p;
    // at_least[k] = #cyclic factors with exponent >= k = n_k - n_{k-1}
    std::vector<unsigned> logs{0};
    for (std::uint64_t pk = p;; pk *= p) {
      std::uint64_t killed = 0;
      for (std::uint64_t o : ord) killed += (pk % o == 0) ? 1 : 0;
      unsigned lg = 0;
      std::uint64_t c = killed;
      while (c % p == 0 && c > 1) c /= p, ++lg;
      ensure(c == 1, "element census is not a power of p");
      logs.push_back(lg);
      if (killed == ppart) break;
    }
    std::vector<unsigned> part;
    for (std::size_t k = 1; k < logs.size(); ++k) {
      unsigned at_least_k = logs[k] - logs[k - 1];
      unsigned at_least_next = k + 1 < logs.size() ? logs[k + 1] - logs[k] : 0;
      for (unsigned c = 0; c < at_least_k - at_least_next; ++c) part.push_back(static_cast<unsigned>(k));
    }
    std::sort(part.begin(), part.end(), std::greater<>());
    ed.by_prime[p] = part;
  }
  return FgAbelianGroup::from_elementary(ed);
}

FgAbelianGroup quaternion_oracle(const SpaceFormGroup& g) {
  const QuaternionGroupTable t = quaternion_table(g);
  const auto& mul = t.mul;
  const std::size_t n = t.elements.size();

  std::vector<std::uint32_t> commutators;
  std::vector<char> is_comm(n, 0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      std::uint32_t c = mul[mul[mul[a][b]][t.inverse[a]]][t.inverse[b]];
      if (!is_comm[c]) is_comm[c] = 1, commutators.push_back(c);
    }
  // close under products
  std::vector<char> in_sub(n, 0);
  std::vector<std::uint32_t> sub{0};
  in_sub[0] = 1;
  for (std::size_t i = 0; i < sub.size(); ++i)
    for (std::uint32_t c : commutators) {
      std::uint32_t p = mul[sub[i]][c];
      if (!in_sub[p]) in_sub[p] = 1, sub.push_back(p);
    }

  constexpr std::uint32_t kNone = ~0u;
  std::vector<std::uint32_t> coset(n, kNone), rep;
  for (std::size_t a = 0; a < n; ++a) {
    if (coset[a] != kNone) continue;
    const auto id = static_cast<std::uint32_t>(rep.size());
    rep.push_back(static_cast<std::uint32_t>(a));
    for (std::uint32_t s : sub) coset[mul[a][s]] = id;
  }
  const std::size_t q = rep.size();
  std::vector<std::vector<std::uint32_t>> qmul(q, std::vector<std::uint32_t>(q));
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j) qmul[i][j] = coset[mul[rep[i]][rep[j]]];
  return abelian_structure_from_census(qmul, coset[0]);
}

DirectDoubleClasses classify_direct_double(const std::vector<SpaceFormGroup>& groups) {
  DirectDoubleClasses out;
  for (const auto& g : groups) (is_direct_double(abelianization(g)).is_double ? out.positive : out.negative).push_back(g);
  return out;
}

json to_json(const FactTag& t) { return {{"name", t.name}, {"statement", t.statement}}; }

json to_json(const SpaceFormGroup& g) {
  FgAbelianGroup ab = abelianization(g);
  json ann = {{"rochlin", g.rochlin}, {"flat_end", g.flat_end}};
  ann["b2_lower_bound"] = g.b2_lower_bound ? to_json(*g.b2_lower_bound) : json(nullptr);
  json out = {{"name", g.name()},
              {"family", to_string(g.family)},
              {"order", g.order},
              {"relations", to_json(g.relations)},
              {"abelianization", to_json(ab)},
              {"direct_double", is_direct_double(ab).is_double},
              {"annotations", std::move(ann)}};
  if (g.family == Family::cyclic || g.family == Family::binary_dihedral) out["n"] = g.param;
  return out;
}

}  // namespace grs
