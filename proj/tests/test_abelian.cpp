#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "grs/abelian.hpp"
#include "grs/errors.hpp"
#include "oracles.hpp"

using namespace grs;

namespace {

FgAbelianGroup G(std::vector<long long> orders, std::size_t rank = 0) {
  std::vector<BigInt> o(orders.begin(), orders.end());
  return FgAbelianGroup::from_cyclic_orders(o, rank);
}

IntMatrix M(std::vector<std::vector<long long>> rows, std::size_t cols) {
  std::vector<std::vector<BigInt>> r;
  for (auto& row : rows) r.emplace_back(row.begin(), row.end());
  return IntMatrix::from_rows(r, cols);
}

IntMatrix random_unimodular(std::size_t n, std::mt19937_64& rng) {
  IntMatrix u = IntMatrix::identity(n);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(n) - 1), coef(-3, 3);
  for (int s = 0; s < 8 && n > 1; ++s) {
    int i = pick(rng), j = pick(rng);
    if (i == j) continue;
    u.add_row_multiple(i, j, coef(rng));
    if (rng() % 3 == 0) u.swap_rows(i, j);
  }
  return u;
}

void check_smith(const IntMatrix& m) {
  SmithForm s = smith_normal_form(m);
  CHECK(s.u * m * s.v == s.d);
  CHECK(abs(s.u.determinant()) == 1);
  CHECK(abs(s.v.determinant()) == 1);
  CHECK(s.v * s.v_inv == IntMatrix::identity(m.cols()));
  CHECK(s.d.is_diagonal());
  for (std::size_t i = 0; i < s.rank; ++i) {
    CHECK(s.d(i, i) > 0);
    if (i + 1 < s.rank) CHECK(s.d(i + 1, i + 1) % s.d(i, i) == 0);
  }
  for (std::size_t i = s.rank; i < std::min(m.rows(), m.cols()); ++i) CHECK(s.d(i, i) == 0);
}

}  // namespace

TEST_CASE("smith normal form examples") {
  CHECK(smith_normal_form(IntMatrix::identity(2)).d == IntMatrix::identity(2));
  CHECK(smith_normal_form(M({{2, 0}, {0, 3}}, 2)).d == M({{1, 0}, {0, 6}}, 2));
  CHECK(smith_normal_form(M({{2, 4}, {6, 8}}, 2)).d == M({{2, 0}, {0, 4}}, 2));
  check_smith(M({{0, 0, 0}, {0, 0, 0}}, 3));
  check_smith(IntMatrix(0, 3));
  check_smith(M({{12, -18, 30}, {4, 6, 8}, {1, 0, 0}, {0, 0, 5}}, 3));
}

TEST_CASE("smith normal form random property") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dim(1, 6), entry(-9, 9);
  for (int t = 0; t < 300; ++t) {
    std::size_t r = dim(rng), c = dim(rng);
    IntMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) m(i, j) = entry(rng);
    check_smith(m);
    IntMatrix moved = random_unimodular(r, rng) * m * random_unimodular(c, rng);
    CHECK(smith_normal_form(moved).d == smith_normal_form(m).d);
  }
}

TEST_CASE("smith diagonal product matches the determinant") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> entry(-9, 9);
  for (int t = 0; t < 100; ++t) {
    IntMatrix m(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) m(i, j) = entry(rng);
    SmithForm s = smith_normal_form(m);
    BigInt prod = 1;
    for (std::size_t i = 0; i < 4; ++i) prod *= s.d(i, i);
    CHECK(prod == abs(m.determinant()));
  }
}

TEST_CASE("group_from_relations") {
  // 4a = 0, 2a - 2b = 0, 2a = 0
  CHECK(group_from_relations(M({{4, 0}, {2, -2}, {2, 0}}, 2)) == G({2, 2}));
  CHECK(group_from_relations(IntMatrix(0, 2)) == FgAbelianGroup::free(2));
  CHECK(group_from_relations(M({{-1, 2}, {3, -5}}, 2)).is_trivial());
  CHECK(group_from_relations(M({{6}}, 1)) == G({6}));
  CHECK(group_from_relations(M({{2, 0, 0}}, 3)) == G({2}, 2));
}

TEST_CASE("group_from_relations is invariant under row operations") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> entry(-6, 6);
  for (int t = 0; t < 100; ++t) {
    IntMatrix m(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) m(i, j) = entry(rng);
    IntMatrix n = m;
    n.swap_rows(0, 2);
    n.add_row_multiple(1, 0, entry(rng));
    CHECK(group_from_relations(m) == group_from_relations(n));
  }
}

TEST_CASE("canonical form") {
  CHECK(G({2, 3}) == G({6}));
  CHECK(G({4, 2}).factors() == std::vector<BigInt>{2, 4});
  CHECK(G({1, 1}).is_trivial());
  CHECK(G({0, 5}) == G({5}, 1));
  CHECK(G({12, 18}).factors() == std::vector<BigInt>{6, 36});
  auto ed = G({12, 18}).elementary_divisors();
  CHECK(ed.by_prime.at(2) == std::vector<unsigned>{2, 1});
  CHECK(ed.by_prime.at(3) == std::vector<unsigned>{2, 1});
  CHECK(FgAbelianGroup::from_elementary(ed) == G({12, 18}));
  CHECK(G({4, 2}).to_string() == "Z_2 + Z_4");
  CHECK(G({}, 1).to_string() == "Z");
}

TEST_CASE("tensor, hom and ext") {
  CHECK(tensor_Zp(G({4, 2}), 2) == 2);
  CHECK(tensor_Zp(G({4, 2}), 3) == 0);
  CHECK_THROWS_AS(tensor_Zp(G({4}), 4), ValidationError);
  CHECK(hom_ext_Zp(G({2, 2}), 2).hom == 2);
  CHECK(hom_ext_Zp(G({2, 2}), 2).ext == 2);
  CHECK(hom_ext_Zp(G({}, 1), 2).hom == 1);
  CHECK(hom_ext_Zp(G({}, 1), 2).ext == 0);
  CHECK(ext1_torsion(G({4}, 1)) == G({4}));
  CHECK(ext1_torsion(FgAbelianGroup::free(3)).is_trivial());
  CHECK(ext1_torsion(G({6, 2})) == G({6, 2}));
  CHECK(tensor_Zpk_log(G({8, 2}), 2, 2) == 3);
  CHECK(tensor_Zpk_log(G({8}, 1), 2, 3) == 6);
}

TEST_CASE("tensor and hom agree with element enumeration up to order 64") {
  for (const auto& orders : oracle::invariant_factor_lists(64)) {
    std::vector<long long> o(orders.begin(), orders.end());
    FgAbelianGroup g = G(o);
    oracle::FiniteAbelian fa(orders);
    for (std::uint64_t p : {2, 3, 5, 7}) {
      CHECK(tensor_Zp(g, p) == oracle::dim_mod_p(fa, p));
      CHECK(hom_ext_Zp(g, p).hom == oracle::hom_dim_Zp(fa, p));
      CHECK(hom_ext_Zp(g, p).ext == oracle::hom_dim_Zp(fa, p));
    }
  }
}

TEST_CASE("tensor is additive") {
  for (const auto& a : oracle::invariant_factor_lists(16))
    for (const auto& b : oracle::invariant_factor_lists(16)) {
      FgAbelianGroup ga = G({a.begin(), a.end()}), gb = G({b.begin(), b.end()});
      for (int p : {2, 3}) CHECK(tensor_Zp(ga + gb, p) == tensor_Zp(ga, p) + tensor_Zp(gb, p));
    }
}

TEST_CASE("order") {
  CHECK(*order(FgAbelianGroup{}) == 1);
  CHECK(*order(G({4, 2})) == 8);
  CHECK_FALSE(order(G({2}, 1)).has_value());
}

TEST_CASE("direct doubles") {
  auto d = is_direct_double(G({2, 2}));
  CHECK(d.is_double);
  CHECK(*d.half == G({2}));
  CHECK_FALSE(is_direct_double(G({4, 2})).is_double);
  CHECK(is_direct_double(FgAbelianGroup{}).is_double);
  CHECK(is_direct_double(FgAbelianGroup{}).half->is_trivial());
  CHECK_FALSE(is_direct_double(FgAbelianGroup::free(1)).is_double);
  CHECK(*is_direct_double(G({6, 6}, 2)).half == G({6}, 1));
  CHECK_FALSE(is_direct_double(G({2, 2}, 1)).is_double);

  for (const auto& a : oracle::invariant_factor_lists(32)) {
    FgAbelianGroup g = G({a.begin(), a.end()});
    auto dd = is_direct_double(g + g);
    REQUIRE(dd.is_double);
    CHECK(*dd.half == g);
    CHECK(*order(g + g) == (*order(g)) * (*order(g)));
  }
}

TEST_CASE("embeds_power against injective homomorphism search") {
  CHECK(embeds_power(G({2}), 2, G({2, 2})));
  CHECK_FALSE(embeds_power(G({2}), 3, G({2, 2})));
  CHECK(embeds_power(FgAbelianGroup{}, 17, G({3})));
  CHECK_FALSE(embeds_power(G({2}), 2, G({8})));
  CHECK_THROWS_AS(embeds_power(G({2}, 1), 1, G({2})), ValidationError);

  auto lists = oracle::invariant_factor_lists(32);
  auto mods = [](const FgAbelianGroup& g) {
    std::vector<std::uint64_t> m;
    for (const auto& d : g.factors()) m.push_back(static_cast<std::uint64_t>(d));
    return oracle::FiniteAbelian(m);
  };
  for (const auto& b : lists) {
    FgAbelianGroup gb = G({b.begin(), b.end()});
    for (const auto& a : lists) {
      FgAbelianGroup ga = G({a.begin(), a.end()});
      for (std::uint64_t copies = 1; copies <= 3; ++copies) {
        FgAbelianGroup pw = oracle::power(ga, copies);
        if (*order(pw) > *order(gb)) break;
        CHECK(embeds_power(ga, copies, gb) == oracle::injective_hom_exists(mods(pw), mods(gb)));
      }
    }
  }
}

TEST_CASE("enumerate_quotients") {
  CHECK(enumerate_quotients(G({4})) == std::vector<FgAbelianGroup>{G({}), G({2}), G({4})});
  CHECK(enumerate_quotients(G({2, 2})) == std::vector<FgAbelianGroup>{G({}), G({2}), G({2, 2})});
  auto q = enumerate_quotients(G({4, 2}));
  CHECK(std::set<FgAbelianGroup>(q.begin(), q.end()) ==
        std::set<FgAbelianGroup>{G({}), G({2}), G({4}), G({2, 2}), G({4, 2})});
  CHECK_THROWS_AS(enumerate_quotients(G({2048})), ValidationError);
  CHECK_THROWS_AS(enumerate_quotients(G({2}, 1)), ValidationError);
  CHECK(enumerate_quotients(G({2048}), 4096).size() == 12);

  for (const auto& a : oracle::invariant_factor_lists(48)) {
    auto mine = enumerate_quotients(G({a.begin(), a.end()}));
    auto brute = oracle::quotient_types(oracle::FiniteAbelian(a));
    CHECK(std::set<FgAbelianGroup>(mine.begin(), mine.end()) == brute);
    CHECK(std::is_sorted(mine.begin(), mine.end()));
  }
}

TEST_CASE("abelian_groups_of_order") {
  CHECK(abelian_groups_of_order(1).size() == 1);
  CHECK(abelian_groups_of_order(8).size() == 3);
  CHECK(abelian_groups_of_order(64).size() == 11);
  CHECK(abelian_groups_of_order(72).size() == 6);
  std::size_t total = 0;
  for (std::uint64_t n = 1; n <= 100; ++n) total += abelian_groups_of_order(n).size();
  CHECK(total == oracle::invariant_factor_lists(100).size());
}

TEST_CASE("json round trips") {
  FgAbelianGroup g = G({4, 6}, 1);
  CHECK(group_from_json(to_json(g)) == g);
  CHECK(group_from_json(nlohmann::json::parse("[4,2]")) == G({4, 2}));
  CHECK(group_from_json(nlohmann::json::parse(R"({"generators":2,"relations":[[4,0],[2,-2],[2,0]]})")) == G({2, 2}));
  IntMatrix m = M({{1, -2}, {3, 4}, {0, 7}}, 2);
  CHECK(matrix_from_json(to_json(m)) == m);
  BigInt huge("123456789012345678901234567890");
  CHECK(bigint_from_json(to_json(huge)) == huge);
  CHECK_THROWS_AS(bigint_from_json(nlohmann::json("12x")), ValidationError);
  CHECK_THROWS_AS(matrix_from_json(nlohmann::json::parse(R"({"rows":1,"cols":2,"entries":[[1]]})")), ValidationError);
}
