#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "grs/errors.hpp"
#include "grs/growth.hpp"
#include "oracles.hpp"

using namespace grs;
using nlohmann::json;

namespace {

json path_doc(std::size_t n, double len) {
  json doc;
  doc["nodes"] = json::array();
  doc["edges"] = json::array();
  for (std::size_t i = 0; i < n; ++i) doc["nodes"].push_back({{"id", "p" + std::to_string(i)}, {"rm", 1.0}});
  for (std::size_t i = 0; i + 1 < n; ++i)
    doc["edges"].push_back({{"a", "p" + std::to_string(i)}, {"b", "p" + std::to_string(i + 1)}, {"len", len}});
  return doc;
}

SpaceDocument random_instance(std::uint64_t seed, std::size_t n = 80) {
  GeneratorParams gp;
  gp.n = n;
  return load_space(generate_space(GeneratorKind::random_geometric, gp, seed));
}

SolitonSample steady_exact(const std::vector<double>& r) {
  SolitonSample s;
  s.kind = SolitonKind::steady;
  s.r_scal = r;
  s.f = std::vector<double>(r.size(), 1.0);
  s.gradf = std::vector<double>();
  for (double v : r) s.gradf->push_back(std::sqrt(1.0 - v));
  return s;
}

}  // namespace

TEST_CASE("fit_bounded") {
  CHECK(fit_bounded(ScalarField({7, 7, 7})).c == 7.0);
  auto f = fit_bounded(ScalarField({1, 10, 100}));
  CHECK(f.c == 100.0);
  CHECK(f.witness == 2);
  CHECK(fit_bounded(ScalarField({3, 9, 9})).witness == 1);  // first argmax
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto d = random_instance(seed);
    const auto& v = d.field.values();
    CHECK(fit_bounded(d.field).c == *std::max_element(v.begin(), v.end()));
  }
}

TEST_CASE("fit_quadratic") {
  for (double c : {0.5, 1.0, 4.0}) {
    GeneratorParams gp;
    gp.c = c;
    gp.n = 6;
    SpaceDocument d = load_space(generate_space(GeneratorKind::cone_field, gp, 0));
    CHECK(fit_quadratic(d.space, *d.base, d.field).c == c);
  }

  SpaceDocument flat = load_space(path_doc(5, 1.0));
  auto seven = ScalarField(std::vector<double>(5, 7.0));
  auto q = fit_quadratic(flat.space, 2, seven);
  CHECK(q.c == 7.0);
  CHECK(q.witness == 2);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto d = random_instance(seed);
    auto fw = oracle::floyd_warshall(d.space);
    double best = 0.0;
    for (std::size_t x = 0; x < d.space.size(); ++x) best = std::max(best, d.field[x] / ((fw[0][x] + 1) * (fw[0][x] + 1)));
    auto fit = fit_quadratic(d.space, 0, d.field);
    CHECK(fit.c == doctest::Approx(best).epsilon(1e-12));
    CHECK(fit.c <= fit_bounded(d.field).c);
    // every point obeys the bound, the witness with equality
    for (std::size_t x = 0; x < d.space.size(); ++x)
      CHECK(d.field[x] <= fit.c * (fw[0][x] + 1) * (fw[0][x] + 1) * (1 + 1e-12));

    // scaling the field scales C and keeps the witness
    auto scaled = fit_quadratic(d.space, 0, d.field.scaled(8.0));
    CHECK(scaled.c == doctest::Approx(8.0 * fit.c));
    CHECK(scaled.witness == fit.witness);
  }
}

TEST_CASE("blowup candidates") {
  GeneratorParams gp;
  gp.c = 2.0;
  gp.n = 4;
  SpaceDocument cone = load_space(generate_space(GeneratorKind::cone_field, gp, 0));
  auto b = blowup_candidates(cone.space, *cone.base, cone.field, BlowupMode::scale_invariant, 5);
  REQUIRE(b.entries.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(b.entries[i].ratio == doctest::Approx(2.0));
    CHECK(b.entries[i].point == i);  // ties keep id order
  }

  // one far spike wins in both modes
  json doc = path_doc(20, 1.0);
  doc["nodes"][17]["rm"] = 1e4;
  SpaceDocument spike = load_space(doc);
  for (auto mode : {BlowupMode::scale_invariant, BlowupMode::absolute}) {
    auto c = blowup_candidates(spike.space, 0, spike.field, mode, 3);
    CHECK(c.entries.front().point == spike.space.index("p17"));
    REQUIRE(c.certificates.front().has_value());
    CHECK(c.certificates.front()->x0 == spike.space.index("p17"));
  }

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto d = random_instance(seed);
    auto fw = oracle::floyd_warshall(d.space);
    std::vector<double> ratios;
    for (std::size_t x = 0; x < d.space.size(); ++x) ratios.push_back(d.field[x] / ((fw[0][x] + 1) * (fw[0][x] + 1)));
    std::vector<double> sorted = ratios;
    std::sort(sorted.rbegin(), sorted.rend());
    auto c = blowup_candidates(d.space, 0, d.field, BlowupMode::scale_invariant, 10);
    for (std::size_t i = 0; i < 10; ++i) CHECK(c.entries[i].ratio == doctest::Approx(sorted[i]).epsilon(1e-12));
    CHECK(c.entries[0].ratio == fit_quadratic(d.space, 0, d.field).c);
    for (std::size_t i = 0; i < 10; ++i) {
      REQUIRE(c.certificates[i].has_value());
      CHECK(d.space.dist(c.certificates[i]->x0, c.entries[i].point) < 2.0 / 3.0);
    }

    // absolute: only points at or beyond the median distance, by raw value
    std::vector<double> dist0(fw[0]);
    std::sort(dist0.begin(), dist0.end());
    double median = dist0[(dist0.size() - 1) / 2];
    std::vector<double> far;
    for (std::size_t x = 0; x < d.space.size(); ++x)
      if (fw[0][x] >= median - 1e-12) far.push_back(d.field[x]);
    std::sort(far.rbegin(), far.rend());
    auto a = blowup_candidates(d.space, 0, d.field, BlowupMode::absolute, 10);
    for (std::size_t i = 0; i < a.entries.size(); ++i) CHECK(a.entries[i].p == far[i]);
  }

  CHECK_THROWS_AS(blowup_candidates(cone.space, 0, cone.field, BlowupMode::absolute, 0), ValidationError);
}

TEST_CASE("shi radius: steady") {
  SpaceDocument d = load_space(path_doc(10, 0.3));
  SolitonSample s;
  s.kind = SolitonKind::steady;
  s.gradf = std::vector<double>(10, 1.0);
  CHECK(shi_admissible_radius(s, d.space, 4).radius == 1.0);

  s.gradf = std::vector<double>(10, 0.0);
  auto r = shi_admissible_radius(s, d.space, 4);
  CHECK(r.radius == 1.0);
  CHECK(r.cap == 1.0);

  s.kind = SolitonKind::shrinking;
  CHECK(shi_admissible_radius(s, d.space, 4).radius == doctest::Approx(d.space.diameter()));

  s.gradf.reset();
  CHECK_THROWS_AS(shi_admissible_radius(s, d.space, 4), ValidationError);
}

TEST_CASE("shi radius: shrinking, gradf = d(x,o)/2") {
  // fine path from o = p0; p at distance D
  const double h = 0.01;
  SpaceDocument d = load_space(path_doc(1001, h));
  SolitonSample s;
  s.kind = SolitonKind::shrinking;
  s.gradf = std::vector<double>();
  // path position from the id, independent of the distance code
  auto pos = [&](std::size_t i) { return std::stod(d.space.id(i).substr(1)) * h; };
  for (std::size_t i = 0; i < d.space.size(); ++i) s.gradf->push_back(pos(i) / 2.0);

  for (std::string id : {"p0", "p50", "p200", "p600"}) {
    const std::size_t p = d.space.index(id);
    const double D = pos(p);
    // continuous closed form: (D + 2r)/2 = 1/r
    const double closed = (-D / 2.0 + std::sqrt(D * D / 4.0 + 4.0)) / 2.0;
    auto got = shi_admissible_radius(s, d.space, p);
    CHECK(got.radius >= closed - 1e-12);
    CHECK(got.radius <= closed + 2 * h);

    // brute-force definition on a fine grid of r
    auto admissible = [&](double r) {
      double sup = 0.0;
      for (std::size_t y = 0; y < d.space.size(); ++y)
        if (std::abs(pos(y) - D) < 2 * r - 1e-12) sup = std::max(sup, (*s.gradf)[y]);
      return sup * r <= 1.0 + 1e-12;
    };
    CHECK(admissible(got.radius));
    for (double r = got.radius + 1e-4; r < got.radius + 0.1; r += 1e-4) CHECK_FALSE(admissible(r));
  }
}

TEST_CASE("shi radius shrinks as gradf grows") {
  auto d = random_instance(4, 60);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  SolitonSample s;
  s.kind = SolitonKind::shrinking;
  s.gradf = std::vector<double>();
  for (std::size_t i = 0; i < d.space.size(); ++i) s.gradf->push_back(u(rng));
  SolitonSample t = s;
  for (double& g : *t.gradf) g += u(rng);
  for (std::size_t p = 0; p < d.space.size(); ++p)
    CHECK(shi_admissible_radius(t, d.space, p).radius <= shi_admissible_radius(s, d.space, p).radius);
}

TEST_CASE("audit: steady") {
  SpaceDocument d = load_space(path_doc(6, 1.0));
  std::vector<double> r{0.0, 0.1, 0.25, 0.5, 0.75, 0.96};
  auto exact = audit_soliton_identities(steady_exact(r), d.space, 1e-12);
  CHECK(exact.all_pass());
  CHECK(exact.clause("steady_normalized").max_residual < 1e-15);
  CHECK(*exact.steady_constant == doctest::Approx(1.0));

  auto bumped = steady_exact(r);
  (*bumped.gradf)[3] += 1e-3;
  CHECK_FALSE(audit_soliton_identities(bumped, d.space, 1e-4).clause("steady_constancy").pass);
  CHECK(audit_soliton_identities(bumped, d.space, 1e-2).all_pass());

  // constancy without the normalization to 1
  auto gauge = steady_exact(r);
  for (std::size_t i = 0; i < r.size(); ++i) (*gauge.r_scal)[i] = r[i] * 0.5, (*gauge.gradf)[i] = std::sqrt(0.5 - r[i] * 0.5);
  auto rep = audit_soliton_identities(gauge, d.space, 1e-9);
  CHECK(rep.clause("steady_constancy").pass);
  CHECK_FALSE(rep.clause("steady_normalized").pass);

  SolitonSample missing = steady_exact(r);
  missing.f.reset();
  CHECK_THROWS_AS(audit_soliton_identities(missing, d.space, 1e-3), ValidationError);
}

TEST_CASE("audit: shrinking Lipschitz residual equals an edge scan") {
  // f = (d/2 + 1)^2 on a path from p0, with a few edges stretched
  json doc = path_doc(12, 1.0);
  doc["edges"][3]["len"] = 0.2;
  doc["edges"][7]["len"] = 0.4;
  SpaceDocument d = load_space(doc);
  SolitonSample s;
  s.kind = SolitonKind::shrinking;
  s.f = std::vector<double>();
  s.r_scal = std::vector<double>();
  s.gradf = std::vector<double>();
  for (std::size_t i = 0; i < d.space.size(); ++i) {
    double x = d.space.dist(0, i) / 2.0 + 1.0;
    s.f->push_back(x * x);
    s.r_scal->push_back(0.5);
    s.gradf->push_back(x * 0.5);  // sqrt(f) times the slope of sqrt(f) along the path
  }
  // make one edge violate: jump in f across the short edge
  (*s.f)[4] += 3.0;
  double expect = 0.0;
  for (const auto& e : d.space.edges()) {
    std::size_t a = d.space.index(e.a), b = d.space.index(e.b);
    expect = std::max(expect, std::abs(std::sqrt((*s.f)[a]) - std::sqrt((*s.f)[b])) - e.len);
  }
  auto rep = audit_soliton_identities(s, d.space, 1e-9);
  CHECK(rep.clause("sqrt_f_lipschitz").max_residual == doctest::Approx(expect).epsilon(1e-12));
  CHECK(expect > 0.0);
  CHECK_FALSE(rep.clause("sqrt_f_lipschitz").pass);
  CHECK(rep.clause("shrinking_gradient_bound").pass);

  (*s.f)[4] = -1.0;
  CHECK_THROWS_AS(audit_soliton_identities(s, d.space, 1e-3), ValidationError);
}

TEST_CASE("noncollapsing") {
  GeneratorParams gp;
  gp.n = 4;
  gp.with_vol = true;
  gp.field = "constant";
  gp.c = 0.05;
  SpaceDocument grid = load_space(generate_space(GeneratorKind::grid4, gp, 0));
  auto rep = check_noncollapsing(*grid.sample, grid.space, grid.field, 0.1);
  CHECK(rep.violations.empty());
  CHECK(rep.checked > 0);

  // exhaustive oracle for kappa_max over the same (x, r) set with ball volumes by brute force
  auto fw = oracle::floyd_warshall(grid.space);
  const std::size_t n = grid.space.size();
  double kmin = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < n; ++x) {
    std::vector<double> radii{1.0 / std::sqrt(grid.field[x])};
    for (std::size_t y = 0; y < n; ++y)
      if (fw[x][y] > 0) radii.push_back(fw[x][y]), radii.push_back(fw[x][y] / 2);
    for (std::size_t i = 0; i < radii.size(); ++i) {
      double r = radii[i], vol = 0, sup = 0;
      for (std::size_t y = 0; y < n; ++y)
        if (fw[x][y] < r) vol += 1.0, sup = std::max(sup, grid.field[y]);
      if (i > 0 && sup * r * r > 1.0 + 1e-12) continue;
      kmin = std::min(kmin, vol / (r * r * r * r));
    }
  }
  CHECK(rep.kappa_max == doctest::Approx(kmin).epsilon(1e-12));

  auto big = check_noncollapsing(*grid.sample, grid.space, grid.field, 1e6);
  CHECK_FALSE(big.violations.empty());

  json one = {{"nodes", {{{"id", "x"}, {"rm", 4.0}, {"vol", 1e-3}}}}, {"edges", json::array()}};
  SpaceDocument single = load_space(one);
  auto s = check_noncollapsing(*single.sample, single.space, single.field, 1e-9);
  CHECK(s.kappa_max == doctest::Approx(1e-3 / std::pow(0.5, 4)));

  SolitonSample novol;
  CHECK_THROWS_AS(check_noncollapsing(novol, grid.space, grid.field, 0.1), ValidationError);
  CHECK_THROWS_AS(check_noncollapsing(*grid.sample, grid.space, grid.field, 0.0), ValidationError);
}
