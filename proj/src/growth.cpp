#include "grs/growth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "grs/errors.hpp"

namespace grs {

using nlohmann::json;

namespace {

constexpr double kTieTol = 1e-12;

double ratio(double p, double d) {
  double d1 = d + 1.0;
  return p / (d1 * d1);
}

}  // namespace

std::string to_string(GrowthModel m) { return m == GrowthModel::bounded ? "bounded" : "quadratic"; }
std::string to_string(BlowupMode m) { return m == BlowupMode::scale_invariant ? "scale" : "abs"; }

GrowthFit fit_bounded(const ScalarField& field) {
  require(field.size() > 0, "fit_bounded: empty field");
  GrowthFit fit{GrowthModel::bounded, field[0], 0};
  for (std::size_t i = 1; i < field.size(); ++i) {
    if (field[i] > fit.c) fit.c = field[i], fit.witness = i;
  }
  return fit;
}

GrowthFit fit_quadratic(const MetricSpace& space, std::size_t base, const ScalarField& field) {
  require(base < space.size(), "fit_quadratic: base point not set");
  require(field.size() == space.size(), "field size does not match space");
  std::span<const double> d = space.row(base);
  GrowthFit fit{GrowthModel::quadratic, ratio(field[0], d[0]), 0};
  for (std::size_t i = 1; i < field.size(); ++i) {
    double r = ratio(field[i], d[i]);
    if (r > fit.c) fit.c = r, fit.witness = i;
  }
  return fit;
}

BlowupCandidates blowup_candidates(const MetricSpace& space, std::size_t base, const ScalarField& field,
                                   BlowupMode mode, std::size_t k) {
  require(k > 0, "blowup_candidates: k must be positive");
  require(k <= space.size(), "blowup_candidates: k exceeds point count");
  require(base < space.size(), "blowup_candidates: base point not set");
  std::span<const double> d = space.row(base);

  std::vector<BlowupEntry> all;
  for (std::size_t i = 0; i < space.size(); ++i) all.push_back({i, field[i], ratio(field[i], d[i])});

  BlowupCandidates out{mode, {}, {}};
  if (mode == BlowupMode::scale_invariant) {
    std::stable_sort(all.begin(), all.end(), [](const BlowupEntry& a, const BlowupEntry& b) { return a.ratio > b.ratio; });
  } else {
    std::vector<double> sorted(d.begin(), d.end());
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[(sorted.size() - 1) / 2];
    std::erase_if(all, [&](const BlowupEntry& e) { return d[e.point] < median; });
    std::stable_sort(all.begin(), all.end(), [](const BlowupEntry& a, const BlowupEntry& b) { return a.p > b.p; });
  }
  if (all.size() > k) all.resize(k);
  out.entries = std::move(all);

  std::vector<std::size_t> starts;
  for (const BlowupEntry& e : out.entries)
    if (e.p > 0.0) starts.push_back(e.point);
  std::vector<SelectionCertificate> certs = select_sequence(space, field, starts);
  std::size_t next = 0;
  for (const BlowupEntry& e : out.entries) {
    if (e.p > 0.0)
      out.certificates.emplace_back(std::move(certs[next++]));
    else
      out.certificates.emplace_back(std::nullopt);
  }
  return out;
}

ShiRadius shi_admissible_radius(const SolitonSample& sample, const MetricSpace& space, std::size_t p) {
  require(sample.gradf.has_value(), "gradf missing");
  require(sample.kind.has_value(), "soliton kind missing");
  require(p < space.size(), "unknown point");
  const std::vector<double>& g = *sample.gradf;
  std::span<const double> d = space.row(p);

  ShiRadius out;
  if (*sample.kind == SolitonKind::steady) {
    out.cap = 1.0;
  } else {
    double diam = space.diameter();
    out.cap = diam > 0.0 ? diam : 1.0;
  }

  std::vector<double> cand{1.0, out.cap};
  for (std::size_t y = 0; y < space.size(); ++y) {
    if (d[y] > 0.0) cand.push_back(d[y] / 2.0);
    if (g[y] > 0.0) cand.push_back(1.0 / g[y]);
  }
  std::erase_if(cand, [&](double r) { return !(r > 0.0) || r > out.cap; });
  std::sort(cand.begin(), cand.end(), std::greater<>());

  for (double r : cand) {
    double s = 0.0;
    for (std::size_t y = 0; y < space.size(); ++y)
      if (d[y] < 2.0 * r) s = std::max(s, g[y]);
    if (s * r <= 1.0 + kTieTol) {
      out.radius = r;
      out.sup_gradf = s;
      return out;
    }
  }
  throw InvariantError("shi_admissible_radius: no admissible candidate");
}

bool AuditReport::all_pass() const {
  return std::all_of(clauses.begin(), clauses.end(), [](const AuditClause& c) { return c.pass; });
}

const AuditClause& AuditReport::clause(const std::string& name) const {
  for (const auto& c : clauses)
    if (c.name == name) return c;
  throw ValidationError("no audit clause named " + name);
}

AuditReport audit_soliton_identities(const SolitonSample& sample, const MetricSpace& space, double tol) {
  require(sample.kind.has_value(), "soliton kind missing");
  require(sample.f.has_value(), "f missing");
  require(sample.r_scal.has_value(), "r_scal missing");
  require(sample.gradf.has_value(), "gradf missing");
  require(tol > 0.0, "tolerance must be positive");
  const auto& f = *sample.f;
  const auto& rs = *sample.r_scal;
  const auto& g = *sample.gradf;
  const std::size_t n = space.size();

  AuditReport rep{*sample.kind, tol, {}, std::nullopt};
  auto add = [&](std::string name, double residual, std::string anchor) {
    rep.clauses.push_back({std::move(name), residual <= tol, residual, std::move(anchor)});
  };

  if (*sample.kind == SolitonKind::steady) {
    double range_violation = 0.0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0, normalized = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      range_violation = std::max({range_violation, -rs[i], rs[i] - 1.0});
      double v = g[i] * g[i] + rs[i];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
      normalized = std::max(normalized, std::abs(v - 1.0));
    }
    rep.clauses.push_back({"r_scal_in_unit_interval", range_violation <= 0.0, range_violation, "0 <= R <= 1"});
    add("steady_constancy", hi - lo, "|grad f|^2 + R = const");
    add("steady_normalized", normalized, "|grad f| = sqrt(1 - R)");
    rep.steady_constant = sum / static_cast<double>(n);
  } else {
    double bound = 0.0, normalization = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      bound = std::max(bound, g[i] * g[i] - (f[i] - rs[i]));
      normalization = std::max(normalization, std::abs(g[i] * g[i] + rs[i] - f[i]));
    }
    add("shrinking_gradient_bound", std::max(0.0, bound), "|grad f| <= sqrt(f - R)");
    add("shrinking_normalization", normalization, "|grad f_i|^2 + R_{g_i} = f / Q_i");

    double lip = 0.0;
    for (const Edge& e : space.edges()) {
      std::size_t a = space.index(e.a), b = space.index(e.b);
      if (f[a] < 0.0 || f[b] < 0.0) throw ValidationError("negative f under square root at edge " + e.a + "-" + e.b);
      lip = std::max(lip, std::abs(std::sqrt(f[a]) - std::sqrt(f[b])) - space.dist(a, b));
    }
    add("sqrt_f_lipschitz", std::max(0.0, lip), "|grad f^(1/2)| <= 1");
  }
  return rep;
}

NoncollapsingReport check_noncollapsing(const SolitonSample& sample, const MetricSpace& space,
                                        const ScalarField& field, double kappa) {
  require(sample.vol.has_value(), "vol missing");
  require(kappa > 0.0 && std::isfinite(kappa), "kappa must be positive");
  require(field.size() == space.size(), "field size does not match space");
  const auto& vol = *sample.vol;
  const std::size_t n = space.size();

  NoncollapsingReport rep;
  rep.kappa = kappa;

  std::vector<double> inv_sqrt_field;
  for (std::size_t y = 0; y < n; ++y)
    if (field[y] > 0.0) inv_sqrt_field.push_back(1.0 / std::sqrt(field[y]));

  std::vector<std::size_t> order(n);
  std::vector<double> sorted_d(n), prefix_vol(n + 1), prefix_max(n + 1);
  for (std::size_t x = 0; x < n; ++x) {
    std::span<const double> d = space.row(x);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    prefix_vol[0] = 0.0;
    prefix_max[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sorted_d[i] = d[order[i]];
      prefix_vol[i + 1] = prefix_vol[i] + vol[order[i]];
      prefix_max[i + 1] = std::max(prefix_max[i], field[order[i]]);
    }
    auto inside = [&](double r) {
      return static_cast<std::size_t>(std::lower_bound(sorted_d.begin(), sorted_d.end(), r) - sorted_d.begin());
    };
    auto check = [&](double r) {
      double v = prefix_vol[inside(r)];
      double r4 = (r * r) * (r * r);
      ++rep.checked;
      rep.kappa_max = std::min(rep.kappa_max, v / r4);
      if (v < kappa * r4) rep.violations.push_back({x, r, v, kappa * r4});
    };

    if (field[x] > 0.0) check(1.0 / std::sqrt(field[x]));

    std::vector<double> radii;
    for (double dv : sorted_d) {
      if (dv > 0.0) {
        radii.push_back(dv);
        radii.push_back(dv / 2.0);
      }
    }
    radii.insert(radii.end(), inv_sqrt_field.begin(), inv_sqrt_field.end());
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    for (double r : radii) {
      double s = prefix_max[inside(r)];
      if (s * r * r > 1.0 + kTieTol) break;  // control fails here and at every larger r
      check(r);
    }
  }
  return rep;
}

json to_json(const MetricSpace& space, const GrowthFit& fit) {
  return {{"model", to_string(fit.model)}, {"C", fit.c}, {"witness", space.id(fit.witness)}};
}

json to_json(const MetricSpace& space, const BlowupCandidates& b) {
  json entries = json::array();
  for (std::size_t i = 0; i < b.entries.size(); ++i) {
    const BlowupEntry& e = b.entries[i];
    json j = {{"y", space.id(e.point)}, {"P", e.p}, {"ratio", e.ratio}};
    j["certificate"] = b.certificates[i] ? to_json(space, *b.certificates[i]) : json(nullptr);
    entries.push_back(std::move(j));
  }
  return {{"mode", to_string(b.mode)}, {"entries", std::move(entries)}};
}

json to_json(const ShiRadius& r) {
  return {{"radius", r.radius}, {"cap", r.cap}, {"sup_gradf", r.sup_gradf}, {"constant", r.constant}};
}

json to_json(const AuditReport& r) {
  json clauses = json::array();
  for (const auto& c : r.clauses)
    clauses.push_back({{"name", c.name}, {"pass", c.pass}, {"max_residual", c.max_residual}, {"identity", c.anchor}});
  json out = {{"kind", to_string(r.kind)}, {"tol", r.tol}, {"clauses", std::move(clauses)}, {"all_pass", r.all_pass()}};
  if (r.steady_constant) out["steady_constant"] = *r.steady_constant;
  return out;
}

json to_json(const MetricSpace& space, const NoncollapsingReport& r) {
  json v = json::array();
  for (const auto& x : r.violations)
    v.push_back({{"point", space.id(x.point)}, {"radius", x.radius}, {"volume", x.volume}, {"required", x.required}});
  json out = {{"kappa", r.kappa}, {"checked", r.checked}, {"violations", std::move(v)}, {"pass", r.violations.empty()}};
  out["kappa_max"] = std::isfinite(r.kappa_max) ? json(r.kappa_max) : json(nullptr);
  return out;
}

}  // namespace grs
