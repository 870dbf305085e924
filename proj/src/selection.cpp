#include "grs/selection.hpp"

#include <cmath>
#include <future>
#include <sstream>

#include "grs/errors.hpp"

namespace grs {

using nlohmann::json;

namespace {

bool strictly_exceeds(double v, double bound) { return v > bound + kStrictMargin * bound; }

double radius_for(const SelectionParams& params, double p0, double o) {
  if (params.lemma_choice) return std::sqrt(p0 / o) / 3.0;
  return params.a0 / std::sqrt(o);
}

double effective_a0(const SelectionParams& params, double p0) {
  return params.lemma_choice ? std::sqrt(p0) / 3.0 : params.a0;
}

// 2 A0 P0^(-1/2); exactly 2/3 under the lemma choice.
double distance_bound(const SelectionParams& params, double p0) {
  if (params.lemma_choice) return 2.0 / 3.0;
  return 2.0 * params.a0 / std::sqrt(p0);
}

}  // namespace

std::size_t iteration_bound(double p0, double pmax) {
  require(p0 > 0.0, "iteration_bound: P0 must be positive");
  require(p0 <= pmax, "iteration_bound: P0 exceeds Pmax");
  std::size_t count = 1;
  for (double v = p0; v * 4.0 <= pmax; v *= 4.0) ++count;
  return count;
}

SelectionCertificate select_point(const MetricSpace& space, const ScalarField& field, const SelectionParams& params) {
  require(params.y0 < space.size(), "unknown point");
  require(field.size() == space.size(), "field size does not match space");
  const double p0 = field[params.y0];
  if (!(p0 > 0.0)) throw ValidationError("zero-start: field vanishes at " + space.id(params.y0));
  require(params.lemma_choice || (params.a0 > 0.0 && std::isfinite(params.a0)), "A0 must be positive");

  const std::size_t bound = iteration_bound(p0, field.max());
  SelectionCertificate cert;
  cert.p0 = p0;
  cert.a0 = effective_a0(params, p0);
  cert.lemma_choice = params.lemma_choice;
  cert.chain.push_back({params.y0, p0});

  std::size_t y = params.y0;
  double o = p0;
  for (;;) {
    const double r = radius_for(params, p0, o);
    std::span<const double> d = space.row(y);
    std::size_t best = space.size();
    for (std::size_t z = 0; z < space.size(); ++z) {
      if (!(d[z] < r) || !strictly_exceeds(field[z], 4.0 * o)) continue;
      // max field value; the lower index (lexicographic id) wins ties
      if (best == space.size() || field[z] > field[best]) best = z;
    }
    if (best == space.size()) break;
    y = best;
    o = field[best];
    cert.chain.push_back({y, o});
    ensure(cert.chain.size() <= bound, "selection chain exceeded iteration bound");
  }

  cert.x0 = y;
  cert.q0 = o;
  cert.radius = radius_for(params, p0, o);
  cert.guarantees.q_ge_p = cert.q0 >= p0;
  cert.guarantees.dist_ok = space.dist(params.y0, y) < distance_bound(params, p0);
  cert.guarantees.ball_ok = true;  // loop exit: nothing in the ball strictly exceeds 4 Q0
  return cert;
}

bool VerificationReport::all_pass() const {
  for (const auto& c : clauses)
    if (!c.pass) return false;
  return true;
}

const VerificationClause& VerificationReport::clause(const std::string& name) const {
  for (const auto& c : clauses)
    if (c.name == name) return c;
  throw ValidationError("no clause named " + name);
}

VerificationReport verify_certificate(const MetricSpace& space, const ScalarField& field,
                                      const SelectionParams& params, const SelectionCertificate& cert) {
  VerificationReport rep;
  auto add = [&](std::string name, bool pass, std::string detail = {}) {
    rep.clauses.push_back({std::move(name), pass, std::move(detail)});
  };
  const std::size_t n = space.size();
  auto valid = [&](std::size_t i) { return i < n; };

  bool points_ok = valid(params.y0) && valid(cert.x0) && !cert.chain.empty();
  for (const ChainEntry& e : cert.chain) points_ok = points_ok && valid(e.point);
  add("points_exist", points_ok);
  if (!points_ok) return rep;

  const double p0 = field[params.y0];
  const double a0 = params.lemma_choice ? std::sqrt(p0) / 3.0 : params.a0;
  auto rescaled_radius = [&](double o) { return params.lemma_choice ? std::sqrt(p0 / o) / 3.0 : a0 / std::sqrt(o); };

  bool consistent = cert.chain.front().point == params.y0 && cert.chain.back().point == cert.x0 &&
                    cert.q0 == field[cert.x0];
  for (const ChainEntry& e : cert.chain) consistent = consistent && e.value == field[e.point];
  add("chain_consistent", consistent);

  add("q_ge_p", field[cert.x0] >= p0);

  {
    double d = space.dist(params.y0, cert.x0);
    double lim = params.lemma_choice ? 2.0 / 3.0 : 2.0 * a0 / std::sqrt(p0);
    std::ostringstream os;
    os << "d(x0,y0)=" << d << " bound=" << lim;
    add("dist_ok", d < lim, os.str());
  }

  {
    const double q = field[cert.x0];
    const double cap = 4.0 * q;
    bool ok = true;
    std::ostringstream os;
    for (std::size_t y = 0; y < n; ++y) {
      if (space.dist(cert.x0, y) < cert.radius && field[y] > cap + kStrictMargin * cap) {
        ok = false;
        os << space.id(y) << " has " << field[y] << " > 4Q0=" << cap << "; ";
      }
    }
    add("ball_ok", ok, os.str());
  }

  add("radius_ok", cert.radius >= rescaled_radius(field[cert.x0]));

  bool growth = true, geometric = true, steps = true;
  double power = 1.0;
  for (std::size_t k = 0; k + 1 < cert.chain.size(); ++k) {
    double ok_ = field[cert.chain[k].point];
    double next = field[cert.chain[k + 1].point];
    if (!(next > 4.0 * ok_ + kStrictMargin * 4.0 * ok_)) growth = false;
    if (!(space.dist(cert.chain[k].point, cert.chain[k + 1].point) < rescaled_radius(ok_))) steps = false;
  }
  for (std::size_t k = 0; k < cert.chain.size(); ++k) {
    if (field[cert.chain[k].point] < power * p0) geometric = false;
    power *= 4.0;
  }
  add("chain_growth", growth);
  add("step_dist", steps);
  add("geometric_growth", geometric);

  double pmax = 0.0;
  for (std::size_t y = 0; y < n; ++y) pmax = std::max(pmax, field[y]);
  std::size_t limit = 1;
  for (double v = p0; v * 4.0 <= pmax; v *= 4.0) ++limit;
  add("chain_length", cert.chain.size() <= limit);
  return rep;
}

std::vector<SelectionCertificate> select_sequence(const MetricSpace& space, const ScalarField& field,
                                                  const std::vector<std::size_t>& starts, bool parallel) {
  auto one = [&](std::size_t y) {
    SelectionParams p;
    p.y0 = y;
    p.lemma_choice = true;
    return select_point(space, field, p);
  };
  std::vector<SelectionCertificate> out;
  out.reserve(starts.size());
  if (!parallel) {
    for (std::size_t y : starts) out.push_back(one(y));
    return out;
  }
  std::vector<std::future<SelectionCertificate>> jobs;
  jobs.reserve(starts.size());
  for (std::size_t y : starts) jobs.push_back(std::async(std::launch::async, one, y));
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

json to_json(const MetricSpace& space, const SelectionCertificate& cert) {
  json chain = json::array();
  for (const ChainEntry& e : cert.chain) chain.push_back({{"y", space.id(e.point)}, {"O", e.value}});
  return {{"chain", std::move(chain)},
          {"x0", space.id(cert.x0)},
          {"Q0", cert.q0},
          {"P0", cert.p0},
          {"A0", cert.a0},
          {"radius", cert.radius},
          {"lemma_choice", cert.lemma_choice},
          {"guarantees",
           {{"q_ge_p", cert.guarantees.q_ge_p}, {"dist_ok", cert.guarantees.dist_ok}, {"ball_ok", cert.guarantees.ball_ok}}}};
}

json to_json(const VerificationReport& report) {
  json clauses = json::array();
  for (const auto& c : report.clauses) {
    json j = {{"name", c.name}, {"pass", c.pass}};
    if (!c.detail.empty()) j["detail"] = c.detail;
    clauses.push_back(std::move(j));
  }
  return {{"clauses", std::move(clauses)}, {"all_pass", report.all_pass()}};
}

}  // namespace grs
