#include "grs/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "grs/errors.hpp"
#include "grs/growth.hpp"
#include "grs/metric.hpp"
#include "grs/obstruction.hpp"
#include "grs/selection.hpp"
#include "grs/space_forms.hpp"

namespace grs {

using nlohmann::json;

namespace {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::size_t point_index(const MetricSpace& space, const std::string& id) {
  if (!space.contains(id)) throw ValidationError("unknown point: " + id);
  return space.index(id);
}

std::size_t base_of(const SpaceDocument& doc, const std::string& override_id) {
  if (!override_id.empty()) return point_index(doc.space, override_id);
  if (!doc.base) throw ValidationError("space document has no base point; pass --base");
  return *doc.base;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write " + path);
  f << text;
}

// Everything any subcommand can take.
struct Options {
  std::string config, space, start, starts, model = "quadratic", mode = "scale", point, base, matrix, relations, group,
      family, gamma, trace, sequence, ambient, coker, kind, field = "random", shape = "grid2";
  double a0 = 0.0, kappa = 0.0, c = 1.0, radius = 0.0;
  bool lemma = false, oracle = false, vol = false, parallel = false;
  std::size_t k = 5, n = 0, max_param = 0;
  std::uint64_t p = 2;
};

namespace anchors {
const char* kChain = "O_{k+1} > 4 O_k along the chain, hence O_k >= 4^k O_0";
const char* kDist = "d(y_k, y_0) < 2 A_0 O_0^(-1/2)";
const char* kBall = "P <= 4 Q_0 on B_{A_0 Q_0^(-1/2)}(x_0)";
const char* kSeq = "A_i = P_i^(1/2)/3 and x_i in B_{2/3}(y_i)";
const char* kBounded = "|Rm|(x) <= C";
const char* kQuadratic = "|Rm|(x) <= C (d(x,o) + 1)^2";
const char* kBlowup = "P_i (d(y_i,o) + 1)^(-2) -> infinity";
const char* kShi = "|grad f| <= r^(-1) on B_{2r}(p); steady scales 0 < r <= 1, shrinking scales r <~ 1/d(o,x)";
const char* kKappa = "Vol B_{Q^(-1/2)}(x) >= kappa Q^(-2); Vol B_r(x) >= kappa r^4 where P <= r^(-2) on B_r(x)";
const char* kSnf = "U m V = D with U, V unimodular and d_1 | d_2 | ...";
const char* kGroup = "G = Z^g / rowspace(R)";
const char* kDouble = "G = A + A iff the rank and every elementary divisor multiplicity are even";
const char* kTensor = "dim G (x) Z_p = rank + #{i : p | d_i} = dim Hom(G, Z_p); dim Ext(G, Z_p) = #{i : p | d_i}";
const char* kAb = "H_1(S^3/Gamma; Z) = Gamma / [Gamma, Gamma]";
const char* kFeasible =
    "|H_1(boundary)| = |H_1(M)|^2 and H_1(boundary; Z_p) = H_1(M; Z_p) + H_1(M; Z_p) for all primes p";
const char* kFeasiblePk = "|H_1(boundary) (x) Z/p^k| = |H_1(M) (x) Z/p^k|^2 for all prime powers p^k";
const char* kExact = "exact at a node: image of the incoming map = kernel of the outgoing map";
const char* kCopies = "the direct sum of the cokernels over disjoint copies injects into H_i of the ambient manifold";
}  // namespace anchors

class Runner {
public:
  Runner(const Options& o, const RunConfig& cfg) : o_(o), cfg_(cfg) {}

  json run(const std::string& cmd) {
    json r;
    std::vector<std::string> anchors;
    if (cmd == "select") {
      SpaceDocument doc = load_space_file(o_.space);
      SelectionParams params;
      params.y0 = point_index(doc.space, o_.start);
      params.lemma_choice = o_.lemma;
      params.a0 = o_.a0;
      if (!o_.lemma && !(o_.a0 > 0.0)) throw ValidationError("select needs --a0 REAL > 0 or --lemma");
      SelectionCertificate cert = select_point(doc.space, doc.field, params);
      r["certificate"] = to_json(doc.space, cert);
      r["verification"] = to_json(verify_certificate(doc.space, doc.field, params, cert));
      r["iteration_bound"] = iteration_bound(cert.p0, doc.field.max());
      anchors = {anchors::kChain, anchors::kDist, anchors::kBall};
    } else if (cmd == "sequence") {
      SpaceDocument doc = load_space_file(o_.space);
      std::vector<std::size_t> starts;
      for (const auto& id : split_csv(o_.starts)) starts.push_back(point_index(doc.space, id));
      if (starts.empty()) throw ValidationError("--starts lists no points");
      auto certs = select_sequence(doc.space, doc.field, starts, o_.parallel);
      json items = json::array();
      bool all_in = true;
      for (std::size_t i = 0; i < certs.size(); ++i) {
        SelectionParams params;
        params.y0 = starts[i];
        params.lemma_choice = true;
        const double d = doc.space.dist(starts[i], certs[i].x0);
        all_in = all_in && d < 2.0 / 3.0;
        items.push_back({{"y", doc.space.id(starts[i])},
                         {"certificate", to_json(doc.space, certs[i])},
                         {"verification", to_json(verify_certificate(doc.space, doc.field, params, certs[i]))},
                         {"d_x_y", d},
                         {"x_in_ball_2_3", d < 2.0 / 3.0}});
      }
      r["sequence"] = std::move(items);
      r["all_in_ball_2_3"] = all_in;
      anchors = {anchors::kSeq, anchors::kChain, anchors::kDist, anchors::kBall};
    } else if (cmd == "growth") {
      SpaceDocument doc = load_space_file(o_.space);
      if (o_.model == "bounded") {
        r["fit"] = to_json(doc.space, fit_bounded(doc.field));
        anchors = {anchors::kBounded};
      } else {
        r["fit"] = to_json(doc.space, fit_quadratic(doc.space, base_of(doc, o_.base), doc.field));
        anchors = {anchors::kQuadratic};
      }
    } else if (cmd == "blowup") {
      SpaceDocument doc = load_space_file(o_.space);
      BlowupMode mode = o_.mode == "scale" ? BlowupMode::scale_invariant : BlowupMode::absolute;
      r["candidates"] = to_json(doc.space, blowup_candidates(doc.space, base_of(doc, o_.base), doc.field, mode, o_.k));
      anchors = {anchors::kBlowup, anchors::kSeq};
    } else if (cmd == "shi") {
      SpaceDocument doc = load_space_file(o_.space);
      if (!doc.sample) throw ValidationError("space document carries no soliton data");
      r["shi"] = to_json(shi_admissible_radius(*doc.sample, doc.space, point_index(doc.space, o_.point)));
      r["point"] = o_.point;
      anchors = {anchors::kShi};
    } else if (cmd == "audit") {
      SpaceDocument doc = load_space_file(o_.space);
      if (!doc.sample) throw ValidationError("space document carries no soliton data");
      AuditReport rep = audit_soliton_identities(*doc.sample, doc.space, cfg_.tolerance);
      r["audit"] = to_json(rep);
      for (const auto& c : rep.clauses) anchors.push_back(c.anchor);
    } else if (cmd == "kappa") {
      SpaceDocument doc = load_space_file(o_.space);
      r["kappa"] = to_json(doc.space, check_noncollapsing(doc.sample.value_or(SolitonSample{}), doc.space, doc.field,
                                                           o_.kappa));
      anchors = {anchors::kKappa};
    } else if (cmd == "snf") {
      IntMatrix m = matrix_from_json(read_json_file(o_.matrix));
      SmithForm s = smith_normal_form(m);
      json diag = json::array();
      for (std::size_t i = 0; i < s.rank; ++i) diag.push_back(to_json(s.d(i, i)));
      r["u"] = to_json(s.u);
      r["d"] = to_json(s.d);
      r["v"] = to_json(s.v);
      r["rank"] = s.rank;
      r["diagonal"] = std::move(diag);
      r["cokernel"] = to_json(group_from_relations(m));
      anchors = {anchors::kSnf};
    } else if (cmd == "group") {
      json doc = read_json_file(o_.relations);
      FgAbelianGroup g = doc.is_object() && doc.contains("entries") ? group_from_relations(matrix_from_json(doc))
                                                                    : group_from_json(doc);
      r["group"] = to_json(g);
      anchors = {anchors::kGroup, anchors::kSnf};
    } else if (cmd == "double") {
      FgAbelianGroup g = parse_group_spec(o_.group);
      DirectDouble d = is_direct_double(g);
      r["group"] = to_json(g);
      r["direct_double"] = d.is_double;
      r["half"] = d.half ? to_json(*d.half) : json(nullptr);
      anchors = {anchors::kDouble};
    } else if (cmd == "tensor") {
      FgAbelianGroup g = parse_group_spec(o_.group);
      HomExtDims he = hom_ext_Zp(g, o_.p);
      r["group"] = to_json(g);
      r["p"] = o_.p;
      r["tensor_dim"] = tensor_Zp(g, o_.p);
      r["hom_dim"] = he.hom;
      r["ext_dim"] = he.ext;
      anchors = {anchors::kTensor};
    } else if (cmd == "spaceform") {
      Family fam = family_from_string(o_.family);
      std::vector<SpaceFormGroup> groups;
      if (fam == Family::cyclic || fam == Family::binary_dihedral) {
        if (o_.n > 0) {
          groups.push_back(fam == Family::cyclic ? cyclic_group(o_.n) : binary_dihedral_group(o_.n));
        } else {
          if (o_.max_param == 0) throw ValidationError("--family " + o_.family + " needs --n N or --max-param N");
          groups = catalog(fam, o_.max_param);
        }
      } else {
        groups = catalog(fam, 1);
      }
      json list = json::array();
      for (const auto& g : groups) {
        json j = to_json(g);
        if (o_.oracle) {
          FgAbelianGroup q = quaternion_oracle(g);
          j["oracle_abelianization"] = to_json(q);
          j["oracle_agrees"] = q == abelianization(g);
        }
        list.push_back(std::move(j));
      }
      r["groups"] = std::move(list);
      anchors = {anchors::kAb, anchors::kDouble};
    } else if (cmd == "obstruct") {
      ObstructionVerdict v = obstruction_pipeline(parse_space_form(o_.gamma));
      r["verdict"] = to_json(v);
      anchors = v.anchors();
      if (!o_.trace.empty()) {
        json trace = to_json(v);
        trace["anchors"] = anchors;
        write_file(o_.trace, trace.dump(2) + "\n");
      }
    } else if (cmd == "feasible") {
      r["feasibility"] = to_json(boundary_feasibility(parse_group_spec(o_.group), cfg_.quotient_cap));
      r["quotient_cap"] = cfg_.quotient_cap;
      anchors = {anchors::kFeasible, anchors::kFeasiblePk, anchors::kDouble};
    } else if (cmd == "exact") {
      SequenceSpec seq = sequence_from_json(read_json_file(o_.sequence));
      r["exactness"] = to_json(check_exact(seq));
      anchors = {anchors::kExact, anchors::kSnf};
    } else if (cmd == "copies") {
      FgAbelianGroup amb = parse_group_spec(o_.ambient), cok = parse_group_spec(o_.coker);
      auto n = max_disjoint_copies(amb, cok);
      r["ambient"] = to_json(amb);
      r["coker"] = to_json(cok);
      r["copies"] = n ? json(*n) : json("unbounded");
      anchors = {anchors::kCopies};
    } else if (cmd == "gen") {
      GeneratorParams gp;
      gp.n = o_.n > 0 ? o_.n : gp.n;
      gp.c = o_.c;
      gp.radius = o_.radius;
      gp.field = o_.field;
      gp.shape = o_.shape;
      gp.with_vol = o_.vol;
      // the generated document itself is the report
      return generate_space(generator_kind_from_string(o_.kind), gp, cfg_.seed);
    } else {
      throw ValidationError("unknown subcommand " + cmd);
    }
    r["command"] = cmd;
    r["anchors"] = anchors;
    return r;
  }

private:
  const Options& o_;
  const RunConfig& cfg_;
};

void apply_config_file(const std::string& path, RunConfig& cfg, const CLI::App& app) {
  json j = read_json_file(path);
  if (!j.is_object()) throw ValidationError("config file must be a JSON object");
  auto unset = [&](const char* flag) { return app.count(flag) == 0; };
  if (j.contains("tolerance") && unset("--tol")) cfg.tolerance = j["tolerance"].get<double>();
  if (j.contains("seed") && unset("--seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("quotient_cap") && unset("--cap")) cfg.quotient_cap = j["quotient_cap"].get<std::uint64_t>();
  if (j.contains("output_path") && unset("--out")) cfg.output_path = j["output_path"].get<std::string>();
}

}  // namespace

FgAbelianGroup parse_group_spec(const std::string& spec) {
  if (spec.empty()) throw ValidationError("empty group spec");
  if (looks_like_space_form(spec)) return abelianization(parse_space_form(spec));
  if (spec.front() == '[' || spec.front() == '{') {
    json j;
    try {
      j = json::parse(spec);
    } catch (const json::parse_error& e) {
      throw ValidationError("group spec is not valid JSON: " + std::string(e.what()));
    }
    return group_from_json(j);
  }
  return group_from_json(read_json_file(spec));
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"grs: point selection certificates and homological obstructions"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  RunConfig cfg;
  Options o;
  app.add_option("--config", o.config, "JSON config file (tolerance, seed, quotient_cap, output_path)");
  app.add_option("--tol", cfg.tolerance, "tolerance for float-valued audits")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "seed for generators");
  app.add_option("--cap", cfg.quotient_cap, "quotient enumeration order cap")->check(CLI::Range(std::uint64_t{1}, std::uint64_t(1) << 40));
  app.add_option("--out", cfg.output_path, "write the report here instead of stdout");

  auto* sel = app.add_subcommand("select", "point selection from one start");
  sel->add_option("--space", o.space)->required();
  sel->add_option("--start", o.start)->required();
  sel->add_option("--a0", o.a0);
  sel->add_flag("--lemma", o.lemma, "A0 = P0^(1/2)/3");

  auto* seq = app.add_subcommand("sequence", "point selection with A_i = P_i^(1/2)/3 from several starts");
  seq->add_option("--space", o.space)->required();
  seq->add_option("--starts", o.starts, "ID,ID,...")->required();
  seq->add_flag("--parallel", o.parallel);

  auto* gro = app.add_subcommand("growth", "fit a curvature growth model");
  gro->add_option("--space", o.space)->required();
  gro->add_option("--model", o.model)->check(CLI::IsMember({"bounded", "quadratic"}));
  gro->add_option("--base", o.base);

  auto* blo = app.add_subcommand("blowup", "rank blow-up candidates");
  blo->add_option("--space", o.space)->required();
  blo->add_option("--mode", o.mode)->check(CLI::IsMember({"scale", "abs"}));
  blo->add_option("-k", o.k)->check(CLI::PositiveNumber);
  blo->add_option("--base", o.base);

  auto* shi = app.add_subcommand("shi", "largest admissible derivative-estimate radius");
  shi->add_option("--space", o.space)->required();
  shi->add_option("--point", o.point)->required();

  auto* aud = app.add_subcommand("audit", "audit soliton identities");
  aud->add_option("--space", o.space)->required();

  auto* kap = app.add_subcommand("kappa", "volume noncollapsing check");
  kap->add_option("--space", o.space)->required();
  kap->add_option("--kappa", o.kappa)->required();

  auto* snf = app.add_subcommand("snf", "Smith normal form");
  snf->add_option("--matrix", o.matrix)->required();

  auto* grp = app.add_subcommand("group", "abelian group from relations");
  grp->add_option("--relations", o.relations)->required();

  auto* dbl = app.add_subcommand("double", "direct-double test");
  dbl->add_option("--group", o.group)->required();

  auto* ten = app.add_subcommand("tensor", "G (x) Z_p, Hom and Ext dimensions");
  ten->add_option("--group", o.group)->required();
  ten->add_option("-p", o.p)->required();

  auto* spf = app.add_subcommand("spaceform", "space form group catalog entry");
  spf->add_option("--family", o.family)->required();
  spf->add_option("--n", o.n)->check(CLI::PositiveNumber);
  spf->add_option("--max-param", o.max_param)->check(CLI::PositiveNumber);
  spf->add_flag("--oracle", o.oracle, "cross-check with the quaternion enumeration");

  auto* obs = app.add_subcommand("obstruct", "bounded-copies verdict for a space-form end");
  obs->add_option("--gamma", o.gamma)->required();
  obs->add_option("--trace", o.trace);

  auto* fea = app.add_subcommand("feasible", "boundary feasibility filter");
  fea->add_option("--group", o.group)->required();

  auto* exa = app.add_subcommand("exact", "exactness of a presented sequence");
  exa->add_option("--sequence", o.sequence)->required();

  auto* cop = app.add_subcommand("copies", "maximal number of disjoint copies");
  cop->add_option("--ambient", o.ambient)->required();
  cop->add_option("--coker", o.coker)->required();

  auto* gen = app.add_subcommand("gen", "generate a space document");
  gen->add_option("--kind", o.kind)->required();
  gen->add_option("--n", o.n);
  gen->add_option("--c", o.c);
  gen->add_option("--radius", o.radius);
  gen->add_option("--field", o.field);
  gen->add_option("--shape", o.shape);
  gen->add_flag("--vol", o.vol);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (!o.config.empty()) apply_config_file(o.config, cfg, app);
    if (const char* env = std::getenv("GRS_QUOTIENT_CAP"); env && app.count("--cap") == 0) {
      try {
        cfg.quotient_cap = std::stoull(env);
      } catch (const std::exception&) {
        throw ValidationError(std::string("GRS_QUOTIENT_CAP is not an integer: ") + env);
      }
    }
    require(cfg.tolerance > 0.0, "tolerance must be positive");
    require(cfg.quotient_cap >= 1, "quotient cap must be >= 1");

    const std::string cmd = app.get_subcommands().front()->get_name();
    json report = Runner(o, cfg).run(cmd);
    const std::string text = report.dump(2) + "\n";
    if (cfg.output_path.empty()) out << text;
    else write_file(cfg.output_path, text);
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    err << "error: malformed document: " << e.what() << "\n";
    return 1;
  } catch (const InvariantError& e) {
    err << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace grs
