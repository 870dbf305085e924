#include "grs/metric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <queue>
#include <random>

#include "grs/errors.hpp"

namespace grs {

using nlohmann::json;

struct MetricSpace::RowCache {
  explicit RowCache(std::size_t n) : flags(new std::once_flag[n]), rows(n) {}
  std::unique_ptr<std::once_flag[]> flags;
  std::vector<std::vector<double>> rows;
};

MetricSpace::MetricSpace(std::vector<PointId> points, std::vector<Edge> edges)
    : ids_(std::move(points)), edges_(std::move(edges)) {
  require(!ids_.empty(), "space has no points");
  std::sort(ids_.begin(), ids_.end());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (i > 0 && ids_[i] == ids_[i - 1]) throw ValidationError("duplicate point id \"" + ids_[i] + "\"");
    index_.emplace(ids_[i], i);
  }

  adj_.resize(ids_.size());
  for (const Edge& e : edges_) {
    auto ia = index_.find(e.a);
    if (ia == index_.end()) throw ValidationError("unknown point id in edge: \"" + e.a + "\"");
    auto ib = index_.find(e.b);
    if (ib == index_.end()) throw ValidationError("unknown point id in edge: \"" + e.b + "\"");
    if (!(e.len > 0.0) || !std::isfinite(e.len))
      throw ValidationError("nonpositive edge length on edge " + e.a + "-" + e.b);
    adj_[ia->second].push_back({ib->second, e.len});
    adj_[ib->second].push_back({ia->second, e.len});
  }

  // connectivity by BFS from point 0
  std::vector<char> seen(ids_.size(), 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    std::size_t u = stack.back();
    stack.pop_back();
    for (const Neighbor& nb : adj_[u]) {
      if (!seen[nb.to]) {
        seen[nb.to] = 1;
        stack.push_back(nb.to);
      }
    }
  }
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!seen[i]) throw ValidationError("disconnected graph: point \"" + ids_[i] + "\" unreachable from \"" + ids_[0] + "\"");
  }

  cache_ = std::make_shared<RowCache>(ids_.size());
}

std::size_t MetricSpace::index(std::string_view id) const {
  auto it = index_.find(PointId(id));
  if (it == index_.end()) throw ValidationError("unknown point \"" + std::string(id) + "\"");
  return it->second;
}

bool MetricSpace::contains(std::string_view id) const { return index_.count(PointId(id)) != 0; }

std::span<const double> MetricSpace::row(std::size_t from) const {
  if (from >= ids_.size()) throw ValidationError("point index out of range");
  RowCache& cache = *cache_;
  std::call_once(cache.flags[from], [&] {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> d(ids_.size(), inf);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    d[from] = 0.0;
    heap.push({0.0, from});
    while (!heap.empty()) {
      auto [du, u] = heap.top();
      heap.pop();
      if (du > d[u]) continue;
      for (const Neighbor& nb : adj_[u]) {
        double cand = du + nb.len;
        if (cand < d[nb.to]) {
          d[nb.to] = cand;
          heap.push({cand, nb.to});
        }
      }
    }
    cache.rows[from] = std::move(d);
  });
  return cache.rows[from];
}

std::vector<std::size_t> MetricSpace::ball(std::size_t x, double r) const {
  std::span<const double> d = row(x);
  std::vector<std::size_t> out;
  for (std::size_t y = 0; y < d.size(); ++y) {
    if (d[y] < r) out.push_back(y);
  }
  return out;
}

double MetricSpace::diameter() const {
  double best = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    for (double v : row(i)) best = std::max(best, v);
  }
  return best;
}

std::vector<std::vector<double>> MetricSpace::distance_table() const {
  std::vector<std::vector<double>> table;
  table.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    auto r = row(i);
    table.emplace_back(r.begin(), r.end());
  }
  return table;
}

ScalarField::ScalarField(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) throw ValidationError("negative field value");
  }
}

double ScalarField::max() const {
  require(!values_.empty(), "empty field");
  return *std::max_element(values_.begin(), values_.end());
}

ScalarField ScalarField::scaled(double lambda) const {
  std::vector<double> v = values_;
  for (double& x : v) x *= lambda;
  return ScalarField(std::move(v));
}

std::string to_string(SolitonKind kind) { return kind == SolitonKind::steady ? "steady" : "shrinking"; }

SolitonKind soliton_kind_from_string(std::string_view s) {
  if (s == "steady") return SolitonKind::steady;
  if (s == "shrinking") return SolitonKind::shrinking;
  throw ValidationError("unknown soliton kind \"" + std::string(s) + "\"");
}

namespace {

double number_at(const json& node, const char* key, const std::string& id) {
  const json& v = node.at(key);
  if (!v.is_number()) throw ValidationError(std::string("field \"") + key + "\" of node \"" + id + "\" is not a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(std::string("field \"") + key + "\" of node \"" + id + "\" is not finite");
  return x;
}

// Reads an optional per-node field that must be present on all nodes or none.
std::optional<std::vector<double>> optional_column(const json& nodes, const char* key) {
  std::size_t present = 0;
  for (const json& n : nodes) present += n.contains(key) ? 1 : 0;
  if (present == 0) return std::nullopt;
  if (present != nodes.size())
    throw ValidationError(std::string("optional field \"") + key + "\" must be present on all nodes or none");
  std::vector<double> out;
  out.reserve(nodes.size());
  for (const json& n : nodes) out.push_back(number_at(n, key, n.at("id").get<std::string>()));
  return out;
}

}  // namespace

SpaceDocument load_space(const json& doc) {
  if (!doc.is_object()) throw ValidationError("space document must be an object");
  if (!doc.contains("nodes") || !doc["nodes"].is_array()) throw ValidationError("space document lacks a \"nodes\" array");
  const json& nodes_in = doc["nodes"];
  json edges_in = doc.value("edges", json::array());
  if (!edges_in.is_array()) throw ValidationError("\"edges\" must be an array");

  std::vector<PointId> ids;
  for (const json& n : nodes_in) {
    if (!n.is_object() || !n.contains("id") || !n["id"].is_string()) throw ValidationError("node without string \"id\"");
    if (!n.contains("rm")) throw ValidationError("node \"" + n["id"].get<std::string>() + "\" lacks \"rm\"");
    ids.push_back(n["id"].get<std::string>());
  }
  std::vector<Edge> edges;
  for (const json& e : edges_in) {
    if (!e.is_object() || !e.contains("a") || !e.contains("b") || !e.contains("len"))
      throw ValidationError("edge must have \"a\", \"b\", \"len\"");
    if (!e["len"].is_number()) throw ValidationError("edge length is not a number");
    edges.push_back({e["a"].get<std::string>(), e["b"].get<std::string>(), e["len"].get<double>()});
  }

  MetricSpace space(ids, std::move(edges));

  // Reorder node records into index order.
  json nodes = json::array();
  {
    std::vector<const json*> ordered(space.size(), nullptr);
    for (const json& n : nodes_in) ordered[space.index(n["id"].get<std::string>())] = &n;
    for (const json* n : ordered) nodes.push_back(*n);
  }

  std::vector<double> rm;
  for (const json& n : nodes) {
    const std::string id = n["id"].get<std::string>();
    double v = number_at(n, "rm", id);
    if (v < 0.0) throw ValidationError("negative field value at node \"" + id + "\"");
    rm.push_back(v);
  }

  SolitonSample sample;
  sample.f = optional_column(nodes, "f");
  sample.r_scal = optional_column(nodes, "r_scal");
  sample.gradf = optional_column(nodes, "gradf");
  sample.vol = optional_column(nodes, "vol");
  if (sample.gradf) {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if ((*sample.gradf)[i] < 0.0) throw ValidationError("negative gradf at node \"" + space.id(i) + "\"");
  }
  if (sample.vol) {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (!((*sample.vol)[i] > 0.0)) throw ValidationError("nonpositive vol at node \"" + space.id(i) + "\"");
  }
  if (doc.contains("kind")) {
    if (!doc["kind"].is_string()) throw ValidationError("\"kind\" must be a string");
    sample.kind = soliton_kind_from_string(doc["kind"].get<std::string>());
  }

  std::optional<std::size_t> base;
  if (doc.contains("base")) {
    if (!doc["base"].is_string()) throw ValidationError("\"base\" must be a string");
    base = space.index(doc["base"].get<std::string>());
  }

  bool has_sample = sample.kind || sample.f || sample.r_scal || sample.gradf || sample.vol;
  return SpaceDocument{std::move(space), ScalarField(std::move(rm)),
                       has_sample ? std::optional<SolitonSample>(std::move(sample)) : std::nullopt, base};
}

SpaceDocument load_space_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open space file \"" + path + "\"");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed JSON in \"" + path + "\": " + e.what());
  }
  return load_space(doc);
}

json serialize_space(const SpaceDocument& doc) {
  const MetricSpace& space = doc.space;
  json nodes = json::array();
  for (std::size_t i = 0; i < space.size(); ++i) {
    json n = {{"id", space.id(i)}, {"rm", doc.field[i]}};
    if (doc.sample) {
      const SolitonSample& s = *doc.sample;
      if (s.f) n["f"] = (*s.f)[i];
      if (s.r_scal) n["r_scal"] = (*s.r_scal)[i];
      if (s.gradf) n["gradf"] = (*s.gradf)[i];
      if (s.vol) n["vol"] = (*s.vol)[i];
    }
    nodes.push_back(std::move(n));
  }
  json edges = json::array();
  for (const Edge& e : space.edges()) edges.push_back({{"a", e.a}, {"b", e.b}, {"len", e.len}});
  json out = {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
  if (doc.base) out["base"] = space.id(*doc.base);
  if (doc.sample && doc.sample->kind) out["kind"] = to_string(*doc.sample->kind);
  return out;
}

std::vector<std::size_t> ball(const MetricSpace& space, std::size_t x, double r) {
  require(r >= 0.0, "negative ball radius");
  return space.ball(x, r);
}

double sup_on_ball(const MetricSpace& space, const ScalarField& field, std::size_t x, double r) {
  std::vector<std::size_t> b = ball(space, x, r);
  if (b.empty()) throw ValidationError("empty-ball");
  double best = field[b.front()];
  for (std::size_t y : b) best = std::max(best, field[y]);
  return best;
}

GeneratorKind generator_kind_from_string(std::string_view s) {
  if (s == "path") return GeneratorKind::path;
  if (s == "grid2") return GeneratorKind::grid2;
  if (s == "grid4") return GeneratorKind::grid4;
  if (s == "random-geometric") return GeneratorKind::random_geometric;
  if (s == "cone-field") return GeneratorKind::cone_field;
  throw ValidationError("unknown generator kind \"" + std::string(s) + "\"");
}

namespace {

// Platform-independent uniform double in [0, 1).
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Graph {
  std::vector<PointId> ids;
  std::vector<Edge> edges;
};

Graph path_graph(std::size_t n) {
  Graph g;
  for (std::size_t i = 0; i < n; ++i) g.ids.push_back("p" + std::to_string(i));
  for (std::size_t i = 0; i + 1 < n; ++i) g.edges.push_back({g.ids[i], g.ids[i + 1], 1.0});
  return g;
}

Graph grid_graph(std::size_t side, std::size_t dim) {
  require(side >= 1, "grid side must be >= 1");
  std::size_t total = 1;
  for (std::size_t d = 0; d < dim; ++d) total *= side;
  require(total <= 1'000'000, "grid too large");
  auto name = [&](std::size_t flat) {
    std::string s = "g";
    std::vector<std::size_t> coord(dim);
    for (std::size_t d = dim; d-- > 0;) {
      coord[d] = flat % side;
      flat /= side;
    }
    for (std::size_t d = 0; d < dim; ++d) s += (d ? "_" : "") + std::to_string(coord[d]);
    return s;
  };
  Graph g;
  for (std::size_t i = 0; i < total; ++i) g.ids.push_back(name(i));
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t stride = 1;
    for (std::size_t d = 0; d < dim; ++d) {
      std::size_t c = (i / stride) % side;
      if (c + 1 < side) g.edges.push_back({g.ids[i], g.ids[i + stride], 1.0});
      stride *= side;
    }
  }
  return g;
}

Graph random_geometric_graph(std::size_t n, double radius, std::mt19937_64& rng) {
  require(n >= 1, "random-geometric needs n >= 1");
  if (radius <= 0.0) radius = std::min(1.5, 1.8 / std::sqrt(static_cast<double>(n)));
  std::vector<std::pair<double, double>> pts(n);
  for (auto& p : pts) p = {unit(rng), unit(rng)};
  auto euclid = [&](std::size_t i, std::size_t j) {
    return std::max(1e-9, std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second));
  };
  Graph g;
  for (std::size_t i = 0; i < n; ++i) g.ids.push_back("r" + std::to_string(i));

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = euclid(i, j);
      if (d < radius) {
        g.edges.push_back({g.ids[i], g.ids[j], d});
        parent[find(i)] = find(j);
      }
    }
  }
  // Join every stray component to point 0's component through its nearest pair.
  for (std::size_t i = 1; i < n; ++i) {
    if (find(i) == find(0)) continue;
    std::size_t root = find(i);
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t a = 0; a < n; ++a) {
      if (find(a) != root) continue;
      for (std::size_t b = 0; b < n; ++b) {
        if (find(b) == root) continue;
        double d = euclid(a, b);
        if (d < best) best = d, bi = a, bj = b;
      }
    }
    g.edges.push_back({g.ids[bi], g.ids[bj], best});
    parent[find(bi)] = find(bj);
  }
  return g;
}

}  // namespace

json generate_space(GeneratorKind kind, const GeneratorParams& params, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  require(params.n >= 1, "n must be >= 1");
  require(params.field == "random" || params.field == "constant", "field must be \"random\" or \"constant\"");

  Graph g;
  GeneratorKind shape = kind;
  if (kind == GeneratorKind::cone_field) {
    require(params.c > 0.0 && std::isfinite(params.c), "cone coefficient c must be positive");
    shape = generator_kind_from_string(params.shape);
    require(shape != GeneratorKind::cone_field, "cone-field shape cannot be cone-field");
  }
  switch (shape) {
    case GeneratorKind::path: g = path_graph(params.n); break;
    case GeneratorKind::grid2: g = grid_graph(params.n, 2); break;
    case GeneratorKind::grid4: g = grid_graph(params.n, 4); break;
    case GeneratorKind::random_geometric: g = random_geometric_graph(params.n, params.radius, rng); break;
    case GeneratorKind::cone_field: break;
  }

  std::vector<double> rm(g.ids.size());
  if (kind == GeneratorKind::cone_field) {
    MetricSpace space(g.ids, g.edges);
    std::size_t o = space.index(g.ids.front());
    for (std::size_t i = 0; i < g.ids.size(); ++i) {
      double d1 = space.dist(o, space.index(g.ids[i])) + 1.0;
      rm[i] = params.c * (d1 * d1);
    }
  } else if (params.field == "constant") {
    require(params.c >= 0.0, "constant field must be nonnegative");
    std::fill(rm.begin(), rm.end(), params.c);
  } else {
    const double lo = std::log(0.1), hi = std::log(1000.0);
    for (double& v : rm) v = std::exp(lo + (hi - lo) * unit(rng));
  }

  json nodes = json::array();
  for (std::size_t i = 0; i < g.ids.size(); ++i) {
    json n = {{"id", g.ids[i]}, {"rm", rm[i]}};
    if (params.with_vol) n["vol"] = 1.0;
    nodes.push_back(std::move(n));
  }
  json edges = json::array();
  for (const Edge& e : g.edges) edges.push_back({{"a", e.a}, {"b", e.b}, {"len", e.len}});
  json doc = {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
  if (kind == GeneratorKind::cone_field) doc["base"] = g.ids.front();
  return doc;
}

}  // namespace grs
