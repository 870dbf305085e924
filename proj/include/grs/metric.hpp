#pragma once

// Finite pointed metric spaces: weighted connected graphs with the
// shortest-path metric, plus the scalar fields that live on them.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace grs {

using PointId = std::string;

struct Edge {
  PointId a;
  PointId b;
  double len = 0.0;
};

/// Connected weighted graph with its shortest-path distance.
///
/// Points are stored in lexicographic id order; every index-based accessor
/// refers to that order. Distance rows are computed on first use (one
/// Dijkstra per source) and cached; the cache is filled under std::call_once
/// so a shared MetricSpace may be queried from several threads.
class MetricSpace {
public:
  MetricSpace(std::vector<PointId> points, std::vector<Edge> edges);

  std::size_t size() const { return ids_.size(); }
  const std::vector<PointId>& points() const { return ids_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const PointId& id(std::size_t i) const { return ids_.at(i); }

  /// Index of a point id; throws ValidationError("unknown point ...").
  std::size_t index(std::string_view id) const;
  bool contains(std::string_view id) const;

  /// Distances from `from` to every point, in index order.
  std::span<const double> row(std::size_t from) const;
  double dist(std::size_t a, std::size_t b) const { return row(a)[b]; }

  /// Open ball {y : dist(x, y) < r}, ascending index order.
  std::vector<std::size_t> ball(std::size_t x, double r) const;

  double diameter() const;
  std::vector<std::vector<double>> distance_table() const;

  struct Neighbor {
    std::size_t to;
    double len;
  };
  const std::vector<Neighbor>& neighbors(std::size_t i) const { return adj_[i]; }

private:
  struct RowCache;

  std::vector<PointId> ids_;
  std::unordered_map<PointId, std::size_t> index_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adj_;
  std::shared_ptr<RowCache> cache_;
};

/// Nonnegative curvature proxy P (standing in for |Rm|), one value per point.
class ScalarField {
public:
  ScalarField() = default;
  explicit ScalarField(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  double max() const;

  ScalarField scaled(double lambda) const;

private:
  std::vector<double> values_;
};

struct PointedSpace {
  const MetricSpace& space;
  std::size_t base;
};

enum class SolitonKind { steady, shrinking };

std::string to_string(SolitonKind kind);
SolitonKind soliton_kind_from_string(std::string_view s);

/// Per-point soliton data. Every optional vector, when present, has one
/// entry per point in index order.
struct SolitonSample {
  std::optional<SolitonKind> kind;
  std::optional<std::vector<double>> f;
  std::optional<std::vector<double>> r_scal;
  std::optional<std::vector<double>> gradf;
  std::optional<std::vector<double>> vol;
};

struct SpaceDocument {
  MetricSpace space;
  ScalarField field;
  std::optional<SolitonSample> sample;
  std::optional<std::size_t> base;
};

/// Parses and validates a space document. Errors name the offending element.
SpaceDocument load_space(const nlohmann::json& doc);
SpaceDocument load_space_file(const std::string& path);

/// Canonical document: nodes in index order, edges in input order.
nlohmann::json serialize_space(const SpaceDocument& doc);

std::vector<std::size_t> ball(const MetricSpace& space, std::size_t x, double r);

/// Max of the field over the open ball; throws ValidationError("empty-ball").
double sup_on_ball(const MetricSpace& space, const ScalarField& field, std::size_t x, double r);

enum class GeneratorKind { path, grid2, grid4, random_geometric, cone_field };

GeneratorKind generator_kind_from_string(std::string_view s);

struct GeneratorParams {
  std::size_t n = 3;               // node count (path, random-geometric) or side length (grids)
  double c = 1.0;                  // cone coefficient, or the constant for field = "constant"
  double radius = 0.0;             // random-geometric connection radius; 0 picks a default
  std::string field = "random";    // "random" | "constant"
  std::string shape = "grid2";     // cone-field underlying graph: path | grid2 | random-geometric
  bool with_vol = false;           // emit vol = 1 on every node
};

/// Deterministic in (kind, params, seed).
nlohmann::json generate_space(GeneratorKind kind, const GeneratorParams& params, std::uint64_t seed);

}  // namespace grs
