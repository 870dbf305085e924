#pragma once

// Curvature-growth fits, blow-up candidate ranking, derivative-estimate
// scale admissibility, soliton identity audits and volume noncollapsing
// checks, all on finite samples.

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "grs/metric.hpp"
#include "grs/selection.hpp"

namespace grs {

enum class GrowthModel { bounded, quadratic };

struct GrowthFit {
  GrowthModel model;
  double c = 0.0;
  std::size_t witness = 0;
};

/// C = max P; witness = lexicographically first argmax.
GrowthFit fit_bounded(const ScalarField& field);

/// C = max P(x) / (d(x,o) + 1)^2.
GrowthFit fit_quadratic(const MetricSpace& space, std::size_t base, const ScalarField& field);

enum class BlowupMode { scale_invariant, absolute };

struct BlowupEntry {
  std::size_t point;
  double p;
  double ratio;  // P (d(y,o) + 1)^(-2)
};

struct BlowupCandidates {
  BlowupMode mode;
  std::vector<BlowupEntry> entries;
  // Selection certificate per entry (A_i = P_i^(1/2) / 3); empty when P = 0.
  std::vector<std::optional<SelectionCertificate>> certificates;
};

/// Top-k points by ratio (scale-invariant) or by P among points at least the
/// median distance from the base (absolute). Absolute mode may return fewer
/// than k entries.
BlowupCandidates blowup_candidates(const MetricSpace& space, std::size_t base, const ScalarField& field,
                                   BlowupMode mode, std::size_t k);

struct ShiRadius {
  double radius = 0.0;
  double cap = 0.0;
  double sup_gradf = 0.0;   // sup of |grad f| over B_{2r}(p) at the returned r
  double constant = 1.0;    // r <= constant / sup |grad f|; fixed to 1
};

/// Largest r <= cap with sup_{B_{2r}(p)} |grad f| <= 1/r. The candidate set
/// is {d(p,y)/2} u {1/|grad f|(y)} u {1, cap}; it contains the exact
/// supremum over continuous r, so the answer is exact.
ShiRadius shi_admissible_radius(const SolitonSample& sample, const MetricSpace& space, std::size_t p);

struct AuditClause {
  std::string name;
  bool pass = false;
  double max_residual = 0.0;
  std::string anchor;
};

struct AuditReport {
  SolitonKind kind;
  double tol = 0.0;
  std::vector<AuditClause> clauses;
  std::optional<double> steady_constant;  // mean of |grad f|^2 + R (steady only)
  bool all_pass() const;
  const AuditClause& clause(const std::string& name) const;
};

AuditReport audit_soliton_identities(const SolitonSample& sample, const MetricSpace& space, double tol);

struct NoncollapsingViolation {
  std::size_t point;
  double radius;
  double volume;
  double required;
};

struct NoncollapsingReport {
  double kappa = 0.0;
  /// Largest kappa with no violations: min over checked (x, r) of Vol/r^4.
  double kappa_max = std::numeric_limits<double>::infinity();
  std::size_t checked = 0;
  std::vector<NoncollapsingViolation> violations;
};

/// Checks Vol B_{Q^(-1/2)}(x) >= kappa Q^(-2) at every x with Q = P(x) > 0,
/// then Vol B_r(x) >= kappa r^4 at every candidate radius where the field
/// is controlled on the ball (sup_{B_r(x)} P <= r^(-2)).
NoncollapsingReport check_noncollapsing(const SolitonSample& sample, const MetricSpace& space,
                                        const ScalarField& field, double kappa);

std::string to_string(GrowthModel m);
std::string to_string(BlowupMode m);

nlohmann::json to_json(const MetricSpace& space, const GrowthFit& fit);
nlohmann::json to_json(const MetricSpace& space, const BlowupCandidates& b);
nlohmann::json to_json(const ShiRadius& r);
nlohmann::json to_json(const AuditReport& r);
nlohmann::json to_json(const MetricSpace& space, const NoncollapsingReport& r);

}  // namespace grs
