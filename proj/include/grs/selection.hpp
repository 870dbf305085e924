#pragma once

// Point selection on a finite metric space: starting from y0, climb to a
// point x0 whose field value Q0 controls the field on a ball of rescaled
// radius A0, emitting a certificate that can be re-checked from scratch.

#include <string>
#include <vector>

#include <json.hpp>

#include "grs/metric.hpp"

namespace grs {

/// Relative margin that turns the strict growth inequalities into
/// floating-point comparisons: a value "strictly exceeds" b when it is
/// larger than b * (1 + kStrictMargin).
inline constexpr double kStrictMargin = 1e-12;

struct SelectionParams {
  std::size_t y0 = 0;
  double a0 = 1.0;
  // When set, A0 = (1/3) * P0^(1/2) and radii are evaluated as
  // sqrt(P0 / O) / 3, which keeps every radius <= 1/3 in floating point.
  bool lemma_choice = false;
};

struct ChainEntry {
  std::size_t point;
  double value;
};

struct SelectionGuarantees {
  bool q_ge_p = false;
  bool dist_ok = false;
  bool ball_ok = false;
};

struct SelectionCertificate {
  std::vector<ChainEntry> chain;  // y_0 ... y_k with O_j = field(y_j)
  std::size_t x0 = 0;
  double q0 = 0.0;
  double p0 = 0.0;
  double a0 = 0.0;
  double radius = 0.0;            // A0 * Q0^(-1/2)
  bool lemma_choice = false;
  SelectionGuarantees guarantees;
};

SelectionCertificate select_point(const MetricSpace& space, const ScalarField& field, const SelectionParams& params);

struct VerificationClause {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerificationReport {
  std::vector<VerificationClause> clauses;
  bool all_pass() const;
  const VerificationClause& clause(const std::string& name) const;
};

/// Re-checks every claim of a certificate by exhaustive scans.
VerificationReport verify_certificate(const MetricSpace& space, const ScalarField& field,
                                      const SelectionParams& params, const SelectionCertificate& cert);

/// One certificate per start, each with A_i = (1/3) P_i^(1/2).
/// With `parallel` set the starts are processed concurrently; the output is
/// identical to the sequential run.
std::vector<SelectionCertificate> select_sequence(const MetricSpace& space, const ScalarField& field,
                                                  const std::vector<std::size_t>& starts, bool parallel = false);

/// floor(log4(pmax / p0)) + 1: the longest chain the growth rule permits.
std::size_t iteration_bound(double p0, double pmax);

nlohmann::json to_json(const MetricSpace& space, const SelectionCertificate& cert);
nlohmann::json to_json(const VerificationReport& report);

}  // namespace grs
