#pragma once

// Exactness checks for sequences of presented abelian groups, the boundary
// feasibility filter, the disjoint-copies bound and the end-to-end verdict
// for a space-form end.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "grs/abelian.hpp"
#include "grs/space_forms.hpp"

namespace grs {

/// Z^generators / rowspace(relations).
struct PresentedGroup {
  std::size_t generators = 0;
  IntMatrix relations{0, 0};  // rows x generators

  FgAbelianGroup group() const { return group_from_relations(relations); }
  /// One generator per rank summand and invariant factor.
  static PresentedGroup from_group(const FgAbelianGroup& g);
  static PresentedGroup zero() { return {}; }
};

/// Row i of `matrix` is the image of source generator i in target
/// generator coordinates.
struct PresentedMap {
  PresentedGroup source;
  PresentedGroup target;
  IntMatrix matrix;
};

/// Shapes agree and every source relation maps into the target relations.
bool is_well_defined(const PresentedMap& f);

/// v in the row lattice of `gens` (exact, via SNF).
bool in_lattice(const IntMatrix& gens, const std::vector<BigInt>& v);

/// Structure of L / R for row lattices R subset L of Z^n.
FgAbelianGroup lattice_quotient(const IntMatrix& l_gens, const IntMatrix& r_gens);

struct SequenceSpec {
  std::vector<PresentedGroup> terms;
  std::vector<IntMatrix> maps;  // maps[i] : terms[i] -> terms[i+1]

  PresentedMap map(std::size_t i) const { return {terms[i], terms[i + 1], maps[i]}; }
};

/// Throws ValidationError on shape mismatch or an ill-defined map.
void validate(const SequenceSpec& seq);

struct NodeExactness {
  std::size_t node = 0;
  FgAbelianGroup group;
  FgAbelianGroup image;   // of the incoming map
  FgAbelianGroup kernel;  // of the outgoing map
  bool composite_zero = false;
  bool exact = false;
};

struct ExactnessReport {
  std::vector<NodeExactness> nodes;  // interior nodes 1 .. terms-2
  bool exact() const;
};

ExactnessReport check_exact(const SequenceSpec& seq);

struct FeasibilityReport {
  FgAbelianGroup boundary;
  std::size_t quotients_examined = 0;
  /// Quotients Q with |G| = |Q|^2 and dim G(x)Z_p = 2 dim Q(x)Z_p for all p.
  std::vector<FgAbelianGroup> prime_level;
  /// prime_level survivors that also satisfy |G (x) Z/p^k| = |Q (x) Z/p^k|^2
  /// for every prime power.
  std::vector<FgAbelianGroup> feasible;
  bool direct_double = false;
  std::optional<FgAbelianGroup> half;
};

FeasibilityReport boundary_feasibility(const FgAbelianGroup& h1_boundary, std::uint64_t cap = kDefaultQuotientCap);

/// Largest I with coker^I embedded in the ambient group; nullopt means
/// unbounded (coker trivial).
std::optional<std::uint64_t> max_disjoint_copies(const FgAbelianGroup& ambient, const FgAbelianGroup& coker);

enum class Verdict { bounded_copies, inconclusive };
std::string to_string(Verdict v);

struct VerdictStep {
  std::string claim;
  std::string anchor;
  std::string result;
  bool cited = false;  // imported fact rather than a computation
};

struct ObstructionVerdict {
  SpaceFormGroup gamma;
  std::vector<VerdictStep> steps;
  Verdict verdict = Verdict::inconclusive;
  std::vector<std::string> anchors() const;
};

ObstructionVerdict obstruction_pipeline(const SpaceFormGroup& gamma);

PresentedGroup presented_group_from_json(const nlohmann::json& j);
SequenceSpec sequence_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PresentedGroup& g);
nlohmann::json to_json(const ExactnessReport& r);
nlohmann::json to_json(const FeasibilityReport& r);
nlohmann::json to_json(const ObstructionVerdict& v);

}  // namespace grs
