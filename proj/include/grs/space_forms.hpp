#pragma once

// Fundamental groups of 3-dimensional spherical space forms realized in
// the unit quaternions: cyclic, binary dihedral and the three binary
// polyhedral groups.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "grs/abelian.hpp"
#include "grs/quaternion.hpp"

namespace grs {

enum class Family { cyclic, binary_dihedral, binary_tetrahedral, binary_octahedral, binary_icosahedral };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

/// An imported (not derived) fact, carried with its statement so traces can
/// tell cited steps from computed ones.
struct FactTag {
  std::string name;
  std::string statement;
};

struct SpaceFormGroup {
  Family family = Family::cyclic;
  std::uint64_t param = 1;  // n for cyclic / binary dihedral, 0 otherwise
  std::uint64_t order = 1;
  IntMatrix relations;      // abelianized presentation, rows = relations
  std::optional<FactTag> b2_lower_bound;
  bool rochlin = false;
  bool flat_end = false;    // trivial group: the end is flat R^4 minus a ball

  /// Short spec string: "Z:5", "Dstar:4", "2T", "2O", "2I".
  std::string name() const;
  bool is_trivial() const { return order == 1; }
};

SpaceFormGroup cyclic_group(std::uint64_t n);
SpaceFormGroup binary_dihedral_group(std::uint64_t n);
SpaceFormGroup binary_tetrahedral_group();
SpaceFormGroup binary_octahedral_group();
SpaceFormGroup binary_icosahedral_group();

/// Parses "Z:5", "Dstar:4", "2T", "2O", "2I".
SpaceFormGroup parse_space_form(const std::string& spec);
bool looks_like_space_form(const std::string& spec);

/// Z_n and D*_n for n <= max_param, then 2T, 2O, 2I; optionally one family.
std::vector<SpaceFormGroup> catalog(std::optional<Family> filter, std::uint64_t max_param);

FgAbelianGroup abelianization(const SpaceFormGroup& g);

/// Generators as exact unit quaternions, and the conductor of their field.
struct QuaternionGenerators {
  unsigned conductor;
  std::vector<Quaternion> generators;
};
QuaternionGenerators quaternion_generators(const SpaceFormGroup& g);

QuaternionGroupTable quaternion_table(const SpaceFormGroup& g);

/// Brute force: closure, commutator subgroup by enumeration, and the
/// quotient's structure read off from its element-order census.
FgAbelianGroup quaternion_oracle(const SpaceFormGroup& g);

/// Abelian group structure of a finite abelian group given by its table,
/// from counts of elements killed by p^k.
FgAbelianGroup abelian_structure_from_census(const std::vector<std::vector<std::uint32_t>>& table,
                                             std::uint32_t identity);

struct DirectDoubleClasses {
  std::vector<SpaceFormGroup> positive;
  std::vector<SpaceFormGroup> negative;
};
DirectDoubleClasses classify_direct_double(const std::vector<SpaceFormGroup>& groups);

nlohmann::json to_json(const FactTag& t);
nlohmann::json to_json(const SpaceFormGroup& g);

}  // namespace grs
