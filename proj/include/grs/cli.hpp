#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "grs/abelian.hpp"

namespace grs {

struct RunConfig {
  double tolerance = 1e-9;
  std::uint64_t seed = 0;
  std::uint64_t quotient_cap = kDefaultQuotientCap;
  std::string output_path;  // empty: standard output
};

/// Group SPEC: a JSON list of cyclic orders ("[4,2]"), a JSON group
/// document, a space-form string ("Z:5", "Dstar:4", "2T", "2O", "2I",
/// meaning its abelianization) or a path to a JSON group document.
FgAbelianGroup parse_group_spec(const std::string& spec);

/// Runs one subcommand. args excludes the program name. Returns the exit
/// status: 0 success, 1 validation or usage error, 2 internal invariant
/// violation. The report goes to `out` unless --out names a file.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace grs
