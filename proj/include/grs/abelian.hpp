#pragma once

// Exact arithmetic for finitely generated abelian groups: integer matrices,
// Smith normal form, invariant factors and the group-level tests built on
// them (direct doubles, p-ranks, embeddings of direct powers, quotients).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

namespace grs {

using BigInt = boost::multiprecision::cpp_int;

class IntMatrix {
public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  static IntMatrix identity(std::size_t n);
  static IntMatrix from_rows(const std::vector<std::vector<BigInt>>& rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  BigInt& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  const BigInt& operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

  IntMatrix operator*(const IntMatrix& rhs) const;
  bool operator==(const IntMatrix&) const = default;

  IntMatrix transpose() const;
  /// Rows [begin, end) as a new matrix.
  IntMatrix row_block(std::size_t begin, std::size_t end) const;
  /// This matrix stacked on top of `below` (same column count).
  IntMatrix stacked(const IntMatrix& below) const;

  /// Exact determinant (fraction-free Bareiss elimination); square only.
  BigInt determinant() const;
  bool is_diagonal() const;

  void swap_rows(std::size_t i, std::size_t j);
  void swap_cols(std::size_t i, std::size_t j);
  /// row[dst] += k * row[src]
  void add_row_multiple(std::size_t dst, std::size_t src, const BigInt& k);
  /// col[dst] += k * col[src]
  void add_col_multiple(std::size_t dst, std::size_t src, const BigInt& k);
  void negate_row(std::size_t i);
  void negate_col(std::size_t i);

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<BigInt> a_;
};

struct SmithForm {
  IntMatrix u;      // rows x rows, unimodular
  IntMatrix d;      // rows x cols, diagonal, d_1 | d_2 | ..., nonnegative
  IntMatrix v;      // cols x cols, unimodular
  IntMatrix v_inv;  // inverse of v
  std::size_t rank = 0;  // number of nonzero diagonal entries
};

/// U * m * V = D. Pivot: smallest nonzero absolute value, first in
/// row-major order among equals.
SmithForm smith_normal_form(const IntMatrix& m);

/// Primary decomposition: for each prime, the exponents of its cyclic
/// factors in descending order (a partition).
struct ElementaryDivisors {
  std::map<BigInt, std::vector<unsigned>> by_prime;
  std::size_t multiplicity(const BigInt& p, unsigned e) const;
  bool operator==(const ElementaryDivisors&) const = default;
};

/// Z^rank + Z/d_1 + ... + Z/d_k with d_i >= 2 and d_i | d_{i+1}.
/// Equal values <=> isomorphic groups.
class FgAbelianGroup {
public:
  FgAbelianGroup() = default;

  /// Any list of cyclic orders (0 means Z, 1 is dropped); canonicalized.
  static FgAbelianGroup from_cyclic_orders(std::vector<BigInt> orders, std::size_t rank = 0);
  static FgAbelianGroup from_elementary(const ElementaryDivisors& ed, std::size_t rank = 0);
  static FgAbelianGroup free(std::size_t rank) { return from_cyclic_orders({}, rank); }

  std::size_t rank() const { return rank_; }
  const std::vector<BigInt>& factors() const { return factors_; }
  bool is_finite() const { return rank_ == 0; }
  bool is_trivial() const { return rank_ == 0 && factors_.empty(); }

  ElementaryDivisors elementary_divisors() const;

  /// Direct sum.
  FgAbelianGroup operator+(const FgAbelianGroup& other) const;
  bool operator==(const FgAbelianGroup&) const = default;
  bool operator<(const FgAbelianGroup& other) const;

  std::string to_string() const;

private:
  std::size_t rank_ = 0;
  std::vector<BigInt> factors_;
};

bool is_prime(const BigInt& n);
/// Prime factorization by trial division, ascending primes.
std::vector<std::pair<BigInt, unsigned>> factorize(BigInt n);

/// Cokernel of the relation matrix: Z^cols / rowspace(rel).
FgAbelianGroup group_from_relations(const IntMatrix& rel);

/// dim over Z_p of G (x) Z_p.
std::size_t tensor_Zp(const FgAbelianGroup& g, const BigInt& p);
/// log_p |G (x) Z/p^k| for finite G; rank contributes k each.
std::size_t tensor_Zpk_log(const FgAbelianGroup& g, const BigInt& p, unsigned k);

FgAbelianGroup ext1_torsion(const FgAbelianGroup& g);

struct HomExtDims {
  std::size_t hom;
  std::size_t ext;
};
HomExtDims hom_ext_Zp(const FgAbelianGroup& g, const BigInt& p);

/// Product of invariant factors; nullopt (unbounded) when rank > 0.
std::optional<BigInt> order(const FgAbelianGroup& g);

struct DirectDouble {
  bool is_double = false;
  std::optional<FgAbelianGroup> half;
};
DirectDouble is_direct_double(const FgAbelianGroup& g);

/// Whether A^(+I) embeds in B (both finite).
bool embeds_power(const FgAbelianGroup& a, std::uint64_t copies, const FgAbelianGroup& b);

inline constexpr std::uint64_t kDefaultQuotientCap = 1024;

/// All quotients of a finite group up to isomorphism, sorted by (order, factors).
std::vector<FgAbelianGroup> enumerate_quotients(const FgAbelianGroup& g, std::uint64_t cap = kDefaultQuotientCap);

/// Every finite abelian group of order exactly n, in canonical order.
std::vector<FgAbelianGroup> abelian_groups_of_order(std::uint64_t n);

nlohmann::json to_json(const BigInt& v);
BigInt bigint_from_json(const nlohmann::json& j);
nlohmann::json to_json(const IntMatrix& m);
IntMatrix matrix_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FgAbelianGroup& g);
/// Accepts {"rank", "factors"}, {"generators", "relations"} or a bare list
/// of cyclic orders.
FgAbelianGroup group_from_json(const nlohmann::json& j);

}  // namespace grs
