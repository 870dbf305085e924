#include "grs/abelian.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <sstream>

#include "grs/errors.hpp"

namespace grs {

using nlohmann::json;

// ---------------------------------------------------------------- IntMatrix

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<BigInt>>& rows, std::size_t cols) {
  IntMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == cols, "matrix row " + std::to_string(i) + " has wrong length");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& rhs) const {
  require(cols_ == rhs.rows_, "matrix product: shape mismatch");
  IntMatrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const BigInt& a = (*this)(i, k);
      if (a == 0) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
    }
  return out;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

IntMatrix IntMatrix::row_block(std::size_t begin, std::size_t end) const {
  require(begin <= end && end <= rows_, "row_block out of range");
  IntMatrix out(end - begin, cols_);
  for (std::size_t i = begin; i < end; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(i - begin, j) = (*this)(i, j);
  return out;
}

IntMatrix IntMatrix::stacked(const IntMatrix& below) const {
  require(cols_ == below.cols_, "stacked: column mismatch");
  IntMatrix out(rows_ + below.rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j);
  for (std::size_t i = 0; i < below.rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(rows_ + i, j) = below(i, j);
  return out;
}

BigInt IntMatrix::determinant() const {
  require(rows_ == cols_, "determinant of a non-square matrix");
  const std::size_t n = rows_;
  if (n == 0) return 1;
  IntMatrix m = *this;
  BigInt sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m(p, k) == 0) ++p;
      if (p == n) return 0;
      m.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

bool IntMatrix::is_diagonal() const {
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (i != j && (*this)(i, j) != 0) return false;
  return true;
}

void IntMatrix::swap_rows(std::size_t i, std::size_t j) {
  if (i == j) return;
  for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(i, c), (*this)(j, c));
}

void IntMatrix::swap_cols(std::size_t i, std::size_t j) {
  if (i == j) return;
  for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, i), (*this)(r, j));
}

void IntMatrix::add_row_multiple(std::size_t dst, std::size_t src, const BigInt& k) {
  if (k == 0) return;
  for (std::size_t c = 0; c < cols_; ++c) (*this)(dst, c) += k * (*this)(src, c);
}

void IntMatrix::add_col_multiple(std::size_t dst, std::size_t src, const BigInt& k) {
  if (k == 0) return;
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, dst) += k * (*this)(r, src);
}

void IntMatrix::negate_row(std::size_t i) {
  for (std::size_t c = 0; c < cols_; ++c) (*this)(i, c) = -(*this)(i, c);
}

void IntMatrix::negate_col(std::size_t i) {
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, i) = -(*this)(r, i);
}

// ---------------------------------------------------------------- Smith form

SmithForm smith_normal_form(const IntMatrix& m) {
  const std::size_t r = m.rows(), c = m.cols();
  SmithForm s{IntMatrix::identity(r), m, IntMatrix::identity(c), IntMatrix::identity(c), 0};
  IntMatrix& D = s.d;

  auto row_swap = [&](std::size_t i, std::size_t j) {
    D.swap_rows(i, j);
    s.u.swap_rows(i, j);
  };
  auto col_swap = [&](std::size_t i, std::size_t j) {
    D.swap_cols(i, j);
    s.v.swap_cols(i, j);
    s.v_inv.swap_rows(i, j);
  };
  auto row_add = [&](std::size_t dst, std::size_t src, const BigInt& k) {
    D.add_row_multiple(dst, src, k);
    s.u.add_row_multiple(dst, src, k);
  };
  auto col_add = [&](std::size_t dst, std::size_t src, const BigInt& k) {
    D.add_col_multiple(dst, src, k);
    s.v.add_col_multiple(dst, src, k);
    s.v_inv.add_row_multiple(src, dst, -k);
  };

  for (std::size_t t = 0; t < std::min(r, c); ++t) {
    // global pivot over the trailing submatrix
    std::size_t pi = r, pj = c;
    BigInt best;
    for (std::size_t i = t; i < r; ++i)
      for (std::size_t j = t; j < c; ++j) {
        if (D(i, j) == 0) continue;
        BigInt a = abs(D(i, j));
        if (pi == r || a < best) best = a, pi = i, pj = j;
      }
    if (pi == r) break;
    row_swap(t, pi);
    col_swap(t, pj);

    for (;;) {
      bool dirty = false;
      for (std::size_t i = t + 1; i < r; ++i) {
        if (D(i, t) == 0) continue;
        BigInt q = D(i, t) / D(t, t);
        row_add(i, t, -q);
        if (D(i, t) != 0) dirty = true;
      }
      for (std::size_t j = t + 1; j < c; ++j) {
        if (D(t, j) == 0) continue;
        BigInt q = D(t, j) / D(t, t);
        col_add(j, t, -q);
        if (D(t, j) != 0) dirty = true;
      }
      if (dirty) {
        // a remainder smaller than the pivot survived; promote it
        std::size_t bi = t, bj = t;
        BigInt b = abs(D(t, t));
        for (std::size_t i = t + 1; i < r; ++i)
          if (D(i, t) != 0 && abs(D(i, t)) < b) b = abs(D(i, t)), bi = i, bj = t;
        for (std::size_t j = t + 1; j < c; ++j)
          if (D(t, j) != 0 && abs(D(t, j)) < b) b = abs(D(t, j)), bi = t, bj = j;
        row_swap(t, bi);
        col_swap(t, bj);
        continue;
      }
      bool fixed = false;
      for (std::size_t i = t + 1; i < r && !fixed; ++i)
        for (std::size_t j = t + 1; j < c; ++j)
          if (D(i, j) % D(t, t) != 0) {
            row_add(t, i, 1);
            fixed = true;
            break;
          }
      if (!fixed) break;
    }
    if (D(t, t) < 0) {
      D.negate_row(t);
      s.u.negate_row(t);
    }
    ++s.rank;
  }
  ensure(D.is_diagonal(), "smith_normal_form: result not diagonal");
  return s;
}

// ---------------------------------------------------------------- primes

bool is_prime(const BigInt& n) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0) return false;
  for (BigInt d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

std::vector<std::pair<BigInt, unsigned>> factorize(BigInt n) {
  if (n < 0) n = -n;
  std::vector<std::pair<BigInt, unsigned>> out;
  if (n < 2) return out;
  for (BigInt d = 2; d * d <= n; d += (d == 2 ? 1 : 2)) {
    if (n % d != 0) continue;
    unsigned e = 0;
    while (n % d == 0) n /= d, ++e;
    out.emplace_back(d, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

namespace {

BigInt ipow(const BigInt& p, unsigned e) {
  BigInt r = 1;
  for (unsigned i = 0; i < e; ++i) r *= p;
  return r;
}

unsigned valuation(BigInt n, const BigInt& p) {
  unsigned e = 0;
  while (n != 0 && n % p == 0) n /= p, ++e;
  return e;
}

void require_prime(const BigInt& p) {
  if (!is_prime(p)) throw ValidationError("not a prime: " + p.str());
}

}  // namespace

// ---------------------------------------------------------------- groups

std::size_t ElementaryDivisors::multiplicity(const BigInt& p, unsigned e) const {
  auto it = by_prime.find(p);
  if (it == by_prime.end()) return 0;
  return static_cast<std::size_t>(std::count(it->second.begin(), it->second.end(), e));
}

FgAbelianGroup FgAbelianGroup::from_elementary(const ElementaryDivisors& ed, std::size_t rank) {
  FgAbelianGroup g;
  g.rank_ = rank;
  std::size_t longest = 0;
  for (const auto& [p, part] : ed.by_prime) longest = std::max(longest, part.size());
  std::vector<BigInt> largest_first(longest, BigInt(1));
  for (const auto& [p, part] : ed.by_prime) {
    std::vector<unsigned> sorted = part;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    for (std::size_t i = 0; i < sorted.size(); ++i) largest_first[i] *= ipow(p, sorted[i]);
  }
  for (auto it = largest_first.rbegin(); it != largest_first.rend(); ++it)
    if (*it > 1) g.factors_.push_back(*it);
  return g;
}

FgAbelianGroup FgAbelianGroup::from_cyclic_orders(std::vector<BigInt> orders, std::size_t rank) {
  ElementaryDivisors ed;
  for (BigInt o : orders) {
    if (o < 0) o = -o;
    if (o == 0) {
      ++rank;
      continue;
    }
    for (auto& [p, e] : factorize(o)) ed.by_prime[p].push_back(e);
  }
  return from_elementary(ed, rank);
}

ElementaryDivisors FgAbelianGroup::elementary_divisors() const {
  ElementaryDivisors ed;
  for (const BigInt& d : factors_)
    for (auto& [p, e] : factorize(d)) ed.by_prime[p].push_back(e);
  for (auto& [p, part] : ed.by_prime) std::sort(part.begin(), part.end(), std::greater<>());
  return ed;
}

FgAbelianGroup FgAbelianGroup::operator+(const FgAbelianGroup& other) const {
  std::vector<BigInt> all = factors_;
  all.insert(all.end(), other.factors_.begin(), other.factors_.end());
  return from_cyclic_orders(std::move(all), rank_ + other.rank_);
}

bool FgAbelianGroup::operator<(const FgAbelianGroup& other) const {
  if (rank_ != other.rank_) return rank_ < other.rank_;
  BigInt a = 1, b = 1;
  for (const auto& d : factors_) a *= d;
  for (const auto& d : other.factors_) b *= d;
  if (a != b) return a < b;
  return factors_ < other.factors_;
}

std::string FgAbelianGroup::to_string() const {
  if (is_trivial()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < rank_; ++i) {
    os << (first ? "" : " + ") << "Z";
    first = false;
  }
  for (const BigInt& d : factors_) {
    os << (first ? "" : " + ") << "Z_" << d;
    first = false;
  }
  return os.str();
}

FgAbelianGroup group_from_relations(const IntMatrix& rel) {
  SmithForm s = smith_normal_form(rel);
  std::vector<BigInt> orders;
  for (std::size_t i = 0; i < s.rank; ++i) orders.push_back(s.d(i, i));
  // the cols - rank generators with no surviving relation are free
  return FgAbelianGroup::from_cyclic_orders(std::move(orders), rel.cols() - s.rank);
}

std::size_t tensor_Zp(const FgAbelianGroup& g, const BigInt& p) {
  require_prime(p);
  std::size_t n = g.rank();
  for (const BigInt& d : g.factors()) n += (d % p == 0) ? 1 : 0;
  return n;
}

std::size_t tensor_Zpk_log(const FgAbelianGroup& g, const BigInt& p, unsigned k) {
  require_prime(p);
  std::size_t n = g.rank() * k;
  for (const BigInt& d : g.factors()) n += std::min(valuation(d, p), k);
  return n;
}

FgAbelianGroup ext1_torsion(const FgAbelianGroup& g) { return FgAbelianGroup::from_cyclic_orders(g.factors()); }

HomExtDims hom_ext_Zp(const FgAbelianGroup& g, const BigInt& p) {
  std::size_t all = tensor_Zp(g, p);
  return {all, all - g.rank()};
}

std::optional<BigInt> order(const FgAbelianGroup& g) {
  if (g.rank() > 0) return std::nullopt;
  BigInt n = 1;
  for (const BigInt& d : g.factors()) n *= d;
  return n;
}

DirectDouble is_direct_double(const FgAbelianGroup& g) {
  if (g.rank() % 2 != 0) return {};
  ElementaryDivisors ed = g.elementary_divisors();
  ElementaryDivisors half;
  for (const auto& [p, part] : ed.by_prime) {
    // descending partition: pairs must match at (0,1), (2,3), ...
    if (part.size() % 2 != 0) return {};
    for (std::size_t i = 0; i < part.size(); i += 2) {
      if (part[i] != part[i + 1]) return {};
      half.by_prime[p].push_back(part[i]);
    }
  }
  return {true, FgAbelianGroup::from_elementary(half, g.rank() / 2)};
}

bool embeds_power(const FgAbelianGroup& a, std::uint64_t copies, const FgAbelianGroup& b) {
  if (!a.is_finite() || !b.is_finite()) throw ValidationError("embeds_power: infinite input");
  ElementaryDivisors ea = a.elementary_divisors(), eb = b.elementary_divisors();
  for (const auto& [p, part] : ea.by_prime) {
    const std::vector<unsigned> empty;
    auto it = eb.by_prime.find(p);
    const std::vector<unsigned>& bp = it == eb.by_prime.end() ? empty : it->second;
    for (unsigned e = 1; e <= part.front(); ++e) {
      auto at_least = [e](const std::vector<unsigned>& v) {
        return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [e](unsigned x) { return x >= e; }));
      };
      if (BigInt(copies) * at_least(part) > at_least(bp)) return false;
    }
  }
  return true;
}

namespace {

// Partitions mu with mu_i <= lambda_i for all i (lambda descending).
void sub_partitions(const std::vector<unsigned>& lambda, std::size_t i, unsigned ceiling, std::vector<unsigned>& cur,
                    std::vector<std::vector<unsigned>>& out) {
  if (i == lambda.size()) {
    out.push_back(cur);
    return;
  }
  unsigned top = std::min(ceiling, lambda[i]);
  for (unsigned v = 0; v <= top; ++v) {
    if (v > 0) cur.push_back(v);
    sub_partitions(lambda, i + 1, v, cur, out);
    if (v > 0) cur.pop_back();
  }
}

void partitions_of(unsigned n, unsigned largest, std::vector<unsigned>& cur, std::vector<std::vector<unsigned>>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (unsigned v = std::min(n, largest); v >= 1; --v) {
    cur.push_back(v);
    partitions_of(n - v, v, cur, out);
    cur.pop_back();
  }
}

std::vector<FgAbelianGroup> combine(const std::vector<std::pair<BigInt, std::vector<std::vector<unsigned>>>>& per_prime) {
  std::vector<ElementaryDivisors> acc{ElementaryDivisors{}};
  for (const auto& [p, options] : per_prime) {
    std::vector<ElementaryDivisors> next;
    for (const auto& ed : acc)
      for (const auto& part : options) {
        ElementaryDivisors e = ed;
        if (!part.empty()) e.by_prime[p] = part;
        next.push_back(std::move(e));
      }
    acc = std::move(next);
  }
  std::vector<FgAbelianGroup> out;
  for (const auto& ed : acc) out.push_back(FgAbelianGroup::from_elementary(ed));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<FgAbelianGroup> enumerate_quotients(const FgAbelianGroup& g, std::uint64_t cap) {
  if (!g.is_finite()) throw ValidationError("enumerate_quotients: infinite group");
  if (*order(g) > cap) throw ValidationError("cap exceeded: order " + order(g)->str() + " > " + std::to_string(cap));
  // A finite abelian p-group of type lambda has quotients of exactly the
  // types contained in lambda.
  std::vector<std::pair<BigInt, std::vector<std::vector<unsigned>>>> per_prime;
  for (const auto& [p, lambda] : g.elementary_divisors().by_prime) {
    std::vector<std::vector<unsigned>> subs;
    std::vector<unsigned> cur;
    sub_partitions(lambda, 0, lambda.front(), cur, subs);
    per_prime.emplace_back(p, std::move(subs));
  }
  return combine(per_prime);
}

std::vector<FgAbelianGroup> abelian_groups_of_order(std::uint64_t n) {
  require(n >= 1, "group order must be positive");
  std::vector<std::pair<BigInt, std::vector<std::vector<unsigned>>>> per_prime;
  for (const auto& [p, e] : factorize(BigInt(n))) {
    std::vector<std::vector<unsigned>> parts;
    std::vector<unsigned> cur;
    partitions_of(e, e, cur, parts);
    per_prime.emplace_back(p, std::move(parts));
  }
  return combine(per_prime);
}

// ---------------------------------------------------------------- JSON

json to_json(const BigInt& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
    return json(static_cast<std::int64_t>(v));
  return json(v.str());
}

BigInt bigint_from_json(const json& j) {
  if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
  if (j.is_number_unsigned()) return BigInt(j.get<std::uint64_t>());
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    bool ok = !s.empty();
    for (std::size_t i = 0; i < s.size(); ++i) ok = ok && (std::isdigit(static_cast<unsigned char>(s[i])) || (i == 0 && s[i] == '-' && s.size() > 1));
    if (!ok) throw ValidationError("not an integer: \"" + s + "\"");
    return BigInt(s);
  }
  throw ValidationError("expected an integer, got " + j.dump());
}

json to_json(const IntMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(rows)}};
}

namespace {

IntMatrix rows_to_matrix(const json& entries, std::size_t cols) {
  if (!entries.is_array()) throw ValidationError("matrix entries must be an array of rows");
  std::vector<std::vector<BigInt>> rows;
  for (const json& r : entries) {
    if (!r.is_array()) throw ValidationError("matrix row must be an array");
    std::vector<BigInt> row;
    for (const json& v : r) row.push_back(bigint_from_json(v));
    rows.push_back(std::move(row));
  }
  return IntMatrix::from_rows(rows, cols);
}

}  // namespace

IntMatrix matrix_from_json(const json& j) {
  if (j.is_array()) {
    std::size_t cols = j.empty() ? 0 : j.front().size();
    return rows_to_matrix(j, cols);
  }
  if (!j.is_object() || !j.contains("entries")) throw ValidationError("matrix document needs \"entries\"");
  const json& e = j["entries"];
  std::size_t cols = j.contains("cols") ? j["cols"].get<std::size_t>() : (e.empty() ? 0 : e.front().size());
  IntMatrix m = rows_to_matrix(e, cols);
  if (j.contains("rows") && j["rows"].get<std::size_t>() != m.rows()) throw ValidationError("matrix \"rows\" does not match entries");
  return m;
}

json to_json(const FgAbelianGroup& g) {
  json f = json::array();
  for (const BigInt& d : g.factors()) f.push_back(to_json(d));
  json out = {{"rank", g.rank()}, {"factors", std::move(f)}, {"name", g.to_string()}};
  if (auto o = order(g)) out["order"] = to_json(*o);
  else out["order"] = "unbounded";
  return out;
}

FgAbelianGroup group_from_json(const json& j) {
  if (j.is_array()) {
    std::vector<BigInt> orders;
    for (const json& v : j) orders.push_back(bigint_from_json(v));
    return FgAbelianGroup::from_cyclic_orders(std::move(orders));
  }
  if (!j.is_object()) throw ValidationError("group document must be an object or a list of cyclic orders");
  if (j.contains("relations")) {
    if (!j.contains("generators")) throw ValidationError("relation document needs \"generators\"");
    std::size_t g = j["generators"].get<std::size_t>();
    return group_from_relations(rows_to_matrix(j["relations"], g));
  }
  std::size_t rank = j.value("rank", std::size_t{0});
  std::vector<BigInt> orders;
  if (j.contains("factors"))
    for (const json& v : j["factors"]) {
      BigInt d = bigint_from_json(v);
      if (d < 1) throw ValidationError("invariant factors must be positive");
      orders.push_back(d);
    }
  return FgAbelianGroup::from_cyclic_orders(std::move(orders), rank);
}

}  // namespace grs
