#pragma once

/// Exact graded commutative algebra.
///
/// A Chart is an ordered list of coordinates with positive integer degrees;
/// parity is degree mod 2. Polynomials are sparse rational linear
/// combinations of normal-form monomials (coordinates in chart order, odd
/// exponents at most one). All arithmetic is exact over GMP rationals and
/// all container iteration is deterministic.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <nlohmann/json.hpp>

namespace qstruct {

using Rat = mpq_class;
using Json = nlohmann::ordered_json;

/// Error for contract violations: malformed input, chart mismatches,
/// degree inconsistencies. Checks that may legitimately fail on valid
/// input report data instead of throwing.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses "p" or "p/q" with optional sign (ASCII '-' or U+2212), q > 0
/// after canonicalization. Rejects decimals and empty input.
Rat rat_parse(const std::string& s);

/// Canonical form: "p" for integers, "p/q" otherwise, q > 0, gcd(p,q)=1.
std::string rat_str(const Rat& r);

struct Coordinate {
  std::string name;
  int degree = 0;
};

/// Immutable ordered coordinate system. Coordinate order fixes the
/// monomial normal form and every deterministic iteration order. Fiber
/// charts require positive degrees; form charts admit degree 0 (even,
/// commuting) for base-form generators such as gauge parameters.
class Chart {
 public:
  explicit Chart(std::vector<Coordinate> coords, bool allow_degree_zero = false);

  std::size_t size() const { return coords_.size(); }
  const Coordinate& coord(std::size_t i) const { return coords_.at(i); }
  const std::string& name(std::size_t i) const { return coords_.at(i).name; }
  int degree(std::size_t i) const { return coords_.at(i).degree; }
  int parity(std::size_t i) const { return coords_.at(i).degree & 1; }
  int max_degree() const { return max_degree_; }

  /// Index of a named coordinate; throws if absent.
  std::size_t index(const std::string& name) const;
  std::optional<std::size_t> find(const std::string& name) const;

  bool operator==(const Chart& o) const;
  bool operator!=(const Chart& o) const { return !(*this == o); }

 private:
  std::vector<Coordinate> coords_;
  std::map<std::string, std::size_t> by_name_;
  int max_degree_ = 0;
};

using ChartPtr = std::shared_ptr<const Chart>;

ChartPtr make_chart(std::vector<Coordinate> coords);

/// Chart admitting degree-0 generators (base-form coefficients).
ChartPtr make_form_chart(std::vector<Coordinate> coords);

/// Dense exponent vector over a chart; entry i is the exponent of
/// coordinate i. Normal form: odd-coordinate exponents are 0 or 1.
using Expo = std::vector<std::uint32_t>;

int expo_degree(const Chart& chart, const Expo& e);
int expo_parity(const Chart& chart, const Expo& e);

/// Result of ordering a word of coordinate factors into normal form.
/// sign is 0 when an odd coordinate repeats, else +1 or -1.
struct NormalForm {
  int sign = 0;
  Expo expo;
};

/// Sorts the word q_{w_1} q_{w_2} ... into chart order, accumulating the
/// Koszul sign of each adjacent transposition of odd factors.
NormalForm normalize(const Chart& chart, const std::vector<std::size_t>& word);

/// Sign picked up when the concatenation of normal monomials a, b is
/// reordered into the normal monomial a+b; 0 if an odd exponent doubles.
int koszul_merge_sign(const Chart& chart, const Expo& a, const Expo& b);

/// Sparse polynomial with exact rational coefficients. Invariants: no
/// stored zero coefficients, all keys in normal form, all keys sized to
/// the chart. A default-constructed Poly is the chartless zero and acts
/// as an additive identity.
class Poly {
 public:
  Poly() = default;
  explicit Poly(ChartPtr chart) : chart_(std::move(chart)) {}

  static Poly zero(ChartPtr chart) { return Poly(std::move(chart)); }
  static Poly constant(ChartPtr chart, const Rat& c);
  static Poly coordinate(ChartPtr chart, std::size_t i);
  static Poly monomial(ChartPtr chart, Expo e, const Rat& c);

  const ChartPtr& chart() const { return chart_; }
  const std::map<Expo, Rat>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }

  /// Adds c times the normal-form monomial e, erasing cancellations.
  void add_term(const Expo& e, const Rat& c);
  Rat coeff(const Expo& e) const;

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Rat& c);

  bool operator==(const Poly& o) const;
  bool operator!=(const Poly& o) const { return !(*this == o); }

  /// True when every monomial has the same total degree (zero counts as
  /// homogeneous of any degree).
  bool is_homogeneous() const;

  /// Total degree of a homogeneous polynomial; nullopt for zero; throws
  /// for inhomogeneous input.
  std::optional<int> homogeneous_degree() const;

  /// Keeps only monomials of the given total degree.
  Poly graded_part(int degree) const;

  /// Keeps only monomials of total degree at most cap (base-dimension cap).
  Poly truncate_above(int cap) const;

  /// Left partial derivative by coordinate i.
  Poly left_derive(std::size_t i) const;

 private:
  ChartPtr chart_;
  std::map<Expo, Rat> terms_;

  friend Poly operator*(const Poly& a, const Poly& b);
};

Poly operator+(Poly a, const Poly& b);
Poly operator-(Poly a, const Poly& b);
Poly operator*(const Poly& a, const Poly& b);
Poly operator*(const Rat& c, Poly p);
Poly operator-(Poly p);

/// Algebra morphism determined by coordinate images. Every image must be
/// zero or homogeneous of its source coordinate's degree, so the result
/// is a degree-preserving morphism of graded algebras.
Poly substitute(const Poly& p, ChartPtr target, const std::vector<Poly>& images);

/// Same-chart morphism fixing every coordinate not listed in images.
Poly substitute_partial(const Poly& p, const std::map<std::size_t, Poly>& images);

/// Deterministic human-readable form, e.g. "-3/2 q1 q3^2 + q2".
std::string poly_str(const Poly& p);

/// Dense exact rational matrix.
class RatMat {
 public:
  RatMat() = default;
  RatMat(std::size_t rows, std::size_t cols);
  static RatMat identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Rat& at(std::size_t r, std::size_t c);
  const Rat& at(std::size_t r, std::size_t c) const;

  RatMat operator*(const RatMat& o) const;
  bool operator==(const RatMat& o) const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Rat> data_;
};

/// Reduced row echelon form with pivot bookkeeping.
struct Rref {
  RatMat mat;
  std::vector<std::size_t> pivot_cols;
  std::size_t rank = 0;
};

Rref rref(RatMat m);

/// Basis of the right kernel {v : Mv = 0} as column vectors, one per
/// free column, in column order.
std::vector<std::vector<Rat>> kernel_basis(const RatMat& m);

/// Indices of pivot columns of m; the corresponding columns of m are a
/// basis of the column space, chosen left to right.
std::vector<std::size_t> image_pivot_columns(const RatMat& m);

/// Inverse of a square matrix; throws Error when singular.
RatMat invert(const RatMat& m);

/// Projection data for R^n modulo the span of given vectors. Kept
/// standard coordinates are the non-pivot columns, in index order; proj
/// maps a vector in R^n to its class in the kept basis.
struct QuotientMap {
  std::vector<std::size_t> kept;
  RatMat proj;
};

QuotientMap quotient_by_span(const std::vector<std::vector<Rat>>& span, std::size_t n);

/// Kernel basis, image pivot columns, and cokernel projection of one map.
struct KernelImageQuotient {
  std::vector<std::vector<Rat>> kernel;
  std::vector<std::size_t> image_pivots;
  QuotientMap cokernel;
};

KernelImageQuotient kernel_image_quotient(const RatMat& m);

/// Chart JSON: {"coordinates":[{"name":"q1","degree":1},...]}.
ChartPtr chart_from_json(const Json& j);
Json chart_to_json(const Chart& chart);

/// Polynomial JSON: [{"coeff":"-3/2","monomial":{"q1":1,"q3":2}},...].
/// Terms with equal monomials accumulate; zero totals drop out.
Poly poly_from_json(const Json& j, ChartPtr chart);
Json poly_to_json(const Poly& p);

}  // namespace qstruct
